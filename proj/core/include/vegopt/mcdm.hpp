#pragma once

#include <span>
#include <string>
#include <vector>

#include "vegopt/matrix.hpp"

namespace vegopt::mcdm {

// Column-wise min-max scaling; a constant column becomes all zeros.
// Throws InputError for fewer than two rows.
Matrix normalize_criteria(const Matrix& x);

struct EntropyWeights {
  std::vector<double> e;  // entropy per criterion
  std::vector<double> d;  // information utility 1 - e
  std::vector<double> w;  // weights, sum to 1
};

// Entropy weighting of a normalized n×m matrix. 0·ln 0 is taken as 0, an
// all-zero column has entropy 1, and uniform weights are returned when no
// criterion carries information.
EntropyWeights entropy_weights(const Matrix& z);

// Weights from given entropies (d = 1 - e, w = d / Σd).
EntropyWeights weights_from_entropy(std::span<const double> e);

struct TopsisResult {
  std::vector<double> scores;
  std::vector<double> d_plus;
  std::vector<double> d_minus;
  std::vector<double> ideal;
  std::vector<double> anti_ideal;
  std::vector<std::size_t> ranking;  // row indices by descending score
};

// TOPSIS on the weighted matrix v = w·z. Rows equidistant from nothing
// (ideal == anti-ideal) score 0.5. Ties rank by product id.
TopsisResult topsis_scores(const Matrix& z, std::span<const double> w,
                           std::span<const std::string> product_ids);

// First k product ids of the ranking. Throws InputError unless 1 <= k <= n.
std::vector<std::string> select_top(const TopsisResult& result,
                                    std::span<const std::string> product_ids, std::size_t k);

struct Ranking {
  std::vector<std::string> product_ids;
  EntropyWeights weights;
  TopsisResult topsis;
};

// normalize_criteria -> entropy_weights -> topsis_scores on raw criteria.
Ranking rank_products(std::vector<std::string> product_ids, const Matrix& raw_criteria);

}  // namespace vegopt::mcdm
