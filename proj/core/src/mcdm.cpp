#include "vegopt/mcdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vegopt/error.hpp"

namespace vegopt::mcdm {

Matrix normalize_criteria(const Matrix& x) {
  if (x.rows() < 2) throw InputError("criteria matrix needs at least two alternatives");
  Matrix z(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 1; i < x.rows(); ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    if (!(hi > lo)) continue;  // constant column stays 0
    for (std::size_t i = 0; i < x.rows(); ++i) z(i, j) = (x(i, j) - lo) / (hi - lo);
  }
  return z;
}

EntropyWeights weights_from_entropy(std::span<const double> e) {
  EntropyWeights out;
  out.e.assign(e.begin(), e.end());
  out.d.resize(e.size());
  double total = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    out.d[j] = 1.0 - e[j];
    total += out.d[j];
  }
  out.w.resize(e.size());
  for (std::size_t j = 0; j < e.size(); ++j)
    out.w[j] = total > 0.0 ? out.d[j] / total : 1.0 / static_cast<double>(e.size());
  return out;
}

EntropyWeights entropy_weights(const Matrix& z) {
  const auto n = z.rows();
  if (n < 2) throw InputError("entropy weighting needs at least two alternatives");
  const double k = 1.0 / std::log(static_cast<double>(n));
  std::vector<double> e(z.cols(), 1.0);
  for (std::size_t j = 0; j < z.cols(); ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += z(i, j);
    if (!(total > 0.0)) continue;  // no information
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = z(i, j) / total;
      if (p > 0.0) h -= p * std::log(p);
    }
    e[j] = std::clamp(k * h, 0.0, 1.0);
  }
  return weights_from_entropy(e);
}

TopsisResult topsis_scores(const Matrix& z, std::span<const double> w,
                           std::span<const std::string> product_ids) {
  const auto n = z.rows();
  const auto m = z.cols();
  if (w.size() != m) throw InputError("weight count must equal criteria count");
  if (product_ids.size() != n) throw InputError("product id count must equal row count");
  if (n == 0) throw InputError("empty criteria matrix");

  Matrix v(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) v(i, j) = w[j] * z(i, j);

  TopsisResult r;
  r.ideal.assign(m, 0.0);
  r.anti_ideal.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    r.ideal[j] = r.anti_ideal[j] = v(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      r.ideal[j] = std::max(r.ideal[j], v(i, j));
      r.anti_ideal[j] = std::min(r.anti_ideal[j], v(i, j));
    }
  }
  r.scores.resize(n);
  r.d_plus.resize(n);
  r.d_minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sp = 0.0, sm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      sp += (r.ideal[j] - v(i, j)) * (r.ideal[j] - v(i, j));
      sm += (r.anti_ideal[j] - v(i, j)) * (r.anti_ideal[j] - v(i, j));
    }
    r.d_plus[i] = std::sqrt(sp);
    r.d_minus[i] = std::sqrt(sm);
    const double denom = r.d_plus[i] + r.d_minus[i];
    r.scores[i] = denom > 0.0 ? r.d_minus[i] / denom : 0.5;
  }
  r.ranking.resize(n);
  std::iota(r.ranking.begin(), r.ranking.end(), std::size_t{0});
  std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](std::size_t a, std::size_t b) {
    if (r.scores[a] != r.scores[b]) return r.scores[a] > r.scores[b];
    return product_ids[a] < product_ids[b];
  });
  return r;
}

std::vector<std::string> select_top(const TopsisResult& result,
                                    std::span<const std::string> product_ids, std::size_t k) {
  if (k < 1 || k > result.ranking.size())
    throw InputError("top-k must be between 1 and the number of products");
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(product_ids[result.ranking[i]]);
  return out;
}

Ranking rank_products(std::vector<std::string> product_ids, const Matrix& raw_criteria) {
  Ranking r;
  const auto z = normalize_criteria(raw_criteria);
  r.weights = entropy_weights(z);
  r.topsis = topsis_scores(z, r.weights.w, product_ids);
  r.product_ids = std::move(product_ids);
  return r;
}

}  // namespace vegopt::mcdm
