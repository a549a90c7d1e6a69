#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vegopt/error.hpp"
#include "vegopt/mcdm.hpp"

using namespace vegopt;
using namespace vegopt::mcdm;

namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("P" + std::to_string(100 + i));
  return out;
}

Matrix from_grid(const oracle::Grid& g) {
  Matrix m(g.size(), g.front().size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g[i].size(); ++j) m(i, j) = g[i][j];
  return m;
}

std::vector<std::size_t> ranking_of(const Matrix& raw) {
  return rank_products(ids(raw.rows()), raw).topsis.ranking;
}

}  // namespace

TEST_CASE("normalize_criteria: min-max columns, constant columns and bad shapes") {
  const auto z = normalize_criteria(from_grid({{0, -2, 4}, {5, 0, 4}, {10, 2, 4}}));
  const std::vector<double> expect{0, 0, 0, 0.5, 0.5, 0, 1, 1, 0};
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(z[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  CHECK_THROWS_AS(normalize_criteria(from_grid({{1, 2}})), InputError);
}

TEST_CASE("entropy weights: formula from entropies, symmetry and zero-information columns") {
  const std::vector<double> e{0.957, 0.827};
  const auto w = weights_from_entropy(e);
  const double dsum = (1 - 0.957) + (1 - 0.827);
  CHECK(w.w[0] == doctest::Approx((1 - 0.957) / dsum).epsilon(1e-14));
  CHECK(w.w[1] == doctest::Approx((1 - 0.827) / dsum).epsilon(1e-14));
  CHECK(w.d[1] == doctest::Approx(0.173).epsilon(1e-14));

  const auto same = entropy_weights(normalize_criteria(from_grid({{1, 1}, {3, 3}, {2, 2}, {9, 9}})));
  CHECK(same.w[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(same.w[1] == doctest::Approx(0.5).epsilon(1e-14));

  // second column constant -> all zeros after scaling -> e = 1, weight 0
  const auto z = normalize_criteria(from_grid({{1, 7}, {2, 7}, {4, 7}}));
  const auto zw = entropy_weights(z);
  CHECK(zw.e[1] == 1.0);
  CHECK(zw.w[1] == 0.0);
  CHECK(zw.w[0] == 1.0);
  // hand check for the first column: z = (0, 1/3, 1), p = (0, 1/4, 3/4)
  const double e0 = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75)) / std::log(3.0);
  CHECK(zw.e[0] == doctest::Approx(e0).epsilon(1e-14));

  const auto none = entropy_weights(Matrix(3, 2));
  CHECK(none.w[0] == 0.5);
  CHECK(none.w[1] == 0.5);
}

TEST_CASE("topsis: extreme rows, oracle agreement and selection") {
  const auto pid = ids(4);
  const auto z = normalize_criteria(from_grid({{1, 1}, {4, 9}, {2, 3}, {3, 2}}));
  const auto w = entropy_weights(z);
  const auto r = topsis_scores(z, w.w, pid);
  CHECK(r.scores[1] == 1.0);
  CHECK(r.scores[0] == 0.0);
  CHECK(r.ranking.front() == 1);
  CHECK(r.ranking.back() == 0);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(r.scores[i] == doctest::Approx(r.d_minus[i] / (r.d_plus[i] + r.d_minus[i])).epsilon(1e-15));

  CHECK(select_top(r, pid, 1) == std::vector<std::string>{"P101"});
  const auto all = select_top(r, pid, 4);
  REQUIRE(all.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(all[k] == pid[r.ranking[k]]);
  CHECK_THROWS_AS(select_top(r, pid, 0), InputError);
  CHECK_THROWS_AS(select_top(r, pid, 5), InputError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    oracle::Grid g(5, std::vector<double>(2));
    for (auto& row : g)
      for (auto& x : row) x = u(rng);
    const auto ref = oracle::topsis(g);
    const auto got = rank_products(ids(5), from_grid(g));
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(got.weights.w[j] - ref.weights[j]) <= 1e-9);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(got.topsis.scores[i] - ref.scores[i]) <= 1e-9);
  }
}

TEST_CASE("all-constant criteria score 0.5 and tie-break by id") {
  const std::vector<std::string> pid{"c", "a", "b"};
  const auto got = rank_products(pid, from_grid({{2, 2}, {2, 2}, {2, 2}}));
  for (double s : got.topsis.scores) CHECK(s == 0.5);
  CHECK(got.topsis.ranking == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("exhaustive small matrices over {0, 0.5, 1} match the oracle") {
  const double levels[] = {0.0, 0.5, 1.0};
  for (auto [n, m] : {std::pair{2, 1}, {2, 2}, {3, 2}, {4, 2}, {3, 3}}) {
    const std::size_t cells = static_cast<std::size_t>(n * m);
    std::size_t total = 1;
    for (std::size_t c = 0; c < cells; ++c) total *= 3;
    double worst = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
      oracle::Grid g(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
      std::size_t rest = code;
      for (auto& row : g)
        for (auto& x : row) { x = levels[rest % 3]; rest /= 3; }
      const auto ref = oracle::topsis(g);
      const auto got = rank_products(ids(g.size()), from_grid(g));
      for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(got.topsis.scores[i] - ref.scores[i]));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("weights sum to one and the ranking ignores positive column scaling") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-50.0, 50.0), scale(0.01, 100.0);
  std::uniform_int_distribution<int> rows(2, 12), cols(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    Matrix raw(static_cast<std::size_t>(rows(rng)), static_cast<std::size_t>(cols(rng)));
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = u(rng);
    const auto base = rank_products(ids(raw.rows()), raw);
    const double wsum = std::accumulate(base.weights.w.begin(), base.weights.w.end(), 0.0);
    CHECK(std::abs(wsum - 1.0) <= 1e-12);
    for (double w : base.weights.w) CHECK(w >= 0.0);
    for (double s : base.topsis.scores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }

    Matrix scaled = raw;
    const std::size_t j = static_cast<std::size_t>(rng() % raw.cols());
    const double c = scale(rng);
    for (std::size_t i = 0; i < raw.rows(); ++i) scaled(i, j) *= c;
    CHECK(ranking_of(scaled) == base.topsis.ranking);
  }
}

TEST_CASE("a dominated product that keeps column ranges leaves existing scores unchanged") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 6, m = 2;
    oracle::Grid g(n, std::vector<double>(m));
    for (auto& row : g)
      for (auto& x : row) x = u(rng);
    // row 0 becomes the column-wise minimum; the new row duplicates it
    for (std::size_t j = 0; j < m; ++j) {
      double lo = g[0][j];
      for (const auto& row : g) lo = std::min(lo, row[j]);
      g[0][j] = lo - 1.0;
    }
    const auto before = rank_products(ids(n), from_grid(g));
    auto bigger = g;
    bigger.push_back(g[0]);
    const auto after = rank_products(ids(n + 1), from_grid(bigger));
    // identical column ranges keep z unchanged; entropy changes with n, so
    // compare TOPSIS under the original weights
    const auto z = normalize_criteria(from_grid(bigger));
    const auto rescored = topsis_scores(z, before.weights.w, ids(n + 1));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rescored.scores[i] - before.topsis.scores[i]) <= 1e-12);
    CHECK(after.topsis.scores.size() == n + 1);
  }
}

TEST_CASE("61 products, top 32 are unique") {
  std::mt19937_64 rng(17);
  std::lognormal_distribution<double> profit(6.0, 1.0), volume(7.0, 0.8);
  Matrix raw(61, 2);
  for (std::size_t i = 0; i < 61; ++i) {
    raw(i, 0) = profit(rng);
    raw(i, 1) = volume(rng);
  }
  const auto pid = ids(61);
  const auto r = rank_products(pid, raw);
  const auto top = select_top(r.topsis, pid, 32);
  CHECK(top.size() == 32);
  CHECK(std::set<std::string>(top.begin(), top.end()).size() == 32);
}
