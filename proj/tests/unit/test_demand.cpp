#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "vegopt/demand.hpp"
#include "vegopt/error.hpp"

using namespace vegopt;
using namespace vegopt::demand;

namespace {

double sse(const std::vector<double>& p, const std::vector<double>& v, double a, double b) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (v[i] - a - b * p[i]) * (v[i] - a - b * p[i]);
  return s;
}

}  // namespace

TEST_CASE("fit_demand: collinear, flat and degenerate inputs") {
  const auto c = fit_demand(std::vector<double>{1, 2, 3}, std::vector<double>{10, 8, 6}, "A");
  CHECK(c.intercept == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(c.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(c.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.n_points == 3);
  CHECK(c.product_id == "A");
  CHECK_FALSE(c.anomalous_slope());

  const auto flat = fit_demand(std::vector<double>{1, 2, 3, 4}, std::vector<double>{5, 5, 5, 5});
  CHECK(flat.intercept == doctest::Approx(5.0));
  CHECK(flat.slope == 0.0);
  CHECK(flat.r_squared == 0.0);
  CHECK(flat.anomalous_slope());

  CHECK_THROWS_WITH_AS(fit_demand(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                       doctest::Contains("degenerate regressor"), InputError);
  CHECK_THROWS_AS(fit_demand(std::vector<double>{1, 2}, std::vector<double>{1, 2}), InputError);
  CHECK_THROWS_AS(fit_demand(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), InputError);
}

TEST_CASE("volume_at clamps at zero and rejects non-positive prices") {
  DemandCurve c{"A", 12.0, -2.0, 1.0, 3};
  CHECK(volume_at(c, 3.0) == doctest::Approx(6.0));
  CHECK(volume_at(c, 7.0) == 0.0);
  DemandCurve flat{"B", 4.5, 0.0, 0.0, 3};
  for (double p : {0.01, 1.0, 99.0}) CHECK(volume_at(flat, p) == 4.5);
  CHECK_THROWS_AS(volume_at(c, 0.0), InputError);
  CHECK_THROWS_AS(volume_at(c, -1.0), InputError);
}

TEST_CASE("OLS residuals sum to zero and the fit is a local SSE minimum") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> price(1.0, 20.0), coef(-3.0, 3.0);
  std::normal_distribution<double> noise(0.0, 2.0);
  std::uniform_int_distribution<int> len(3, 60);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = static_cast<std::size_t>(len(rng));
    const double a = 10.0 * coef(rng), b = coef(rng);
    std::vector<double> p(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = price(rng);
      v[i] = a + b * p[i] + noise(rng);
    }
    const auto c = fit_demand(p, v);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) resid += v[i] - c.intercept - c.slope * p[i];
    CHECK(std::abs(resid) <= 1e-9 * std::max(1.0, static_cast<double>(n)));
    CHECK(c.r_squared >= 0.0);
    CHECK(c.r_squared <= 1.0 + 1e-12);

    const double base = sse(p, v, c.intercept, c.slope);
    for (auto [da, db] : {std::pair{1e-3, 0.0}, {-1e-3, 0.0}, {0.0, 1e-3}, {0.0, -1e-3}})
      CHECK(sse(p, v, c.intercept + da, c.slope + db) >= base);
  }
}

TEST_CASE("recovered slope lies within three standard errors of the truth") {
  const double a_true = 40.0, b_true = -2.5, sigma = 3.0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> price(2.0, 12.0);
    std::normal_distribution<double> noise(0.0, sigma);
    const std::size_t n = 200;
    std::vector<double> p(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = price(rng);
      v[i] = a_true + b_true * p[i] + noise(rng);
    }
    const auto c = fit_demand(p, v);
    double pm = 0.0;
    for (double x : p) pm += x;
    pm /= static_cast<double>(n);
    double sxx = 0.0;
    for (double x : p) sxx += (x - pm) * (x - pm);
    const double s2 = sse(p, v, c.intercept, c.slope) / static_cast<double>(n - 2);
    const double se = std::sqrt(s2 / sxx);
    CHECK(std::abs(c.slope - b_true) <= 3.0 * se);
  }
}
