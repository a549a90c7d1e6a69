#include "vegopt/demand.hpp"

#include <algorithm>

#include "vegopt/error.hpp"

namespace vegopt::demand {

DemandCurve fit_demand(std::span<const double> prices, std::span<const double> volumes,
                       std::string product_id) {
  if (prices.size() != volumes.size()) throw InputError("prices and volumes differ in length");
  if (prices.size() < 3) throw InputError("demand fit needs at least 3 observations");
  const auto n = static_cast<double>(prices.size());
  double mp = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    mp += prices[i];
    mv += volumes[i];
  }
  mp /= n;
  mv /= n;
  double spp = 0.0, spv = 0.0, svv = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    const double dp = prices[i] - mp;
    const double dv = volumes[i] - mv;
    spp += dp * dp;
    spv += dp * dv;
    svv += dv * dv;
  }
  if (spp == 0.0) throw InputError("degenerate regressor");

  DemandCurve c;
  c.product_id = std::move(product_id);
  c.slope = spv / spp;
  c.intercept = mv - c.slope * mp;
  c.n_points = static_cast<int>(prices.size());
  // A flat response explains nothing; r² is 0 by convention.
  c.r_squared = svv == 0.0 ? 0.0 : std::clamp(spv * spv / (spp * svv), 0.0, 1.0);
  return c;
}

double volume_at(const DemandCurve& curve, double price) {
  if (!(price > 0.0)) throw InputError("price must be > 0");
  return std::max(0.0, curve.intercept + curve.slope * price);
}

}  // namespace vegopt::demand
