#pragma once

#include <span>
#include <string>

namespace vegopt::demand {

/// Linear daily demand curve volume = a + b·price, clamped at zero.
struct DemandCurve {
  std::string product_id;
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  int n_points = 0;

  // Demand that does not fall as price rises.
  bool anomalous_slope() const { return slope >= 0.0; }
};

// Closed-form OLS of volumes on prices. Throws InputError for fewer than 3
// points, mismatched lengths, or a constant price ("degenerate regressor").
DemandCurve fit_demand(std::span<const double> prices, std::span<const double> volumes,
                       std::string product_id = {});

// max(0, a + b·price). Throws InputError for price <= 0.
double volume_at(const DemandCurve& curve, double price);

}  // namespace vegopt::demand
