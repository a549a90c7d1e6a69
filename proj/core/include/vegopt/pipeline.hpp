#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vegopt/calendar.hpp"
#include "vegopt/matrix.hpp"

namespace vegopt::pipeline {

using calendar::Date;

/// A gapless daily series for one product.
struct SeriesFrame {
  std::string product_id;
  Date start{};
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  Date date_at(std::size_t i) const { return start + std::chrono::days(static_cast<long>(i)); }
  Date end() const { return date_at(values.size()); }
  // Contiguous sub-series [offset, offset + length).
  SeriesFrame slice(std::size_t offset, std::size_t length) const;
};

/// Min-max scaler.
struct Normalizer {
  double x_min = 0.0;
  double x_max = 0.0;

  // (x - x_min) / (x_max - x_min); a degenerate range maps everything to 0.
  double normalize(double x) const;
  double inverse(double y) const;
  bool degenerate() const { return !(x_max > x_min); }
};

// Throws InputError("empty series") on empty input.
Normalizer fit_normalizer(std::span<const double> values);
inline double normalize(const Normalizer& n, double x) { return n.normalize(x); }
inline double inverse_normalize(const Normalizer& n, double y) { return n.inverse(y); }

struct WindowShape {
  int input_days = 15;
  int horizon = 7;
};

struct WindowSample {
  std::vector<double> history;  // input_days normalized values
  Matrix future_terms;          // horizon × 10
  std::vector<double> target;   // horizon normalized values
  Date anchor_date{};           // first target day
};

// Number of windows a series of `length` days yields (0 when too short).
std::size_t window_count(std::size_t length, WindowShape shape = {});

// One sample per start offset, sliding by one day. Values are scaled with
// `scaler`. Throws InputError("insufficient history") when the series is
// shorter than input_days + horizon.
std::vector<WindowSample> make_windows(const SeriesFrame& series, const Normalizer& scaler,
                                       const calendar::TermBoundaryTable& table =
                                           calendar::TermBoundaryTable::default_table(),
                                       WindowShape shape = {});

// Convenience overload: scaler fitted on the whole series.
std::vector<WindowSample> make_windows(const SeriesFrame& series,
                                       const calendar::TermBoundaryTable& table =
                                           calendar::TermBoundaryTable::default_table(),
                                       WindowShape shape = {});

// ---------------------------------------------------------------------------
// Ingestion

struct Observation {
  Date date;
  double value;
};

// Builds a gapless series from dated observations (any order). Duplicate dates
// are averaged, interior gaps are forward-filled. When `required_start` is set
// and the first observation comes later, throws InputError (leading gap).
SeriesFrame assemble_series(std::string product_id, std::vector<Observation> observations,
                            std::optional<Date> required_start = std::nullopt);

struct SalesRecord {
  Date date;
  std::string product_id;
  double quantity_kg;
  double unit_price;
};

struct CostRecord {
  Date date;
  std::string product_id;
  double wholesale_cost;
};

std::vector<CostRecord> read_costs_csv(const std::filesystem::path& path);
std::vector<SalesRecord> read_sales_csv(const std::filesystem::path& path);
void write_costs_csv(const std::filesystem::path& path, std::span<const CostRecord> rows);
void write_sales_csv(const std::filesystem::path& path, std::span<const SalesRecord> rows);

// Per-product gapless series, products in lexicographic id order.
std::vector<SeriesFrame> cost_series(std::span<const CostRecord> rows);
// Sales quantity per day (summed over duplicate rows).
std::vector<SeriesFrame> sales_volume_series(std::span<const SalesRecord> rows);
// Quantity-weighted unit price per day.
std::vector<SeriesFrame> sales_price_series(std::span<const SalesRecord> rows);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SyntheticProductTruth {
  std::string product_id;
  double demand_intercept;  // a in sales = a - b * price + noise
  double demand_slope;      // b > 0
  double base_cost;
};

struct SyntheticData {
  std::vector<SeriesFrame> costs;
  std::vector<SeriesFrame> sales;
  std::vector<SeriesFrame> prices;
  std::vector<SyntheticProductTruth> truth;

  std::vector<CostRecord> cost_records() const;
  std::vector<SalesRecord> sales_records() const;
};

// Seasonal costs driven by the solar-term index plus AR(1) noise, prices as a
// noisy markup on cost, and linear downward-sloping demand. Values are rounded
// to the precision written to CSV so the in-memory copy equals the files.
// Requires product_count >= 1 and days >= 30 (InputError otherwise).
SyntheticData generate_synthetic(int product_count, int days, std::uint64_t seed,
                                 const calendar::TermBoundaryTable& table =
                                     calendar::TermBoundaryTable::default_table(),
                                 Date start = calendar::make_date(2022, 1, 1));

}  // namespace vegopt::pipeline
