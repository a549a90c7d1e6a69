#include "vegopt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "vegopt/csv.hpp"
#include "vegopt/error.hpp"
#include "vegopt/random.hpp"

namespace vegopt::pipeline {

SeriesFrame SeriesFrame::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > values.size()) throw InputError("slice outside series");
  SeriesFrame out;
  out.product_id = product_id;
  out.start = date_at(offset);
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(offset),
                    values.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return out;
}

double Normalizer::normalize(double x) const {
  if (degenerate()) return 0.0;
  return (x - x_min) / (x_max - x_min);
}

double Normalizer::inverse(double y) const {
  if (degenerate()) return x_min;
  return x_min + y * (x_max - x_min);
}

Normalizer fit_normalizer(std::span<const double> values) {
  if (values.empty()) throw InputError("empty series");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

std::size_t window_count(std::size_t length, WindowShape shape) {
  const auto need = static_cast<std::size_t>(shape.input_days + shape.horizon);
  return length < need ? 0 : length - need + 1;
}

std::vector<WindowSample> make_windows(const SeriesFrame& series, const Normalizer& scaler,
                                       const calendar::TermBoundaryTable& table, WindowShape shape) {
  if (shape.input_days < 1 || shape.horizon < 1) throw InputError("window sizes must be >= 1");
  const auto count = window_count(series.size(), shape);
  if (count == 0) throw InputError("insufficient history");

  std::vector<double> scaled(series.size());
  std::transform(series.values.begin(), series.values.end(), scaled.begin(),
                 [&](double v) { return scaler.normalize(v); });
  // Term codes for every day that can appear in a target.
  const auto first_target = static_cast<std::size_t>(shape.input_days);
  const auto terms = calendar::encode_date_range(
      series.date_at(first_target), static_cast<int>(series.size() - first_target), table);

  const auto in = static_cast<std::size_t>(shape.input_days);
  const auto h = static_cast<std::size_t>(shape.horizon);
  std::vector<WindowSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    WindowSample s;
    s.history.assign(scaled.begin() + static_cast<std::ptrdiff_t>(k),
                     scaled.begin() + static_cast<std::ptrdiff_t>(k + in));
    s.target.assign(scaled.begin() + static_cast<std::ptrdiff_t>(k + in),
                    scaled.begin() + static_cast<std::ptrdiff_t>(k + in + h));
    s.future_terms = Matrix(h, calendar::kEncodingWidth);
    for (std::size_t r = 0; r < h; ++r) {
      const auto src = terms.row(k + r);
      std::copy(src.begin(), src.end(), s.future_terms.row(r).begin());
    }
    s.anchor_date = series.date_at(k + in);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<WindowSample> make_windows(const SeriesFrame& series,
                                       const calendar::TermBoundaryTable& table, WindowShape shape) {
  return make_windows(series, fit_normalizer(series.values), table, shape);
}

// ---------------------------------------------------------------------------

SeriesFrame assemble_series(std::string product_id, std::vector<Observation> observations,
                            std::optional<Date> required_start) {
  if (observations.empty()) throw InputError("no observations for product " + product_id);
  std::stable_sort(observations.begin(), observations.end(),
                   [](const Observation& a, const Observation& b) { return a.date < b.date; });
  if (required_start && observations.front().date > *required_start)
    throw InputError("leading gap in series for product " + product_id);

  SeriesFrame out;
  out.product_id = std::move(product_id);
  out.start = required_start ? std::min(*required_start, observations.front().date)
                             : observations.front().date;
  const auto first = std::find_if(observations.begin(), observations.end(),
                                  [&](const Observation& o) { return o.date >= out.start; });
  double last = 0.0;
  Date cursor = out.start;
  for (auto it = first; it != observations.end();) {
    double total = 0.0;
    int count = 0;
    const Date day = it->date;
    for (; it != observations.end() && it->date == day; ++it) {
      total += it->value;
      ++count;
    }
    // Forward fill up to the next observed day.
    for (; cursor < day; cursor += std::chrono::days(1)) out.values.push_back(last);
    last = total / count;
    out.values.push_back(last);
    cursor = day + std::chrono::days(1);
  }
  return out;
}

namespace {

const std::vector<std::string> kCostHeader{"date", "product_id", "wholesale_cost"};
const std::vector<std::string> kSalesHeader{"date", "product_id", "quantity_kg", "unit_price"};

template <typename Record, typename Value>
std::vector<SeriesFrame> group_series(std::span<const Record> rows, Value value) {
  std::map<std::string, std::vector<Observation>> grouped;
  for (const auto& r : rows) grouped[r.product_id].push_back({r.date, value(r)});
  std::vector<SeriesFrame> out;
  out.reserve(grouped.size());
  for (auto& [id, obs] : grouped) out.push_back(assemble_series(id, std::move(obs)));
  return out;
}

}  // namespace

std::vector<CostRecord> read_costs_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  csv::expect_header(table, kCostHeader, path.string());
  std::vector<CostRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.push_back({calendar::parse_date(row[0]), row[1], csv::to_double(row[2], "wholesale_cost")});
    if (out.back().wholesale_cost < 0) throw InputError("negative wholesale_cost in " + path.string());
  }
  return out;
}

std::vector<SalesRecord> read_sales_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  csv::expect_header(table, kSalesHeader, path.string());
  std::vector<SalesRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.push_back({calendar::parse_date(row[0]), row[1], csv::to_double(row[2], "quantity_kg"),
                   csv::to_double(row[3], "unit_price")});
  }
  return out;
}

void write_costs_csv(const std::filesystem::path& path, std::span<const CostRecord> rows) {
  csv::Writer w(kCostHeader);
  for (const auto& r : rows)
    w.cell(std::string_view(calendar::format_date(r.date))).cell(std::string_view(r.product_id))
        .cell(r.wholesale_cost).end_row();
  w.save(path);
}

void write_sales_csv(const std::filesystem::path& path, std::span<const SalesRecord> rows) {
  csv::Writer w(kSalesHeader);
  for (const auto& r : rows)
    w.cell(std::string_view(calendar::format_date(r.date))).cell(std::string_view(r.product_id))
        .cell(r.quantity_kg).cell(r.unit_price).end_row();
  w.save(path);
}

std::vector<SeriesFrame> cost_series(std::span<const CostRecord> rows) {
  return group_series(rows, [](const CostRecord& r) { return r.wholesale_cost; });
}

std::vector<SeriesFrame> sales_volume_series(std::span<const SalesRecord> rows) {
  // Duplicate days are summed: average * count.
  std::map<std::pair<std::string, Date>, double> totals;
  for (const auto& r : rows) totals[{r.product_id, r.date}] += r.quantity_kg;
  std::map<std::string, std::vector<Observation>> grouped;
  for (const auto& [key, qty] : totals) grouped[key.first].push_back({key.second, qty});
  std::vector<SeriesFrame> out;
  for (auto& [id, obs] : grouped) out.push_back(assemble_series(id, std::move(obs)));
  return out;
}

std::vector<SeriesFrame> sales_price_series(std::span<const SalesRecord> rows) {
  struct Acc {
    double revenue = 0, qty = 0, price_sum = 0;
    int n = 0;
  };
  std::map<std::pair<std::string, Date>, Acc> acc;
  for (const auto& r : rows) {
    auto& a = acc[{r.product_id, r.date}];
    a.revenue += r.unit_price * r.quantity_kg;
    a.qty += r.quantity_kg;
    a.price_sum += r.unit_price;
    ++a.n;
  }
  std::map<std::string, std::vector<Observation>> grouped;
  for (const auto& [key, a] : acc) {
    const double price = a.qty > 0 ? a.revenue / a.qty : a.price_sum / a.n;
    grouped[key.first].push_back({key.second, price});
  }
  std::vector<SeriesFrame> out;
  for (auto& [id, obs] : grouped) out.push_back(assemble_series(id, std::move(obs)));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

std::string product_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%03d", i + 1);
  return buf;
}

}  // namespace

std::vector<CostRecord> SyntheticData::cost_records() const {
  std::vector<CostRecord> out;
  if (costs.empty()) return out;
  const auto days = costs.front().size();
  for (std::size_t t = 0; t < days; ++t)
    for (const auto& s : costs) out.push_back({s.date_at(t), s.product_id, s.values[t]});
  return out;
}

std::vector<SalesRecord> SyntheticData::sales_records() const {
  std::vector<SalesRecord> out;
  if (sales.empty()) return out;
  const auto days = sales.front().size();
  for (std::size_t t = 0; t < days; ++t)
    for (std::size_t p = 0; p < sales.size(); ++p)
      out.push_back({sales[p].date_at(t), sales[p].product_id, sales[p].values[t], prices[p].values[t]});
  return out;
}

SyntheticData generate_synthetic(int product_count, int days, std::uint64_t seed,
                                 const calendar::TermBoundaryTable& table, Date start) {
  if (product_count < 1) throw InputError("product_count must be >= 1");
  if (days < 30) throw InputError("synthetic series need at least 30 days");

  std::vector<int> term_index(static_cast<std::size_t>(days));
  for (int t = 0; t < days; ++t)
    term_index[static_cast<std::size_t>(t)] = calendar::term_of_date(start + std::chrono::days(t), table).index();

  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  SyntheticData data;
  for (int p = 0; p < product_count; ++p) {
    auto rng = make_rng(seed, "synthetic", static_cast<std::uint64_t>(p));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto id = product_name(p);
    const double base = 2.0 + 10.0 * u01(rng);
    const double amplitude = base * (0.25 + 0.25 * u01(rng));
    const double phase1 = kTwoPi * u01(rng);
    const double phase2 = kTwoPi * u01(rng);
    const double markup = 1.3 + 0.5 * u01(rng);
    const double level = 5.0 + 35.0 * u01(rng);       // mean daily kg
    const double elasticity = 0.8 + 1.2 * u01(rng);   // relative demand swing
    const double typical_price = base * markup;
    const double slope = elasticity * level / typical_price;
    const double intercept = level + slope * typical_price;

    // Seasonal cost offset for each solar term.
    std::array<double, calendar::kTermCount> profile{};
    for (int k = 0; k < calendar::kTermCount; ++k) {
      const double x = kTwoPi * k / calendar::kTermCount;
      profile[static_cast<std::size_t>(k)] =
          amplitude * (std::sin(x + phase1) + 0.5 * std::sin(2.0 * x + phase2)) / 1.5;
    }

    SeriesFrame cost{id, start, {}}, price{id, start, {}}, sales{id, start, {}};
    double ar = 0.0;
    for (int t = 0; t < days; ++t) {
      ar = 0.3 * ar + 0.03 * base * gauss(rng);
      const double c = std::max(0.1 * base, base + profile[static_cast<std::size_t>(term_index[static_cast<std::size_t>(t)])] + ar);
      const double pr = std::max(0.05, c * markup * (1.0 + 0.02 * gauss(rng)));
      const double q = std::max(0.0, intercept - slope * pr + 0.1 * level * gauss(rng));
      cost.values.push_back(round_to(c, 1e4));
      price.values.push_back(round_to(pr, 1e4));
      sales.values.push_back(round_to(q, 1e3));
    }
    data.costs.push_back(std::move(cost));
    data.prices.push_back(std::move(price));
    data.sales.push_back(std::move(sales));
    data.truth.push_back({id, intercept, slope, base});
  }
  return data;
}

}  // namespace vegopt::pipeline
