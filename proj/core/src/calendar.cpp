#include "vegopt/calendar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <numeric>

#include "vegopt/csv.hpp"
#include "vegopt/error.hpp"

namespace vegopt::calendar {

namespace {

constexpr std::array<std::string_view, kTermCount> kNames = {
    "Li Chun",   "Yu Shui",     "Jing Zhe", "Chun Fen", "Qing Ming", "Gu Yu",
    "Li Xia",    "Xiao Man",    "Mang Zhong", "Xia Zhi", "Xiao Shu", "Da Shu",
    "Li Qiu",    "Chu Shu",     "Bai Lu",   "Qiu Fen",  "Han Lu",    "Shuang Jiang",
    "Li Dong",   "Xiao Xue",    "Da Xue",   "Dong Zhi", "Xiao Han",  "Da Han",
};

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool valid_month_day(MonthDay md) {
  if (md.month < 1 || md.month > 12 || md.day < 1) return false;
  // Leap year so Feb 29 is accepted.
  const auto last = std::chrono::year_month_day_last(
      std::chrono::year{2024}, std::chrono::month_day_last(std::chrono::month{md.month}));
  return md.day <= static_cast<unsigned>(last.day());
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) throw InputError("invalid calendar date");
  return std::chrono::sys_days(ymd);
}

Date parse_date(std::string_view iso) {
  auto bad = [&] { return InputError("invalid ISO date '" + std::string(iso) + "'"); };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw bad();
  int y = 0;
  unsigned m = 0, d = 0;
  auto parse = [&](std::string_view part, auto& out) {
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc() || p != part.data() + part.size()) throw bad();
  };
  parse(iso.substr(0, 4), y);
  parse(iso.substr(5, 2), m);
  parse(iso.substr(8, 2), d);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw bad();
  return std::chrono::sys_days(ymd);
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

SolarTerm::SolarTerm(int index) : index_(index) {
  if (index < 0 || index >= kTermCount)
    throw InputError("solar term index out of range: " + std::to_string(index));
}

std::string_view SolarTerm::name() const { return kNames[static_cast<std::size_t>(index_)]; }

const std::array<std::string_view, kTermCount>& term_names() { return kNames; }

SolarTerm term_by_name(std::string_view name) {
  const auto key = squash(name);
  for (int i = 0; i < kTermCount; ++i)
    if (squash(kNames[static_cast<std::size_t>(i)]) == key) return SolarTerm(i);
  throw InputError("unknown solar term '" + std::string(name) + "'");
}

SolarTermVector encode_term(SolarTerm term) {
  SolarTermVector bits{};
  bits[static_cast<std::size_t>(term.season())] = 1.0;
  bits[static_cast<std::size_t>(kSeasonCount + term.position_in_season())] = 1.0;
  return bits;
}

TermBoundaryTable::TermBoundaryTable(std::array<MonthDay, kTermCount> starts) : starts_(starts) {
  int wraps = 0;
  for (int i = 0; i < kTermCount; ++i) {
    const auto& cur = starts_[static_cast<std::size_t>(i)];
    const auto& nxt = starts_[static_cast<std::size_t>((i + 1) % kTermCount)];
    if (!valid_month_day(cur))
      throw InputError("invalid start date for term " + std::to_string(i));
    if (nxt == cur) throw InputError("two solar terms start on the same day");
    if (nxt < cur) ++wraps;
  }
  if (wraps != 1) throw InputError("solar term starts must increase through the year in term order");
  std::iota(by_calendar_.begin(), by_calendar_.end(), 0);
  std::sort(by_calendar_.begin(), by_calendar_.end(), [this](int a, int b) {
    return starts_[static_cast<std::size_t>(a)] < starts_[static_cast<std::size_t>(b)];
  });
}

const TermBoundaryTable& TermBoundaryTable::default_table() {
  static const TermBoundaryTable table({{
      {2, 4},  {2, 19},  {3, 6},   {3, 21},  {4, 5},   {4, 20},  // spring
      {5, 6},  {5, 21},  {6, 6},   {6, 21},  {7, 7},   {7, 23},  // summer
      {8, 8},  {8, 23},  {9, 8},   {9, 23},  {10, 8},  {10, 23},  // autumn
      {11, 7}, {11, 22}, {12, 7},  {12, 22}, {1, 6},   {1, 20},  // winter
  }});
  return table;
}

TermBoundaryTable TermBoundaryTable::parse_csv(std::string_view text) {
  const auto table = csv::parse(text, "term boundary table");
  csv::expect_header(table, {"term_index", "month", "day"}, "term boundary table");
  if (table.rows.size() != kTermCount)
    throw InputError("term boundary table needs 24 rows, got " + std::to_string(table.rows.size()));
  std::array<MonthDay, kTermCount> starts{};
  std::array<bool, kTermCount> seen{};
  for (const auto& row : table.rows) {
    const auto idx = csv::to_int(row[0], "term_index");
    if (idx < 0 || idx >= kTermCount || seen[static_cast<std::size_t>(idx)])
      throw InputError("bad or duplicate term_index " + row[0]);
    seen[static_cast<std::size_t>(idx)] = true;
    const auto month = csv::to_int(row[1], "month");
    const auto day = csv::to_int(row[2], "day");
    if (month < 1 || month > 12 || day < 1 || day > 31)
      throw InputError("bad month/day for term_index " + row[0]);
    starts[static_cast<std::size_t>(idx)] = {static_cast<unsigned>(month), static_cast<unsigned>(day)};
  }
  return TermBoundaryTable(starts);
}

TermBoundaryTable TermBoundaryTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_csv(text.str());
}

SolarTerm TermBoundaryTable::term_of(MonthDay md) const {
  // Last term (in calendar order) starting on or before md; dates before the
  // first start of the calendar year belong to the year's final term.
  int found = by_calendar_.back();
  for (int idx : by_calendar_) {
    if (starts_[static_cast<std::size_t>(idx)] <= md)
      found = idx;
    else
      break;
  }
  return SolarTerm(found);
}

SolarTerm term_of_date(Date date, const TermBoundaryTable& table) {
  const std::chrono::year_month_day ymd{date};
  return table.term_of({static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day())});
}

Matrix encode_date_range(Date start, int days, const TermBoundaryTable& table) {
  if (days < 1) throw InputError("encode_date_range needs days >= 1");
  Matrix m(static_cast<std::size_t>(days), kEncodingWidth);
  for (int i = 0; i < days; ++i) {
    const auto bits = encode_term(term_of_date(start + std::chrono::days(i), table));
    std::copy(bits.begin(), bits.end(), m.row(static_cast<std::size_t>(i)).begin());
  }
  return m;
}

}  // namespace vegopt::calendar
