#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

#include "vegopt/matrix.hpp"

namespace vegopt::calendar {

using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);
// Parses YYYY-MM-DD; throws InputError on malformed or invalid dates.
Date parse_date(std::string_view iso);
std::string format_date(Date d);

inline constexpr int kTermCount = 24;
inline constexpr int kSeasonCount = 4;
inline constexpr int kTermsPerSeason = 6;
inline constexpr int kEncodingWidth = kSeasonCount + kTermsPerSeason;

/// One of the 24 solar terms, indexed from Li Chun (start of spring).
class SolarTerm {
 public:
  constexpr SolarTerm() = default;
  // Throws InputError when index is outside 0..23.
  explicit SolarTerm(int index);

  int index() const { return index_; }
  int season() const { return index_ / kTermsPerSeason; }
  int position_in_season() const { return index_ % kTermsPerSeason; }
  std::string_view name() const;

  SolarTerm next() const { return SolarTerm((index_ + 1) % kTermCount); }

  friend bool operator==(SolarTerm, SolarTerm) = default;

 private:
  int index_ = 0;
};

// Pinyin names in term order, Li Chun first.
const std::array<std::string_view, kTermCount>& term_names();
// Looks a term up by name, case-insensitive, spaces ignored ("Qing Ming", "qingming").
SolarTerm term_by_name(std::string_view name);

/// Two-block code: bits[0..4) one-hot season, bits[4..10) one-hot position.
using SolarTermVector = std::array<double, kEncodingWidth>;

SolarTermVector encode_term(SolarTerm term);

struct MonthDay {
  unsigned month;
  unsigned day;
  friend auto operator<=>(const MonthDay&, const MonthDay&) = default;
};

/// Start (month, day) of each term, indexed by term. Validated on construction:
/// in term order the dates increase through the year with exactly one wrap.
class TermBoundaryTable {
 public:
  explicit TermBoundaryTable(std::array<MonthDay, kTermCount> starts);

  // The common approximate dates (Li Chun Feb 4 ... Da Han Jan 20).
  static const TermBoundaryTable& default_table();
  // CSV with header term_index,month,day and 24 rows.
  static TermBoundaryTable load_csv(const std::filesystem::path& path);
  static TermBoundaryTable parse_csv(std::string_view text);

  const std::array<MonthDay, kTermCount>& starts() const { return starts_; }

  SolarTerm term_of(MonthDay md) const;

 private:
  std::array<MonthDay, kTermCount> starts_;
  // Term indices sorted by start (month, day) within the calendar year.
  std::array<int, kTermCount> by_calendar_;
};

SolarTerm term_of_date(Date date, const TermBoundaryTable& table = TermBoundaryTable::default_table());

// days×10 matrix; row i encodes the term of start + i days.
Matrix encode_date_range(Date start, int days,
                         const TermBoundaryTable& table = TermBoundaryTable::default_table());

}  // namespace vegopt::calendar
