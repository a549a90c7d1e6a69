#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vegopt::csv {

// Minimal reader for the project's own flat CSV files (no quoting).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws InputError when absent.
  std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);
Table parse(std::string_view text, std::string_view source = "<memory>");

// Throws InputError unless the header matches exactly.
void expect_header(const Table& table, const std::vector<std::string>& header,
                   std::string_view source);

double to_double(std::string_view field, std::string_view what);
long long to_int(std::string_view field, std::string_view what);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);
  Writer& cell(std::string_view s);
  Writer& cell(double v);
  Writer& cell(long long v);
  Writer& cell(int v) { return cell(static_cast<long long>(v)); }
  Writer& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  Writer& cell(bool v) { return cell(std::string_view(v ? "true" : "false")); }
  Writer& end_row();

  const std::string& str() const { return out_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string out_;
};

}  // namespace vegopt::csv
