#include "vegopt/neuralcore/params_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vegopt/csv.hpp"
#include "vegopt/error.hpp"

namespace vegopt::neuralcore {

std::string serialize_params(const ParamSet& params) {
  std::string out;
  char buf[64];
  for (const auto& [name, v] : params) {
    out += name;
    out += ',' + std::to_string(v.rows()) + 'x' + std::to_string(v.cols());
    for (double x : v.value().data()) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
      if (ec != std::errc()) throw InvariantError("parameter formatting failed");
      out += ',';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void deserialize_params(std::string_view text, const ParamSet& params) {
  std::size_t pos = 0;
  for (const auto& [name, v] : params) {
    if (pos >= text.size()) throw InputError("parameter file ends before '" + name + "'");
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2 || fields[0] != name)
      throw InputError("parameter file: expected tensor '" + name + "'");
    const std::string shape = std::to_string(v.rows()) + 'x' + std::to_string(v.cols());
    if (fields[1] != shape)
      throw InputError("parameter file: shape mismatch for '" + name + "'");
    if (fields.size() - 2 != v.value().size())
      throw InputError("parameter file: value count mismatch for '" + name + "'");
    Value target = v;
    for (std::size_t i = 0; i < target.value().size(); ++i) {
      const auto f = fields[i + 2];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), target.value()[i]);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw InputError("parameter file: bad number in '" + name + "'");
    }
  }
}

void save_params(const std::filesystem::path& path, const ParamSet& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << serialize_params(params);
}

void load_params(const std::filesystem::path& path, const ParamSet& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  deserialize_params(text.str(), params);
}

}  // namespace vegopt::neuralcore
