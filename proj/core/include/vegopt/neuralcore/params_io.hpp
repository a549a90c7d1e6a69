#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "vegopt/neuralcore/layers.hpp"

namespace vegopt::neuralcore {

// Text format, one tensor per line: `name,RxC,v0,v1,...`. Values use the
// shortest decimal form that reads back to the same bits.
std::string serialize_params(const ParamSet& params);
// Overwrites the values of `params` in place; names and shapes must match.
void deserialize_params(std::string_view text, const ParamSet& params);

void save_params(const std::filesystem::path& path, const ParamSet& params);
void load_params(const std::filesystem::path& path, const ParamSet& params);

}  // namespace vegopt::neuralcore
