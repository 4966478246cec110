#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "l2r/datagen.hpp"
#include "l2r/experiment.hpp"
#include "l2r/residual_model.hpp"

namespace l2r {

// Flat "key = value" text; '#' starts a comment, blank lines are ignored.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(const std::string& text);

struct RunConfig {
  GenerationConfig generation;
  TrainConfig train;
  std::vector<double> fractions = kDefaultFractions;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 2024;  // splits, subsampling and pseudo-route sampling
};

// Applies recognised keys over defaults; unknown keys are a ConfigError.
RunConfig run_config_from(const KeyValues& values, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize_run_config(const RunConfig& config);

}  // namespace l2r
