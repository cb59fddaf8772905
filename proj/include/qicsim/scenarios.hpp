#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qicsim/channel.hpp"
#include "qicsim/qic.hpp"

namespace qicsim {

/// Sender R_A = 1 at the origin (t = 0, lambda_A = 1) and receivers
/// B1 (0, 0.9), B2 (1.1, 2.9), B3 (3.1, 4) at t = 2 with lambda = 0.2.
ChannelScenario table1_scenario(Dim d);

/// One Gaussian generator, sigma = 0.2, at the origin and t = 0.
std::vector<Generator> single_qic_scenario(Dim d);

/// Three Gaussian generators, sigma = 0.2, at t_i = i and x_i = 5 + 1.5 i.
std::vector<Generator> shockwave_scenario(Dim d);

struct ScenarioPreset {
  std::string name;
  Dim dim = Dim::three;
  std::vector<Generator> generators;
  std::optional<ChannelScenario> channel;
  std::vector<double> times;
  GridSpec grid;
};

/// Named presets: "table1", "single", "shockwave". Throws ConfigError for
/// any other name.
ScenarioPreset preset(std::string_view name, Dim d);
const std::vector<std::string>& preset_names();

/// Line-oriented text listing every parameter of a preset with 17
/// significant digits.
std::string canonical_serialization(const ScenarioPreset& p);
/// 64-bit FNV-1a of the canonical serialization.
std::uint64_t preset_hash(const ScenarioPreset& p);

}  // namespace qicsim
