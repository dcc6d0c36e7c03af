#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "errmodel/simulate.hpp"

namespace errmodel {

struct DifferentialDesign {
  std::vector<NominalPair> pairs;
  bool round_readings = false;
};

/// A simulation scenario file:
///   {true_value, sources: [...], schedule: {...}, differential: {...}, eps_abs}
/// `schedule` is required unless `differential` is given. With a
/// differential design the first cycle source drives the legs and the others
/// are extra sources.
struct Scenario {
  double true_value_m = 0.0;
  std::vector<ErrorSource> sources;
  std::optional<ConditionSchedule> schedule;
  std::optional<DifferentialDesign> differential;
  double eps_abs = kDefaultEffectThreshold;
};

/// Throws ConfigError whose message starts with the JSON pointer of the
/// offending value.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace errmodel
