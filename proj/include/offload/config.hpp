#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offload/equilibrium.hpp"
#include "offload/experiments.hpp"
#include "offload/population.hpp"
#include "offload/pricing.hpp"

namespace offload {

/// Named population sizes: "full" (31 x 1000) and "desk" (8 x 200).
void apply_scale_preset(ScenarioSpec& spec, std::string_view preset);

/// Everything a YAML scenario file can carry. Only the scenario is mandatory.
struct RunConfig {
  ScenarioSpec scenario;
  SolverOptions solver;
  /// 0 uses model.capacity_per_cell as is; see SweepSpec::saturation_ratio.
  double saturation_ratio = 0.0;
  /// Fixed prices to evaluate; when absent `solve` optimizes `schemes`.
  std::optional<PricingScheme> pricing;
  std::vector<SchemeFamily> schemes = {SchemeFamily::flat, SchemeFamily::volume};
  std::optional<SweepSpec> sweep;
};

/// Parse YAML text; relative file references resolve against base_dir.
RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace offload
