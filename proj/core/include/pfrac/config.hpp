#pragma once

#include "pfrac/catalog.hpp"

#include <string>
#include <vector>

namespace pfrac {

/// One run: benchmark selection, formulation, solver knobs, parameter
/// overrides, and output options. Parsed from a flat key=value file.
struct RunConfig {
  std::string benchmark = "sent";
  std::string mesh_path; ///< optional replacement mesh (must carry the benchmark's sets)
  SolverConfig solver;
  CatalogOverrides overrides;
  std::string out_dir = "out";
  int snapshot_every = 0; ///< 0 = final snapshot only
  std::vector<std::string> overlay; ///< reference curves copied next to the outputs
  std::string resume; ///< checkpoint to continue from
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& source_name);

/// Canonical text form; parse_config_text(write_config(c)) reproduces c.
std::string write_config(const RunConfig& config);

std::string format_schedule(const StepSchedule& schedule);
StepSchedule parse_schedule(const std::string& text);

} // namespace pfrac
