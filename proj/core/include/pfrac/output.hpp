#pragma once

#include "pfrac/config.hpp"
#include "pfrac/solver.hpp"

#include <string>

namespace pfrac {

/// %.12g formatting used by every writer; deterministic across runs.
std::string format_sig(double v);

/// Load-displacement CSV: header step,t,u_mm,load_kN,iters,err. The reaction
/// is converted from N to kN here.
void write_ld_csv(const SimulationResult& result, const std::string& path);

/// Legacy ASCII VTK unstructured grid with point data: displacement vector,
/// phi, theta, lambda (LMM only) and the slack gap h - theta^2.
void write_fields(const SystemState& state, const DofMap& dofs, const Mesh& mesh,
                  const std::string& path);

/// Run provenance: every tunable that affects results, plus mesh statistics.
void write_metadata(const RunConfig& config, const DiscreteProblem& prob,
                    const BenchmarkProblem& bench, const SimulationResult& result,
                    const std::string& path);

} // namespace pfrac
