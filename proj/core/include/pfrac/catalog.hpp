#pragma once

#include "pfrac/assembly.hpp"
#include "pfrac/solver.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pfrac {

struct BoundaryCondition {
  enum class Kind { FixedAll, FixedComponent, PrescribedDisp };
  Kind kind = Kind::FixedAll;
  std::string node_set;
  int axis = 0;       ///< 0 = x, 1 = y (FixedComponent / PrescribedDisp)
  double scale = 1.0; ///< value = scale * applied (PrescribedDisp)
};

/// Rigid-connector pin: the loop nodes move as one rigid body about the
/// center. Translations are fixed (or schedule-driven along `axis`); the
/// rotation master stays free.
struct RigidPin {
  std::array<double, 2> center{0.0, 0.0};
  std::string node_set;
  bool driven = false;
  int axis = 1;
  double scale = 1.0;
};

/// Executable description of one benchmark: mesh, material, model, boundary
/// conditions, loading schedule, and the monitored reaction boundary.
struct BenchmarkProblem {
  std::string name;
  std::shared_ptr<const Mesh> mesh;
  PhaseFieldModel model;
  LameParams lame;
  FractureParams frac;
  Kinematics kinematics = Kinematics::PlaneStrain;
  std::vector<BoundaryCondition> bcs;
  std::vector<RigidPin> pins;
  StepSchedule schedule;
  double end_displacement = 0.0;
  std::string reaction_set; ///< node set summed for the load output
  int reaction_axis = 1;
  double reaction_sign = 1.0;
  int reaction_pin = -1; ///< when >= 0, the load is read from this pin's master
  std::vector<std::string> notes; ///< modelling assumptions, emitted as metadata
};

/// Per-run parameter overrides; unset fields fall back to the paper tables.
struct CatalogOverrides {
  std::optional<double> length_scale, gc, ft, e0, nu, lambda1, mu;
  std::optional<ModelKind> model;
  std::optional<Softening> softening;
  std::optional<Kinematics> kinematics;
  std::optional<double> band_h; ///< refined-band element size, default l/2 or l/5
  double band_scale = 1.0;      ///< multiplies band box extents (mesh studies)
  double coarse_mult = 10.0;    ///< coarse_h = coarse_mult * band_h
  std::optional<StepSchedule> schedule;
  std::optional<double> end_displacement;
};

BenchmarkProblem build_sent(const CatalogOverrides& ov = {});
BenchmarkProblem build_sens(const CatalogOverrides& ov = {});
BenchmarkProblem build_notched_hole(const CatalogOverrides& ov = {});
BenchmarkProblem build_tpb(const CatalogOverrides& ov = {});
BenchmarkProblem build_lpanel(const CatalogOverrides& ov = {});

BenchmarkProblem build_benchmark(const std::string& name, const CatalogOverrides& ov = {});
std::vector<std::string> benchmark_names();

/// Canonical table of the five benchmarks' parameters; tests compare this
/// against the checked-in manifest to guard against drift.
std::string manifest_text();

/// Turns a benchmark into the assembled-system description plus the reaction
/// dof list, applying Dirichlet and rigid-pin constraints.
struct Discretized {
  DiscreteProblem prob;
  std::vector<int> reaction_dofs;
  double reaction_sign = 1.0;
};
Discretized discretize(const BenchmarkProblem& bench, Formulation form, double eta);

/// Convenience: discretize + schedule + config ready to run.
Simulation make_simulation(const BenchmarkProblem& bench, const SolverConfig& config);

} // namespace pfrac
