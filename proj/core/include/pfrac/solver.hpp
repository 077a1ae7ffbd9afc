#pragma once

#include "pfrac/assembly.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pfrac {

/// Per-field scaling S_j entering the convergence norm weights
/// W_ij = max(|U_ij|, S_j). lambda <= 0 means "derive Gc/l from the problem".
struct FieldScaling {
  double u = 1e-3; ///< mm
  double phi = 1.0;
  double theta = 1.0;
  double lambda = -1.0; ///< N/mm^2; auto when <= 0
};

struct SolverConfig {
  double tol = 1e-4;
  int max_iters = 60;
  FieldScaling scaling;
  double eta = 1e6; ///< penalty parameter, N/mm^2
  Formulation formulation = Formulation::LMM;
  int max_steps = 0;              ///< accepted steps per run; 0 = unlimited
  double end_displacement = 0.0;  ///< stop criterion, mm; 0 = schedule end
  double theta_floor = 1e-2;      ///< slack warm-start floor at step begin
  int max_substeps = 8;           ///< halvings before aborting a step
  double dual_retry_factor = 1e-3; ///< dual feasibility threshold = factor * Gc/l
  int max_reopen_passes = 3000;   ///< slack re-opening / recovery passes per attempt
  /// Snap-back recovery: when increment halving bottoms out at a fold of the
  /// equilibrium path, compute the post-snap state by alternating sector
  /// solves at fixed boundary displacement, then verify it monolithically.
  bool snap_recovery = true;
};

/// Piecewise-constant displacement increment schedule.
struct StepPhase {
  int count = 0;
  double du = 0.0; ///< mm per step
};

struct StepSchedule {
  std::vector<StepPhase> phases;

  double total_displacement() const {
    double s = 0.0;
    for (const auto& p : phases)
      s += p.count * p.du;
    return s;
  }
};

/// Weighted Euclidean norm of the per-field solution updates:
/// err = sqrt(1/M) * sqrt(sum_j (1/N_j) sum_i (|E_ij| / W_ij)^2),
/// W_ij = max(|U_ij|, S_j). Empty fields are skipped and do not count in M.
double error_norm(const std::vector<Eigen::VectorXd>& updates,
                  const std::vector<Eigen::VectorXd>& solution,
                  const std::vector<double>& scaling);

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double final_err = 0.0;
  std::vector<double> err_trace;
};

/// Full Newton iterations on the reduced system at a fixed applied value.
/// Boundary values must already be written into the state. Throws
/// LinearSolveFailure on a singular factorization; non-convergence is
/// reported through the result, not thrown.
NewtonResult newton_step(const DiscreteProblem& prob, SystemState& state,
                         const SolverConfig& config);

/// Same iteration restricted to an arbitrary reduction (used for the
/// sector solves of the snap-back recovery).
NewtonResult newton_on(const DiscreteProblem& prob, SystemState& state,
                       const SolverConfig& config, const Reduction& red);

struct StepRecord {
  int step = 0;
  double t = 0.0;       ///< scheduled-step counter (fractional under sub-stepping)
  double applied = 0.0; ///< mm
  double reaction = 0.0; ///< N, along the driven direction
  int iterations = 0;
  double err = 0.0;
  KktReport kkt;
  bool recovered = false; ///< state came from the snap-back recovery path
};

struct SimulationResult {
  std::vector<StepRecord> records;
  bool completed = true;
  std::string abort_reason;
  long clip_warnings = 0;
  int recovered_steps = 0;
};

struct RunHooks {
  std::function<void(const SystemState&, const StepRecord&)> on_step;
};

/// Owns a discrete problem, its state, and the schedule position, so a run
/// can be stopped (max_steps) and resumed from a checkpoint.
class Simulation {
public:
  Simulation(DiscreteProblem prob, StepSchedule schedule, SolverConfig config,
             std::vector<int> reaction_dofs, double reaction_sign);

  SimulationResult run(const RunHooks& hooks = {});

  const SystemState& state() const { return state_; }
  SystemState& state() { return state_; }
  const DiscreteProblem& problem() const { return prob_; }
  DiscreteProblem& problem() { return prob_; }
  double applied() const { return applied_; }

  void save_checkpoint(const std::string& path) const;
  void restore_checkpoint(const std::string& path);

private:
  struct Attempt {
    bool ok = false;
    StepRecord record;
  };
  Attempt attempt_step(double target, double dt_frac);
  Attempt attempt_snap_recovery(double target, double dt_frac);
  Attempt accept_state(double target, double dt_frac, int iterations, double err,
                       const KktReport& kkt, bool recovered);

  DiscreteProblem prob_;
  SystemState state_;
  StepSchedule schedule_;
  SolverConfig config_;
  std::vector<int> reaction_dofs_;
  double reaction_sign_ = 1.0;

  double applied_ = 0.0;
  int phase_ = 0;
  int step_in_phase_ = 0;
  double sub_remaining_ = 0.0; ///< leftover of a partially advanced scheduled step
  double sub_du_ = 0.0;
  long clip_warnings_ = 0;
};

} // namespace pfrac
