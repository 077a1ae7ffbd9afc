#include "pfrac/solver.hpp"

#include "pfrac/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pfrac {

double error_norm(const std::vector<Eigen::VectorXd>& updates,
                  const std::vector<Eigen::VectorXd>& solution,
                  const std::vector<double>& scaling) {
  double sum = 0.0;
  int m = 0;
  for (size_t j = 0; j < updates.size(); ++j) {
    const auto n = updates[j].size();
    if (n == 0)
      continue;
    ++m;
    double field_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = std::max(std::abs(solution[j][i]), scaling[j]);
      const double e = std::abs(updates[j][i]) / w;
      field_sum += e * e;
    }
    sum += field_sum / static_cast<double>(n);
  }
  if (m == 0)
    return 0.0;
  return std::sqrt(sum / static_cast<double>(m));
}

namespace {

double field_scale(const SolverConfig& config, const DiscreteProblem& prob, Field f) {
  switch (f) {
  case Field::U:
    return config.scaling.u;
  case Field::Phi:
    return config.scaling.phi;
  case Field::Theta:
    return config.scaling.theta;
  case Field::Lambda:
    return config.scaling.lambda > 0.0 ? config.scaling.lambda
                                       : prob.frac.gc / prob.frac.length_scale;
  }
  return 1.0;
}

} // namespace

NewtonResult newton_on(const DiscreteProblem& prob, SystemState& state,
                       const SolverConfig& config, const Reduction& red) {
  const Eigen::SparseMatrix<double>& c = red.c;
  if (c.cols() == 0) { // everything prescribed; nothing to solve
    NewtonResult res;
    res.converged = true;
    return res;
  }

  // reduced dofs grouped by field, for the convergence norm
  std::vector<std::vector<int>> field_full(4), field_red(4);
  for (size_t r = 0; r < red.full_of_reduced.size(); ++r) {
    const int d = red.full_of_reduced[r];
    const int f = static_cast<int>(prob.dofs.field_of(d));
    field_full[f].push_back(d);
    field_red[f].push_back(static_cast<int>(r));
  }
  std::vector<double> scales(4);
  for (int f = 0; f < 4; ++f)
    scales[f] = field_scale(config, prob, static_cast<Field>(f));

  NewtonResult res;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < config.max_iters; ++it) {
    const AssembledSystem sys = assemble(prob, state);
    const Eigen::SparseMatrix<double> kred =
        c.transpose() * (sys.matrix * c).pruned();
    const Eigen::VectorXd rred = c.transpose() * sys.residual;

    lu.compute(kred);
    if (lu.info() != Eigen::Success)
      throw LinearSolveFailure("sparse LU factorization failed (" +
                               std::string(lu.lastErrorMessage()) + ")");
    const Eigen::VectorXd dx = lu.solve(-rred);
    if (!dx.allFinite())
      throw LinearSolveFailure("linear solve produced non-finite update");
    state.x += c * dx;

    std::vector<Eigen::VectorXd> upd(4), sol(4);
    for (int f = 0; f < 4; ++f) {
      const auto& rr = field_red[f];
      upd[f].resize(rr.size());
      sol[f].resize(rr.size());
      for (size_t i = 0; i < rr.size(); ++i) {
        upd[f][i] = dx[rr[i]];
        sol[f][i] = state.x[field_full[f][i]];
      }
    }
    const double err = error_norm(upd, sol, scales);
    const double prev = res.err_trace.empty() ? err : res.err_trace.back();
    res.err_trace.push_back(err);
    res.iterations = it + 1;
    res.final_err = err;
    if (err < config.tol) {
      res.converged = true;
      return res;
    }
    // a diverging iteration never recovers; hand control back so the caller
    // can re-initialize the slack or cut the increment
    if (!std::isfinite(err) || (err > 10.0 * prev && err > 1.0))
      return res;
  }
  return res;
}

NewtonResult newton_step(const DiscreteProblem& prob, SystemState& state,
                         const SolverConfig& config) {
  return newton_on(prob, state, config, prob.cons.full_reduction());
}

Simulation::Simulation(DiscreteProblem prob, StepSchedule schedule, SolverConfig config,
                       std::vector<int> reaction_dofs, double reaction_sign)
    : prob_(std::move(prob)), schedule_(std::move(schedule)), config_(std::move(config)),
      reaction_dofs_(std::move(reaction_dofs)), reaction_sign_(reaction_sign) {
  state_.init(prob_.dofs);
}

Simulation::Attempt Simulation::attempt_step(double target, double dt_frac) {
  const DofMap& dofs = prob_.dofs;
  Attempt att;

  const Eigen::VectorXd x0 = state_.x;
  const double dual_tol = config_.dual_retry_factor * prob_.frac.gc / prob_.frac.length_scale;

  // slack warm start: keep previous magnitudes but stay off the invariant
  // theta = 0 manifold, where Newton cannot re-activate growth
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    double& th = state_.x[dofs.theta_dof(n)];
    if (std::abs(th) < config_.theta_floor)
      th = config_.theta_floor;
  }
  prob_.cons.apply_values(state_.x, target);

  auto safe_newton = [&]() -> NewtonResult {
    try {
      return newton_step(prob_, state_, config_);
    } catch (const LinearSolveFailure&) {
      return NewtonResult{}; // treated as non-convergence
    }
  };

  // A converged state with a substantially negative (effective) multiplier
  // is a spurious stationary point: the slack collapsed at nodes whose
  // constraint should be inactive. Re-open the slack at exactly those nodes
  // and continue from the converged state; a propagating crack front may
  // need several such passes as the violation moves outward ring by ring.
  NewtonResult nr = safe_newton();
  KktReport kkt;
  if (nr.converged)
    kkt = kkt_report(prob_, state_, config_.tol);
  int total_iters = nr.iterations;
  int passes = 0;
  while (nr.converged && kkt.min_multiplier < -dual_tol &&
         passes < config_.max_reopen_passes) {
    ++passes;
    for (int n = 0; n < dofs.n_nodes(); ++n) {
      const double h = state_.x[dofs.phi_dof(n)] - state_.phi_prev[n];
      const double th = state_.x[dofs.theta_dof(n)];
      const double lam = dofs.has_lambda() ? state_.x[dofs.lambda_dof(n)]
                                           : -prob_.eta * (h - th * th);
      if (lam < -dual_tol)
        state_.x[dofs.theta_dof(n)] = 1.0;
    }
    nr = safe_newton();
    total_iters += nr.iterations;
    if (nr.converged)
      kkt = kkt_report(prob_, state_, config_.tol);
  }
  nr.iterations = total_iters;
  if (!nr.converged || kkt.min_multiplier < -dual_tol) {
    state_.x = x0;
    att.ok = false;
    return att;
  }
  return accept_state(target, dt_frac, nr.iterations, nr.final_err, kkt, false);
}

Simulation::Attempt Simulation::accept_state(double target, double dt_frac, int iterations,
                                             double err, const KktReport& kkt,
                                             bool recovered) {
  const DofMap& dofs = prob_.dofs;
  const AssembledSystem sys = assemble(prob_, state_);
  clip_warnings_ += sys.stats.clip_warnings;
  double reaction = 0.0;
  for (int d : reaction_dofs_)
    reaction += prob_.cons.reaction(sys.residual, d);
  reaction *= reaction_sign_;

  state_.t += dt_frac;
  state_.step += 1;
  for (int n = 0; n < dofs.n_nodes(); ++n)
    state_.phi_prev[n] = state_.x[dofs.phi_dof(n)];

  Attempt att;
  att.ok = true;
  att.record = {state_.step, state_.t,  target, reaction,
                iterations,  err,       kkt,    recovered};
  return att;
}

Simulation::Attempt Simulation::attempt_snap_recovery(double target, double dt_frac) {
  // Past a fold of the equilibrium path no nearby static solution exists and
  // Newton orbits the limit point at any increment. The quasi-static jump is
  // computed by alternating the displacement and phase/slack sector solves
  // at fixed boundary displacement: the phase sector at frozen u is convex,
  // each alternation dissipates energy, and the sequence lands on the
  // post-snap equilibrium, which the monolithic system then verifies.
  const DofMap& dofs = prob_.dofs;
  Attempt att;
  const Eigen::VectorXd x0 = state_.x;
  const double dual_tol = config_.dual_retry_factor * prob_.frac.gc / prob_.frac.length_scale;

  for (int n = 0; n < dofs.n_nodes(); ++n) {
    double& th = state_.x[dofs.theta_dof(n)];
    if (std::abs(th) < config_.theta_floor)
      th = config_.theta_floor;
  }
  prob_.cons.apply_values(state_.x, target);

  const Reduction u_red = prob_.cons.sector_reduction(dofs, true);
  const Reduction p_red = prob_.cons.sector_reduction(dofs, false);

  auto reopen_violators = [&](double tol) {
    for (int n = 0; n < dofs.n_nodes(); ++n) {
      const double h = state_.x[dofs.phi_dof(n)] - state_.phi_prev[n];
      const double th = state_.x[dofs.theta_dof(n)];
      const double lam =
          dofs.has_lambda() ? state_.x[dofs.lambda_dof(n)] : -prob_.eta * (h - th * th);
      if (lam < -tol)
        state_.x[dofs.theta_dof(n)] = 1.0;
    }
  };

  int total_iters = 0;
  bool stationary = false;
  Eigen::VectorXd x_before_probe;
  for (int pass = 0; pass < config_.max_reopen_passes; ++pass) {
    NewtonResult ru, rp;
    try {
      ru = newton_on(prob_, state_, config_, u_red);
      rp = newton_on(prob_, state_, config_, p_red);
    } catch (const LinearSolveFailure&) {
      state_.x = x0;
      att.ok = false;
      return att;
    }
    total_iters += ru.iterations + rp.iterations;
    if (!ru.converged || !rp.converged) {
      state_.x = x0;
      att.ok = false;
      return att;
    }
    if (ru.iterations == 1 && rp.iterations == 1) {
      const KktReport kkt = kkt_report(prob_, state_, config_.tol);
      if (kkt.min_multiplier >= -dual_tol) {
        stationary = true;
        break;
      }
      reopen_violators(dual_tol);
      continue;
    }
    // past the worst of the instability the coupled Newton may reconnect
    // directly; probe occasionally and keep the alternation otherwise
    if (pass % 8 == 7) {
      x_before_probe = state_.x;
      SolverConfig probe = config_;
      probe.max_iters = std::min(config_.max_iters, 15);
      NewtonResult chk;
      try {
        chk = newton_step(prob_, state_, probe);
      } catch (const LinearSolveFailure&) {
        chk.converged = false;
      }
      total_iters += chk.iterations;
      if (chk.converged) {
        const KktReport kkt = kkt_report(prob_, state_, config_.tol);
        if (kkt.min_multiplier >= -dual_tol) {
          stationary = true;
          break;
        }
        reopen_violators(dual_tol);
      } else {
        state_.x = x_before_probe;
      }
    }
  }
  if (!stationary) {
    state_.x = x0;
    att.ok = false;
    return att;
  }

  // confirm the recovered state solves the coupled system
  NewtonResult check;
  try {
    check = newton_step(prob_, state_, config_);
  } catch (const LinearSolveFailure&) {
    state_.x = x0;
    att.ok = false;
    return att;
  }
  const KktReport kkt = kkt_report(prob_, state_, config_.tol);
  if (!check.converged || kkt.min_multiplier < -dual_tol) {
    state_.x = x0;
    att.ok = false;
    return att;
  }
  return accept_state(target, dt_frac, total_iters + check.iterations, check.final_err, kkt,
                      true);
}

SimulationResult Simulation::run(const RunHooks& hooks) {
  SimulationResult result;
  int accepted_this_run = 0;

  auto stop_requested = [&]() {
    if (config_.max_steps > 0 && accepted_this_run >= config_.max_steps)
      return true;
    if (config_.end_displacement > 0.0 &&
        applied_ >= config_.end_displacement - 1e-15 * config_.end_displacement)
      return true;
    return false;
  };

  while (phase_ < static_cast<int>(schedule_.phases.size())) {
    const StepPhase& ph = schedule_.phases[phase_];
    while (step_in_phase_ < ph.count) {
      if (stop_requested()) {
        result.clip_warnings = clip_warnings_;
        return result;
      }
      if (sub_remaining_ == 0.0) {
        sub_remaining_ = ph.du;
        sub_du_ = ph.du;
      }
      int halvings = 0;
      while (std::abs(sub_remaining_) > 1e-12 * std::abs(ph.du)) {
        const double sgn = sub_remaining_ > 0.0 ? 1.0 : -1.0;
        const double du_eff = sgn * std::min(std::abs(sub_du_), std::abs(sub_remaining_));
        Attempt att = attempt_step(applied_ + du_eff, du_eff / ph.du);
        if (att.ok) {
          applied_ += du_eff;
          sub_remaining_ -= du_eff;
          ++accepted_this_run;
          result.records.push_back(att.record);
          if (hooks.on_step)
            hooks.on_step(state_, att.record);
          if (stop_requested())
            break;
        } else {
          ++halvings;
          if (halvings > config_.max_substeps) {
            if (config_.snap_recovery) {
              // complete the whole scheduled step as one dissipative jump
              Attempt rec = attempt_snap_recovery(applied_ + sub_remaining_,
                                                  sub_remaining_ / ph.du);
              if (rec.ok) {
                applied_ += sub_remaining_;
                sub_remaining_ = 0.0;
                sub_du_ = ph.du;
                ++accepted_this_run;
                ++result.recovered_steps;
                result.records.push_back(rec.record);
                if (hooks.on_step)
                  hooks.on_step(state_, rec.record);
                break;
              }
            }
            result.completed = false;
            std::ostringstream os;
            os << "step " << state_.step + 1 << " failed to converge after "
               << config_.max_substeps << " increment halvings (du=" << sub_du_ << ")";
            result.abort_reason = os.str();
            result.clip_warnings = clip_warnings_;
            return result;
          }
          sub_du_ *= 0.5;
        }
      }
      if (std::abs(sub_remaining_) <= 1e-12 * std::abs(ph.du)) {
        sub_remaining_ = 0.0;
        ++step_in_phase_;
      }
    }
    ++phase_;
    step_in_phase_ = 0;
  }
  result.clip_warnings = clip_warnings_;
  return result;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

void Simulation::save_checkpoint(const std::string& path) const {
  std::ofstream f(path);
  if (!f)
    throw IoError("save_checkpoint: cannot open '" + path + "'");
  f << "pfrac-checkpoint v1\n";
  f << "formulation " << to_string(prob_.form) << "\n";
  f << "step " << state_.step << "\n";
  f << "t " << fmt17(state_.t) << "\n";
  f << "applied " << fmt17(applied_) << "\n";
  f << "phase " << phase_ << "\n";
  f << "step_in_phase " << step_in_phase_ << "\n";
  f << "sub_du " << fmt17(sub_du_) << "\n";
  f << "sub_remaining " << fmt17(sub_remaining_) << "\n";
  f << "x " << state_.x.size() << "\n";
  for (Eigen::Index i = 0; i < state_.x.size(); ++i)
    f << fmt17(state_.x[i]) << "\n";
  f << "phi_prev " << state_.phi_prev.size() << "\n";
  for (Eigen::Index i = 0; i < state_.phi_prev.size(); ++i)
    f << fmt17(state_.phi_prev[i]) << "\n";
  if (!f)
    throw IoError("save_checkpoint: write to '" + path + "' failed");
}

void Simulation::restore_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("restore_checkpoint: cannot open '" + path + "'");
  std::string tag, ver;
  f >> tag >> ver;
  if (tag != "pfrac-checkpoint" || ver != "v1")
    throw ParseError(path + ": not a pfrac checkpoint");
  std::string key;
  std::string form;
  f >> key >> form;
  if (form != to_string(prob_.form))
    throw ParseError(path + ": checkpoint formulation '" + form + "' does not match problem");
  f >> key >> state_.step;
  f >> key >> state_.t;
  f >> key >> applied_;
  f >> key >> phase_;
  f >> key >> step_in_phase_;
  f >> key >> sub_du_;
  f >> key >> sub_remaining_;
  // re-derive the schedule position from the applied displacement so resume
  // also works when the schedule was extended
  {
    double acc = 0.0;
    phase_ = 0;
    step_in_phase_ = 0;
    double partial = 0.0;
    for (size_t p = 0; p < schedule_.phases.size(); ++p) {
      const StepPhase& ph = schedule_.phases[p];
      const double full = ph.count * ph.du;
      const double tiny = 1e-12 * std::max(std::abs(ph.du), 1e-30);
      if (std::abs(applied_ - acc) >= std::abs(full) - tiny) {
        acc += full;
        phase_ = static_cast<int>(p) + 1;
        step_in_phase_ = 0;
        continue;
      }
      const double into = applied_ - acc;
      const int done = static_cast<int>(std::floor(into / ph.du + 1e-9));
      phase_ = static_cast<int>(p);
      step_in_phase_ = done;
      partial = into - done * ph.du;
      if (std::abs(partial) > tiny) {
        sub_remaining_ = ph.du - partial;
        if (std::abs(sub_du_) > std::abs(sub_remaining_) || sub_du_ * sub_remaining_ <= 0.0)
          sub_du_ = sub_remaining_;
      } else {
        sub_remaining_ = 0.0;
      }
      break;
    }
    if (phase_ >= static_cast<int>(schedule_.phases.size()))
      sub_remaining_ = 0.0;
  }
  Eigen::Index n = 0;
  f >> key >> n;
  if (key != "x" || n != state_.x.size())
    throw ParseError(path + ": checkpoint state size does not match problem");
  for (Eigen::Index i = 0; i < n; ++i)
    f >> state_.x[i];
  f >> key >> n;
  if (key != "phi_prev" || n != state_.phi_prev.size())
    throw ParseError(path + ": checkpoint phi_prev size does not match problem");
  for (Eigen::Index i = 0; i < n; ++i)
    f >> state_.phi_prev[i];
  if (!f)
    throw ParseError(path + ": truncated checkpoint");
}

} // namespace pfrac
