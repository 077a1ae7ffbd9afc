#include "pfrac/catalog.hpp"
#include "pfrac/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace pfrac;

namespace {

// single quad element with the displacement field fully prescribed to a
// uniform uniaxial strain eps_xx = applied; phi/theta(/lambda) free
struct SingleElement {
  DiscreteProblem prob;
  std::vector<int> top_dofs;

  explicit SingleElement(Formulation form, bool freeze_fracture = false) {
    auto mesh = std::make_shared<Mesh>(generate_rect_mesh(1.0, 1.0, 1.0, {}));
    prob.mesh = mesh;
    prob.dofs = DofMap(mesh->num_nodes(), form);
    prob.cons.init(prob.dofs);
    for (int n = 0; n < mesh->num_nodes(); ++n) {
      prob.cons.fix(prob.dofs.u_dof(n, 0), mesh->nodes[n][0]); // ux = applied * x
      prob.cons.fix(prob.dofs.u_dof(n, 1), 0.0);
      if (freeze_fracture) {
        prob.cons.fix(prob.dofs.phi_dof(n), 0.0);
        prob.cons.fix(prob.dofs.theta_dof(n), 0.0);
        if (prob.dofs.has_lambda())
          prob.cons.fix(prob.dofs.lambda_dof(n), 0.0);
      }
    }
    prob.cons.finalize(prob.dofs);
    prob.model = PhaseFieldModel::at2();
    prob.lame = {121.154e3, 80.769e3};
    prob.frac = {2.7, 0.03, 0, 0, 0};
    prob.form = form;
    prob.eta = 1e6;
    for (int n = 0; n < mesh->num_nodes(); ++n)
      top_dofs.push_back(prob.dofs.u_dof(n, 0));
  }

  // strain with psi+ = Gc / (2 l): the homogeneous AT2 stationary point sits
  // at phi = 2 psi / (Gc/l + 2 psi) = 1/2
  double critical_strain() const {
    return std::sqrt(prob.frac.gc / (2.0 * prob.frac.length_scale) /
                     (0.5 * prob.lame.lambda1 + prob.lame.mu));
  }
};

} // namespace

TEST_CASE("error norm") {
  SUBCASE("single dof hand value") {
    std::vector<Eigen::VectorXd> upd(1), sol(1);
    upd[0] = Eigen::VectorXd::Constant(1, 1e-5);
    sol[0] = Eigen::VectorXd::Constant(1, 0.5);
    CHECK(error_norm(upd, sol, {1.0}) == doctest::Approx(1e-5).epsilon(1e-14));
  }
  SUBCASE("all-zero update") {
    std::vector<Eigen::VectorXd> upd(2), sol(2);
    upd[0] = Eigen::VectorXd::Zero(5);
    sol[0] = Eigen::VectorXd::Random(5);
    upd[1] = Eigen::VectorXd::Zero(3);
    sol[1] = Eigen::VectorXd::Random(3);
    CHECK(error_norm(upd, sol, {1.0, 1.0}) == 0.0);
  }
  SUBCASE("duplicated field leaves the norm unchanged (M-normalization)") {
    std::vector<Eigen::VectorXd> upd(1), sol(1);
    upd[0] = Eigen::VectorXd::Random(7) * 1e-4;
    sol[0] = Eigen::VectorXd::Random(7);
    const double one = error_norm(upd, sol, {0.7});
    std::vector<Eigen::VectorXd> upd2 = {upd[0], upd[0]}, sol2 = {sol[0], sol[0]};
    CHECK(error_norm(upd2, sol2, {0.7, 0.7}) == doctest::Approx(one).epsilon(1e-14));
  }
  SUBCASE("scale consistency: scaling a field and its S_j together is neutral") {
    std::vector<Eigen::VectorXd> upd(2), sol(2);
    upd[0] = Eigen::VectorXd::Random(4) * 1e-4;
    sol[0] = Eigen::VectorXd::Random(4);
    upd[1] = Eigen::VectorXd::Random(6) * 1e-3;
    sol[1] = Eigen::VectorXd::Random(6);
    const double base = error_norm(upd, sol, {0.5, 2.0});
    const double c = 137.0;
    std::vector<Eigen::VectorXd> upd2 = {upd[0] * c, upd[1]};
    std::vector<Eigen::VectorXd> sol2 = {sol[0] * c, sol[1]};
    CHECK(error_norm(upd2, sol2, {0.5 * c, 2.0}) == doctest::Approx(base).epsilon(1e-14));
  }
  SUBCASE("empty fields are skipped") {
    std::vector<Eigen::VectorXd> upd(2), sol(2);
    upd[0] = Eigen::VectorXd::Constant(1, 1e-5);
    sol[0] = Eigen::VectorXd::Constant(1, 0.5);
    upd[1].resize(0);
    sol[1].resize(0);
    CHECK(error_norm(upd, sol, {1.0, 1.0}) == doctest::Approx(1e-5).epsilon(1e-14));
  }
}

TEST_CASE("linear elastic step with frozen fracture converges in two iterations") {
  // 2x2 patch, boundary displacements prescribed, fracture fields frozen:
  // only the interior node's u is free, so the problem is linear
  auto mesh = std::make_shared<Mesh>(generate_rect_mesh(1.0, 1.0, 0.5, {}));
  DiscreteProblem prob;
  prob.mesh = mesh;
  prob.dofs = DofMap(mesh->num_nodes(), Formulation::LMM);
  prob.cons.init(prob.dofs);
  for (int n = 0; n < mesh->num_nodes(); ++n) {
    const bool boundary = mesh->nodes[n][0] == 0.0 || mesh->nodes[n][0] == 1.0 ||
                          mesh->nodes[n][1] == 0.0 || mesh->nodes[n][1] == 1.0;
    if (boundary) {
      prob.cons.fix(prob.dofs.u_dof(n, 0), mesh->nodes[n][0]);
      prob.cons.fix(prob.dofs.u_dof(n, 1), 0.0);
    }
    prob.cons.fix(prob.dofs.phi_dof(n), 0.0);
    prob.cons.fix(prob.dofs.theta_dof(n), 0.0);
    prob.cons.fix(prob.dofs.lambda_dof(n), 0.0);
  }
  prob.cons.finalize(prob.dofs);
  prob.model = PhaseFieldModel::at2();
  prob.lame = {121.154e3, 80.769e3};
  prob.frac = {2.7, 0.03, 0, 0, 0};
  prob.form = Formulation::LMM;

  SystemState st;
  st.init(prob.dofs);
  prob.cons.apply_values(st.x, 1e-4);
  SolverConfig cfg;
  const NewtonResult nr = newton_step(prob, st, cfg);
  CHECK(nr.converged);
  CHECK(nr.iterations <= 2);

  SUBCASE("fully prescribed system is trivially converged") {
    SingleElement se(Formulation::LMM, true);
    SystemState empty;
    empty.init(se.prob.dofs);
    se.prob.cons.apply_values(empty.x, 1e-4);
    const NewtonResult trivial = newton_step(se.prob, empty, cfg);
    CHECK(trivial.converged);
  }
}

TEST_CASE("homogeneous AT2 stationary point: converged phi = 0.5") {
  for (Formulation form : {Formulation::LMM, Formulation::Penalty}) {
    CAPTURE(to_string(form));
    SingleElement se(form);
    SolverConfig cfg;
    cfg.formulation = form;
    cfg.tol = 1e-10;
    StepSchedule sched;
    sched.phases = {{1, se.critical_strain()}};
    Simulation sim(se.prob, sched, cfg, se.top_dofs, 1.0);
    const SimulationResult res = sim.run();
    REQUIRE(res.completed);
    REQUIRE(res.records.size() == 1);
    const DofMap& dofs = sim.problem().dofs;
    for (int n = 0; n < dofs.n_nodes(); ++n)
      CHECK(sim.state().x[dofs.phi_dof(n)] == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("unloading preserves irreversibility and the KKT conditions") {
  for (Formulation form : {Formulation::LMM, Formulation::Penalty}) {
    CAPTURE(to_string(form));
    SingleElement se(form);
    SolverConfig cfg;
    cfg.formulation = form;
    cfg.tol = 1e-8;
    const double ec = se.critical_strain();
    StepSchedule sched;
    sched.phases = {{10, ec / 10.0}, {10, -ec / 10.0}};
    Simulation sim(se.prob, sched, cfg, se.top_dofs, 1.0);
    const SimulationResult res = sim.run();
    REQUIRE(res.completed);
    REQUIRE(res.records.size() == 20);
    double phi_after_load = 0.0;
    const DofMap& dofs = sim.problem().dofs;
    // the penalty enforces the constraint up to its intrinsic slack
    // |h| <= F/eta with F ~ (Gc/l) phi at full unload
    const double slack =
        form == Formulation::LMM
            ? 10.0 * cfg.tol
            : 10.0 * cfg.tol +
                  1.2 * se.prob.frac.gc / se.prob.frac.length_scale * 0.5 / se.prob.eta;
    for (const auto& r : res.records) {
      CHECK(r.kkt.min_h >= -slack);
      // dual feasibility of the (effective) multiplier
      CHECK(r.kkt.min_multiplier >= -1e-3 * se.prob.frac.gc / se.prob.frac.length_scale);
      if (r.step == 10)
        phi_after_load = sim.state().x[dofs.phi_dof(0)];
    }
    // the fully unloaded state keeps the damage
    const double phi_final = sim.state().x[dofs.phi_dof(0)];
    CHECK(phi_final >= 0.5 - 20.0 * 10.0 * cfg.tol);
    CHECK(phi_final <= 0.5 + 1e-3);
    (void)phi_after_load;
    // LMM: multiplier turns positive on unload, complementarity stays small
    const auto& last = res.records.back().kkt;
    if (form == Formulation::LMM) {
      CHECK(last.max_lambda_theta_scaled <= 1e-6);
      CHECK(last.max_lambda_h_scaled <= 1e-5);
    }
    CHECK(last.min_h >= -1e-6);
  }
}

TEST_CASE("reaction matches the analytic confined stiffness") {
  // uniaxial-strain patch: ux = applied * x everywhere, uy = 0; the reaction
  // conjugate to the driven face is (lambda + 2 mu) * applied * height
  SingleElement se(Formulation::LMM, true);
  std::vector<int> right_dofs;
  for (int n = 0; n < se.prob.mesh->num_nodes(); ++n)
    if (se.prob.mesh->nodes[n][0] > 0.5)
      right_dofs.push_back(se.prob.dofs.u_dof(n, 0));
  SolverConfig cfg;
  StepSchedule sched;
  sched.phases = {{1, 1e-4}};
  Simulation sim(se.prob, sched, cfg, right_dofs, 1.0);
  const SimulationResult res = sim.run();
  REQUIRE(res.completed);
  const double analytic = (se.prob.lame.lambda1 + 2.0 * se.prob.lame.mu) * 1e-4;
  CHECK(res.records[0].reaction == doctest::Approx(analytic).epsilon(1e-8));
}

TEST_CASE("penalty and LMM agree on the single-element problem") {
  double phis[2];
  int k = 0;
  for (Formulation form : {Formulation::LMM, Formulation::Penalty}) {
    SingleElement se(form);
    SolverConfig cfg;
    cfg.formulation = form;
    cfg.tol = 1e-10;
    StepSchedule sched;
    sched.phases = {{4, se.critical_strain() / 4.0}};
    Simulation sim(se.prob, sched, cfg, se.top_dofs, 1.0);
    REQUIRE(sim.run().completed);
    phis[k++] = sim.state().x[sim.problem().dofs.phi_dof(0)];
  }
  CHECK(std::abs(phis[0] - phis[1]) < 1e-4);
}

TEST_CASE("zero-step schedule produces an empty result") {
  SingleElement se(Formulation::LMM);
  SolverConfig cfg;
  StepSchedule sched; // no phases
  Simulation sim(se.prob, sched, cfg, se.top_dofs, 1.0);
  const SimulationResult res = sim.run();
  CHECK(res.completed);
  CHECK(res.records.empty());
}

TEST_CASE("max_iters = 0 reports non-convergence") {
  SingleElement se(Formulation::LMM);
  SystemState st;
  st.init(se.prob.dofs);
  se.prob.cons.apply_values(st.x, se.critical_strain());
  SolverConfig cfg;
  cfg.max_iters = 0;
  const NewtonResult nr = newton_step(se.prob, st, cfg);
  CHECK(!nr.converged);
}

TEST_CASE("accepted phi history is nodewise non-decreasing across a whole run") {
  for (Formulation form : {Formulation::LMM, Formulation::Penalty}) {
    CAPTURE(to_string(form));
    SingleElement se(form);
    SolverConfig cfg;
    cfg.formulation = form;
    const double ec = se.critical_strain();
    StepSchedule sched;
    sched.phases = {{6, ec / 5.0}, {6, -ec / 6.0}, {4, ec / 8.0}};
    Simulation sim(se.prob, sched, cfg, se.top_dofs, 1.0);
    Eigen::VectorXd prev;
    RunHooks hooks;
    const DofMap& dofs = sim.problem().dofs;
    hooks.on_step = [&](const SystemState& st, const StepRecord&) {
      Eigen::VectorXd phi(dofs.n_nodes());
      for (int n = 0; n < dofs.n_nodes(); ++n)
        phi[n] = st.x[dofs.phi_dof(n)];
      if (prev.size() > 0)
        for (int n = 0; n < dofs.n_nodes(); ++n)
          REQUIRE(phi[n] >= prev[n] - 10.0 * cfg.tol);
      prev = phi;
    };
    REQUIRE(sim.run(hooks).completed);
  }
}

TEST_CASE("checkpoint save and restore resumes the schedule") {
  SingleElement se(Formulation::LMM);
  SolverConfig cfg;
  cfg.tol = 1e-8;
  const double ec = se.critical_strain();
  StepSchedule sched;
  sched.phases = {{8, ec / 8.0}};

  namespace fs = std::filesystem;
  const auto p = fs::temp_directory_path() / "pfrac_ckpt.dat";

  Simulation first(se.prob, sched, cfg, se.top_dofs, 1.0);
  SolverConfig limited = cfg;
  limited.max_steps = 3;
  Simulation part(se.prob, sched, limited, se.top_dofs, 1.0);
  REQUIRE(part.run().completed);
  CHECK(part.state().step == 3);
  part.save_checkpoint(p.string());

  Simulation rest(se.prob, sched, cfg, se.top_dofs, 1.0);
  rest.restore_checkpoint(p.string());
  const SimulationResult tail = rest.run();
  REQUIRE(tail.completed);
  CHECK(tail.records.size() == 5);
  CHECK(tail.records.front().step == 4);
  CHECK(rest.applied() == doctest::Approx(ec));

  const SimulationResult whole = first.run();
  REQUIRE(whole.completed);
  const DofMap& dofs = first.problem().dofs;
  CHECK(rest.state().x[dofs.phi_dof(0)] ==
        doctest::Approx(first.state().x[dofs.phi_dof(0)]).epsilon(1e-9));
  fs::remove(p);
}
