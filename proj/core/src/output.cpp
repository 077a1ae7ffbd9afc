#include "pfrac/output.hpp"

#include "pfrac/errors.hpp"

#include <cstdio>
#include <fstream>

namespace pfrac {

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_ld_csv(const SimulationResult& result, const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw IoError("write_ld_csv: cannot open '" + path + "'");
  f << "step,t,u_mm,load_kN,iters,err\n";
  for (const auto& r : result.records) {
    f << r.step << "," << format_sig(r.t) << "," << format_sig(r.applied) << ","
      << format_sig(r.reaction / 1000.0) << "," << r.iterations << "," << format_sig(r.err)
      << "\n";
  }
  if (!f)
    throw IoError("write_ld_csv: write to '" + path + "' failed");
}

void write_fields(const SystemState& state, const DofMap& dofs, const Mesh& mesh,
                  const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw IoError("write_fields: cannot open '" + path + "'");
  f << "# vtk DataFile Version 3.0\n";
  f << "pfrac fields step " << state.step << "\n";
  f << "ASCII\n";
  f << "DATASET UNSTRUCTURED_GRID\n";
  f << "POINTS " << mesh.num_nodes() << " double\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    f << format_sig(mesh.nodes[i][0]) << " " << format_sig(mesh.nodes[i][1]) << " 0\n";

  int conn = 0;
  for (const auto& c : mesh.cells)
    conn += 1 + c.nverts();
  f << "CELLS " << mesh.num_cells() << " " << conn << "\n";
  for (const auto& c : mesh.cells) {
    f << c.nverts();
    for (int k = 0; k < c.nverts(); ++k)
      f << " " << c.nodes[k];
    f << "\n";
  }
  f << "CELL_TYPES " << mesh.num_cells() << "\n";
  for (const auto& c : mesh.cells)
    f << (c.type == CellType::Quad4 ? 9 : 5) << "\n";

  f << "POINT_DATA " << mesh.num_nodes() << "\n";
  f << "VECTORS displacement double\n";
  for (int n = 0; n < mesh.num_nodes(); ++n)
    f << format_sig(state.x[dofs.u_dof(n, 0)]) << " " << format_sig(state.x[dofs.u_dof(n, 1)])
      << " 0\n";

  auto scalar = [&](const std::string& name, auto value) {
    f << "SCALARS " << name << " double 1\n";
    f << "LOOKUP_TABLE default\n";
    for (int n = 0; n < mesh.num_nodes(); ++n)
      f << format_sig(value(n)) << "\n";
  };
  scalar("phi", [&](int n) { return state.x[dofs.phi_dof(n)]; });
  scalar("theta", [&](int n) { return state.x[dofs.theta_dof(n)]; });
  if (dofs.has_lambda())
    scalar("lambda", [&](int n) { return state.x[dofs.lambda_dof(n)]; });
  scalar("slack_gap", [&](int n) {
    const double h = state.x[dofs.phi_dof(n)] - state.phi_prev[n];
    const double th = state.x[dofs.theta_dof(n)];
    return h - th * th;
  });
  if (!f)
    throw IoError("write_fields: write to '" + path + "' failed");
}

void write_metadata(const RunConfig& config, const DiscreteProblem& prob,
                    const BenchmarkProblem& bench, const SimulationResult& result,
                    const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw IoError("write_metadata: cannot open '" + path + "'");
  f << "pfrac run metadata\n";
  f << "benchmark = " << bench.name << "\n";
  f << "formulation = " << to_string(prob.form) << "\n";
  f << "model = " << to_string(prob.model.kind) << "\n";
  if (prob.model.kind == ModelKind::QuasiBrittle) {
    f << "softening = " << to_string(prob.model.softening) << "\n";
    f << "a1 = " << format_sig(prob.model.a1) << "\n";
    f << "a2 = " << format_sig(prob.model.a2) << "\n";
    f << "a3 = " << format_sig(prob.model.a3) << "\n";
    f << "exponential_a2_convention = wu2017 (2^(5/3) - 3)\n";
  }
  f << "kinematics = " << to_string(bench.kinematics) << "\n";
  f << "lambda1 = " << format_sig(prob.lame.lambda1) << "\n";
  f << "mu = " << format_sig(prob.lame.mu) << "\n";
  f << "gc = " << format_sig(prob.frac.gc) << "\n";
  f << "length_scale = " << format_sig(prob.frac.length_scale) << "\n";
  f << "eta = " << format_sig(prob.eta) << "\n";
  f << "kappa_f = " << format_sig(prob.kappa_f()) << "\n";
  f << "tol = " << format_sig(config.solver.tol) << "\n";
  f << "scale_u = " << format_sig(config.solver.scaling.u) << "\n";
  f << "scale_phi = " << format_sig(config.solver.scaling.phi) << "\n";
  f << "scale_theta = " << format_sig(config.solver.scaling.theta) << "\n";
  f << "scale_lambda = "
    << format_sig(config.solver.scaling.lambda > 0.0
                      ? config.solver.scaling.lambda
                      : prob.frac.gc / prob.frac.length_scale)
    << "\n";
  f << "theta_floor = " << format_sig(config.solver.theta_floor) << "\n";
  f << "dual_retry_factor = " << format_sig(config.solver.dual_retry_factor) << "\n";
  f << "newton = full (no damping)\n";
  f << "error_norm_dofs = free\n";
  f << "theta_lambda_interpolation = nodal equal-order with phi\n";
  f << "schedule = " << format_schedule(bench.schedule) << "\n";
  f << "end_displacement = " << format_sig(bench.end_displacement) << "\n";
  f << "mesh_nodes = " << prob.mesh->num_nodes() << "\n";
  f << "mesh_cells = " << prob.mesh->num_cells() << "\n";
  double jmin = 0.0;
  for (int e = 0; e < prob.mesh->num_cells(); ++e) {
    const double j = min_cell_jacobian(*prob.mesh, e);
    jmin = e == 0 ? j : std::min(jmin, j);
  }
  f << "mesh_min_jacobian = " << format_sig(jmin) << "\n";
  f << "clip_warnings = " << result.clip_warnings << "\n";
  f << "completed = " << (result.completed ? "yes" : "no") << "\n";
  if (!result.completed)
    f << "abort_reason = " << result.abort_reason << "\n";
  for (const auto& note : bench.notes)
    f << "note = " << note << "\n";
  if (!f)
    throw IoError("write_metadata: write to '" + path + "' failed");
}

} // namespace pfrac
