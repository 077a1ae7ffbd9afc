#include "pfrac/assembly.hpp"

#include "pfrac/errors.hpp"
#include "pfrac/tensor.hpp"

#include <cmath>
#include <sstream>

namespace pfrac {

namespace {

struct GaussPoint {
  double xi, eta, w;
};

// full integration for bilinear fields: 2x2 on quads, centroid rule on tris
const GaussPoint kQuadRule[4] = {{-0.5773502691896257, -0.5773502691896257, 1.0},
                                 {0.5773502691896257, -0.5773502691896257, 1.0},
                                 {0.5773502691896257, 0.5773502691896257, 1.0},
                                 {-0.5773502691896257, 0.5773502691896257, 1.0}};
const GaussPoint kTriRule[1] = {{1.0 / 3.0, 1.0 / 3.0, 0.5}};

struct ShapeEval {
  double n[4];
  double dndx[4][2];
  double jw; // weight * detJ
};

ShapeEval eval_shape(const Mesh& mesh, const Cell& c, const GaussPoint& gp) {
  ShapeEval s{};
  double dref[4][2];
  if (c.type == CellType::Quad4) {
    const double xi = gp.xi, eta = gp.eta;
    s.n[0] = 0.25 * (1 - xi) * (1 - eta);
    s.n[1] = 0.25 * (1 + xi) * (1 - eta);
    s.n[2] = 0.25 * (1 + xi) * (1 + eta);
    s.n[3] = 0.25 * (1 - xi) * (1 + eta);
    dref[0][0] = -0.25 * (1 - eta);
    dref[0][1] = -0.25 * (1 - xi);
    dref[1][0] = 0.25 * (1 - eta);
    dref[1][1] = -0.25 * (1 + xi);
    dref[2][0] = 0.25 * (1 + eta);
    dref[2][1] = 0.25 * (1 + xi);
    dref[3][0] = -0.25 * (1 + eta);
    dref[3][1] = 0.25 * (1 - xi);
  } else {
    s.n[0] = 1.0 - gp.xi - gp.eta;
    s.n[1] = gp.xi;
    s.n[2] = gp.eta;
    dref[0][0] = -1.0;
    dref[0][1] = -1.0;
    dref[1][0] = 1.0;
    dref[1][1] = 0.0;
    dref[2][0] = 0.0;
    dref[2][1] = 1.0;
  }
  const int nv = c.nverts();
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
  for (int a = 0; a < nv; ++a) {
    const auto& p = mesh.nodes[c.nodes[a]];
    j11 += dref[a][0] * p[0];
    j12 += dref[a][0] * p[1];
    j21 += dref[a][1] * p[0];
    j22 += dref[a][1] * p[1];
  }
  const double det = j11 * j22 - j12 * j21;
  const double i11 = j22 / det, i12 = -j12 / det, i21 = -j21 / det, i22 = j11 / det;
  for (int a = 0; a < nv; ++a) {
    s.dndx[a][0] = i11 * dref[a][0] + i12 * dref[a][1];
    s.dndx[a][1] = i21 * dref[a][0] + i22 * dref[a][1];
  }
  s.jw = gp.w * det;
  return s;
}

} // namespace

ElementContribution element_kernel(const DiscreteProblem& prob, const SystemState& state,
                                   int cell, AssemblyStats* stats) {
  const Mesh& mesh = *prob.mesh;
  const Cell& c = mesh.cells[cell];
  const DofMap& dofs = prob.dofs;
  const int nv = c.nverts();
  const bool lmm = prob.form == Formulation::LMM;
  const int nfields = lmm ? 5 : 4;
  const int ndof = nv * nfields;

  ElementContribution out;
  out.dofs.resize(ndof);
  for (int a = 0; a < nv; ++a) {
    const int n = c.nodes[a];
    out.dofs[2 * a] = dofs.u_dof(n, 0);
    out.dofs[2 * a + 1] = dofs.u_dof(n, 1);
    out.dofs[2 * nv + a] = dofs.phi_dof(n);
    out.dofs[3 * nv + a] = dofs.theta_dof(n);
    if (lmm)
      out.dofs[4 * nv + a] = dofs.lambda_dof(n);
  }
  out.residual = Eigen::VectorXd::Zero(ndof);
  out.tangent = Eigen::MatrixXd::Zero(ndof, ndof);
  out.lumped_mass = Eigen::VectorXd::Zero(nv);

  const double gcl = prob.frac.gc / (prob.model.cw * prob.frac.length_scale);
  const double grad_coef = 2.0 * prob.frac.gc * prob.frac.length_scale / prob.model.cw;
  const double eta = prob.eta;

  const GaussPoint* rule = c.type == CellType::Quad4 ? kQuadRule : kTriRule;
  const int ngp = c.type == CellType::Quad4 ? 4 : 1;

  for (int q = 0; q < ngp; ++q) {
    const ShapeEval sh = eval_shape(mesh, c, rule[q]);
    const double w = sh.jw;

    Tensor2s eps;
    double phi = 0.0;
    double gphi[2] = {0.0, 0.0};
    for (int a = 0; a < nv; ++a) {
      const int n = c.nodes[a];
      const double ux = state.x[dofs.u_dof(n, 0)];
      const double uy = state.x[dofs.u_dof(n, 1)];
      eps.xx += sh.dndx[a][0] * ux;
      eps.yy += sh.dndx[a][1] * uy;
      eps.xy += 0.5 * (sh.dndx[a][1] * ux + sh.dndx[a][0] * uy);
      const double ph = state.x[dofs.phi_dof(n)];
      phi += sh.n[a] * ph;
      gphi[0] += sh.dndx[a][0] * ph;
      gphi[1] += sh.dndx[a][1] * ph;
    }
    if (stats && (phi < -1e-8 || phi > 1.0 + 1e-8))
      ++stats->clip_warnings;

    const ScalarDiff g = degradation(prob.model, phi);
    const ScalarDiff wf = local_fracture_energy(prob.model, phi);
    const PsiSplit psi = psi_split(eps, prob.lame);
    const StressSplit sig = stress_split(eps, prob.lame);
    const TangentSplit tang = material_tangent(eps, prob.lame);

    const Eigen::Vector3d sp = sig.plus.voigt();
    const Eigen::Vector3d sv = g.value * sp + sig.minus.voigt();
    const Eigen::Matrix3d dmat = g.value * tang.plus + tang.minus;

    // momentum residual and blocks
    for (int a = 0; a < nv; ++a) {
      // B_a^T rows for (ux_a, uy_a) with engineering shear
      const double bx = sh.dndx[a][0], by = sh.dndx[a][1];
      out.residual[2 * a] += w * (bx * sv[0] + by * sv[2]);
      out.residual[2 * a + 1] += w * (by * sv[1] + bx * sv[2]);
      for (int b = 0; b < nv; ++b) {
        const double cx = sh.dndx[b][0], cy = sh.dndx[b][1];
        // K_uu = B^T (g D+ + D-) B
        const double k00 = bx * (dmat(0, 0) * cx + dmat(0, 2) * cy) +
                           by * (dmat(2, 0) * cx + dmat(2, 2) * cy);
        const double k01 = bx * (dmat(0, 1) * cy + dmat(0, 2) * cx) +
                           by * (dmat(2, 1) * cy + dmat(2, 2) * cx);
        const double k10 = by * (dmat(1, 0) * cx + dmat(1, 2) * cy) +
                           bx * (dmat(2, 0) * cx + dmat(2, 2) * cy);
        const double k11 = by * (dmat(1, 1) * cy + dmat(1, 2) * cx) +
                           bx * (dmat(2, 1) * cy + dmat(2, 2) * cx);
        out.tangent(2 * a, 2 * b) += w * k00;
        out.tangent(2 * a, 2 * b + 1) += w * k01;
        out.tangent(2 * a + 1, 2 * b) += w * k10;
        out.tangent(2 * a + 1, 2 * b + 1) += w * k11;
        // coupling K_u,phi = dg/dphi (B^T sigma+) N_b; the chain factor dies
        // on a clamped evaluation while the saturated g' still drives K_phi,u
        const double dgdphi = g.clamped ? 0.0 : g.d1;
        const double bsp0 = bx * sp[0] + by * sp[2];
        const double bsp1 = by * sp[1] + bx * sp[2];
        out.tangent(2 * a, 2 * nv + b) += w * dgdphi * bsp0 * sh.n[b];
        out.tangent(2 * a + 1, 2 * nv + b) += w * dgdphi * bsp1 * sh.n[b];
        const double csp0 = cx * sp[0] + cy * sp[2];
        const double csp1 = cy * sp[1] + cx * sp[2];
        out.tangent(2 * nv + a, 2 * b) += w * g.d1 * sh.n[a] * csp0;
        out.tangent(2 * nv + a, 2 * b + 1) += w * g.d1 * sh.n[a] * csp1;
      }
    }

    // phase-field residual, PDE part (driving force and gradient term)
    const double src = gcl * wf.d1 + g.d1 * psi.plus;
    for (int a = 0; a < nv; ++a) {
      out.residual[2 * nv + a] +=
          w * (src * sh.n[a] + grad_coef * (gphi[0] * sh.dndx[a][0] + gphi[1] * sh.dndx[a][1]));
      for (int b = 0; b < nv; ++b) {
        const double kpp = (gcl * wf.d2 + g.d2 * psi.plus) * sh.n[a] * sh.n[b] +
                           grad_coef * (sh.dndx[a][0] * sh.dndx[b][0] +
                                        sh.dndx[a][1] * sh.dndx[b][1]);
        out.tangent(2 * nv + a, 2 * nv + b) += w * kpp;
      }
    }

    // slack and multiplier equations are collocated at the nodes (row-sum
    // lumped mass): each node carries its own complementarity subsystem and
    // the mass matrix cannot couple neighboring constraint states
    for (int a = 0; a < nv; ++a) {
      const int n = c.nodes[a];
      const double m = w * sh.n[a];
      out.lumped_mass[a] += m;
      const double phi_a = state.x[dofs.phi_dof(n)];
      const double h_a = phi_a - state.phi_prev[n];
      const double th_a = state.x[dofs.theta_dof(n)];
      const double gap_a = h_a - th_a * th_a;
      if (lmm) {
        const double lam_a = state.x[dofs.lambda_dof(n)];
        out.residual[2 * nv + a] += -m * lam_a;
        out.residual[3 * nv + a] += m * 2.0 * lam_a * th_a;
        out.residual[4 * nv + a] += -m * gap_a;
        out.tangent(2 * nv + a, 4 * nv + a) += -m;
        out.tangent(3 * nv + a, 3 * nv + a) += m * 2.0 * lam_a;
        out.tangent(3 * nv + a, 4 * nv + a) += m * 2.0 * th_a;
        out.tangent(4 * nv + a, 2 * nv + a) += -m;
        out.tangent(4 * nv + a, 3 * nv + a) += m * 2.0 * th_a;
      } else {
        out.residual[2 * nv + a] += m * eta * gap_a;
        out.residual[3 * nv + a] += -m * 2.0 * eta * th_a * gap_a;
        out.tangent(2 * nv + a, 2 * nv + a) += m * eta;
        out.tangent(2 * nv + a, 3 * nv + a) += -m * 2.0 * eta * th_a;
        out.tangent(3 * nv + a, 2 * nv + a) += -m * 2.0 * eta * th_a;
        out.tangent(3 * nv + a, 3 * nv + a) +=
            m * (-2.0 * eta * gap_a + 4.0 * eta * th_a * th_a);
      }
    }
  }

  if (!out.residual.allFinite() || !out.tangent.allFinite()) {
    std::ostringstream os;
    os << "element " << cell << " produced a non-finite residual or tangent";
    throw AssemblyError(os.str(), cell);
  }
  return out;
}

AssembledSystem assemble(const DiscreteProblem& prob, const SystemState& state) {
  const DofMap& dofs = prob.dofs;
  AssembledSystem sys;
  sys.residual = Eigen::VectorXd::Zero(dofs.total_dofs());
  Eigen::VectorXd lumped_mass = Eigen::VectorXd::Zero(dofs.n_nodes());

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(prob.mesh->num_cells()) * 40);

  for (int e = 0; e < prob.mesh->num_cells(); ++e) {
    const ElementContribution ec = element_kernel(prob, state, e, &sys.stats);
    const int ndof = static_cast<int>(ec.dofs.size());
    for (int i = 0; i < ndof; ++i) {
      sys.residual[ec.dofs[i]] += ec.residual[i];
      for (int j = 0; j < ndof; ++j) {
        const double v = ec.tangent(i, j);
        if (v != 0.0)
          trip.emplace_back(ec.dofs[i], ec.dofs[j], v);
      }
    }
    const Cell& c = prob.mesh->cells[e];
    for (int k = 0; k < c.nverts(); ++k)
      lumped_mass[c.nodes[k]] += ec.lumped_mass[k];
  }

  // make sure theta/Lambda diagonals exist so the fictitious stiffness can
  // land on them even when the analytic contribution is identically zero
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    trip.emplace_back(dofs.theta_dof(n), dofs.theta_dof(n), 0.0);
    if (dofs.has_lambda())
      trip.emplace_back(dofs.lambda_dof(n), dofs.lambda_dof(n), 0.0);
  }
  // pin master diagonals: free rotation masters get no element stiffness
  for (int p = 0; p < dofs.n_pins(); ++p)
    for (int k = 0; k < 3; ++k)
      trip.emplace_back(dofs.master_dof(p, k), dofs.master_dof(p, k), 0.0);

  sys.matrix.resize(dofs.total_dofs(), dofs.total_dofs());
  sys.matrix.setFromTriplets(trip.begin(), trip.end());

  // fictitious stiffness scaled by the nodal lumped mass so the guard stays
  // far below the physical 2*Lambda*m and 2*theta*m entries of the nodal
  // complementarity subsystem; matrix only, the residual stays exact
  const double kf = prob.kappa_f();
  const double ku = 1e-12 * (prob.lame.lambda1 + 2.0 * prob.lame.mu);
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    const double kfn = kf * lumped_mass[n];
    double& dt = sys.matrix.coeffRef(dofs.theta_dof(n), dofs.theta_dof(n));
    if (std::abs(dt) < kfn)
      dt += kfn;
    if (dofs.has_lambda()) {
      double& dl = sys.matrix.coeffRef(dofs.lambda_dof(n), dofs.lambda_dof(n));
      if (std::abs(dl) < kfn)
        dl += kfn;
    }
    // solvability guard on fully degraded displacement diagonals (g -> 0 in
    // a tension-only neighborhood)
    for (int comp = 0; comp < 2; ++comp) {
      double& du = sys.matrix.coeffRef(dofs.u_dof(n, comp), dofs.u_dof(n, comp));
      if (std::abs(du) < ku)
        du += ku;
    }
  }
  return sys;
}

KktReport kkt_report(const DiscreteProblem& prob, const SystemState& state, double tol) {
  const DofMap& dofs = prob.dofs;
  KktReport rep;
  rep.tol = tol;
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    const double h = state.x[dofs.phi_dof(n)] - state.phi_prev[n];
    const double theta = state.x[dofs.theta_dof(n)];
    const double gap = h - theta * theta;
    const double lam =
        dofs.has_lambda() ? state.x[dofs.lambda_dof(n)] : -prob.eta * gap;
    const double scale = 1.0 + std::abs(lam) + std::abs(theta);
    if (n == 0 || h < rep.min_h) {
      rep.min_h = h;
      rep.worst_violation_node = n;
    }
    rep.min_multiplier = n == 0 ? lam : std::min(rep.min_multiplier, lam);
    rep.max_lambda_h = std::max(rep.max_lambda_h, std::abs(lam * h));
    rep.max_lambda_h_scaled = std::max(rep.max_lambda_h_scaled, std::abs(lam * h) / scale);
    if (dofs.has_lambda()) {
      rep.max_lambda_theta = std::max(rep.max_lambda_theta, std::abs(lam * theta));
      rep.max_lambda_theta_scaled =
          std::max(rep.max_lambda_theta_scaled, std::abs(lam * theta) / scale);
    }
    rep.max_slack_gap = std::max(rep.max_slack_gap, std::abs(gap));
  }
  return rep;
}

} // namespace pfrac
