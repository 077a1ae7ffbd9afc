#pragma once

#include "pfrac/dofmap.hpp"
#include "pfrac/material.hpp"
#include "pfrac/mesh.hpp"

#include <Eigen/Sparse>

#include <memory>

namespace pfrac {

/// Everything needed to evaluate residual and tangent of the coupled
/// (u, phi, theta[, Lambda]) problem on one mesh.
struct DiscreteProblem {
  std::shared_ptr<const Mesh> mesh;
  DofMap dofs;
  ConstraintSet cons;
  PhaseFieldModel model;
  LameParams lame;
  FractureParams frac;
  Formulation form = Formulation::LMM;
  double eta = 1e6; ///< penalty parameter, N/mm^2

  /// Fictitious stiffness added to vanishing theta/Lambda diagonals.
  double kappa_f() const { return 1e-8 * frac.gc / frac.length_scale; }
};

struct AssemblyStats {
  long clip_warnings = 0; ///< Gauss points with |phi overshoot| > 1e-8
};

struct AssembledSystem {
  Eigen::SparseMatrix<double> matrix; ///< full numbering, row-compressed
  Eigen::VectorXd residual;           ///< internal force; no external loads here
  AssemblyStats stats;
};

/// Dense residual and tangent of one element, with global dof ids. Local dof
/// order: u (2 per node), phi, theta, lambda (LMM only).
struct ElementContribution {
  std::vector<int> dofs;
  Eigen::VectorXd residual;
  Eigen::MatrixXd tangent;
  Eigen::VectorXd lumped_mass; ///< int N_a per element node
};

ElementContribution element_kernel(const DiscreteProblem& prob, const SystemState& state,
                                   int cell, AssemblyStats* stats = nullptr);

/// Ordered sequential assembly; identical inputs give bit-identical output.
AssembledSystem assemble(const DiscreteProblem& prob, const SystemState& state);

/// Nodal verification of the optimality conditions at a converged state.
/// For the penalty formulation the effective multiplier is -eta (h - theta^2).
struct KktReport {
  double min_h = 0.0;            ///< most negative constraint value h
  double min_multiplier = 0.0;   ///< most negative (effective) multiplier
  double max_lambda_h = 0.0;     ///< max |Lambda h|
  double max_lambda_theta = 0.0; ///< max |Lambda theta| (LMM only)
  double max_slack_gap = 0.0;    ///< max |h - theta^2|
  /// same maxima divided by the nodal scale 1 + |Lambda| + |theta|
  double max_lambda_h_scaled = 0.0;
  double max_lambda_theta_scaled = 0.0;
  int worst_violation_node = -1; ///< node attaining min_h
  double tol = 0.0;

  bool primal_ok() const { return min_h >= -tol; }
};

KktReport kkt_report(const DiscreteProblem& prob, const SystemState& state, double tol);

} // namespace pfrac
