#pragma once

#include "pfrac/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <string>
#include <vector>

namespace pfrac {

enum class Formulation { LMM, Penalty };

enum class Field { U, Phi, Theta, Lambda };

std::string to_string(Formulation f);

/// Field-wise DOF numbering for the coupled problem. Layout:
/// [ux, uy] per node | phi per node | theta per node | lambda per node (LMM
/// only) | 3 master DOFs per rigid pin (tx, ty, rot). Masters belong to the
/// displacement field.
class DofMap {
public:
  DofMap() = default;
  DofMap(int n_nodes, Formulation form, int n_pins = 0);

  int u_dof(int node, int comp) const { return 2 * node + comp; }
  int phi_dof(int node) const { return 2 * n_nodes_ + node; }
  int theta_dof(int node) const { return 3 * n_nodes_ + node; }
  int lambda_dof(int node) const { return 4 * n_nodes_ + node; }
  int master_dof(int pin, int which) const { return mesh_dofs_ + 3 * pin + which; }

  bool has_lambda() const { return form_ == Formulation::LMM; }
  Formulation formulation() const { return form_; }
  int n_nodes() const { return n_nodes_; }
  int n_pins() const { return n_pins_; }
  int total_dofs() const { return total_; }
  int fields_per_node() const { return has_lambda() ? 5 : 4; }

  Field field_of(int dof) const;
  /// node index for a mesh dof, -1 for pin masters
  int node_of(int dof) const;

private:
  int n_nodes_ = 0;
  int n_pins_ = 0;
  int mesh_dofs_ = 0;
  int total_ = 0;
  Formulation form_ = Formulation::LMM;
};

/// Sparse operator taking reduced (free) updates to full updates, plus the
/// full dof id behind every reduced index.
struct Reduction {
  Eigen::SparseMatrix<double> c;
  std::vector<int> full_of_reduced;
};

/// Dirichlet and multipoint (rigid-pin) constraints plus the reduction
/// operator taking reduced updates to full updates. Fixed DOFs carry a
/// value = scale * applied(t); tied DOFs are linear combinations of pin
/// master DOFs.
class ConstraintSet {
public:
  void init(const DofMap& dofs);

  void fix(int dof, double scale); ///< value = scale * applied
  void tie(int dof, std::array<std::pair<int, double>, 2> terms, int nterms);

  /// Ties every u-DOF of the loop nodes to the pin's 3 masters with
  /// small-rotation kinematics about the center.
  void apply_rigid_pin(const Mesh& mesh, const DofMap& dofs, int pin,
                       const std::vector<int>& loop_nodes, std::array<double, 2> center);

  /// Builds the reduced index and the sparse reduction operator C
  /// (full x reduced). Call once after all fix/tie calls.
  void finalize(const DofMap& dofs);

  /// Writes prescribed values (fixed then tied) into the full vector.
  void apply_values(Eigen::VectorXd& x, double applied) const;

  bool is_fixed(int dof) const { return kind_[dof] == 1; }
  bool is_tied(int dof) const { return kind_[dof] == 2; }
  bool is_free(int dof) const { return kind_[dof] == 0; }
  double fixed_scale(int dof) const { return scale_[dof]; }

  int n_reduced() const { return n_reduced_; }
  int reduced_index(int dof) const { return reduced_[dof]; } ///< -1 if none
  const Eigen::SparseMatrix<double>& reduction() const { return full_.c; }
  const Reduction& full_reduction() const { return full_; }

  /// Reduction restricted to one sector of fields (the displacement sector
  /// including pin masters, or the phase/slack/multiplier sector); the other
  /// sector's dofs are held fixed.
  Reduction sector_reduction(const DofMap& dofs, bool u_sector) const;

  /// Reaction at a fixed dof: its own residual row plus coeff-weighted rows
  /// of any dofs tied to it (pin masters collect their loop).
  double reaction(const Eigen::VectorXd& residual, int dof) const;

  int n_fixed() const { return n_fixed_; }

private:
  struct Tie {
    int dof;
    std::array<std::pair<int, double>, 2> terms;
    int nterms;
  };
  std::vector<signed char> kind_; // 0 free, 1 fixed, 2 tied
  std::vector<double> scale_;
  std::vector<Tie> ties_;
  std::vector<int> reduced_;
  Reduction full_;
  int n_reduced_ = 0;
  int n_fixed_ = 0;
};

/// Current and previous-step solution. phi_prev is per node and only updated
/// on step acceptance.
struct SystemState {
  Eigen::VectorXd x;        ///< all dofs, full numbering
  Eigen::VectorXd phi_prev; ///< per node
  double t = 0.0;
  int step = 0;

  void init(const DofMap& dofs) {
    x = Eigen::VectorXd::Zero(dofs.total_dofs());
    phi_prev = Eigen::VectorXd::Zero(dofs.n_nodes());
    t = 0.0;
    step = 0;
  }
};

} // namespace pfrac
