#include "pfrac/dofmap.hpp"

#include "pfrac/errors.hpp"

namespace pfrac {

std::string to_string(Formulation f) { return f == Formulation::LMM ? "lmm" : "penalty"; }

DofMap::DofMap(int n_nodes, Formulation form, int n_pins)
    : n_nodes_(n_nodes), n_pins_(n_pins), form_(form) {
  mesh_dofs_ = n_nodes * fields_per_node();
  total_ = mesh_dofs_ + 3 * n_pins;
}

Field DofMap::field_of(int dof) const {
  if (dof >= mesh_dofs_)
    return Field::U; // pin masters move with the displacement field
  if (dof < 2 * n_nodes_)
    return Field::U;
  if (dof < 3 * n_nodes_)
    return Field::Phi;
  if (dof < 4 * n_nodes_)
    return Field::Theta;
  return Field::Lambda;
}

int DofMap::node_of(int dof) const {
  if (dof >= mesh_dofs_)
    return -1;
  if (dof < 2 * n_nodes_)
    return dof / 2;
  return dof % n_nodes_;
}

void ConstraintSet::init(const DofMap& dofs) {
  kind_.assign(dofs.total_dofs(), 0);
  scale_.assign(dofs.total_dofs(), 0.0);
  ties_.clear();
  reduced_.clear();
  n_reduced_ = 0;
  n_fixed_ = 0;
}

void ConstraintSet::fix(int dof, double scale) {
  if (kind_[dof] == 1) {
    scale_[dof] = scale; // later BCs win on overlapping sets (e.g. corners)
    return;
  }
  if (kind_[dof] == 2)
    throw Error("ConstraintSet: dof is already tied, cannot also fix it");
  kind_[dof] = 1;
  scale_[dof] = scale;
  ++n_fixed_;
}

void ConstraintSet::tie(int dof, std::array<std::pair<int, double>, 2> terms, int nterms) {
  if (kind_[dof] != 0)
    throw Error("ConstraintSet: dof is already constrained, cannot tie it");
  kind_[dof] = 2;
  ties_.push_back({dof, terms, nterms});
}

void ConstraintSet::apply_rigid_pin(const Mesh& mesh, const DofMap& dofs, int pin,
                                    const std::vector<int>& loop_nodes,
                                    std::array<double, 2> center) {
  if (loop_nodes.size() < 3)
    throw Error("apply_rigid_pin: pin node loop is not closed (needs >= 3 nodes)");
  const int tx = dofs.master_dof(pin, 0);
  const int ty = dofs.master_dof(pin, 1);
  const int rot = dofs.master_dof(pin, 2);
  for (int n : loop_nodes) {
    const double rx = mesh.nodes[n][0] - center[0];
    const double ry = mesh.nodes[n][1] - center[1];
    // small-rotation rigid kinematics: u = t + rot x r
    tie(dofs.u_dof(n, 0), {{{tx, 1.0}, {rot, -ry}}}, 2);
    tie(dofs.u_dof(n, 1), {{{ty, 1.0}, {rot, rx}}}, 2);
  }
}

void ConstraintSet::finalize(const DofMap& dofs) {
  const int n = dofs.total_dofs();
  reduced_.assign(n, -1);
  n_reduced_ = 0;
  for (int d = 0; d < n; ++d)
    if (kind_[d] == 0)
      reduced_[d] = n_reduced_++;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n);
  full_.full_of_reduced.assign(n_reduced_, -1);
  for (int d = 0; d < n; ++d)
    if (kind_[d] == 0) {
      trip.emplace_back(d, reduced_[d], 1.0);
      full_.full_of_reduced[reduced_[d]] = d;
    }
  for (const auto& t : ties_)
    for (int k = 0; k < t.nterms; ++k) {
      const int m = t.terms[k].first;
      if (kind_[m] == 2)
        throw Error("ConstraintSet: chained ties are not supported");
      if (kind_[m] == 0)
        trip.emplace_back(t.dof, reduced_[m], t.terms[k].second);
    }
  full_.c.resize(n, n_reduced_);
  full_.c.setFromTriplets(trip.begin(), trip.end());
}

Reduction ConstraintSet::sector_reduction(const DofMap& dofs, bool u_sector) const {
  const int n = dofs.total_dofs();
  Reduction red;
  std::vector<int> idx(n, -1);
  int count = 0;
  for (int d = 0; d < n; ++d) {
    if (kind_[d] != 0)
      continue;
    const bool is_u = dofs.field_of(d) == Field::U;
    if (is_u == u_sector) {
      idx[d] = count++;
      red.full_of_reduced.push_back(d);
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(count);
  for (int d = 0; d < n; ++d)
    if (idx[d] >= 0)
      trip.emplace_back(d, idx[d], 1.0);
  for (const auto& t : ties_)
    for (int k = 0; k < t.nterms; ++k) {
      const int m = t.terms[k].first;
      if (idx[m] >= 0)
        trip.emplace_back(t.dof, idx[m], t.terms[k].second);
    }
  red.c.resize(n, count);
  red.c.setFromTriplets(trip.begin(), trip.end());
  return red;
}

void ConstraintSet::apply_values(Eigen::VectorXd& x, double applied) const {
  for (int d = 0; d < static_cast<int>(kind_.size()); ++d)
    if (kind_[d] == 1)
      x[d] = scale_[d] * applied;
  for (const auto& t : ties_) {
    double v = 0.0;
    for (int k = 0; k < t.nterms; ++k)
      v += t.terms[k].second * x[t.terms[k].first];
    x[t.dof] = v;
  }
}

double ConstraintSet::reaction(const Eigen::VectorXd& residual, int dof) const {
  double r = residual[dof];
  for (const auto& t : ties_)
    for (int k = 0; k < t.nterms; ++k)
      if (t.terms[k].first == dof)
        r += t.terms[k].second * residual[t.dof];
  return r;
}

} // namespace pfrac
