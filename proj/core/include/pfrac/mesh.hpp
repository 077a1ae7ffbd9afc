#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace pfrac {

enum class CellType { Quad4, Tri3 };

struct Cell {
  CellType type = CellType::Quad4;
  std::array<int, 4> nodes{0, 0, 0, 0}; ///< counter-clockwise; tri3 uses first 3

  int nverts() const { return type == CellType::Quad4 ? 4 : 3; }
};

/// 2D unstructured mesh of linear quads/triangles with named node and edge
/// sets. Immutable once built by the generators; shareable across threads.
struct Mesh {
  std::vector<std::array<double, 2>> nodes; ///< coordinates, mm
  std::vector<Cell> cells;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<std::array<int, 2>>> edge_sets;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
};

/// Axis-aligned refinement box with a target element edge inside.
struct RefinementBand {
  double xmin = 0.0, xmax = 0.0;
  double ymin = 0.0, ymax = 0.0;
  double target_h = 0.0;
};

/// Recipe for a graded tensor-product mesh on [x0, x0+width] x [y0, y0+height].
/// Band interiors get edges <= target_h; outside, sizes grow gradually up to
/// coarse_h. mandatory_x/y are grid lines that must exist exactly (notch
/// lines, load-segment endpoints, carve boundaries).
struct RectMeshSpec {
  double width = 0.0, height = 0.0;
  double x0 = 0.0, y0 = 0.0;
  double coarse_h = 0.0;
  std::vector<RefinementBand> bands;
  std::vector<double> mandatory_x;
  std::vector<double> mandatory_y;
};

Mesh generate_rect_mesh(const RectMeshSpec& spec);
Mesh generate_rect_mesh(double width, double height, double coarse_h,
                        const std::vector<RefinementBand>& bands);

/// Duplicates the nodes along the open segment [p0, p1) so the two sides
/// become topologically disconnected; the node at p1 (the crack tip) stays
/// single. The segment must lie on existing element edges.
Mesh cut_notch(const Mesh& mesh, std::array<double, 2> p0, std::array<double, 2> p1);

/// Removes cells whose centroid falls inside the box. Box edges should be
/// grid lines so the cut boundary is clean.
void carve_rect(Mesh& mesh, double xmin, double xmax, double ymin, double ymax);

/// Removes cells whose centroid falls inside the circle, projects leftover
/// inside nodes radially onto it, and relaxes the ring of neighbors without
/// letting any Jacobian go nonpositive.
void carve_circle(Mesh& mesh, std::array<double, 2> center, double radius);

/// Drops nodes not referenced by any cell, renumbering cells and sets.
void compact_nodes(Mesh& mesh);

/// Jacobian determinant minimum over all quadrature points of a cell.
double min_cell_jacobian(const Mesh& mesh, int cell);

/// Throws MeshError naming the first offending element or set.
void validate_mesh(const Mesh& mesh);

/// V - E + F with E counted as unique undirected node pairs.
int euler_characteristic(const Mesh& mesh);

/// Longest edge among cells whose centroid lies inside the box.
double max_edge_in_box(const Mesh& mesh, double xmin, double xmax, double ymin, double ymax);

/// Node ids matching a predicate within tol (used by the benchmark catalog).
std::vector<int> nodes_on_line_x(const Mesh& mesh, double x, double tol);
std::vector<int> nodes_on_line_y(const Mesh& mesh, double y, double tol);
std::vector<int> nodes_on_circle(const Mesh& mesh, std::array<double, 2> center, double radius,
                                 double tol);
std::vector<int> nodes_near_point(const Mesh& mesh, std::array<double, 2> p, double tol);

Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

} // namespace pfrac
