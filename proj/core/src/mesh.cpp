#include "pfrac/mesh.hpp"

#include "pfrac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pfrac {

namespace {

// Size growth rate away from refined regions; adjacent cells differ by at
// most ~1.4x.
constexpr double kGradingSlope = 0.4;

struct FineInterval {
  double lo, hi, h;
};

double desired_size(double x, double coarse_h, const std::vector<FineInterval>& fine) {
  double h = coarse_h;
  for (const auto& f : fine) {
    double dist = 0.0;
    if (x < f.lo)
      dist = f.lo - x;
    else if (x > f.hi)
      dist = x - f.hi;
    h = std::min(h, f.h + kGradingSlope * dist);
  }
  return h;
}

std::vector<double> grade_axis(double lo_total, double len, double coarse_h,
                               const std::vector<FineInterval>& fine,
                               const std::vector<double>& mandatory) {
  const double tol = 1e-9 * std::max(len, 1.0);
  std::vector<double> brk = {lo_total, lo_total + len};
  for (double m : mandatory)
    if (m > lo_total + tol && m < lo_total + len - tol)
      brk.push_back(m);
  for (const auto& f : fine) {
    if (f.lo > lo_total + tol && f.lo < lo_total + len - tol)
      brk.push_back(f.lo);
    if (f.hi > lo_total + tol && f.hi < lo_total + len - tol)
      brk.push_back(f.hi);
  }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end(),
                        [tol](double a, double b) { return std::abs(a - b) < tol; }),
            brk.end());

  std::vector<double> pts = {brk.front()};
  for (size_t i = 0; i + 1 < brk.size(); ++i) {
    const double a = brk[i], b = brk[i + 1];
    // first pass: march with the desired size field to fix the cell count,
    // then rescale so the interval divides exactly
    std::vector<double> sizes;
    double x = a;
    while (x < b - tol) {
      double s = desired_size(x, coarse_h, fine);
      s = std::min(s, b - a);
      sizes.push_back(s);
      x += s;
    }
    if (sizes.empty())
      sizes.push_back(b - a);
    double total = 0.0;
    for (double s : sizes)
      total += s;
    const double scale = (b - a) / total;
    double acc = a;
    for (size_t k = 0; k + 1 < sizes.size(); ++k) {
      acc += sizes[k] * scale;
      pts.push_back(acc);
    }
    pts.push_back(b);
  }
  return pts;
}

} // namespace

Mesh generate_rect_mesh(const RectMeshSpec& spec) {
  if (!(spec.width > 0.0) || !(spec.height > 0.0))
    throw MeshError("generate_rect_mesh: dimensions must be positive");
  if (!(spec.coarse_h > 0.0))
    throw MeshError("generate_rect_mesh: coarse_h must be positive");

  std::vector<FineInterval> fx, fy;
  for (const auto& b : spec.bands) {
    if (!(b.target_h > 0.0))
      throw MeshError("generate_rect_mesh: band target_h must be positive");
    if (b.target_h > spec.coarse_h + 1e-15)
      throw MeshError("generate_rect_mesh: band target_h exceeds coarse_h");
    const double xlo = std::max(b.xmin, spec.x0);
    const double xhi = std::min(b.xmax, spec.x0 + spec.width);
    const double ylo = std::max(b.ymin, spec.y0);
    const double yhi = std::min(b.ymax, spec.y0 + spec.height);
    if (xlo >= xhi || ylo >= yhi) {
      std::ostringstream os;
      os << "generate_rect_mesh: band [" << b.xmin << "," << b.xmax << "]x[" << b.ymin << ","
         << b.ymax << "] does not intersect the domain";
      throw MeshError(os.str());
    }
    fx.push_back({xlo, xhi, b.target_h});
    fy.push_back({ylo, yhi, b.target_h});
  }

  const std::vector<double> xs =
      grade_axis(spec.x0, spec.width, spec.coarse_h, fx, spec.mandatory_x);
  const std::vector<double> ys =
      grade_axis(spec.y0, spec.height, spec.coarse_h, fy, spec.mandatory_y);

  Mesh mesh;
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  mesh.nodes.reserve(static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      mesh.nodes.push_back({xs[i], ys[j]});
  mesh.cells.reserve(static_cast<size_t>(nx - 1) * (ny - 1));
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      Cell c;
      c.type = CellType::Quad4;
      c.nodes = {j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i};
      mesh.cells.push_back(c);
    }
  return mesh;
}

Mesh generate_rect_mesh(double width, double height, double coarse_h,
                        const std::vector<RefinementBand>& bands) {
  RectMeshSpec spec;
  spec.width = width;
  spec.height = height;
  spec.coarse_h = coarse_h;
  spec.bands = bands;
  return generate_rect_mesh(spec);
}

namespace {

std::array<double, 2> centroid(const Mesh& mesh, const Cell& c) {
  double x = 0.0, y = 0.0;
  for (int k = 0; k < c.nverts(); ++k) {
    x += mesh.nodes[c.nodes[k]][0];
    y += mesh.nodes[c.nodes[k]][1];
  }
  return {x / c.nverts(), y / c.nverts()};
}

} // namespace

Mesh cut_notch(const Mesh& mesh, std::array<double, 2> p0, std::array<double, 2> p1) {
  const double dx = p1[0] - p0[0], dy = p1[1] - p0[1];
  const double len = std::hypot(dx, dy);
  if (len == 0.0)
    return mesh;

  double scale = 1.0;
  for (const auto& n : mesh.nodes)
    scale = std::max({scale, std::abs(n[0]), std::abs(n[1])});
  const double tol = 1e-9 * scale;

  // nodes on the open segment [p0, p1): parameter t in [0, 1)
  std::vector<int> seg_nodes;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double rx = mesh.nodes[i][0] - p0[0], ry = mesh.nodes[i][1] - p0[1];
    const double t = (rx * dx + ry * dy) / (len * len);
    const double d = std::abs(rx * dy - ry * dx) / len;
    if (d < tol && t > -tol / len && t < 1.0 - 0.5 * tol / len)
      seg_nodes.push_back(i);
  }
  if (seg_nodes.empty())
    throw MeshError("cut_notch: no mesh nodes lie on the segment (mesh not conforming)");

  bool tip_found = false;
  for (const auto& n : mesh.nodes)
    if (std::hypot(n[0] - p1[0], n[1] - p1[1]) < tol)
      tip_found = true;
  if (!tip_found)
    throw MeshError("cut_notch: crack tip does not coincide with a mesh node");

  Mesh out = mesh;
  std::map<int, int> dup; // original node -> duplicate id
  std::vector<char> above(mesh.num_cells(), 0);
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto c = centroid(mesh, mesh.cells[e]);
    const double cross = (c[0] - p0[0]) * dy - (c[1] - p0[1]) * dx;
    above[e] = cross > 0.0 ? 1 : 0;
  }

  for (int n : seg_nodes) {
    bool on_pos = false, on_neg = false;
    for (int e = 0; e < mesh.num_cells(); ++e) {
      const Cell& c = mesh.cells[e];
      for (int k = 0; k < c.nverts(); ++k)
        if (c.nodes[k] == n)
          (above[e] ? on_pos : on_neg) = true;
    }
    if (!(on_pos && on_neg)) {
      std::ostringstream os;
      os << "cut_notch: node " << n << " on the segment touches only one side "
         << "(segment not edge-conforming)";
      throw MeshError(os.str());
    }
    dup[n] = out.num_nodes();
    out.nodes.push_back(mesh.nodes[n]);
  }

  // cells below the segment reference the duplicates
  for (int e = 0; e < out.num_cells(); ++e) {
    if (above[e])
      continue;
    for (int k = 0; k < out.cells[e].nverts(); ++k) {
      auto it = dup.find(out.cells[e].nodes[k]);
      if (it != dup.end())
        out.cells[e].nodes[k] = it->second;
    }
  }
  return out;
}

void carve_rect(Mesh& mesh, double xmin, double xmax, double ymin, double ymax) {
  std::vector<Cell> kept;
  kept.reserve(mesh.cells.size());
  for (const auto& c : mesh.cells) {
    const auto ctr = centroid(mesh, c);
    const bool inside = ctr[0] > xmin && ctr[0] < xmax && ctr[1] > ymin && ctr[1] < ymax;
    if (!inside)
      kept.push_back(c);
  }
  mesh.cells = std::move(kept);
  compact_nodes(mesh);
}

void carve_circle(Mesh& mesh, std::array<double, 2> center, double radius) {
  auto dist = [&](const std::array<double, 2>& p) {
    return std::hypot(p[0] - center[0], p[1] - center[1]);
  };

  // snap nodes near the circle onto it first so the cut boundary becomes a
  // polygon inscribed in the circle (every boundary node exactly on it)
  std::vector<double> local_h(mesh.nodes.size(), 0.0);
  for (const auto& c : mesh.cells) {
    const int nv = c.nverts();
    for (int k = 0; k < nv; ++k) {
      const auto& a = mesh.nodes[c.nodes[k]];
      const auto& b = mesh.nodes[c.nodes[(k + 1) % nv]];
      const double e = std::hypot(b[0] - a[0], b[1] - a[1]);
      local_h[c.nodes[k]] = std::max(local_h[c.nodes[k]], e);
      local_h[c.nodes[(k + 1) % nv]] = std::max(local_h[c.nodes[(k + 1) % nv]], e);
    }
  }
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double d = dist(mesh.nodes[i]);
    if (d > 1e-12 * radius && std::abs(d - radius) < 0.45 * local_h[i]) {
      const double f = radius / d;
      mesh.nodes[i] = {center[0] + (mesh.nodes[i][0] - center[0]) * f,
                       center[1] + (mesh.nodes[i][1] - center[1]) * f};
    }
  }

  std::vector<Cell> kept;
  kept.reserve(mesh.cells.size());
  for (const auto& c : mesh.cells) {
    if (dist(centroid(mesh, c)) >= radius)
      kept.push_back(c);
  }
  mesh.cells = std::move(kept);
  compact_nodes(mesh);

  // any leftover inside node gets projected radially onto the circle
  std::vector<char> projected(mesh.nodes.size(), 0);
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double d = dist(mesh.nodes[i]);
    if (d < radius) {
      if (d < 1e-12 * radius)
        throw MeshError("carve_circle: node at circle center survived carving");
      const double f = radius / d;
      mesh.nodes[i] = {center[0] + (mesh.nodes[i][0] - center[0]) * f,
                       center[1] + (mesh.nodes[i][1] - center[1]) * f};
      projected[i] = 1;
    } else if (d < radius * (1.0 + 1e-9)) {
      projected[i] = 1; // snapped earlier; keep it pinned during smoothing
    }
  }

  // guarded Laplacian relaxation of the first ring around the new boundary
  std::vector<std::set<int>> adj(mesh.nodes.size());
  std::vector<std::vector<int>> node_cells(mesh.nodes.size());
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const Cell& c = mesh.cells[e];
    const int nv = c.nverts();
    for (int k = 0; k < nv; ++k) {
      adj[c.nodes[k]].insert(c.nodes[(k + 1) % nv]);
      adj[c.nodes[(k + 1) % nv]].insert(c.nodes[k]);
      node_cells[c.nodes[k]].push_back(e);
    }
  }
  std::vector<int> ring;
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (projected[i])
      continue;
    bool near = false;
    for (int nb : adj[i])
      if (projected[nb])
        near = true;
    if (near)
      ring.push_back(static_cast<int>(i));
  }
  for (int pass = 0; pass < 2; ++pass) {
    for (int i : ring) {
      double sx = 0.0, sy = 0.0;
      for (int nb : adj[i]) {
        sx += mesh.nodes[nb][0];
        sy += mesh.nodes[nb][1];
      }
      const auto old = mesh.nodes[i];
      const double n = static_cast<double>(adj[i].size());
      const std::array<double, 2> cand = {0.5 * (old[0] + sx / n), 0.5 * (old[1] + sy / n)};
      if (dist(cand) <= radius)
        continue;
      mesh.nodes[i] = cand;
      double jmin = 1.0;
      for (int e : node_cells[i])
        jmin = std::min(jmin, min_cell_jacobian(mesh, e));
      if (jmin <= 0.0)
        mesh.nodes[i] = old;
    }
  }
}

void compact_nodes(Mesh& mesh) {
  std::vector<int> remap(mesh.nodes.size(), -1);
  for (const auto& c : mesh.cells)
    for (int k = 0; k < c.nverts(); ++k)
      remap[c.nodes[k]] = 0;
  int next = 0;
  for (size_t i = 0; i < remap.size(); ++i)
    if (remap[i] == 0)
      remap[i] = next++;
  std::vector<std::array<double, 2>> nodes(next);
  for (size_t i = 0; i < remap.size(); ++i)
    if (remap[i] >= 0)
      nodes[remap[i]] = mesh.nodes[i];
  mesh.nodes = std::move(nodes);
  for (auto& c : mesh.cells)
    for (int k = 0; k < c.nverts(); ++k)
      c.nodes[k] = remap[c.nodes[k]];
  for (auto& [name, ids] : mesh.node_sets) {
    std::vector<int> out;
    for (int id : ids)
      if (remap[id] >= 0)
        out.push_back(remap[id]);
    ids = std::move(out);
  }
  for (auto& [name, edges] : mesh.edge_sets) {
    std::vector<std::array<int, 2>> out;
    for (auto e : edges)
      if (remap[e[0]] >= 0 && remap[e[1]] >= 0)
        out.push_back({remap[e[0]], remap[e[1]]});
    edges = std::move(out);
  }
}

double min_cell_jacobian(const Mesh& mesh, int cell) {
  const Cell& c = mesh.cells[cell];
  if (c.type == CellType::Tri3) {
    const auto& a = mesh.nodes[c.nodes[0]];
    const auto& b = mesh.nodes[c.nodes[1]];
    const auto& d = mesh.nodes[c.nodes[2]];
    return (b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]);
  }
  // quad4: check the Jacobian at the 2x2 Gauss points
  const double g = 1.0 / std::sqrt(3.0);
  double jmin = std::numeric_limits<double>::max();
  for (double eta : {-g, g})
    for (double xi : {-g, g}) {
      const double dndxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
      const double dndeta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
      double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
      for (int k = 0; k < 4; ++k) {
        const auto& p = mesh.nodes[c.nodes[k]];
        j11 += dndxi[k] * p[0];
        j12 += dndxi[k] * p[1];
        j21 += dndeta[k] * p[0];
        j22 += dndeta[k] * p[1];
      }
      jmin = std::min(jmin, j11 * j22 - j12 * j21);
    }
  return jmin;
}

void validate_mesh(const Mesh& mesh) {
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const Cell& c = mesh.cells[e];
    for (int k = 0; k < c.nverts(); ++k)
      if (c.nodes[k] < 0 || c.nodes[k] >= mesh.num_nodes()) {
        std::ostringstream os;
        os << "element " << e << " references nonexistent node " << c.nodes[k];
        throw MeshError(os.str());
      }
    if (min_cell_jacobian(mesh, e) <= 0.0) {
      std::ostringstream os;
      os << "element " << e << " has a nonpositive Jacobian";
      throw MeshError(os.str());
    }
  }
  std::set<std::array<int, 4>> seen;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    std::array<int, 4> key = mesh.cells[e].nodes;
    std::sort(key.begin(), key.begin() + mesh.cells[e].nverts());
    if (mesh.cells[e].nverts() == 3)
      key[3] = -1;
    if (!seen.insert(key).second) {
      std::ostringstream os;
      os << "element " << e << " duplicates another element's connectivity";
      throw MeshError(os.str());
    }
  }
  for (const auto& [name, ids] : mesh.node_sets)
    for (int id : ids)
      if (id < 0 || id >= mesh.num_nodes())
        throw MeshError("node set '" + name + "' references nonexistent node");
  for (const auto& [name, edges] : mesh.edge_sets)
    for (auto e : edges)
      if (e[0] < 0 || e[0] >= mesh.num_nodes() || e[1] < 0 || e[1] >= mesh.num_nodes())
        throw MeshError("edge set '" + name + "' references nonexistent node");
}

int euler_characteristic(const Mesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& c : mesh.cells) {
    const int nv = c.nverts();
    for (int k = 0; k < nv; ++k) {
      int a = c.nodes[k], b = c.nodes[(k + 1) % nv];
      if (a > b)
        std::swap(a, b);
      edges.insert({a, b});
    }
  }
  return mesh.num_nodes() - static_cast<int>(edges.size()) + mesh.num_cells();
}

double max_edge_in_box(const Mesh& mesh, double xmin, double xmax, double ymin, double ymax) {
  double hmax = 0.0;
  for (const auto& c : mesh.cells) {
    const auto ctr = centroid(mesh, c);
    if (ctr[0] < xmin || ctr[0] > xmax || ctr[1] < ymin || ctr[1] > ymax)
      continue;
    const int nv = c.nverts();
    for (int k = 0; k < nv; ++k) {
      const auto& a = mesh.nodes[c.nodes[k]];
      const auto& b = mesh.nodes[c.nodes[(k + 1) % nv]];
      hmax = std::max(hmax, std::hypot(b[0] - a[0], b[1] - a[1]));
    }
  }
  return hmax;
}

std::vector<int> nodes_on_line_x(const Mesh& mesh, double x, double tol) {
  std::vector<int> out;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (std::abs(mesh.nodes[i][0] - x) < tol)
      out.push_back(i);
  return out;
}

std::vector<int> nodes_on_line_y(const Mesh& mesh, double y, double tol) {
  std::vector<int> out;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (std::abs(mesh.nodes[i][1] - y) < tol)
      out.push_back(i);
  return out;
}

std::vector<int> nodes_on_circle(const Mesh& mesh, std::array<double, 2> center, double radius,
                                 double tol) {
  std::vector<int> out;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double d = std::hypot(mesh.nodes[i][0] - center[0], mesh.nodes[i][1] - center[1]);
    if (std::abs(d - radius) < tol)
      out.push_back(i);
  }
  return out;
}

std::vector<int> nodes_near_point(const Mesh& mesh, std::array<double, 2> p, double tol) {
  std::vector<int> out;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (std::hypot(mesh.nodes[i][0] - p[0], mesh.nodes[i][1] - p[1]) < tol)
      out.push_back(i);
  return out;
}

} // namespace pfrac
