#include "pfrac/errors.hpp"
#include "pfrac/mesh.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cmath>
#include <set>

using namespace pfrac;

TEST_CASE("uniform structured grid") {
  const Mesh m = generate_rect_mesh(1.0, 1.0, 0.25, {});
  CHECK(m.num_nodes() == 25);
  CHECK(m.num_cells() == 16);
  validate_mesh(m);
}

TEST_CASE("refinement band bounds element edges") {
  RefinementBand band{0.0, 1.0, 0.45, 0.55, 0.0075};
  const Mesh m = generate_rect_mesh(1.0, 1.0, 0.075, {band});
  validate_mesh(m);
  CHECK(max_edge_in_box(m, 0.0, 1.0, 0.45, 0.55) <= 0.0075 + 1e-12);
  // grading forbids hanging nodes by construction (tensor product); check
  // the transition stays bounded by the coarse size
  CHECK(max_edge_in_box(m, 0.0, 1.0, 0.0, 1.0) <= 0.075 + 1e-12);
}

TEST_CASE("band outside the domain is rejected") {
  RefinementBand band{2.0, 3.0, 2.0, 3.0, 0.01};
  CHECK_THROWS_AS(generate_rect_mesh(1.0, 1.0, 0.1, {band}), MeshError);
}

TEST_CASE("band coarser than the background is rejected") {
  RefinementBand band{0.0, 1.0, 0.0, 1.0, 0.5};
  CHECK_THROWS_AS(generate_rect_mesh(1.0, 1.0, 0.1, {band}), MeshError);
}

TEST_CASE("notch cut disconnects the two sides") {
  RectMeshSpec spec;
  spec.width = 1.0;
  spec.height = 1.0;
  spec.coarse_h = 0.125;
  spec.mandatory_x = {0.5};
  spec.mandatory_y = {0.5};
  const Mesh m0 = generate_rect_mesh(spec);
  const int before = m0.num_nodes();
  const Mesh m = cut_notch(m0, {0.0, 0.5}, {0.5, 0.5});
  validate_mesh(m);

  // nodes on the open segment: x in {0, 0.125, 0.25, 0.375} at y = 0.5
  CHECK(m.num_nodes() == before + 4);

  // the tip at (0.5, 0.5) stays single
  CHECK(nodes_near_point(m, {0.5, 0.5}, 1e-9).size() == 1);
  CHECK(nodes_near_point(m, {0.25, 0.5}, 1e-9).size() == 2);
  CHECK(nodes_near_point(m, {0.0, 0.5}, 1e-9).size() == 2);

  // still one connected disk: V - E + F = 1
  CHECK(euler_characteristic(m) == 1);
  CHECK(euler_characteristic(m0) == 1);

  SUBCASE("zero-length segment leaves the mesh unchanged") {
    const Mesh same = cut_notch(m0, {0.2, 0.2}, {0.2, 0.2});
    CHECK(same.num_nodes() == m0.num_nodes());
  }
  SUBCASE("non-conforming segment is rejected") {
    CHECK_THROWS_AS(cut_notch(m0, {0.0, 0.43}, {0.5, 0.43}), MeshError);
  }
}

TEST_CASE("carve_rect removes a slot with clean walls") {
  RectMeshSpec spec;
  spec.width = 4.0;
  spec.height = 2.0;
  spec.coarse_h = 0.25;
  spec.mandatory_x = {1.75, 2.25};
  spec.mandatory_y = {1.0};
  Mesh m = generate_rect_mesh(spec);
  const int cells_before = m.num_cells();
  carve_rect(m, 1.75, 2.25, -1.0, 1.0);
  validate_mesh(m);
  CHECK(m.num_cells() == cells_before - 2 * 4);
  CHECK(max_edge_in_box(m, 1.75, 2.25, 0.0, 1.0) == 0.0);
}

TEST_CASE("carve_circle keeps Jacobians positive and builds a round boundary") {
  RectMeshSpec spec;
  spec.width = 40.0;
  spec.height = 40.0;
  spec.coarse_h = 1.0;
  Mesh m = generate_rect_mesh(spec);
  carve_circle(m, {20.0, 20.0}, 8.0);
  validate_mesh(m);
  const auto ring = nodes_on_circle(m, {20.0, 20.0}, 8.0, 1e-6);
  CHECK(ring.size() >= 40);
  for (const auto& n : m.nodes)
    CHECK(std::hypot(n[0] - 20.0, n[1] - 20.0) >= 8.0 - 1e-9);
}

TEST_CASE("mesh file round trip is byte exact") {
  RectMeshSpec spec;
  spec.width = 1.0;
  spec.height = 1.0;
  spec.coarse_h = 0.25;
  spec.mandatory_y = {0.5};
  Mesh m = generate_rect_mesh(spec);
  m = cut_notch(m, {0.0, 0.5}, {0.5, 0.5});
  m.node_sets["bottom"] = nodes_on_line_y(m, 0.0, 1e-9);
  m.edge_sets["probe"] = {{0, 1}, {1, 2}};

  namespace fs = std::filesystem;
  const auto p1 = fs::temp_directory_path() / "pfrac_rt1.mesh";
  const auto p2 = fs::temp_directory_path() / "pfrac_rt2.mesh";
  save_mesh(m, p1.string());
  const Mesh load1 = load_mesh(p1.string());
  save_mesh(load1, p2.string());

  std::ifstream f1(p1), f2(p2);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  CHECK(load1.num_nodes() == m.num_nodes());
  CHECK(load1.num_cells() == m.num_cells());
  CHECK(load1.node_sets.at("bottom") == m.node_sets.at("bottom"));
  CHECK(load1.edge_sets.at("probe") == m.edge_sets.at("probe"));
  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("loading a mesh with an inverted element names it") {
  namespace fs = std::filesystem;
  const auto p = fs::temp_directory_path() / "pfrac_bad.mesh";
  {
    std::ofstream f(p);
    f << "mesh2d v1\n";
    f << "nodes 4\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n";
    f << "elements 1\n0 quad4 0 3 2 1\n"; // clockwise: negative Jacobian
  }
  try {
    load_mesh(p.string());
    FAIL("expected MeshError");
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find("element 0") != std::string::npos);
  }
  fs::remove(p);
}

TEST_CASE("parse errors carry line numbers") {
  namespace fs = std::filesystem;
  const auto p = fs::temp_directory_path() / "pfrac_bad2.mesh";
  {
    std::ofstream f(p);
    f << "mesh2d v1\n";
    f << "nodes 1\n0 0\n"; // missing y coordinate
  }
  try {
    load_mesh(p.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  fs::remove(p);
}
