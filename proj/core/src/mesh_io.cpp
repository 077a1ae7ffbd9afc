#include "pfrac/errors.hpp"
#include "pfrac/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pfrac {

namespace {

std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  std::ostringstream os;
  os << path << ":" << line << ": " << msg;
  throw ParseError(os.str());
}

} // namespace

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw IoError("save_mesh: cannot open '" + path + "' for writing");
  f << "mesh2d v1\n";
  f << "nodes " << mesh.num_nodes() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    f << i << " " << fmt_coord(mesh.nodes[i][0]) << " " << fmt_coord(mesh.nodes[i][1]) << "\n";
  f << "elements " << mesh.num_cells() << "\n";
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const Cell& c = mesh.cells[e];
    f << e << " " << (c.type == CellType::Quad4 ? "quad4" : "tri3");
    for (int k = 0; k < c.nverts(); ++k)
      f << " " << c.nodes[k];
    f << "\n";
  }
  for (const auto& [name, ids] : mesh.node_sets) {
    f << "nodeset " << name << " " << ids.size() << "\n";
    for (size_t i = 0; i < ids.size(); ++i)
      f << ids[i] << (i + 1 == ids.size() ? "\n" : " ");
    if (ids.empty())
      f << "\n";
  }
  for (const auto& [name, edges] : mesh.edge_sets) {
    f << "edgeset " << name << " " << edges.size() << "\n";
    for (size_t i = 0; i < edges.size(); ++i)
      f << edges[i][0] << " " << edges[i][1] << (i + 1 == edges.size() ? "\n" : " ");
    if (edges.empty())
      f << "\n";
  }
  if (!f)
    throw IoError("save_mesh: write to '" + path + "' failed");
}

Mesh load_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("load_mesh: cannot open '" + path + "'");

  Mesh mesh;
  int line_no = 0;
  std::string line;

  auto next_tokens = [&](std::vector<std::string>& toks) -> bool {
    toks.clear();
    while (std::getline(f, line)) {
      ++line_no;
      std::istringstream is(line);
      std::string t;
      while (is >> t)
        toks.push_back(t);
      if (!toks.empty())
        return true;
    }
    return false;
  };

  std::vector<std::string> toks;
  if (!next_tokens(toks) || toks.size() != 2 || toks[0] != "mesh2d" || toks[1] != "v1")
    fail(path, line_no, "expected header 'mesh2d v1'");

  if (!next_tokens(toks) || toks.size() != 2 || toks[0] != "nodes")
    fail(path, line_no, "expected 'nodes N'");
  const int n_nodes = std::stoi(toks[1]);
  mesh.nodes.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    if (!next_tokens(toks) || toks.size() != 3)
      fail(path, line_no, "expected 'id x y' node line");
    const int id = std::stoi(toks[0]);
    if (id < 0 || id >= n_nodes)
      fail(path, line_no, "node id out of range");
    mesh.nodes[id] = {std::stod(toks[1]), std::stod(toks[2])};
  }

  if (!next_tokens(toks) || toks.size() != 2 || toks[0] != "elements")
    fail(path, line_no, "expected 'elements M'");
  const int n_cells = std::stoi(toks[1]);
  mesh.cells.resize(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    if (!next_tokens(toks) || toks.size() < 2)
      fail(path, line_no, "expected 'id type n1..nk' element line");
    const int id = std::stoi(toks[0]);
    if (id < 0 || id >= n_cells)
      fail(path, line_no, "element id out of range");
    Cell c;
    if (toks[1] == "quad4") {
      c.type = CellType::Quad4;
      if (toks.size() != 6)
        fail(path, line_no, "quad4 element needs 4 node ids");
      for (int k = 0; k < 4; ++k)
        c.nodes[k] = std::stoi(toks[2 + k]);
    } else if (toks[1] == "tri3") {
      c.type = CellType::Tri3;
      if (toks.size() != 5)
        fail(path, line_no, "tri3 element needs 3 node ids");
      for (int k = 0; k < 3; ++k)
        c.nodes[k] = std::stoi(toks[2 + k]);
    } else {
      fail(path, line_no, "unknown element type '" + toks[1] + "'");
    }
    mesh.cells[id] = c;
  }

  // trailing named sets, in any order
  while (next_tokens(toks)) {
    if (toks[0] == "nodeset") {
      if (toks.size() != 3)
        fail(path, line_no, "expected 'nodeset NAME k'");
      const std::string name = toks[1];
      const int count = std::stoi(toks[2]);
      std::vector<int>& ids = mesh.node_sets[name];
      while (static_cast<int>(ids.size()) < count) {
        if (!next_tokens(toks))
          fail(path, line_no, "nodeset '" + name + "' truncated");
        for (const auto& t : toks)
          ids.push_back(std::stoi(t));
      }
      if (static_cast<int>(ids.size()) != count)
        fail(path, line_no, "nodeset '" + name + "' has too many ids");
    } else if (toks[0] == "edgeset") {
      if (toks.size() != 3)
        fail(path, line_no, "expected 'edgeset NAME k'");
      const std::string name = toks[1];
      const int count = std::stoi(toks[2]);
      std::vector<int> flat;
      while (static_cast<int>(flat.size()) < 2 * count) {
        if (!next_tokens(toks))
          fail(path, line_no, "edgeset '" + name + "' truncated");
        for (const auto& t : toks)
          flat.push_back(std::stoi(t));
      }
      if (static_cast<int>(flat.size()) != 2 * count)
        fail(path, line_no, "edgeset '" + name + "' has too many ids");
      auto& edges = mesh.edge_sets[name];
      for (int i = 0; i < count; ++i)
        edges.push_back({flat[2 * i], flat[2 * i + 1]});
    } else {
      fail(path, line_no, "unexpected token '" + toks[0] + "'");
    }
  }

  try {
    validate_mesh(mesh);
  } catch (const MeshError& e) {
    throw MeshError(path + ": " + e.what());
  }
  return mesh;
}

} // namespace pfrac
