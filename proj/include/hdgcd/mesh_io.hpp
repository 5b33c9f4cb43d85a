// Mesh serialization: a plain-text interchange format and legacy-VTK
// exports of meshes and of discrete fields (sampled on a per-element
// refinement of the triangulation so in-element variation is visible).

#ifndef HDGCD_MESH_IO_HPP
#define HDGCD_MESH_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdgcd/mesh.hpp"
#include "hdgcd/postprocess.hpp"
#include "hdgcd/trace_system.hpp"

namespace hdgcd {

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// Plain-text format: a header line "vertices N / elements M / faces P",
/// then one line per vertex (id x y), element (id v0 v1 v2) and face
/// (id v0 v1 left right kind).
inline void write_mesh_text(const Mesh& mesh, std::ostream& out) {
  out << "vertices " << mesh.n_vertices() << " / elements " << mesh.n_elements() << " / faces "
      << mesh.n_faces() << "\n";
  for (int i = 0; i < mesh.n_vertices(); ++i)
    out << i << " " << detail::fmt(mesh.vertices[i].x) << " " << detail::fmt(mesh.vertices[i].y)
        << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& K = mesh.elements[e];
    out << e << " " << K.v[0] << " " << K.v[1] << " " << K.v[2] << "\n";
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& fc = mesh.faces[f];
    const char* kind = fc.kind == FaceKind::Interior ? "interior"
                       : fc.kind == FaceKind::Boundary ? "boundary"
                                                       : "slit";
    out << f << " " << fc.v[0] << " " << fc.v[1] << " " << fc.left << " " << fc.right << " "
        << kind << "\n";
  }
}

inline void write_mesh_text(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_text: cannot open " + path);
  write_mesh_text(mesh, out);
}

/// Reads the plain-text format; connectivity is rebuilt from the element
/// list and cross-checked against the stored face records.
inline Mesh read_mesh_text(std::istream& in) {
  std::string word;
  int nv = 0, ne = 0, nf = 0;
  char slash;
  in >> word >> nv >> slash >> word >> ne >> slash >> word >> nf;
  if (!in) throw std::runtime_error("read_mesh_text: malformed header");
  Mesh mesh;
  mesh.vertices.resize(nv);
  for (int i = 0; i < nv; ++i) {
    int id;
    in >> id >> mesh.vertices[i].x >> mesh.vertices[i].y;
    if (!in || id != i) throw std::runtime_error("read_mesh_text: bad vertex record");
  }
  mesh.elements.resize(ne);
  for (int e = 0; e < ne; ++e) {
    int id;
    in >> id >> mesh.elements[e].v[0] >> mesh.elements[e].v[1] >> mesh.elements[e].v[2];
    if (!in || id != e) throw std::runtime_error("read_mesh_text: bad element record");
  }
  finalize_connectivity(mesh);
  if (mesh.n_faces() != nf) throw std::runtime_error("read_mesh_text: face count mismatch");
  for (int f = 0; f < nf; ++f) {
    int id, a, b, left, right;
    std::string kind;
    in >> id >> a >> b >> left >> right >> kind;
    if (!in || id != f) throw std::runtime_error("read_mesh_text: bad face record");
    if (kind == "slit") mesh.faces[f].kind = FaceKind::Slit;
    if (mesh.faces[f].v[0] != a || mesh.faces[f].v[1] != b)
      throw std::runtime_error("read_mesh_text: face connectivity mismatch");
  }
  return mesh;
}

inline Mesh read_mesh_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_mesh_text: cannot open " + path);
  return read_mesh_text(in);
}

/// Legacy-VTK export of the bare triangulation.
inline void write_mesh_vtk(const Mesh& mesh, std::ostream& out,
                           const std::string& title = "mesh") {
  out << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vertex& v : mesh.vertices)
    out << detail::fmt(v.x) << " " << detail::fmt(v.y) << " 0\n";
  out << "CELLS " << mesh.n_elements() << " " << 4 * mesh.n_elements() << "\n";
  for (const Element& K : mesh.elements)
    out << "3 " << K.v[0] << " " << K.v[1] << " " << K.v[2] << "\n";
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) out << "5\n";
}

inline void write_mesh_vtk(const Mesh& mesh, const std::string& path,
                           const std::string& title = "mesh") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_vtk: cannot open " + path);
  write_mesh_vtk(mesh, out, title);
}

namespace detail {

/// Reference sub-triangulation with 4^levels congruent children.
struct PlotGrid {
  PointList points;  // reference coordinates
  std::vector<std::array<int, 3>> tris;
};

inline PlotGrid plot_grid(int levels) {
  const int n = 1 << levels;  // subdivisions per edge
  PlotGrid g;
  std::vector<std::array<double, 2>> pts;
  auto idx = [&](int i, int j) {  // i + j <= n
    return j * (n + 1) - (j * (j - 1)) / 2 + i;
  };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i + j <= n; ++i)
      pts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + j < n; ++i) {
      g.tris.push_back({idx(i, j), idx(i + 1, j), idx(i, j + 1)});
      if (i + j + 1 < n) g.tris.push_back({idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  g.points.resize(static_cast<int>(pts.size()), 2);
  for (size_t i = 0; i < pts.size(); ++i) {
    g.points(static_cast<int>(i), 0) = pts[i][0];
    g.points(static_cast<int>(i), 1) = pts[i][1];
  }
  return g;
}

}  // namespace detail

/// Discontinuous scalar fields sampled on a per-element plot grid
/// (4^levels sub-triangles), written as point data with duplicated points.
inline void write_field_vtk(const HdgSolver& solver,
                            const std::vector<std::pair<std::string, const HdgSolution*>>& sols,
                            const std::vector<std::pair<std::string, const PostprocessedField*>>&
                                posts,
                            int levels, std::ostream& out) {
  const Mesh& mesh = solver.mesh();
  const detail::PlotGrid grid = detail::plot_grid(levels);
  const int ppe = static_cast<int>(grid.points.rows());
  const int tpe = static_cast<int>(grid.tris.size());

  out << "# vtk DataFile Version 2.0\nfields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << ppe * mesh.n_elements() << " double\n";
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    for (int i = 0; i < ppe; ++i) {
      const Vec2 x = geom.p[0] + geom.A * grid.points.row(i).transpose();
      out << detail::fmt(x.x()) << " " << detail::fmt(x.y()) << " 0\n";
    }
  }
  out << "CELLS " << tpe * mesh.n_elements() << " " << 4 * tpe * mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (const auto& t : grid.tris)
      out << "3 " << e * ppe + t[0] << " " << e * ppe + t[1] << " " << e * ppe + t[2] << "\n";
  out << "CELL_TYPES " << tpe * mesh.n_elements() << "\n";
  for (int c = 0; c < tpe * mesh.n_elements(); ++c) out << "5\n";

  out << "POINT_DATA " << ppe * mesh.n_elements() << "\n";
  for (const auto& [name, sol] : sols) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const Eigen::VectorXd vals = solver.u_values(*sol, e, grid.points);
      for (int i = 0; i < ppe; ++i) out << detail::fmt(vals(i)) << "\n";
    }
  }
  for (const auto& [name, post] : posts) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const Eigen::VectorXd vals = postprocessed_values(*post, e, grid.points);
      for (int i = 0; i < ppe; ++i) out << detail::fmt(vals(i)) << "\n";
    }
  }
}

}  // namespace hdgcd

#endif
