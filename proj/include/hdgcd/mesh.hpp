// Conforming triangulations of the unit square: construction, uniform
// refinement, connectivity with oriented faces, and validity checks.

#ifndef HDGCD_MESH_HPP
#define HDGCD_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hdgcd {

using Vec2 = Eigen::Vector2d;

struct Vertex {
  double x = 0.0, y = 0.0;
  Vec2 pos() const { return {x, y}; }
};

enum class FaceKind { Interior, Boundary, Slit };

/// A straight mesh face (edge). The stored normal is a fixed global
/// choice; adjacent elements record on which side they sit. The arc
/// parameter s in [0,1] runs from v[0] to v[1] and is shared by both
/// sides, so face quadrature points coincide exactly across elements.
struct Face {
  std::array<int, 2> v{-1, -1};  // vertex ids, v[0] < v[1]
  double length = 0.0;
  Vec2 normal = Vec2::Zero();
  int left = -1;   // element with outward normal == +normal
  int right = -1;  // element with outward normal == -normal (-1 if none)
  FaceKind kind = FaceKind::Interior;

  bool on_boundary() const { return kind == FaceKind::Boundary; }
  bool is_dirichlet() const { return kind != FaceKind::Interior; }
};

struct Element {
  std::array<int, 3> v{-1, -1, -1};       // counterclockwise
  std::array<int, 3> face{-1, -1, -1};    // local edge i = (v[i], v[i+1 mod 3])
  std::array<int, 3> face_sign{0, 0, 0};  // +1: outward normal = +face normal
  double area = 0.0;
  double h = 0.0;  // |K|^{1/2}
};

enum class Diagonal { NE, NW };

struct Mesh {
  std::vector<Vertex> vertices;
  std::vector<Element> elements;
  std::vector<Face> faces;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  int n_interior_faces() const {
    int c = 0;
    for (const auto& f : faces) c += (f.kind == FaceKind::Interior) ? 1 : 0;
    return c;
  }
  int n_boundary_faces() const {
    int c = 0;
    for (const auto& f : faces) c += (f.kind == FaceKind::Boundary) ? 1 : 0;
    return c;
  }

  Vec2 vertex(int i) const { return vertices[i].pos(); }

  /// Outward unit normal of element e on its local face lf.
  Vec2 outward_normal(int e, int lf) const {
    const Element& K = elements[e];
    return K.face_sign[lf] * faces[K.face[lf]].normal;
  }

  double total_area() const {
    double s = 0.0;
    for (const auto& K : elements) s += K.area;
    return s;
  }

  double max_h() const {
    double m = 0.0;
    for (const auto& K : elements) m = std::max(m, K.h);
    return m;
  }

  /// Structural and geometric invariant check; returns human-readable
  /// problems, empty when the mesh is valid.
  std::vector<std::string> validate() const;
};

namespace detail {

inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace detail

/// Builds faces, normals, adjacency and element geometry from vertices and
/// (counterclockwise) element connectivity. Slit faces can be tagged
/// afterwards with mark_slit_faces.
inline void finalize_connectivity(Mesh& mesh) {
  mesh.faces.clear();
  std::map<std::array<int, 2>, int> face_ids;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Element& K = mesh.elements[e];
    const Vec2 p0 = mesh.vertex(K.v[0]), p1 = mesh.vertex(K.v[1]), p2 = mesh.vertex(K.v[2]);
    K.area = detail::triangle_area(p0, p1, p2);
    if (!(K.area > 0.0))
      throw std::runtime_error("finalize_connectivity: element " + std::to_string(e) +
                               " is degenerate or not counterclockwise");
    K.h = std::sqrt(K.area);
    for (int lf = 0; lf < 3; ++lf) {
      const int a = K.v[lf], b = K.v[(lf + 1) % 3];
      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = face_ids.find(key);
      int fid;
      if (it == face_ids.end()) {
        Face f;
        f.v = key;
        const Vec2 pa = mesh.vertex(key[0]), pb = mesh.vertex(key[1]);
        f.length = (pb - pa).norm();
        const Vec2 t = (pb - pa) / f.length;
        f.normal = Vec2(t.y(), -t.x());
        fid = mesh.n_faces();
        face_ids.emplace(key, fid);
        mesh.faces.push_back(f);
      } else {
        fid = it->second;
      }
      Face& f = mesh.faces[fid];
      // outward normal of K along edge a->b (ccw traversal)
      const Vec2 ev = mesh.vertex(b) - mesh.vertex(a);
      const Vec2 nout = Vec2(ev.y(), -ev.x()).normalized();
      const int sign = (nout.dot(f.normal) > 0.0) ? 1 : -1;
      K.face[lf] = fid;
      K.face_sign[lf] = sign;
      if (sign > 0) {
        if (f.left != -1) throw std::runtime_error("finalize_connectivity: nonconforming mesh");
        f.left = e;
      } else {
        if (f.right != -1) throw std::runtime_error("finalize_connectivity: nonconforming mesh");
        f.right = e;
      }
    }
  }
  for (Face& f : mesh.faces) {
    if (f.left != -1 && f.right != -1) {
      f.kind = FaceKind::Interior;
    } else {
      f.kind = FaceKind::Boundary;
      if (f.left == -1) {
        // keep the single adjacent element on the +normal side
        f.left = f.right;
        f.right = -1;
        f.normal = -f.normal;
        for (int lf = 0; lf < 3; ++lf)
          if (mesh.elements[f.left].face[lf] == &f - mesh.faces.data())
            mesh.elements[f.left].face_sign[lf] = 1;
      }
    }
  }
}

/// Tags every interior face whose segment lies inside the given segment
/// [p,q] (within tol) as a slit face. Returns the number of tagged faces.
inline int mark_slit_faces(Mesh& mesh, const Vec2& p, const Vec2& q, double tol = 1e-12) {
  const Vec2 d = q - p;
  const double len2 = d.squaredNorm();
  auto on_segment = [&](const Vec2& a) {
    const Vec2 r = a - p;
    const double cross = r.x() * d.y() - r.y() * d.x();
    if (std::abs(cross) > tol * std::sqrt(len2)) return false;
    const double t = r.dot(d) / len2;
    return t >= -tol && t <= 1.0 + tol;
  };
  int count = 0;
  for (Face& f : mesh.faces) {
    if (f.kind != FaceKind::Interior) continue;
    if (on_segment(mesh.vertex(f.v[0])) && on_segment(mesh.vertex(f.v[1]))) {
      f.kind = FaceKind::Slit;
      ++count;
    }
  }
  return count;
}

/// Structured triangulation of the unit square, n x n cells split along
/// the chosen diagonal; NE splits from the cell's SW to its NE corner.
inline Mesh structured_unit_square(int n, Diagonal diag = Diagonal::NE) {
  if (n < 1) throw std::invalid_argument("structured_unit_square: n must be >= 1");
  Mesh mesh;
  mesh.vertices.resize((n + 1) * (n + 1));
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices[vid(i, j)] = Vertex{static_cast<double>(i) / n, static_cast<double>(j) / n};
  mesh.elements.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Element a, b;
      if (diag == Diagonal::NE) {
        a.v = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
        b.v = {vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
      } else {
        a.v = {vid(i, j), vid(i + 1, j), vid(i, j + 1)};
        b.v = {vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      }
      mesh.elements.push_back(a);
      mesh.elements.push_back(b);
    }
  finalize_connectivity(mesh);
  return mesh;
}

/// Splits every triangle into four congruent children through the edge
/// midpoints. Conformity is preserved; slit tags are not (retag after).
inline Mesh uniform_refine(const Mesh& coarse) {
  Mesh fine;
  fine.vertices = coarse.vertices;
  std::map<std::array<int, 2>, int> midpoint;
  auto mid = [&](int a, int b) {
    const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec2 m = 0.5 * (fine.vertex(a) + fine.vertex(b));
    const int id = fine.n_vertices();
    fine.vertices.push_back(Vertex{m.x(), m.y()});
    midpoint.emplace(key, id);
    return id;
  };
  fine.elements.reserve(4 * coarse.n_elements());
  for (const Element& K : coarse.elements) {
    const int m01 = mid(K.v[0], K.v[1]), m12 = mid(K.v[1], K.v[2]), m20 = mid(K.v[2], K.v[0]);
    for (const auto& tri : {std::array<int, 3>{K.v[0], m01, m20},
                            std::array<int, 3>{m01, K.v[1], m12},
                            std::array<int, 3>{m20, m12, K.v[2]},
                            std::array<int, 3>{m01, m12, m20}}) {
      Element c;
      c.v = tri;
      fine.elements.push_back(c);
    }
  }
  finalize_connectivity(fine);
  return fine;
}

inline std::vector<std::string> Mesh::validate() const {
  std::vector<std::string> issues;
  auto complain = [&](const std::string& s) { issues.push_back(s); };
  for (int i = 0; i < n_vertices(); ++i)
    if (!std::isfinite(vertices[i].x) || !std::isfinite(vertices[i].y))
      complain("vertex " + std::to_string(i) + " has non-finite coordinates");
  for (int e = 0; e < n_elements(); ++e) {
    const Element& K = elements[e];
    if (!(K.area > 0.0)) complain("element " + std::to_string(e) + " has nonpositive area");
    if (std::abs(K.h - std::sqrt(K.area)) > 1e-12 * (1.0 + K.h))
      complain("element " + std::to_string(e) + " has inconsistent h");
  }
  for (int fi = 0; fi < n_faces(); ++fi) {
    const Face& f = faces[fi];
    if (std::abs(f.normal.norm() - 1.0) > 1e-14)
      complain("face " + std::to_string(fi) + " has non-unit normal");
    if (f.kind != FaceKind::Boundary && (f.left == -1 || f.right == -1))
      complain("interior/slit face " + std::to_string(fi) + " lacks two neighbors");
    if (f.kind == FaceKind::Boundary && f.right != -1)
      complain("boundary face " + std::to_string(fi) + " has two neighbors");
  }
  // every interior face must be seen by its two elements with opposite signs
  for (int e = 0; e < n_elements(); ++e)
    for (int lf = 0; lf < 3; ++lf) {
      const Element& K = elements[e];
      const Face& f = faces[K.face[lf]];
      const int expected = (f.left == e) ? 1 : (f.right == e) ? -1 : 0;
      if (expected == 0 || K.face_sign[lf] != expected)
        complain("element " + std::to_string(e) + " face adjacency mismatch");
    }
  return issues;
}

/// Connectivity-independent equality: same vertex positions (up to tol)
/// and same set of triangles. Used to compare refinement outputs.
inline bool equivalent_meshes(const Mesh& a, const Mesh& b, double tol = 1e-12) {
  if (a.n_vertices() != b.n_vertices() || a.n_elements() != b.n_elements()) return false;
  auto canonical = [tol](const Mesh& m) {
    std::vector<int> order(m.n_vertices());
    for (int i = 0; i < m.n_vertices(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      const auto &vi = m.vertices[i], &vj = m.vertices[j];
      if (std::abs(vi.x - vj.x) > tol) return vi.x < vj.x;
      return vi.y < vj.y;
    });
    std::vector<int> rank(m.n_vertices());
    for (int i = 0; i < m.n_vertices(); ++i) rank[order[i]] = i;
    std::vector<std::array<int, 3>> tris;
    tris.reserve(m.n_elements());
    for (const auto& K : m.elements) {
      std::array<int, 3> t{rank[K.v[0]], rank[K.v[1]], rank[K.v[2]]};
      std::sort(t.begin(), t.end());
      tris.push_back(t);
    }
    std::sort(tris.begin(), tris.end());
    return std::make_pair(order, tris);
  };
  auto [oa, ta] = canonical(a);
  auto [ob, tb] = canonical(b);
  for (int i = 0; i < a.n_vertices(); ++i) {
    if (std::abs(a.vertices[oa[i]].x - b.vertices[ob[i]].x) > tol ||
        std::abs(a.vertices[oa[i]].y - b.vertices[ob[i]].y) > tol)
      return false;
  }
  return ta == tb;
}

}  // namespace hdgcd

#endif
