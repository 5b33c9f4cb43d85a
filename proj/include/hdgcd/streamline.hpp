// Streamline-aligned mesh generation on the unit square: the outflow
// boundary is seeded, nodes are traced backwards along the flow with a
// forward Euler march, the cloud is Delaunay-triangulated, and violating
// edges are flipped until the alignment check passes (or a sweep cap).

#ifndef HDGCD_STREAMLINE_HPP
#define HDGCD_STREAMLINE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hdgcd/mesh.hpp"
#include "hdgcd/mesh_check.hpp"
#include "hdgcd/problem.hpp"

namespace hdgcd {

/// Backward streamline from a seed: forward Euler steps of arclength ~h on
/// dx/dt = -beta until the square is left; the exit point is clipped to the
/// boundary and short trailing segments are merged into it.
inline std::vector<Vec2> trace_streamline(const VelocityField& beta, Vec2 seed, double h,
                                          int max_steps = 100000) {
  std::vector<Vec2> chain{seed};
  Vec2 x = seed;
  for (int i = 0; i < max_steps; ++i) {
    const Vec2 b = beta(x.x(), x.y());
    const double speed = b.norm();
    if (speed < 1e-12) break;  // stagnation
    Vec2 next = x - (h / speed) * b;
    const bool outside = next.x() < 0.0 || next.x() > 1.0 || next.y() < 0.0 || next.y() > 1.0;
    if (outside) {
      // clip the segment to the square
      double t = 1.0;
      const Vec2 d = next - x;
      auto clip = [&](double p, double dp, double lo, double hi) {
        if (dp < 0.0) t = std::min(t, (lo - p) / dp);
        if (dp > 0.0) t = std::min(t, (hi - p) / dp);
      };
      clip(x.x(), d.x(), 0.0, 1.0);
      clip(x.y(), d.y(), 0.0, 1.0);
      const Vec2 exit = x + t * d;
      if ((exit - x).norm() < 0.5 * h && chain.size() > 1)
        chain.back() = exit;  // merge the short remainder into the last node
      else
        chain.push_back(exit);
      return chain;
    }
    chain.push_back(next);
    x = next;
  }
  return chain;
}

namespace detail {

// deterministic tie-breaking jitter for the Delaunay predicate only
inline Vec2 jittered(const Vec2& p, int index, double scale) {
  const unsigned a = static_cast<unsigned>(index) * 2654435761u;
  const unsigned b = (static_cast<unsigned>(index) + 977u) * 2246822519u;
  const double jx = ((a % 8191) / 8191.0 - 0.5) * scale;
  const double jy = ((b % 8191) / 8191.0 - 0.5) * scale;
  return {p.x() + jx, p.y() + jy};
}

inline bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const long double ax = a.x() - p.x(), ay = a.y() - p.y();
  const long double bx = b.x() - p.x(), by = b.y() - p.y();
  const long double cx = c.x() - p.x(), cy = c.y() - p.y();
  const long double det = (ax * ax + ay * ay) * (bx * cy - by * cx) -
                          (bx * bx + by * by) * (ax * cy - ay * cx) +
                          (cx * cx + cy * cy) * (ax * by - ay * bx);
  return det > 0.0L;  // assumes (a,b,c) counterclockwise
}

/// Bowyer-Watson on a modest point set; returns ccw triangles.
inline std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& pts, double jitter) {
  std::vector<Vec2> work(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) work[i] = jittered(pts[i], static_cast<int>(i), jitter);
  const int n = static_cast<int>(work.size());
  // super-triangle
  work.push_back({-10.0, -10.0});
  work.push_back({30.0, -10.0});
  work.push_back({-10.0, 30.0});
  std::vector<std::array<int, 3>> tris{{n, n + 1, n + 2}};
  auto ccw = [&](std::array<int, 3>& t) {
    if (detail::triangle_area(work[t[0]], work[t[1]], work[t[2]]) < 0.0) std::swap(t[1], t[2]);
  };
  for (auto& t : tris) ccw(t);

  for (int ip = 0; ip < n; ++ip) {
    const Vec2& p = work[ip];
    std::vector<std::array<int, 3>> keep;
    std::map<std::array<int, 2>, int> edge_count;
    for (const auto& t : tris) {
      if (in_circumcircle(work[t[0]], work[t[1]], work[t[2]], p)) {
        for (int e = 0; e < 3; ++e) {
          const int u = t[e], v = t[(e + 1) % 3];
          edge_count[{std::min(u, v), std::max(u, v)}]++;
        }
      } else {
        keep.push_back(t);
      }
    }
    std::vector<std::array<int, 2>> boundary;
    for (const auto& t : tris) {
      if (!in_circumcircle(work[t[0]], work[t[1]], work[t[2]], p)) continue;
      for (int e = 0; e < 3; ++e) {
        const int u = t[e], v = t[(e + 1) % 3];
        if (edge_count[{std::min(u, v), std::max(u, v)}] == 1) boundary.push_back({u, v});
      }
    }
    tris = std::move(keep);
    for (const auto& ed : boundary) {
      std::array<int, 3> t{ed[0], ed[1], ip};
      ccw(t);
      tris.push_back(t);
    }
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris)
    if (t[0] < n && t[1] < n && t[2] < n) out.push_back(t);
  return out;
}

}  // namespace detail

struct StreamlineMeshResult {
  Mesh mesh;
  bool pass = false;
  int repair_sweeps = 0;
  MeshAssumptionReport report;
};

/// Generates a streamline-aligned triangulation for the given field and
/// target size, then repairs violating edges by flips (at most `max_sweeps`
/// passes). The report carries any remaining violations.
inline StreamlineMeshResult streamline_mesh(const VelocityField& beta, double h,
                                            double C = 1.0, int max_sweeps = 20) {
  if (!(h > 0.0)) throw std::invalid_argument("streamline_mesh: h must be positive");
  {
    const VelocityCheck vc = check_velocity_field(beta);
    if (!vc.nonvanishing)
      throw std::invalid_argument("streamline_mesh: velocity field vanishes in the domain");
  }

  // outflow seeds and inflow-boundary nodes on the four edges
  std::vector<Vec2> points;
  auto add_point = [&](const Vec2& p) {
    for (const Vec2& q : points)
      if ((q - p).norm() < 0.4 * h) return;
    points.push_back(p);
  };
  struct EdgeDesc {
    Vec2 a, b, n;
  };
  const std::vector<EdgeDesc> edges{{{0, 0}, {1, 0}, {0, -1}},
                                    {{1, 0}, {1, 1}, {1, 0}},
                                    {{1, 1}, {0, 1}, {0, 1}},
                                    {{0, 1}, {0, 0}, {-1, 0}}};
  add_point({0, 0});
  add_point({1, 0});
  add_point({1, 1});
  add_point({0, 1});
  std::vector<Vec2> seeds;
  for (const EdgeDesc& ed : edges) {
    const int nseg = std::max(1, static_cast<int>(std::ceil(1.0 / h)));
    for (int i = 0; i <= nseg; ++i) {
      const Vec2 p = ed.a + (static_cast<double>(i) / nseg) * (ed.b - ed.a);
      if (beta(p.x(), p.y()).dot(ed.n) > 1e-12)
        seeds.push_back(p);
      else
        add_point(p);
    }
  }
  for (const Vec2& s : seeds) {
    for (const Vec2& p : trace_streamline(beta, s, h)) add_point(p);
  }

  Mesh mesh;
  mesh.vertices.reserve(points.size());
  for (const Vec2& p : points) mesh.vertices.push_back(Vertex{p.x(), p.y()});
  for (const auto& t : detail::delaunay(points, 1e-9 * h)) {
    Element K;
    K.v = t;
    mesh.elements.push_back(K);
  }
  finalize_connectivity(mesh);

  StreamlineMeshResult result;
  // per-element violation measure used to accept flips
  auto element_violation = [&](const Mesh& m, int e) {
    double sup[3];
    int outflow = 0;
    for (int lf = 0; lf < 3; ++lf) {
      sup[lf] = beta_normal_extrema(m, e, lf, beta).sup;
      if (sup[lf] > sup[outflow]) outflow = lf;
    }
    double v = 0.0;
    for (int lf = 0; lf < 3; ++lf)
      if (lf != outflow) v += std::max(std::max(sup[lf], 0.0) - C * m.elements[e].h, 0.0);
    return v;
  };

  // one flip attempt on the face currently violating in element `e`;
  // applied only when it strictly reduces the local violation measure
  auto try_flip = [&](int e, int lf) {
    const int fi = mesh.elements[e].face[lf];
    const Face& f = mesh.faces[fi];
    if (f.kind != FaceKind::Interior) return false;
    const int L = f.left, R = f.right;
    auto opposite = [&](int el) {
      for (int i = 0; i < 3; ++i) {
        const int v = mesh.elements[el].v[i];
        if (v != f.v[0] && v != f.v[1]) return v;
      }
      return -1;
    };
    const int c = opposite(L), d = opposite(R);
    if (c < 0 || d < 0) return false;
    const Vec2 pc = mesh.vertex(c), pd = mesh.vertex(d);
    const Vec2 pa = mesh.vertex(f.v[0]), pb = mesh.vertex(f.v[1]);
    if (detail::triangle_area(pc, pa, pd) <= 1e-14 || detail::triangle_area(pd, pb, pc) <= 1e-14)
      return false;  // non-convex quad, flip invalid
    const double before = element_violation(mesh, L) + element_violation(mesh, R);
    Mesh trial = mesh;
    trial.elements[L].v = {c, f.v[0], d};
    trial.elements[R].v = {d, f.v[1], c};
    try {
      finalize_connectivity(trial);
    } catch (const std::runtime_error&) {
      return false;
    }
    const double after = element_violation(trial, L) + element_violation(trial, R);
    if (after >= before - 1e-14) return false;
    mesh = std::move(trial);
    return true;
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    result.report = check_mesh_assumption(mesh, beta, C);
    result.repair_sweeps = sweep;
    if (result.report.pass) break;
    // face ids move after every applied flip, so re-derive the violation
    // list as the sweep progresses and bound the work by its initial size
    bool changed = false;
    const size_t budget = result.report.violations.size();
    for (size_t attempt = 0; attempt < budget; ++attempt) {
      const MeshAssumptionReport rep = check_mesh_assumption(mesh, beta, C);
      if (rep.pass) break;
      bool applied = false;
      for (const auto& viol : rep.violations) {
        if (try_flip(viol.element, viol.local_face)) {
          applied = true;
          changed = true;
          break;
        }
      }
      if (!applied) break;
    }
    if (!changed) break;
  }
  result.report = check_mesh_assumption(mesh, beta, C);
  result.pass = result.report.pass;
  result.mesh = std::move(mesh);
  return result;
}

}  // namespace hdgcd

#endif
