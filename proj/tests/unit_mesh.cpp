#include <catch2/catch_amalgamated.hpp>

#include "hdgcd/mesh.hpp"
#include "hdgcd/mesh_check.hpp"
#include "hdgcd/local_solver.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/sampling.hpp"

using namespace hdgcd;

TEST_CASE("structured mesh counts") {
  SECTION("n = 1") {
    const Mesh m = structured_unit_square(1);
    CHECK(m.n_elements() == 2);
    CHECK(m.n_faces() == 5);
    CHECK(m.n_interior_faces() == 1);
  }
  SECTION("general n") {
    for (int n : {2, 5, 8}) {
      const Mesh m = structured_unit_square(n);
      CHECK(m.n_vertices() == (n + 1) * (n + 1));
      CHECK(m.n_elements() == 2 * n * n);
      CHECK(m.n_faces() == 3 * n * n + 2 * n);
      // Euler relation V - E + T = 1 for the triangulated square
      CHECK(m.n_vertices() - m.n_faces() + m.n_elements() == 1);
      CHECK(m.total_area() == Catch::Approx(1.0).epsilon(1e-12));
      CHECK(m.validate().empty());
    }
  }
  CHECK_THROWS_AS(structured_unit_square(0), std::invalid_argument);
}

TEST_CASE("structured NE mesh has slanted faces perpendicular to (1,1)") {
  const Mesh m = structured_unit_square(5);
  int slanted = 0;
  for (const Face& f : m.faces) {
    const Vec2 d = m.vertex(f.v[1]) - m.vertex(f.v[0]);
    if (std::abs(d.x()) > 1e-14 && std::abs(d.y()) > 1e-14) {
      ++slanted;
      CHECK(std::abs(f.normal.dot(Vec2(1, 1))) <= 1e-14);
    }
  }
  CHECK(slanted == 25);
}

TEST_CASE("mesh quasi-uniformity for structured meshes") {
  const Mesh m = structured_unit_square(7);
  double hmin = 1e30, hmax = 0.0;
  for (const auto& K : m.elements) {
    hmin = std::min(hmin, K.h);
    hmax = std::max(hmax, K.h);
  }
  CHECK(hmax / hmin <= 2.0);
}

TEST_CASE("interior faces are shared with opposite orientation signs") {
  const Mesh m = structured_unit_square(4);
  for (int fi = 0; fi < m.n_faces(); ++fi) {
    const Face& f = m.faces[fi];
    if (f.kind != FaceKind::Interior) continue;
    int signs = 0;
    for (int e : {f.left, f.right})
      for (int lf = 0; lf < 3; ++lf)
        if (m.elements[e].face[lf] == fi) signs += m.elements[e].face_sign[lf];
    CHECK(signs == 0);
  }
}

TEST_CASE("uniform refinement") {
  SECTION("two-element mesh splits into eight congruent children") {
    const Mesh coarse = structured_unit_square(1);
    const Mesh fine = uniform_refine(coarse);
    CHECK(fine.n_elements() == 8);
    for (const auto& K : fine.elements) CHECK(K.area == Catch::Approx(0.5 / 4.0));
    CHECK(fine.validate().empty());
  }
  SECTION("refining structured(5) reproduces structured(10)") {
    CHECK(equivalent_meshes(uniform_refine(structured_unit_square(5)),
                            structured_unit_square(10)));
    CHECK_FALSE(equivalent_meshes(uniform_refine(structured_unit_square(5)),
                                  structured_unit_square(10, Diagonal::NW)));
  }
  SECTION("two refinements quarter h") {
    const Mesh m0 = structured_unit_square(3);
    const Mesh m2 = uniform_refine(uniform_refine(m0));
    CHECK(m2.max_h() == Catch::Approx(m0.max_h() / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("slit tagging duplicates nothing but marks the segment") {
  Mesh m = structured_unit_square(8);
  const int tagged = mark_slit_faces(m, Vec2(0.5, 0.0), Vec2(0.5, 0.5));
  CHECK(tagged == 4);
  int count = 0;
  for (const Face& f : m.faces)
    if (f.kind == FaceKind::Slit) {
      ++count;
      CHECK(m.vertex(f.v[0]).x() == Catch::Approx(0.5));
      CHECK(m.vertex(f.v[1]).y() <= 0.5 + 1e-12);
    }
  CHECK(count == 4);
}

TEST_CASE("streamline-alignment check") {
  SECTION("beta = (1,1) passes on NE meshes for any C >= 0") {
    const VelocityField beta = constant_velocity({1.0, 1.0});
    for (int n : {5, 20}) {
      const Mesh m = structured_unit_square(n);
      CHECK(check_mesh_assumption(m, beta, 0.0).pass);
      CHECK(check_mesh_assumption(m, beta, 1.0).pass);
    }
  }
  SECTION("beta = (1,2) fails at n = 20 with C = 1") {
    const VelocityField beta = constant_velocity({1.0, 2.0});
    const MeshAssumptionReport rep = check_mesh_assumption(structured_unit_square(20), beta, 1.0);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.violations.empty());
    // the offending faces carry beta.n about 1/sqrt(2) against limit h/sqrt(2)
    for (const auto& v : rep.violations) CHECK(v.value > v.limit);
  }
  SECTION("an all-inflow element passes for any C") {
    // field contracting toward the centroid of element 0: beta.n < 0 on all
    // of its faces, so max(beta.n, 0) = 0 there and K never violates
    const Mesh m = structured_unit_square(2);
    const ElementGeometry g = element_geometry(m, 0);
    const Vec2 c = g.centroid;
    const VelocityField beta{
        [c](double x, double y) { return Vec2(c.x() - x, c.y() - y); },
        [](double, double) { return -2.0; }, false};
    for (int lf = 0; lf < 3; ++lf)
      REQUIRE(beta_normal_extrema(m, 0, lf, beta).sup < 0.0);
    const MeshAssumptionReport rep = check_mesh_assumption(m, beta, 0.0);
    for (const auto& v : rep.violations) CHECK(v.element != 0);
  }
  SECTION("monotone in C") {
    const VelocityField beta = constant_velocity({1.0, 2.0});
    const Mesh m = structured_unit_square(10);
    const bool pass_small = check_mesh_assumption(m, beta, 0.5).pass;
    const bool pass_large = check_mesh_assumption(m, beta, 40.0).pass;
    CHECK((!pass_small || pass_large));  // pass at C implies pass at C' >= C
    CHECK(pass_large);
  }
}
