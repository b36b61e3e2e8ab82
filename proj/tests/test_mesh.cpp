#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "pstokes/mesh.hpp"

using pstokes::StructuredMesh;
using pstokes::build_mesh;
using pstokes::refine_once;

namespace {

void check_invariants(const StructuredMesh& m) {
  const int n = m.n();
  const std::size_t nv = static_cast<std::size_t>(n + 1) * (n + 1);
  REQUIRE(m.vertex_count() == nv);
  REQUIRE(m.triangle_count() == 2u * n * n);
  REQUIRE(m.edge_count() == 3u * n * n + 2u * n);

  // CCW orientation, per-triangle area, and total area.
  const double cell_area = 0.5 * m.h() * m.h();
  double total = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    double a = m.signed_area(t);
    REQUIRE(a > 0.0);
    REQUIRE(a == Catch::Approx(cell_area).epsilon(1e-14));
    total += a;
  }
  REQUIRE(total == Catch::Approx(1.0).epsilon(1e-14));

  // Boundary flag iff a coordinate is exactly 0 or 1.
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    const auto& p = m.vertex(v);
    bool on = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    REQUIRE(m.vertex_on_boundary(v) == on);
    const auto& ij = m.vertex_ij(v);
    REQUIRE(p.x == static_cast<double>(ij[0]) / n);
    REQUIRE(p.y == static_cast<double>(ij[1]) / n);
  }

  // Edge sharing: interior edges in 2 triangles, boundary edges in 1.
  std::size_t boundary_edges = 0;
  for (std::size_t e = 0; e < m.edge_count(); ++e) {
    REQUIRE(m.edge(e)[0] < m.edge(e)[1]);
    if (m.edge_on_boundary(e)) {
      REQUIRE(m.edge_triangle_count(e) == 1);
      ++boundary_edges;
    } else {
      REQUIRE(m.edge_triangle_count(e) == 2);
    }
    if (e > 0) REQUIRE(m.edge(e - 1) < m.edge(e));  // canonical order
  }
  REQUIRE(boundary_edges == 4u * n);

  // triangle_edges consistency with triangle vertices.
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangle(t);
    const auto& te = m.triangle_edges(t);
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      const auto& e = m.edge(te[k]);
      REQUIRE(e[0] == std::min(a, b));
      REQUIRE(e[1] == std::max(a, b));
    }
  }
}

}  // namespace

TEST_CASE("build_mesh rejects n = 0", "[mesh]") {
  REQUIRE_THROWS_AS(build_mesh(0), std::invalid_argument);
  REQUIRE_THROWS_AS(build_mesh(-3), std::invalid_argument);
}

TEST_CASE("smallest mesh n=1", "[mesh]") {
  auto m = build_mesh(1);
  REQUIRE(m.h() == 1.0);
  REQUIRE(m.vertex_count() == 4);
  REQUIRE(m.triangle_count() == 2);
  REQUIRE(m.edge_count() == 5);
  check_invariants(m);
}

TEST_CASE("n=2 has 8 triangles of area 1/8", "[mesh]") {
  auto m = build_mesh(2);
  REQUIRE(m.triangle_count() == 8);
  for (std::size_t t = 0; t < 8; ++t) REQUIRE(m.signed_area(t) == 0.125);
  check_invariants(m);
}

TEST_CASE("n=8 counts", "[mesh]") {
  auto m = build_mesh(8);
  REQUIRE(m.h() == 0.125);
  REQUIRE(m.vertex_count() == 81);
  REQUIRE(m.triangle_count() == 128);
  REQUIRE(m.edge_count() == 208);
  check_invariants(m);
}

TEST_CASE("invariants across sizes", "[mesh]") {
  for (int n : {1, 2, 3, 4, 5, 7, 8, 12, 16, 32, 64}) {
    INFO("n = " << n);
    check_invariants(build_mesh(n));
  }
}

TEST_CASE("largest sweep mesh n=512", "[mesh][slow]") {
  auto m = build_mesh(512);
  REQUIRE(m.h() == 0.00195312500);
  check_invariants(m);
}

TEST_CASE("power-of-two meshes have bit-exact areas", "[mesh]") {
  for (int n : {2, 4, 8, 64}) {
    auto m = build_mesh(n);
    const double cell = 0.5 * m.h() * m.h();
    for (std::size_t t = 0; t < m.triangle_count(); ++t)
      REQUIRE(m.signed_area(t) == cell);
  }
}

TEST_CASE("refine_once doubles n", "[mesh]") {
  auto m1 = build_mesh(1);
  auto m2 = refine_once(m1);
  REQUIRE(m2.n() == 2);
  auto m8 = build_mesh(8);
  REQUIRE(refine_once(m8).h() == 0.0625);
  auto m = build_mesh(2);
  for (int level = 0; level < 4; ++level) {
    m = refine_once(m);
    check_invariants(m);
  }
  REQUIRE(m.n() == 32);
}

TEST_CASE("plain-text export", "[mesh]") {
  std::ostringstream os;
  build_mesh(1).export_text(os);
  REQUIRE(os.str() == "0 0\n1 0\n0 1\n1 1\n0 1 3\n0 3 2\n");
}
