#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pstokes/assembly.hpp"
#include "pstokes/solve.hpp"

using namespace pstokes;

namespace {

CsrMatrix identity(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return CsrMatrix::from_triplets(n, t);
}

std::array<double, 2> problem1(double x, double y) {
  return {std::sin(x + y), std::cos(x + y)};
}

}  // namespace

TEST_CASE("identity system returns the right-hand side", "[solve]") {
  auto I = identity(4);
  std::vector<double> b{2, -1, 0.5, 3};
  auto direct = solve_spd(I, b);
  REQUIRE(direct.ok());
  REQUIRE(direct.method == "direct");
  for (int i = 0; i < 4; ++i) REQUIRE(direct.c[i] == Catch::Approx(b[i]).margin(1e-15));

  auto cg = solve_spd_cg(I, b);
  REQUIRE(cg.ok());
  REQUIRE(cg.method == "cg");
  REQUIRE(cg.iters <= 2);
  for (int i = 0; i < 4; ++i) REQUIRE(cg.c[i] == Catch::Approx(b[i]).margin(1e-12));
}

TEST_CASE("zero right-hand side short-circuits", "[solve]") {
  auto I = identity(3);
  std::vector<double> b{0, 0, 0};
  for (auto rep : {solve_spd(I, b), solve_spd_cg(I, b)}) {
    REQUIRE(rep.ok());
    REQUIRE(rep.relres == 0.0);
    for (double v : rep.c) REQUIRE(v == 0.0);
  }
}

TEST_CASE("bad tolerance is rejected", "[solve]") {
  auto I = identity(2);
  std::vector<double> b{1, 1};
  REQUIRE_THROWS_AS(solve_spd(I, b, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(solve_spd(I, b, 1.5), std::invalid_argument);
  REQUIRE_THROWS_AS(solve_spd_cg(I, b, -1e-4), std::invalid_argument);
}

TEST_CASE("P1 n=2 matches the closed-form 2x2 inverse", "[solve]") {
  auto m = build_mesh(2);
  auto dof = build_dof_map(m, 1);
  auto sys = assemble_matrices(m, dof, quadrature(2));
  auto b = assemble_load(m, dof, problem1, quadrature(8));

  for (double eps : {1.0, 1e-2, 1e-5}) {
    auto a = penalty_matrix(sys.K, sys.D, eps);
    // A = [[4 + 2/eps, -1/eps], [-1/eps, 4 + 2/eps]]
    const double d = 4.0 + 2.0 / eps, o = -1.0 / eps;
    const double det = d * d - o * o;
    const double c0 = (d * b[0] - o * b[1]) / det;
    const double c1 = (d * b[1] - o * b[0]) / det;

    auto rep = solve_spd(a, b, 1e-14);
    REQUIRE(rep.ok());
    INFO("eps " << eps);
    REQUIRE(rep.c[0] == Catch::Approx(c0).epsilon(1e-14));
    REQUIRE(rep.c[1] == Catch::Approx(c1).epsilon(1e-14));
  }
}

TEST_CASE("direct path certifies 1e-10 on ill-conditioned systems", "[solve]") {
  auto m = build_mesh(8);
  auto dof = build_dof_map(m, 1);
  auto sys = assemble_matrices(m, dof, quadrature(2));
  auto b = assemble_load(m, dof, problem1, quadrature(8));
  for (double eps : {1e-5, 1e-7, std::pow(2.0, -24)}) {
    auto a = penalty_matrix(sys.K, sys.D, eps);
    auto rep = solve_spd(a, b, 1e-10);
    INFO("eps " << eps << " relres " << rep.relres << " refinements " << rep.iters);
    REQUIRE(rep.ok());
    REQUIRE(rep.relres <= 1e-10);
  }
}

TEST_CASE("factor reuse across right-hand sides", "[solve]") {
  auto m = build_mesh(4);
  auto dof = build_dof_map(m, 1);
  auto sys = assemble_matrices(m, dof, quadrature(2));
  auto a = penalty_matrix(sys.K, sys.D, 1e-3);
  BandCholesky f(a);
  REQUIRE(f.factorize());

  auto b1 = assemble_load(m, dof, problem1, quadrature(8));
  auto b2 = assemble_load(
      m, dof, [](double, double) { return std::array<double, 2>{1.0, -2.0}; },
      quadrature(8));
  auto r1 = solve_with_factor(a, f, b1);
  auto r2 = solve_with_factor(a, f, b2);
  REQUIRE(r1.ok());
  REQUIRE(r2.ok());
  auto fresh = solve_spd(a, b1);
  for (int i = 0; i < sys.N; ++i) REQUIRE(r1.c[i] == fresh.c[i]);
}

TEST_CASE("mass solves converge with plain CG well under 100 iterations", "[solve]") {
  struct Level { int degree, n; };
  for (auto [degree, n] : {Level{1, 4}, Level{1, 8}, Level{1, 16}, Level{2, 4},
                           Level{2, 8}, Level{2, 16}}) {
    auto m = build_mesh(n);
    auto dof = build_dof_map(m, degree);
    auto sys = assemble_matrices(m, dof, quadrature(degree == 1 ? 2 : 4));
    auto b = assemble_load(m, dof, problem1, quadrature(8));
    auto rep = solve_spd_cg(sys.M, b, 1e-10);
    INFO("P" << degree << " n=" << n << " iters " << rep.iters);
    REQUIRE(rep.ok());
    REQUIRE(rep.iters < 100);
  }
}

TEST_CASE("jacobi CG agrees with the direct path", "[solve]") {
  auto m = build_mesh(8);
  auto dof = build_dof_map(m, 2);
  auto sys = assemble_matrices(m, dof, quadrature(4));
  auto a = penalty_matrix(sys.K, sys.D, 0.1);
  auto b = assemble_load(m, dof, problem1, quadrature(8));
  auto direct = solve_spd(a, b, 1e-12);
  auto cg = solve_spd_cg(a, b, 1e-12, 10000, true);
  REQUIRE(direct.ok());
  REQUIRE(cg.ok());
  double cn = 0;
  for (double v : direct.c) cn += v * v;
  cn = std::sqrt(cn);
  for (int i = 0; i < sys.N; ++i)
    REQUIRE(cg.c[i] == Catch::Approx(direct.c[i]).margin(1e-9 * cn));
}

TEST_CASE("failure kinds are distinct and reportable", "[solve]") {
  // breakdown: indefinite matrix on the direct path
  std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}};
  auto indef = CsrMatrix::from_triplets(2, t);
  std::vector<double> b{1, 1};
  auto rep = solve_spd(indef, b);
  REQUIRE_FALSE(rep.ok());
  REQUIRE(rep.status == SolveStatus::factorization_breakdown);
  REQUIRE(std::string(to_string(rep.status)) == "breakdown");

  // iteration limit: starved CG still hands back its best iterate
  auto m = build_mesh(8);
  auto dof = build_dof_map(m, 1);
  auto sys = assemble_matrices(m, dof, quadrature(2));
  auto a = penalty_matrix(sys.K, sys.D, 1e-6);
  auto load = assemble_load(m, dof, problem1, quadrature(8));
  auto starved = solve_spd_cg(a, load, 1e-12, 3);
  REQUIRE_FALSE(starved.ok());
  REQUIRE(starved.status == SolveStatus::iteration_limit);
  REQUIRE(starved.iters == 3);
  REQUIRE(starved.relres < 1.0);  // made some progress
  REQUIRE(std::string(to_string(starved.status)) == "iteration_limit");
}
