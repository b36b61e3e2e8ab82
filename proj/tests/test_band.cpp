#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "pstokes/assembly.hpp"
#include "pstokes/band.hpp"

using namespace pstokes;

namespace {

CsrMatrix from_dense(const Eigen::MatrixXd& d, double drop = 0.0) {
  std::vector<Triplet> t;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (std::abs(d(i, j)) > drop) t.push_back({i, j, d(i, j)});
  return CsrMatrix::from_triplets(static_cast<int>(d.rows()), t);
}

}  // namespace

TEST_CASE("identity factors and solves trivially", "[band]") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
  BandCholesky f(from_dense(I));
  REQUIRE(f.bandwidth() == 0);
  REQUIRE(f.factorize());
  std::vector<double> b{1, -2, 3, 0.5, 4};
  auto x = f.solve(b);
  for (int i = 0; i < 5; ++i) REQUIRE(x[i] == b[i]);
}

TEST_CASE("solving before factorizing throws", "[band]") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  BandCholesky f(from_dense(I));
  std::vector<double> b{1, 1, 1};
  REQUIRE_THROWS_AS(f.solve_inplace(b), std::logic_error);
  REQUIRE(f.factorize());
  std::vector<double> wrong{1, 1};
  REQUIRE_THROWS_AS(f.solve_inplace(wrong), std::invalid_argument);
}

TEST_CASE("non-SPD input reports breakdown", "[band]") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 1;  // eigenvalues 3, -1
  BandCholesky f(from_dense(a));
  REQUIRE_FALSE(f.factorize());

  Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(3, 3);
  BandCholesky g(from_dense(neg));
  REQUIRE_FALSE(g.factorize());
}

TEST_CASE("bandwidth comes from the sparsity pattern", "[band]") {
  auto m = build_mesh(4);
  auto dof = build_dof_map(m, 1);
  auto sys = assemble_matrices(m, dof, quadrature(2));
  BandCholesky f(penalty_matrix(sys.K, sys.D, 1.0));
  // interior lattice is 3x3; farthest coupled neighbor is one lattice row
  // plus one column away, node-major doubled: 2*(3+1)+1 = 9
  REQUIRE(f.bandwidth() == 9);
  REQUIRE(f.dim() == sys.N);
}

TEST_CASE("dense random SPD systems match Eigen", "[band]") {
  for (std::uint32_t seed : {1u, 2u, 3u}) {
    Eigen::MatrixXd a = oracle::random_spd(40, seed, 1e6);
    Eigen::VectorXd xe(40);
    std::mt19937 rng(seed + 100);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 40; ++i) xe(i) = gauss(rng);
    Eigen::VectorXd b = a * xe;

    BandCholesky f(from_dense(a));
    REQUIRE(f.bandwidth() == 39);
    REQUIRE(f.factorize());
    std::vector<double> bv(b.data(), b.data() + 40);
    auto x = f.solve(bv);
    for (int i = 0; i < 40; ++i)
      REQUIRE(x[i] == Catch::Approx(xe(i)).margin(1e-7 * xe.norm()));
  }
}

TEST_CASE("penalty systems solve to near machine accuracy", "[band]") {
  for (int degree : {1, 2}) {
    auto m = build_mesh(4);
    auto dof = build_dof_map(m, degree);
    auto sys = assemble_matrices(m, dof, quadrature(degree == 1 ? 2 : 4));
    for (double eps : {1.0, 1e-3, 1e-6}) {
      auto a = penalty_matrix(sys.K, sys.D, eps);
      BandCholesky f(a);
      REQUIRE(f.factorize());

      std::mt19937 rng(17);
      std::normal_distribution<double> gauss;
      std::vector<double> xe(sys.N);
      for (auto& v : xe) v = gauss(rng);
      std::vector<double> b(sys.N);
      a.matvec(xe, b);
      auto x = f.solve(b);

      // relative residual bounded by a modest multiple of kappa * ulp
      std::vector<double> r(sys.N);
      a.matvec(x, r);
      double rn = 0, bn = 0;
      for (int i = 0; i < sys.N; ++i) {
        rn += (r[i] - b[i]) * (r[i] - b[i]);
        bn += b[i] * b[i];
      }
      INFO("degree " << degree << " eps " << eps);
      REQUIRE(std::sqrt(rn / bn) < 1e-9);
    }
  }
}

TEST_CASE("factor matches Eigen LLT on an assembled system", "[band]") {
  auto m = build_mesh(3);
  auto dof = build_dof_map(m, 2);
  auto sys = assemble_matrices(m, dof, quadrature(4));
  auto a = penalty_matrix(sys.K, sys.D, 0.01);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(sys.N, sys.N);
  for (int i = 0; i < sys.N; ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      d(i, a.col()[k]) += a.val()[k];
  Eigen::LLT<Eigen::MatrixXd> llt(d);
  REQUIRE(llt.info() == Eigen::Success);

  BandCholesky f(a);
  REQUIRE(f.factorize());
  std::vector<double> b(sys.N, 1.0);
  auto x = f.solve(b);
  Eigen::VectorXd be = Eigen::VectorXd::Ones(sys.N);
  Eigen::VectorXd xeig = llt.solve(be);
  for (int i = 0; i < sys.N; ++i)
    REQUIRE(x[i] == Catch::Approx(xeig(i)).margin(1e-10 * xeig.norm()));
}
