#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "pstokes/sparse.hpp"

using pstokes::CsrMatrix;
using pstokes::Triplet;

TEST_CASE("from_triplets sorts, merges duplicates", "[sparse]") {
  auto a = CsrMatrix::from_triplets(
      3, {{2, 1, 5.0}, {0, 0, 1.0}, {2, 1, -2.0}, {1, 2, 3.0}, {0, 2, 4.0}});
  REQUIRE(a.dim() == 3);
  REQUIRE(a.nnz() == 4);
  REQUIRE(a.at(0, 0) == 1.0);
  REQUIRE(a.at(0, 2) == 4.0);
  REQUIRE(a.at(1, 2) == 3.0);
  REQUIRE(a.at(2, 1) == 3.0);  // 5 - 2
  REQUIRE(a.at(1, 1) == 0.0);  // absent
  REQUIRE(a.find(1, 1) == -1);
}

TEST_CASE("triplet bounds checked", "[sparse]") {
  REQUIRE_THROWS_AS(CsrMatrix::from_triplets(2, {{0, 2, 1.0}}), std::out_of_range);
  REQUIRE_THROWS_AS(CsrMatrix::from_triplets(2, {{-1, 0, 1.0}}), std::out_of_range);
}

TEST_CASE("matvec matches a dense computation", "[sparse]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1, 1);
  const int n = 12;
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  std::vector<Triplet> ts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((i + 2 * j) % 3 == 0) {
        dense[i][j] = uni(rng);
        ts.push_back({i, j, dense[i][j]});
      }
  auto a = CsrMatrix::from_triplets(n, ts);
  std::vector<double> x(n), want(n, 0.0);
  for (int i = 0; i < n; ++i) x[i] = uni(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) want[i] += dense[i][j] * x[j];
  auto got = a.matvec(x);
  for (int i = 0; i < n; ++i) REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-14));

  // quad_form consistency: x^T A x == x . (A x)
  double qf = a.quad_form(x, x);
  double dot = 0.0;
  for (int i = 0; i < n; ++i) dot += x[i] * got[i];
  REQUIRE(qf == Catch::Approx(dot).margin(1e-14));
}

TEST_CASE("plus_scaled requires matching patterns", "[sparse]") {
  auto a = CsrMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, 2.0}});
  auto b = CsrMatrix::from_triplets(2, {{0, 0, 3.0}, {1, 1, 4.0}});
  auto c = CsrMatrix::from_triplets(2, {{0, 1, 3.0}, {1, 1, 4.0}});
  auto s = a.plus_scaled(b, 0.5);
  REQUIRE(s.at(0, 0) == 2.5);
  REQUIRE(s.at(1, 1) == 4.0);
  REQUIRE_THROWS_AS(a.plus_scaled(c, 1.0), std::invalid_argument);
}

TEST_CASE("symmetry check", "[sparse]") {
  auto sym = CsrMatrix::from_triplets(2, {{0, 1, 3.0}, {1, 0, 3.0}, {0, 0, 1.0}});
  auto asym = CsrMatrix::from_triplets(2, {{0, 1, 3.0}, {1, 0, 2.0}});
  REQUIRE(sym.is_symmetric());
  REQUIRE_FALSE(asym.is_symmetric());
  REQUIRE(asym.is_symmetric(1.5));
}

TEST_CASE("matrix market round trip is bit-exact", "[sparse]") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(-1, 1);
  const int n = 9;
  std::vector<Triplet> ts;
  for (int i = 0; i < n; ++i) {
    ts.push_back({i, i, uni(rng) + 3.0});
    if (i + 2 < n) {
      double v = uni(rng);
      ts.push_back({i, i + 2, v});
      ts.push_back({i + 2, i, v});
    }
  }
  auto a = CsrMatrix::from_triplets(n, ts);
  std::ostringstream os;
  write_matrix_market(os, a);
  REQUIRE(os.str().rfind("%%MatrixMarket matrix coordinate real symmetric\n", 0) == 0);
  std::istringstream is(os.str());
  auto b = pstokes::read_matrix_market(is);
  REQUIRE(b.dim() == a.dim());
  REQUIRE(b.nnz() == a.nnz());
  for (int i = 0; i < n; ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      REQUIRE(b.at(i, a.col()[k]) == a.val()[k]);
}

TEST_CASE("matrix market reads the general dialect", "[sparse]") {
  std::istringstream is(
      "%%MatrixMarket matrix coordinate real general\n"
      "% comment line\n"
      "2 2 3\n"
      "1 1 2.0\n"
      "1 2 -1.0\n"
      "2 2 4.0\n");
  auto a = pstokes::read_matrix_market(is);
  REQUIRE(a.at(0, 0) == 2.0);
  REQUIRE(a.at(0, 1) == -1.0);
  REQUIRE(a.at(1, 0) == 0.0);
  REQUIRE(a.at(1, 1) == 4.0);
}

TEST_CASE("matrix market rejects unsupported headers", "[sparse]") {
  std::istringstream bad1("%%MatrixMarket matrix array real general\n1 1\n1.0\n");
  REQUIRE_THROWS_AS(pstokes::read_matrix_market(bad1), std::runtime_error);
  std::istringstream bad2(
      "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n");
  REQUIRE_THROWS_AS(pstokes::read_matrix_market(bad2), std::runtime_error);
}

TEST_CASE("vector file parsing", "[sparse]") {
  std::istringstream is("% comment\n1.5\n\n  -2.25\n3e-2\n");
  auto v = pstokes::read_vector(is);
  REQUIRE(v == std::vector<double>{1.5, -2.25, 0.03});
}
