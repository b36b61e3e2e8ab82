#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pstokes/element.hpp"
#include "pstokes/mesh.hpp"
#include "pstokes/quadrature.hpp"
#include "pstokes/sparse.hpp"

namespace pstokes {

// Scalar-node and vector-DOF numbering with homogeneous Dirichlet
// elimination.
//
// Scalar nodes live on a lattice of side degree*n + 1: the mesh vertices for
// P1, vertices plus edge midpoints for P2 (the midpoints are exactly the
// half-step lattice points).  Interior nodes are numbered row-major over the
// interior lattice, which keeps the matrix bandwidth at O(n) for the band
// solver.  Vector DOFs are node-major: dof = 2*node + component.
class DofMap {
public:
  int degree() const { return degree_; }
  int n() const { return n_; }
  bool constrained() const { return constrained_; }
  int lattice_side() const { return side_; }

  int scalar_count() const { return static_cast<int>(nodes_.size()); }
  int ndof() const { return 2 * scalar_count(); }

  // Lattice (i,j) -> scalar node index, or -1 for eliminated boundary nodes.
  int node_index(int i, int j) const { return index_[j * side_ + i]; }
  // Scalar node index -> lattice (i,j).
  const std::array<int, 2>& node_ij(int s) const { return nodes_[s]; }

  // Physical coordinates of a scalar node.
  double node_x(int s) const { return static_cast<double>(nodes_[s][0]) / (side_ - 1); }
  double node_y(int s) const { return static_cast<double>(nodes_[s][1]) / (side_ - 1); }

  int dof(int scalar_node, int component) const { return 2 * scalar_node + component; }

  friend DofMap build_dof_map(const StructuredMesh&, int);
  friend DofMap build_full_dof_map(const StructuredMesh&, int);

private:
  static DofMap build(const StructuredMesh& mesh, int degree, bool constrained) {
    if (degree != 1 && degree != 2)
      throw std::invalid_argument("build_dof_map: degree must be 1 or 2");
    DofMap d;
    d.degree_ = degree;
    d.n_ = mesh.n();
    d.constrained_ = constrained;
    d.side_ = degree * mesh.n() + 1;
    d.index_.assign(static_cast<std::size_t>(d.side_) * d.side_, -1);
    for (int j = 0; j < d.side_; ++j)
      for (int i = 0; i < d.side_; ++i) {
        bool boundary = i == 0 || i == d.side_ - 1 || j == 0 || j == d.side_ - 1;
        if (constrained && boundary) continue;
        d.index_[j * d.side_ + i] = static_cast<int>(d.nodes_.size());
        d.nodes_.push_back({i, j});
      }
    if (d.nodes_.empty())
      throw std::invalid_argument(
          "build_dof_map: infeasible discretization (no interior nodes)");
    return d;
  }

  int degree_ = 0;
  int n_ = 0;
  int side_ = 0;
  bool constrained_ = true;
  std::vector<int> index_;
  std::vector<std::array<int, 2>> nodes_;
};

// Interior-only numbering (the discrete space X^h vanishing on the boundary).
inline DofMap build_dof_map(const StructuredMesh& mesh, int degree) {
  return DofMap::build(mesh, degree, true);
}

// All nodes, boundary included; used for un-eliminated diagnostics and tests.
inline DofMap build_full_dof_map(const StructuredMesh& mesh, int degree) {
  return DofMap::build(mesh, degree, false);
}

struct SystemMatrices {
  CsrMatrix K;  // (grad phi_i, grad phi_j): vector Laplacian
  CsrMatrix D;  // (div phi_i, div phi_j)
  CsrMatrix M;  // (phi_i, phi_j): vector mass
  double h = 0.0;
  int N = 0;
  int degree = 0;
};

namespace detail {

// Scalar lattice coordinates of a triangle's local nodes (vertices first,
// then midpoints m01, m12, m20 for P2), derived from exact integer vertex
// coordinates.
inline void local_lattice_nodes(const StructuredMesh& mesh, const DofMap& dof,
                                std::size_t t, int* out) {
  const auto& tri = mesh.triangle(t);
  const int deg = dof.degree();
  std::array<std::array<int, 2>, 3> v;
  for (int k = 0; k < 3; ++k) {
    const auto& ij = mesh.vertex_ij(tri[k]);
    v[k] = {deg * ij[0], deg * ij[1]};
  }
  for (int k = 0; k < 3; ++k) out[k] = dof.node_index(v[k][0], v[k][1]);
  if (deg == 2) {
    for (int k = 0; k < 3; ++k) {
      int a = k, b = (k + 1) % 3;  // midpoint of local edge (k, k+1)
      out[3 + k] = dof.node_index((v[a][0] + v[b][0]) / 2, (v[a][1] + v[b][1]) / 2);
    }
  }
}

struct ElementGeometry {
  // Affine map x = p0 + J*ref; invJT maps reference gradients to physical.
  double p0x, p0y;
  double j11, j12, j21, j22;
  double det;  // = 2 * area, positive for CCW triangles
  double it11, it12, it21, it22;
};

inline ElementGeometry element_geometry(const StructuredMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangle(t);
  const Vec2& a = mesh.vertex(tri[0]);
  const Vec2& b = mesh.vertex(tri[1]);
  const Vec2& c = mesh.vertex(tri[2]);
  ElementGeometry g;
  g.p0x = a.x;
  g.p0y = a.y;
  g.j11 = b.x - a.x;
  g.j21 = b.y - a.y;
  g.j12 = c.x - a.x;
  g.j22 = c.y - a.y;
  g.det = g.j11 * g.j22 - g.j12 * g.j21;
  g.it11 = g.j22 / g.det;
  g.it12 = -g.j21 / g.det;
  g.it21 = -g.j12 / g.det;
  g.it22 = g.j11 / g.det;
  return g;
}

}  // namespace detail

// Per-element scalar matrices on triangle t:
//   S_ij = int grad phi_i . grad phi_j   (stiffness)
//   Q_ij = int phi_i phi_j               (mass)
//   G[a][b]_ij = int (d_a phi_i)(d_b phi_j)   (div-div blocks)
//
// Quadrature-point contributions are accumulated first and scaled by the
// Jacobian determinant once at the end; with the midpoint degree-2 rule this
// makes the P1 matrices bit-exact on power-of-two meshes.
struct ElementMatrices {
  int count = 0;
  std::array<std::array<double, 6>, 6> S{}, Q{};
  std::array<std::array<std::array<std::array<double, 6>, 6>, 2>, 2> G{};
};

inline ElementMatrices element_matrices(const StructuredMesh& mesh, std::size_t t,
                                        int degree, const QuadratureRule& quad) {
  ElementMatrices em;
  em.count = local_node_count(degree);
  const auto g = detail::element_geometry(mesh, t);
  for (const auto& qp : quad.points) {
    const BasisEval be = eval_basis(degree, qp.x, qp.y);
    std::array<std::array<double, 2>, 6> pg;  // physical gradients
    for (int i = 0; i < em.count; ++i) {
      pg[i][0] = g.it11 * be.grad[i][0] + g.it12 * be.grad[i][1];
      pg[i][1] = g.it21 * be.grad[i][0] + g.it22 * be.grad[i][1];
    }
    for (int i = 0; i < em.count; ++i)
      for (int j = 0; j < em.count; ++j) {
        em.S[i][j] += qp.w * (pg[i][0] * pg[j][0] + pg[i][1] * pg[j][1]);
        em.Q[i][j] += qp.w * (be.value[i] * be.value[j]);
        // products first so transpose contributions are bit-identical
        em.G[0][0][i][j] += qp.w * (pg[i][0] * pg[j][0]);
        em.G[0][1][i][j] += qp.w * (pg[i][0] * pg[j][1]);
        em.G[1][0][i][j] += qp.w * (pg[i][1] * pg[j][0]);
        em.G[1][1][i][j] += qp.w * (pg[i][1] * pg[j][1]);
      }
  }
  for (int i = 0; i < em.count; ++i)
    for (int j = 0; j < em.count; ++j) {
      em.S[i][j] *= g.det;
      em.Q[i][j] *= g.det;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) em.G[a][b][i][j] *= g.det;
    }
  return em;
}

// K, D, M with one shared sparsity pattern (cross-component entries are
// structurally present everywhere so A(eps) combinations never change
// pattern).
inline SystemMatrices assemble_matrices(const StructuredMesh& mesh, const DofMap& dof,
                                        const QuadratureRule& quad) {
  const int min_degree = dof.degree() == 1 ? 2 : 4;
  if (quad.degree < min_degree)
    throw std::invalid_argument(
        "assemble_matrices: quadrature degree too low for exact matrix integrands");

  const int nloc = local_node_count(dof.degree());
  const int N = dof.ndof();

  // Sparsity pattern: per-row small sorted vectors.
  std::vector<std::vector<int>> cols(N);
  for (int r = 0; r < N; ++r) cols[r].reserve(dof.degree() == 1 ? 16 : 32);
  auto insert_sorted = [](std::vector<int>& v, int c) {
    auto it = std::lower_bound(v.begin(), v.end(), c);
    if (it == v.end() || *it != c) v.insert(it, c);
  };
  std::array<int, 6> loc{};
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    detail::local_lattice_nodes(mesh, dof, t, loc.data());
    for (int i = 0; i < nloc; ++i) {
      if (loc[i] < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        if (loc[j] < 0) continue;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            insert_sorted(cols[dof.dof(loc[i], a)], dof.dof(loc[j], b));
      }
    }
  }

  SystemMatrices sys;
  sys.h = mesh.h();
  sys.N = N;
  sys.degree = dof.degree();
  sys.K = CsrMatrix::from_pattern(N, cols);
  sys.D = sys.K;
  sys.M = sys.K;
  cols.clear();
  cols.shrink_to_fit();

  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    detail::local_lattice_nodes(mesh, dof, t, loc.data());
    const ElementMatrices em = element_matrices(mesh, t, dof.degree(), quad);
    for (int i = 0; i < nloc; ++i) {
      if (loc[i] < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        if (loc[j] < 0) continue;
        for (int a = 0; a < 2; ++a) {
          const int r = dof.dof(loc[i], a);
          sys.K.add_at(r, dof.dof(loc[j], a), em.S[i][j]);
          sys.M.add_at(r, dof.dof(loc[j], a), em.Q[i][j]);
          for (int b = 0; b < 2; ++b)
            sys.D.add_at(r, dof.dof(loc[j], b), em.G[a][b][i][j]);
        }
      }
    }
  }
  return sys;
}

// Load vector b_i = (f, phi_i); f maps (x, y) to a 2-vector.
using VectorField = std::function<std::array<double, 2>(double, double)>;

inline std::vector<double> assemble_load(const StructuredMesh& mesh, const DofMap& dof,
                                         const VectorField& f,
                                         const QuadratureRule& quad) {
  const int nloc = local_node_count(dof.degree());
  std::vector<double> b(dof.ndof(), 0.0);
  std::array<int, 6> loc{};
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    detail::local_lattice_nodes(mesh, dof, t, loc.data());
    const auto g = detail::element_geometry(mesh, t);
    std::array<std::array<double, 2>, 6> be{};  // local accumulators
    for (const auto& qp : quad.points) {
      const BasisEval e = eval_basis(dof.degree(), qp.x, qp.y);
      const double px = g.p0x + g.j11 * qp.x + g.j12 * qp.y;
      const double py = g.p0y + g.j21 * qp.x + g.j22 * qp.y;
      const std::array<double, 2> fv = f(px, py);
      for (int i = 0; i < nloc; ++i) {
        be[i][0] += qp.w * e.value[i] * fv[0];
        be[i][1] += qp.w * e.value[i] * fv[1];
      }
    }
    for (int i = 0; i < nloc; ++i) {
      if (loc[i] < 0) continue;
      b[dof.dof(loc[i], 0)] += be[i][0] * g.det;
      b[dof.dof(loc[i], 1)] += be[i][1] * g.det;
    }
  }
  return b;
}

// A(eps) = K + (1/eps) D.
inline CsrMatrix penalty_matrix(const CsrMatrix& K, const CsrMatrix& D, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("penalty_matrix: eps must be > 0");
  return K.plus_scaled(D, 1.0 / eps);
}

}  // namespace pstokes
