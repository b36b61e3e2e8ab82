#pragma once

#include <array>
#include <stdexcept>

namespace pstokes {

// Values and reference gradients of the scalar Lagrange basis at one point of
// the reference triangle (0,0)-(1,0)-(0,1).
//
// P1 nodes: the three vertices.  P2 nodes, in local order: the three vertices
// followed by the edge midpoints m01, m12, m20 (midpoint m_ab lies on the
// edge between local vertices a and b).
struct BasisEval {
  int count = 0;  // 3 for P1, 6 for P2
  std::array<double, 6> value{};
  std::array<std::array<double, 2>, 6> grad{};
};

inline BasisEval eval_basis(int degree, double x, double y) {
  BasisEval e;
  const double l0 = 1.0 - x - y, l1 = x, l2 = y;
  if (degree == 1) {
    e.count = 3;
    e.value = {l0, l1, l2};
    e.grad[0] = {-1.0, -1.0};
    e.grad[1] = {1.0, 0.0};
    e.grad[2] = {0.0, 1.0};
  } else if (degree == 2) {
    e.count = 6;
    e.value = {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0),
               l2 * (2.0 * l2 - 1.0), 4.0 * l0 * l1, 4.0 * l1 * l2,
               4.0 * l2 * l0};
    // grad(l0) = (-1,-1), grad(l1) = (1,0), grad(l2) = (0,1).
    const double g0 = 4.0 * l0 - 1.0, g1 = 4.0 * l1 - 1.0, g2 = 4.0 * l2 - 1.0;
    e.grad[0] = {-g0, -g0};
    e.grad[1] = {g1, 0.0};
    e.grad[2] = {0.0, g2};
    e.grad[3] = {4.0 * (l0 - l1), -4.0 * l1};
    e.grad[4] = {4.0 * l2, 4.0 * l1};
    e.grad[5] = {-4.0 * l2, 4.0 * (l0 - l2)};
  } else {
    throw std::invalid_argument("eval_basis: degree must be 1 or 2");
  }
  return e;
}

// Scalar nodes per element.
inline int local_node_count(int degree) {
  if (degree == 1) return 3;
  if (degree == 2) return 6;
  throw std::invalid_argument("local_node_count: degree must be 1 or 2");
}

}  // namespace pstokes
