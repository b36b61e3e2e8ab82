#pragma once

#include <stdexcept>
#include <vector>

namespace pstokes {

// Quadrature node on the reference triangle (0,0)-(1,0)-(0,1).  (x, y) are
// the barycentric coordinates of vertices 1 and 2 (vertex 0 carries 1-x-y);
// w is the reference-area weight.  Weights of a rule sum to 1/2.
struct QuadPoint {
  double x, y, w;
};

struct QuadratureRule {
  int degree = 0;  // highest total polynomial degree integrated exactly
  std::vector<QuadPoint> points;
};

namespace detail {

// Symmetric-orbit helpers.  orbit3: barycentric (a, a, 1-2a) and permutations;
// orbit6: (a, b, 1-a-b), all six permutations.
inline void orbit1(std::vector<QuadPoint>& pts, double w) {
  pts.push_back({1.0 / 3.0, 1.0 / 3.0, w});
}
inline void orbit3(std::vector<QuadPoint>& pts, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  pts.push_back({a, a, w});
  pts.push_back({b, a, w});
  pts.push_back({a, b, w});
}
inline void orbit6(std::vector<QuadPoint>& pts, double a, double b, double w) {
  const double c = 1.0 - a - b;
  pts.push_back({a, b, w});
  pts.push_back({b, a, w});
  pts.push_back({b, c, w});
  pts.push_back({c, b, w});
  pts.push_back({c, a, w});
  pts.push_back({a, c, w});
}

inline QuadratureRule make_rule(int degree) {
  QuadratureRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      // Single centroid point.
      orbit1(r.points, 0.5);
      break;
    case 2:
      // Edge-midpoint rule.  Preferred over the interior degree-2 rule
      // because the weights 1/6 sum to exactly 1/2 in double arithmetic
      // (round-to-even), which makes the P1 element matrices bit-exact.
      r.points.push_back({0.5, 0.0, 1.0 / 6.0});
      r.points.push_back({0.5, 0.5, 1.0 / 6.0});
      r.points.push_back({0.0, 0.5, 1.0 / 6.0});
      break;
    case 4:
      orbit3(r.points, 0.445948490915964886, 0.111690794839005733);
      orbit3(r.points, 0.0915762135097707435, 0.0549758718276609338);
      break;
    case 6:
      orbit3(r.points, 0.249286745170910421, 0.058393137863189683);
      orbit3(r.points, 0.0630890144915022283, 0.0254224531851034085);
      orbit6(r.points, 0.310352451033784405, 0.0531450498448169474,
             0.0414255378091867876);
      break;
    case 8:
      orbit1(r.points, 0.0721578038388935841);
      orbit3(r.points, 0.459292588292723156, 0.0475458171336423124);
      orbit3(r.points, 0.170569307751760207, 0.0516086852673591251);
      orbit3(r.points, 0.0505472283170309755, 0.0162292488115990402);
      orbit6(r.points, 0.263112829634638113, 0.00839477740995760534,
             0.0136151570872174971);
      break;
    default:
      throw std::invalid_argument("quadrature: unsupported degree");
  }
  return r;
}

}  // namespace detail

// Rule of the requested exactness degree; supported degrees {1, 2, 4, 6, 8}.
inline const QuadratureRule& quadrature(int degree) {
  static const QuadratureRule d1 = detail::make_rule(1);
  static const QuadratureRule d2 = detail::make_rule(2);
  static const QuadratureRule d4 = detail::make_rule(4);
  static const QuadratureRule d6 = detail::make_rule(6);
  static const QuadratureRule d8 = detail::make_rule(8);
  switch (degree) {
    case 1: return d1;
    case 2: return d2;
    case 4: return d4;
    case 6: return d6;
    case 8: return d8;
    default: throw std::invalid_argument("quadrature: unsupported degree");
  }
}

}  // namespace pstokes
