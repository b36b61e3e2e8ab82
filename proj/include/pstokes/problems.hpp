#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pstokes/assembly.hpp"

namespace pstokes {

struct TestProblem {
  int id = 0;
  VectorField f;
  std::string description;
};

// The two forcing fields driving the sweep.  Problem 1 is smooth and
// mesh-independent; problem 2 oscillates at the mesh scale and is
// re-instantiated per level.
inline TestProblem test_problem(int id, double h) {
  if (id == 1) {
    return {1,
            [](double x, double y) {
              return std::array<double, 2>{std::sin(x + y), std::cos(x + y)};
            },
            "f = (sin(x+y), cos(x+y))"};
  }
  if (id == 2) {
    if (!(h > 0.0))
      throw std::invalid_argument("test_problem: problem 2 needs h > 0");
    const double w = 2.0 * M_PI / h;
    return {2,
            [w](double x, double y) {
              const double v = 10.0 + 50.0 * std::sin(w * x + w * y);
              return std::array<double, 2>{v, v};
            },
            "f = (10 + 50 sin(2 pi (x+y)/h)) in both components"};
  }
  throw std::invalid_argument("test_problem: unknown problem id " + std::to_string(id));
}

inline VectorField forcing(int id, double h) { return test_problem(id, h).f; }

}  // namespace pstokes
