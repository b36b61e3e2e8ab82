#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace pstokes {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Uniform triangulation of the unit square: n x n cells, each split along the
// diagonal from its lower-left to its upper-right corner, h = 1/n.
//
// Vertices are the lattice points (i/n, j/n), numbered row-major
// (index = j*(n+1) + i).  Cell (i,j) yields two counter-clockwise triangles:
//
//   upper:  (i,j) -- (i+1,j+1) -- (i,j+1)
//   lower:  (i,j) -- (i+1,j)   -- (i+1,j+1)
//
// Edges are stored with the smaller vertex index first and numbered in
// lexicographic order of (min,max), so downstream DOF numbering is
// deterministic.  Immutable after construction.
class StructuredMesh {
public:
  int n() const { return n_; }
  double h() const { return h_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  const Vec2& vertex(std::size_t v) const { return vertices_[v]; }
  // Integer lattice coordinates (i,j) with vertex = (i/n, j/n); exact.
  const std::array<int, 2>& vertex_ij(std::size_t v) const { return vertex_ij_[v]; }
  bool vertex_on_boundary(std::size_t v) const { return vertex_boundary_[v]; }

  std::size_t triangle_count() const { return triangles_.size(); }
  const std::array<int, 3>& triangle(std::size_t t) const { return triangles_[t]; }

  // Signed area of the (CCW) triangle; h^2/2 up to representation error.
  double signed_area(std::size_t t) const {
    const Vec2& a = vertices_[triangles_[t][0]];
    const Vec2& b = vertices_[triangles_[t][1]];
    const Vec2& c = vertices_[triangles_[t][2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }

  std::size_t edge_count() const { return edges_.size(); }
  const std::array<int, 2>& edge(std::size_t e) const { return edges_[e]; }
  bool edge_on_boundary(std::size_t e) const { return edge_tri_count_[e] == 1; }
  int edge_triangle_count(std::size_t e) const { return edge_tri_count_[e]; }

  // Edge indices of triangle t; local edge k connects local vertices k and
  // (k+1)%3.
  const std::array<int, 3>& triangle_edges(std::size_t t) const {
    return triangle_edges_[t];
  }

  // Plain-text debug dump: one "x y" line per vertex, then one "i j k" line
  // per triangle (0-based).
  void export_text(std::ostream& os) const {
    for (const Vec2& v : vertices_) os << v.x << ' ' << v.y << '\n';
    for (const auto& t : triangles_) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }

  friend StructuredMesh build_mesh(int n);

private:
  StructuredMesh() = default;

  int n_ = 0;
  double h_ = 0.0;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 2>> vertex_ij_;
  std::vector<bool> vertex_boundary_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<int> edge_tri_count_;
  std::vector<std::array<int, 3>> triangle_edges_;
};

inline StructuredMesh build_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_mesh: n must be >= 1");

  StructuredMesh m;
  m.n_ = n;
  m.h_ = 1.0 / n;

  const int nv = n + 1;
  m.vertices_.reserve(static_cast<std::size_t>(nv) * nv);
  m.vertex_ij_.reserve(m.vertices_.capacity());
  m.vertex_boundary_.reserve(m.vertices_.capacity());
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i) {
      // i/n and j/n, not i*h: the boundary coordinates 0 and 1 come out exact
      // for every n, and interior ones are correctly rounded.
      m.vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      m.vertex_ij_.push_back({i, j});
      m.vertex_boundary_.push_back(i == 0 || i == n || j == 0 || j == n);
    }

  auto vid = [nv](int i, int j) { return j * nv + i; };
  m.triangles_.reserve(2u * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      m.triangles_.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.triangles_.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }

  // Canonical edge table: collect (min,max) pairs, sort lexicographically,
  // then resolve triangle->edge indices through a hash map.
  std::vector<std::array<int, 2>> pairs;
  pairs.reserve(3 * m.triangles_.size());
  for (const auto& t : m.triangles_)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      pairs.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  m.edges_ = std::move(pairs);

  std::unordered_map<long long, int> edge_index;
  edge_index.reserve(2 * m.edges_.size());
  const long long stride = static_cast<long long>(m.vertices_.size());
  for (std::size_t e = 0; e < m.edges_.size(); ++e)
    edge_index[m.edges_[e][0] * stride + m.edges_[e][1]] = static_cast<int>(e);

  m.edge_tri_count_.assign(m.edges_.size(), 0);
  m.triangle_edges_.resize(m.triangles_.size());
  for (std::size_t t = 0; t < m.triangles_.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      int a = m.triangles_[t][k], b = m.triangles_[t][(k + 1) % 3];
      int e = edge_index.at(static_cast<long long>(std::min(a, b)) * stride +
                            std::max(a, b));
      m.triangle_edges_[t][k] = e;
      ++m.edge_tri_count_[e];
    }

  return m;
}

// Halves h; the sweep's refinement step.
inline StructuredMesh refine_once(const StructuredMesh& mesh) {
  return build_mesh(2 * mesh.n());
}

}  // namespace pstokes
