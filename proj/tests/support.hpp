#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "isoembed/complex.hpp"
#include "isoembed/linalg.hpp"
#include "isoembed/scalar.hpp"

namespace isoembed::testing {

inline vec<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  vec<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline vec<rational> random_rational_vec(std::size_t n, std::mt19937_64& rng, int range = 20, int den = 7) {
  std::uniform_int_distribution<int> num(-range, range), q(1, den);
  vec<rational> v(n);
  for (auto& x : v) x = rational(num(rng)) / q(rng);
  return v;
}

inline matrix<double> random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  matrix<double> m(r, c);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline double max_abs_diff(const matrix<double>& a, const matrix<double>& b) { return max_abs(a - b); }

/// 1-dimensional complex from an edge list; vertices are "a", "b", ... by index.
template <class T>
polyhedron_data<T> graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                         const std::vector<T>& lengths) {
  polyhedron_data<T> p;
  for (std::size_t i = 0; i < n; ++i) p.vertices.push_back("x" + std::to_string(i));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& a = p.vertices[edges[e].first];
    const auto& b = p.vertices[edges[e].second];
    p.maximal_simplices.push_back({a, b});
    p.squared_lengths.push_back({a, b, lengths[e]});
  }
  return p;
}

template <class T>
polyhedron_data<T> graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  return graph<T>(n, edges, std::vector<T>(edges.size(), T(1)));
}

/// Exact determinant by cofactor expansion; only for the tiny oracle sizes.
inline rational det(const std::vector<vec<rational>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  rational s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<vec<rational>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      vec<rational> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[i][c]);
      minor.push_back(std::move(row));
    }
    const rational t = m[0][j] * det(minor);
    s += (j % 2 == 0) ? t : rational(-t);
  }
  return s;
}

/// Rank as the size of the largest nonzero minor.
inline std::size_t rank_by_minors(const std::vector<vec<rational>>& rows) {
  if (rows.empty()) return 0;
  const std::size_t r = rows.size(), c = rows[0].size();
  std::size_t best = 0;
  for (unsigned rmask = 1; rmask < (1u << r); ++rmask)
    for (unsigned cmask = 1; cmask < (1u << c); ++cmask) {
      const auto k = static_cast<std::size_t>(__builtin_popcount(rmask));
      if (k != static_cast<std::size_t>(__builtin_popcount(cmask)) || k <= best) continue;
      std::vector<vec<rational>> m;
      for (std::size_t i = 0; i < r; ++i) {
        if (!(rmask >> i & 1)) continue;
        vec<rational> row;
        for (std::size_t j = 0; j < c; ++j)
          if (cmask >> j & 1) row.push_back(rows[i][j]);
        m.push_back(std::move(row));
      }
      if (det(m) != 0) best = k;
    }
  return best;
}

inline std::size_t affine_rank_by_minors(const std::vector<vec<rational>>& pts) {
  std::vector<vec<rational>> diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(pts[i] - pts[0]);
  return rank_by_minors(diffs);
}

}  // namespace isoembed::testing
