#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "isoembed/complex.hpp"
#include "isoembed/error.hpp"
#include "isoembed/scalar.hpp"

namespace isoembed::gen {

enum class kind { complete_skeleton, euclidean_mesh, random_bounded_degree, random_d_degenerate, stacked_simplices };

/// Random rationals p/q with 1 <= q <= max_denominator, uniform over the
/// admissible numerators in [min, max] for the drawn q.
struct length_distribution {
  rational min = -10;
  rational max = 10;
  unsigned max_denominator = 4;
};

struct gen_spec {
  gen::kind kind = kind::random_d_degenerate;
  std::size_t n_vertices = 50;
  std::size_t dim = 1;    // target simplex dimension n
  std::size_t bound = 3;  // degree (bounded) or back-degree (degenerate) bound; d for complete skeletons
  std::size_t rows = 2, cols = 2;  // euclidean_mesh
  length_distribution lengths{};
  std::uint64_t seed = 0;
};

class infeasible_spec : public error {
 public:
  using error::error;
};

inline std::string vertex_name(std::size_t i) { return "v" + std::to_string(i); }

inline big_int floor_of(const rational& r) {
  const big_int num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  big_int q = num / den;  // truncates toward zero
  if (q * den != num && num < 0) q -= 1;
  return q;
}

inline big_int ceil_of(const rational& r) { return -floor_of(-r); }

template <class Rng>
rational draw_length(const length_distribution& dist, Rng& rng) {
  std::uniform_int_distribution<unsigned> den(1, dist.max_denominator);
  const unsigned q = den(rng);
  const big_int lo = ceil_of(dist.min * q), hi = floor_of(dist.max * q);
  if (lo > hi) return dist.min;  // no p/q inside a range narrower than 1/q
  std::uniform_int_distribution<long long> num(lo.convert_to<long long>(), hi.convert_to<long long>());
  return rational(num(rng)) / rational(q);
}

inline void check(const length_distribution& dist) {
  if (dist.max_denominator == 0) throw infeasible_spec("max_denominator must be positive");
  if (dist.min > dist.max) throw infeasible_spec("length range is empty");
}

/// 1-skeleton of the d-simplex: K_{d+1}, every squared length 1.
inline polyhedron_data<rational> simplex_skeleton(std::size_t d) {
  if (d < 1) throw infeasible_spec("simplex_skeleton needs d >= 1");
  polyhedron_data<rational> p;
  for (std::size_t i = 0; i <= d; ++i) p.vertices.push_back(vertex_name(i));
  for (std::size_t i = 0; i <= d; ++i)
    for (std::size_t j = i + 1; j <= d; ++j) {
      p.maximal_simplices.push_back({vertex_name(i), vertex_name(j)});
      p.squared_lengths.push_back({vertex_name(i), vertex_name(j), rational(1)});
    }
  return p;
}

/// Unit grid of rows x cols points, each square cut along its main diagonal;
/// squared lengths are the planar ones (1 on grid edges, 2 on diagonals).
inline polyhedron_data<rational> euclidean_mesh(std::size_t rows, std::size_t cols) {
  if (rows < 2 || cols < 2) throw infeasible_spec("euclidean_mesh needs rows, cols >= 2");
  auto name = [](std::size_t r, std::size_t c) { return "p" + std::to_string(r) + "_" + std::to_string(c); };
  polyhedron_data<rational> p;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) p.vertices.push_back(name(r, c));
  std::set<std::pair<std::string, std::string>> seen;
  auto add_edge = [&](const std::string& a, const std::string& b, long long g) {
    if (seen.insert(detail::ordered_pair(a, b)).second) p.squared_lengths.push_back({a, b, rational(g)});
  };
  for (std::size_t r = 0; r + 1 < rows; ++r)
    for (std::size_t c = 0; c + 1 < cols; ++c) {
      const auto a = name(r, c), b = name(r + 1, c), e = name(r, c + 1), f = name(r + 1, c + 1);
      p.maximal_simplices.push_back({a, b, f});
      p.maximal_simplices.push_back({a, e, f});
      add_edge(a, b, 1);
      add_edge(a, e, 1);
      add_edge(b, f, 1);
      add_edge(e, f, 1);
      add_edge(a, f, 2);
    }
  return p;
}

/// A chain of n-simplices {v_i, ..., v_{i+dim}}: each vertex is attached to the
/// dim vertices before it. Degeneracy dim, max degree 2 dim.
inline polyhedron_data<rational> stacked_simplices(std::size_t n_vertices, std::size_t dim,
                                                   const length_distribution& dist, std::uint64_t seed) {
  check(dist);
  if (dim < 1 || n_vertices < dim + 1) throw infeasible_spec("stacked_simplices needs n_vertices >= dim + 1 >= 2");
  std::mt19937_64 rng(seed);
  polyhedron_data<rational> p;
  for (std::size_t i = 0; i < n_vertices; ++i) p.vertices.push_back(vertex_name(i));
  for (std::size_t i = 0; i + dim < n_vertices; ++i) {
    std::vector<std::string> s;
    for (std::size_t j = i; j <= i + dim; ++j) s.push_back(vertex_name(j));
    p.maximal_simplices.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < n_vertices; ++i)
    for (std::size_t j = i + 1; j <= std::min(i + dim, n_vertices - 1); ++j)
      p.squared_lengths.push_back({vertex_name(i), vertex_name(j), draw_length(dist, rng)});
  return p;
}

/// Random complex built by inserting vertices one at a time, each joined to
/// between 1 and `bound` earlier vertices. For random_bounded_degree only
/// earlier vertices below the degree bound are eligible, so max degree <= bound;
/// for random_d_degenerate every vertex has at most `bound` earlier neighbours.
/// With dim >= 2 a new vertex is often attached to a face of an existing
/// simplex, and cliques among its neighbours are lifted to simplices of up to
/// dim + 1 vertices.
inline polyhedron_data<rational> random_polyhedron(const gen_spec& spec) {
  switch (spec.kind) {
    case kind::complete_skeleton: return simplex_skeleton(spec.bound);
    case kind::euclidean_mesh: return euclidean_mesh(spec.rows, spec.cols);
    case kind::stacked_simplices: return stacked_simplices(spec.n_vertices, spec.dim, spec.lengths, spec.seed);
    default: break;
  }
  check(spec.lengths);
  if (spec.n_vertices == 0) throw infeasible_spec("n_vertices must be positive");
  if (spec.dim >= 1 && spec.bound == 0) throw infeasible_spec("degree bound 0 leaves no room for edges");
  if (spec.dim > spec.bound)
    throw infeasible_spec("simplices of dimension " + std::to_string(spec.dim) + " need bound >= " +
                          std::to_string(spec.dim));

  const bool bounded = spec.kind == kind::random_bounded_degree;
  const std::size_t n = spec.n_vertices;
  std::mt19937_64 rng(spec.seed);
  std::vector<std::set<std::size_t>> adj(n);
  std::vector<std::vector<std::size_t>> simplices;
  std::vector<std::size_t> open;  // bounded kind: vertices with room left
  std::vector<std::size_t> open_pos(n, n);
  auto open_add = [&](std::size_t v) {
    open_pos[v] = open.size();
    open.push_back(v);
  };
  auto open_remove = [&](std::size_t v) {
    const std::size_t at = open_pos[v];
    open[at] = open.back();
    open_pos[open[at]] = at;
    open.pop_back();
    open_pos[v] = n;
  };
  auto eligible = [&](std::size_t v, std::size_t i) { return v < i && (!bounded || open_pos[v] != n); };

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> back;
    const std::size_t available = bounded ? open.size() : i;
    if (spec.dim >= 1 && available > 0) {
      std::uniform_int_distribution<std::size_t> count(1, spec.bound);
      const std::size_t m = std::min(count(rng), available);
      std::uniform_int_distribution<int> coin(0, 1);
      if (spec.dim >= 2 && !simplices.empty() && coin(rng)) {
        std::uniform_int_distribution<std::size_t> pick(0, simplices.size() - 1);
        auto face = simplices[pick(rng)];
        std::shuffle(face.begin(), face.end(), rng);
        for (auto x : face)
          if (back.size() < std::min(spec.dim, m) && eligible(x, i)) back.push_back(x);
      }
      std::uniform_int_distribution<std::size_t> any(0, available - 1);
      while (back.size() < m) {
        const std::size_t x = bounded ? open[any(rng)] : any(rng);
        if (std::find(back.begin(), back.end(), x) == back.end()) back.push_back(x);
      }
    }
    std::vector<std::size_t> clique;
    if (spec.dim >= 2)
      for (auto b : back) {
        if (clique.size() == spec.dim) break;
        if (std::all_of(clique.begin(), clique.end(), [&](std::size_t c) { return adj[b].count(c) > 0; }))
          clique.push_back(b);
      }
    for (auto b : back) {
      adj[i].insert(b);
      adj[b].insert(i);
    }
    if (clique.size() >= 2) {
      clique.push_back(i);
      std::sort(clique.begin(), clique.end());
      simplices.push_back(clique);
    }
    if (bounded) {
      for (auto b : back)
        if (adj[b].size() >= spec.bound && open_pos[b] != n) open_remove(b);
      if (adj[i].size() < spec.bound) open_add(i);
    }
  }

  polyhedron_data<rational> p;
  for (std::size_t i = 0; i < n; ++i) p.vertices.push_back(vertex_name(i));
  std::set<std::pair<std::size_t, std::size_t>> covered;
  for (const auto& s : simplices) {
    std::vector<std::string> named;
    for (auto v : s) named.push_back(vertex_name(v));
    p.maximal_simplices.push_back(std::move(named));
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b) covered.insert({s[a], s[b]});
  }
  for (std::size_t v = 0; v < n; ++v)
    for (auto u : adj[v]) {
      if (u <= v) continue;
      if (!covered.count({v, u})) p.maximal_simplices.push_back({vertex_name(v), vertex_name(u)});
      p.squared_lengths.push_back({vertex_name(v), vertex_name(u), draw_length(spec.lengths, rng)});
    }
  return p;
}

}  // namespace isoembed::gen
