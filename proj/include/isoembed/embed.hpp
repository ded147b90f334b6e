#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "isoembed/complex.hpp"
#include "isoembed/embedding.hpp"
#include "isoembed/linalg.hpp"
#include "isoembed/split.hpp"
#include "isoembed/verify.hpp"

namespace isoembed {

/// A vertex to place next to already placed neighbours: find u0 with
/// <u0 - u_i, u0 - u_i> = c_i for every neighbour and P_Delta(u0) = anchor.
template <class T>
struct placement_problem {
  isotropic_split<T> split;
  mink_vector<T> anchor;  // a point of Delta_H
  std::vector<mink_vector<T>> neighbors;
  std::vector<T> targets;
};

/// Writes u0 = v0 + h0 with h0 in Sigma_H. With w = Delta-coordinates and a =
/// Sigma-coordinates, <u0 - u_i, u0 - u_i> = 4 <w0 - w_i, a0 - a_i>, so h0
/// solves the linear system
///
///   <w0 - w_i, a0> = c_i / 4 + <w0 - w_i, a_i>,   i = 1..k.
///
/// For k < d the minimum-norm a0 is taken.
template <class T>
mink_vector<T> place_vertex(const placement_problem<T>& p, const tolerance& tol = {}) {
  const std::size_t d = p.split.d();
  const std::size_t k = p.neighbors.size();
  if (p.targets.size() != k) throw dimension_mismatch("placement: targets and neighbours differ in count");
  if (k > d)
    throw precondition_error("placement: " + std::to_string(k) + " neighbours exceed d=" + std::to_string(d));
  if (p.anchor.d() != d) throw dimension_mismatch("placement: anchor has the wrong dimension");

  const vec<T> w0 = p.split.delta_coords(p.anchor);
  std::vector<vec<T>> rows;
  vec<T> rhs;
  rows.reserve(k);
  rhs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    vec<T> wi = p.split.delta_coords(p.neighbors[i]);
    vec<T> ai = p.split.sigma_coords(p.neighbors[i]);
    vec<T> row = w0 - wi;
    rhs.push_back(p.targets[i] / T(4) + dot(row, ai));
    rows.push_back(std::move(row));
  }
  vec<T> a0;
  try {
    a0 = solve_pairing_system(rows, rhs, d, tol);
  } catch (const rank_deficient& e) {
    throw precondition_error("placement: anchor and projected neighbours are affinely dependent (neighbour #" +
                             std::to_string(e.row()) + ")");
  }
  return p.split.from_coords(w0, a0);
}

enum class anchor_family {
  moment_curve,  // (t, t^2, ..., t^d) at t = position + moment_start
  uniform_box,   // seeded uniform points of [-1, 1]^d
};

inline std::string to_string(anchor_family a) {
  return a == anchor_family::moment_curve ? "moment_curve" : "uniform_box";
}

struct embed_config {
  std::optional<std::size_t> d;          // default: degeneracy (at least 1)
  std::optional<anchor_family> anchors;  // default: moment curve (exact), uniform box (float)
  long long moment_start = 1;
  std::size_t anchor_draws = 8;  // uniform box: candidates tried per vertex
  std::uint64_t seed = 0;
  tolerance tol{};
};

template <class T>
anchor_family default_anchors() {
  return scalar_traits<T>::exact ? anchor_family::moment_curve : anchor_family::uniform_box;
}

/// Chooses d from the ordering and the requested value; throws when the
/// request is below the degeneracy.
inline std::size_t resolve_dimension(std::optional<std::size_t> requested, std::size_t degeneracy) {
  if (requested) {
    if (*requested == 0) throw precondition_error("d must be at least 1");
    if (*requested < degeneracy)
      throw precondition_error("requested d=" + std::to_string(*requested) + " is below the degeneracy " +
                               std::to_string(degeneracy) + " of the complex");
    return *requested;
  }
  return std::max<std::size_t>(degeneracy, 1);
}

/// Places the vertices one at a time along `order`, all in the standard split:
/// the i-th vertex gets Delta-projection v_i (the i-th anchor) and is solved
/// against its earlier neighbours. A vertex without earlier neighbours is the
/// anchor itself.
template <class T>
embedding<T> embed_polyhedron(const indefinite_metric_polyhedron<T>& p, const degeneracy_ordering& order,
                              const embed_config& cfg = {}) {
  if (order.order.size() != p.vertex_count()) throw precondition_error("ordering does not match the polyhedron");
  const std::size_t d = resolve_dimension(cfg.d, order.degeneracy);
  const anchor_family family = cfg.anchors.value_or(default_anchors<T>());
  const auto split = standard_split<T>(d);

  embedding<T> tau;
  tau.d = d;
  tau.images.assign(p.vertex_count(), std::nullopt);
  tau.meta.pipeline = "embed";
  tau.meta.split_policy = "standard";
  tau.meta.anchors = to_string(family);
  tau.meta.seed = cfg.seed;
  tau.meta.ordering.reserve(order.order.size());

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0);

  for (std::size_t i = 0; i < order.order.size(); ++i) {
    const std::size_t v = order.order[i];
    tau.meta.ordering.push_back(p.name(v));
    placement_problem<T> prob{split, mink_vector<T>(d), {}, {}};
    for (auto u : p.neighbors(v)) {
      if (order.position[u] >= i) continue;
      prob.neighbors.push_back(*tau.images[u]);
      prob.targets.push_back(p.length(u, v));
    }
    if (prob.neighbors.size() > d)
      throw precondition_error("vertex '" + p.name(v) + "' has " + std::to_string(prob.neighbors.size()) +
                               " earlier neighbours, more than d=" + std::to_string(d));

    if (family == anchor_family::moment_curve) {
      const T t = scalar_traits<T>::from_int(static_cast<long long>(i) + cfg.moment_start);
      tau.meta.anchor_parameters.push_back(format_scalar(t));
      prob.anchor = split.delta_point(moment_curve_point(t, d));
      if (prob.neighbors.empty()) {
        tau.images[v] = prob.anchor;
        continue;
      }
      try {
        tau.images[v] = place_vertex(prob, cfg.tol);
      } catch (const precondition_error& e) {
        throw internal_error("placing vertex '" + p.name(v) +
                             "' failed although anchors are in general position: " + e.what());
      }
      continue;
    }

    // uniform box: best of several draws, scored by how far the placed point's
    // Sigma-coordinates move away from the neighbours' mean
    auto draw = [&] {
      vec<T> w(d);
      for (auto& x : w) {
        if constexpr (scalar_traits<T>::exact)
          x = rational(box(rng));
        else
          x = box(rng);
      }
      return split.delta_point(w);
    };
    if (prob.neighbors.empty()) {
      tau.images[v] = draw();
      continue;
    }
    vec<T> mean(d, T(0));
    for (const auto& u : prob.neighbors) mean = mean + split.sigma_coords(u);
    for (auto& x : mean) x /= T(static_cast<long long>(prob.neighbors.size()));
    std::optional<mink_vector<T>> best;
    double best_score = 0;
    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(cfg.anchor_draws, 1); ++attempt) {
      prob.anchor = draw();
      mink_vector<T> u0;
      try {
        u0 = place_vertex(prob, cfg.tol);
      } catch (const precondition_error&) {
        continue;
      }
      double score = 0;
      const auto a0 = split.sigma_coords(u0);
      for (std::size_t c = 0; c < d; ++c)
        score = std::max(score, scalar_traits<T>::to_double(scalar_traits<T>::abs(a0[c] - mean[c])));
      if (!best || score < best_score) {
        best = std::move(u0);
        best_score = score;
      }
    }
    if (!best) throw internal_error("no admissible anchor found for vertex '" + p.name(v) + "'");
    tau.images[v] = std::move(*best);
  }
  return tau;
}

template <class T>
embedding<T> embed_polyhedron(const indefinite_metric_polyhedron<T>& p, const embed_config& cfg = {}) {
  return embed_polyhedron(p, smallest_last(p), cfg);
}

/// Result of constructing an isotropic pair adapted to a point set H, with the
/// matrices that certify it.
struct isotropic_pair_result {
  isotropic_split<double> split;
  matrix<double> s_plus;       // R W+ C: [I_k 0; 0 0] up to rounding
  matrix<double> s_minus;      // W- C
  matrix<double> certificate;  // S+ - F- S-, lower triangular with positive diagonal
  std::size_t positive_rank = 0;
};

namespace detail {

/// Householder QR with column pivoting of a square matrix: A P = Q R.
struct pivoted_qr {
  matrix<double> q;
  matrix<double> r;
  std::vector<std::size_t> perm;  // column j of A P is column perm[j] of A
  std::size_t rank = 0;
};

inline pivoted_qr qr_column_pivoting(matrix<double> a, const tolerance& tol) {
  const std::size_t m = a.rows(), n = a.cols();
  pivoted_qr out;
  out.perm.resize(n);
  std::iota(out.perm.begin(), out.perm.end(), 0);
  matrix<double> q = matrix<double>::identity(m);
  double first = 0;
  for (std::size_t j = 0; j < std::min(m, n); ++j) {
    std::size_t best = j;
    double best_norm = -1;
    for (std::size_t c = j; c < n; ++c) {
      double s = 0;
      for (std::size_t i = j; i < m; ++i) s += a(i, c) * a(i, c);
      if (s > best_norm) {
        best_norm = s;
        best = c;
      }
    }
    best_norm = std::sqrt(best_norm);
    if (j == 0) first = best_norm;
    if (best_norm <= tol.rank_rel * first || best_norm == 0) break;
    if (best != j) {
      for (std::size_t i = 0; i < m; ++i) std::swap(a(i, j), a(i, best));
      std::swap(out.perm[j], out.perm[best]);
    }
    vec<double> v(m - j);
    for (std::size_t i = j; i < m; ++i) v[i - j] = a(i, j);
    const double beta = v[0] >= 0 ? -best_norm : best_norm;
    v[0] -= beta;
    const double vn = norm2(v);
    if (vn > 0) {
      for (double& x : v) x /= vn;
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0;
        for (std::size_t i = j; i < m; ++i) s += v[i - j] * a(i, c);
        for (std::size_t i = j; i < m; ++i) a(i, c) -= 2 * s * v[i - j];
      }
      // accumulate Q = Q H_j
      for (std::size_t r = 0; r < m; ++r) {
        double s = 0;
        for (std::size_t i = j; i < m; ++i) s += q(r, i) * v[i - j];
        for (std::size_t i = j; i < m; ++i) q(r, i) -= 2 * s * v[i - j];
      }
    }
    ++out.rank;
  }
  out.q = std::move(q);
  out.r = std::move(a);
  return out;
}

/// Inverse of an upper-triangular k x k block.
inline matrix<double> upper_inverse(const matrix<double>& r, std::size_t k) {
  matrix<double> inv(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = k; i-- > 0;) {
      double s = i == c ? 1.0 : 0.0;
      for (std::size_t j = i + 1; j < k; ++j) s -= r(i, j) * inv(j, c);
      inv(i, c) = s / r(i, i);
    }
  }
  return inv;
}

}  // namespace detail

/// Complementary isotropic pair (Sigma_H, Delta_H) such that P_{Delta_H}(H) is
/// affinely independent, for an affinely independent H of at most d+1 points.
///
/// H is translated to contain the origin and padded with standard basis
/// directions until its differences span a d-dimensional U. An orthogonal R
/// on the positive block brings P+(U) onto span(e_1..e_k), after which U has a
/// basis with S+ = [I_k 0; 0 0]. Then with -S- = Q L (QL decomposition) and
/// F- = Q^T, the matrix S+ - F- S- = S+ + L is lower triangular with positive
/// diagonal, i.e. the projection of F U onto the standard Delta is onto.
inline isotropic_pair_result isotropic_pair_for(const std::vector<mink_vector<double>>& h, std::size_t d,
                                                const tolerance& tol = {}) {
  if (d == 0) throw precondition_error("isotropic_pair_for needs d >= 1");
  if (h.size() > d + 1)
    throw precondition_error("isotropic_pair_for: " + std::to_string(h.size()) + " points exceed d+1=" +
                             std::to_string(d + 1));
  for (const auto& x : h)
    if (x.d() != d) throw dimension_mismatch("isotropic_pair_for: point of the wrong dimension");
  if (!h.empty() && affine_rank(h, tol) + 1 != h.size())
    throw precondition_error("isotropic_pair_for: points are not affinely independent");

  const std::size_t dim = 2 * d;
  // orthonormal basis of the current difference span, for greedy padding
  std::vector<vec<double>> basis;
  std::vector<vec<double>> diffs;
  auto residual_of = [&](vec<double> x) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double c = dot(b, x);
        for (std::size_t i = 0; i < dim; ++i) x[i] -= c * b[i];
      }
    return x;
  };
  auto add = [&](const vec<double>& x) {
    vec<double> r = residual_of(x);
    const double n = norm2(r);
    for (auto& y : r) y /= n;
    basis.push_back(std::move(r));
    diffs.push_back(x);
  };
  for (std::size_t i = 1; i < h.size(); ++i) add(h[i].coords() - h[0].coords());
  // pad with the standard direction farthest from the current span
  while (diffs.size() < d) {
    double best = -1;
    std::size_t pick = 0;
    for (std::size_t e = 0; e < dim; ++e) {
      vec<double> x(dim, 0.0);
      x[e] = 1.0;
      const double n = norm2(residual_of(x));
      if (n > best) {
        best = n;
        pick = e;
      }
    }
    if (best <= tol.rank_rel) throw internal_error("isotropic_pair_for: cannot pad H to d+1 independent points");
    vec<double> x(dim, 0.0);
    x[pick] = 1.0;
    add(x);
  }

  const matrix<double> w = matrix<double>::from_columns(diffs, dim);
  const matrix<double> w_plus = w.block(0, 0, d, d);
  const matrix<double> w_minus = w.block(d, 0, d, d);

  // W+ P = Qr [R11 R12; 0 0]; R := Qr^T maps P+(U) onto span(e_1..e_k)
  const auto qr = detail::qr_column_pivoting(w_plus, tol);
  const std::size_t k = qr.rank;
  const matrix<double> rot = qr.q.transpose();

  // C = P [R11^{-1}, -R11^{-1} R12; 0, I]
  matrix<double> c_inner = matrix<double>::identity(d);
  if (k > 0) {
    const matrix<double> r11_inv = detail::upper_inverse(qr.r, k);
    const matrix<double> r12 = qr.r.block(0, k, k, d - k);
    const matrix<double> top_right = r11_inv * r12;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) c_inner(i, j) = r11_inv(i, j);
      for (std::size_t j = k; j < d; ++j) c_inner(i, j) = -top_right(i, j - k);
    }
  }
  matrix<double> c(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) c(qr.perm[i], j) = c_inner(i, j);

  isotropic_pair_result out{isotropic_split<double>::standard(d), {}, {}, {}, k};
  out.s_plus = rot * w_plus * c;
  out.s_minus = w_minus * c;

  matrix<double> neg = out.s_minus;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) neg(i, j) = -neg(i, j);
  const auto ql = ql_decompose(neg);
  const matrix<double> f_minus = ql.q.transpose();
  out.certificate = out.s_plus - f_minus * out.s_minus;
  out.split = isotropic_split<double>(rot, f_minus);
  return out;
}

struct generic_point_options {
  bool certify = false;           // also avoid images of spans of every d-subset of placed points
  std::size_t max_attempts = 100;
  std::size_t subset_budget = 200000;
  tolerance tol{};
};

/// Draws v0 in Delta_H such that {v0} together with the Delta_H-projections of
/// `neighbors` is affinely independent and, in certify mode, v0 lies off the
/// projected affine span of every d-subset of `placed`. Coordinates are integer
/// lattice draws in [-B, B]^d, B = 10 (|placed| + d)^2, rescaled to the spread
/// of the projected neighbours around their centroid.
template <class T, class Rng>
mink_vector<T> choose_generic_delta_point(const isotropic_split<T>& split, std::span<const mink_vector<T>> placed,
                                          std::span<const mink_vector<T>> neighbors, Rng& rng,
                                          const generic_point_options& opt = {}) {
  const std::size_t d = split.d();
  std::vector<vec<T>> proj_neighbors;
  for (const auto& n : neighbors) proj_neighbors.push_back(split.delta_coords(n));
  if (!proj_neighbors.empty() && affine_rank(proj_neighbors, opt.tol) + 1 != proj_neighbors.size())
    throw precondition_error("choose_generic_delta_point: projected neighbours are affinely dependent");

  vec<T> center(d, T(0));
  T radius(1);
  if (!proj_neighbors.empty()) {
    for (const auto& w : proj_neighbors) center = center + w;
    for (auto& x : center) x /= T(static_cast<long long>(proj_neighbors.size()));
    for (const auto& w : proj_neighbors)
      for (std::size_t i = 0; i < d; ++i) radius = std::max(radius, T(scalar_traits<T>::abs(w[i] - center[i])));
  }
  const long long bound = 10LL * static_cast<long long>((placed.size() + d) * (placed.size() + d));
  std::uniform_int_distribution<long long> lattice(-bound, bound);

  // projected d-subsets of `placed` for certification
  std::vector<std::vector<vec<T>>> subsets;
  std::vector<std::size_t> subset_rank;
  if (opt.certify && !placed.empty()) {
    std::vector<vec<T>> proj;
    for (const auto& x : placed) proj.push_back(split.delta_coords(x));
    const std::size_t s = std::min(d, proj.size());
    if (binomial_capped(proj.size(), s, opt.subset_budget) > opt.subset_budget)
      throw precondition_error("certified generic point: " + std::to_string(proj.size()) +
                               " placed points exceed the subset budget");
    std::vector<std::size_t> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<vec<T>> sub;
      for (auto i : idx) sub.push_back(proj[i]);
      subset_rank.push_back(affine_rank(sub, opt.tol));
      subsets.push_back(std::move(sub));
      std::size_t i = s;
      while (i > 0 && idx[i - 1] == proj.size() - s + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
  }

  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    vec<T> w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = center[i] + radius * T(lattice(rng)) / T(bound);
    auto with = proj_neighbors;
    with.push_back(w);
    if (affine_rank(with, opt.tol) + 1 != with.size()) continue;
    bool ok = true;
    for (std::size_t s = 0; s < subsets.size() && ok; ++s) {
      auto sub = subsets[s];
      sub.push_back(w);
      ok = affine_rank(sub, opt.tol) == subset_rank[s] + 1;
    }
    if (ok) return split.delta_point(w);
  }
  throw retry_exhausted("no generic Delta point found in " + std::to_string(opt.max_attempts) + " attempts (" +
                            std::to_string(neighbors.size()) + " neighbours, " + std::to_string(placed.size()) +
                            " placed points)",
                        opt.max_attempts);
}

struct extend_config {
  std::uint64_t seed = 0;
  bool certify = false;
  std::size_t anchor_draws = 8;  // generic anchors tried per vertex
  double precheck_tol = 1e-9;  // isometry tolerance for the partial map
  verify_options::gp_policy precheck_gp = verify_options::gp_policy::automatic;
  generic_point_options generic{};
};

/// Extends a partial simplicial isometric map in d-general position to all
/// vertices, taking the missing vertices in input order. Each one gets its own
/// isotropic pair adapted to the images of its placed neighbours, a generic
/// anchor in that pair's Delta, and is placed against those neighbours.
inline embedding<double> extend_embedding(const indefinite_metric_polyhedron<double>& p,
                                          const embedding<double>& partial, const extend_config& cfg = {}) {
  const std::size_t d = partial.d;
  if (d == 0) throw precondition_error("partial embedding has d=0");
  if (partial.images.size() != p.vertex_count())
    throw dimension_mismatch("partial embedding does not match the polyhedron's vertex count");
  for (const auto& im : partial.images)
    if (im && im->d() != d) throw dimension_mismatch("partial embedding has a point of the wrong dimension");
  if (const auto md = max_degree(p); md > d)
    throw precondition_error("max degree " + std::to_string(md) + " exceeds d=" + std::to_string(d));

  const auto iso = verify_isometry(p, partial, cfg.precheck_tol, isometry_mode::partial);
  if (!iso.pass) {
    const auto e = p.edges()[*iso.worst_edge];
    throw precondition_error("partial map violates the length of edge {" + p.name(e.a) + ", " + p.name(e.b) + "}",
                             {p.name(e.a), p.name(e.b)});
  }
  verify_options vo;
  vo.general_position = cfg.certify ? verify_options::gp_policy::exhaustive : cfg.precheck_gp;
  vo.gp.seed = cfg.seed;
  vo.gp.tol = cfg.generic.tol;
  const auto gp = check_general_position(partial, vo);
  if (gp.status == gp_status::fail) {
    std::vector<std::string> names;
    for (auto v : gp.witness) names.push_back(p.name(v));
    throw precondition_error("partial map is not in d-general position", names);
  }
  if (cfg.certify && gp.status != gp_status::pass)
    throw precondition_error("general position of the partial map could not be certified");

  embedding<double> tau = partial;
  tau.meta.pipeline = "extend";
  tau.meta.split_policy = "per-vertex";
  tau.meta.anchors = "generic";
  tau.meta.anchor_parameters.clear();
  tau.meta.seed = cfg.seed;
  tau.meta.ordering.clear();

  std::vector<mink_vector<double>> placed;
  for (const auto& im : tau.images)
    if (im) placed.push_back(*im);

  generic_point_options gopt = cfg.generic;
  gopt.certify = cfg.certify;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t v = 0; v < p.vertex_count(); ++v) {
    if (tau.images[v]) continue;
    tau.meta.ordering.push_back(p.name(v));
    std::vector<mink_vector<double>> h;
    std::vector<double> targets;
    for (auto u : p.neighbors(v))
      if (tau.images[u]) {
        h.push_back(*tau.images[u]);
        targets.push_back(p.length(u, v));
      }
    try {
      if (h.empty()) {
        const auto split = standard_split<double>(d);
        tau.images[v] = choose_generic_delta_point<double>(split, placed, {}, rng, gopt);
      } else {
        const auto pair = isotropic_pair_for(h, d, gopt.tol);
        placement_problem<double> prob{pair.split, mink_vector<double>(d), h, targets};
        vec<double> mean(d, 0.0);
        for (const auto& u : h) mean = mean + pair.split.sigma_coords(u);
        for (auto& x : mean) x /= static_cast<double>(h.size());
        // best of several generic anchors: least drift of the Sigma-coordinates
        double best_score = 0;
        for (std::size_t attempt = 0; attempt < std::max<std::size_t>(cfg.anchor_draws, 1); ++attempt) {
          prob.anchor = choose_generic_delta_point<double>(pair.split, placed, h, rng, gopt);
          auto u0 = place_vertex(prob, gopt.tol);
          const auto a0 = pair.split.sigma_coords(u0);
          double score = 0;
          for (std::size_t c = 0; c < d; ++c) score = std::max(score, std::fabs(a0[c] - mean[c]));
          if (!tau.images[v] || score < best_score) {
            tau.images[v] = std::move(u0);
            best_score = score;
          }
        }
      }
    } catch (const error& e) {
      throw precondition_error("extending to vertex '" + p.name(v) + "' failed: " + e.what(), {p.name(v)});
    }
    placed.push_back(*tau.images[v]);
  }
  return tau;
}

}  // namespace isoembed
