#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "isoembed/complex.hpp"
#include "isoembed/embedding.hpp"
#include "isoembed/linalg.hpp"

namespace isoembed {

// Every check here recomputes inner products from raw coordinates; nothing
// produced by the construction pipelines is reused.

template <class T>
struct isometry_report {
  struct residual {
    std::size_t edge;  // index into polyhedron.edges()
    T value;           // squared_length(tau(a), tau(b)) - g(e)
    friend bool operator==(const residual&, const residual&) = default;
  };
  std::vector<residual> residuals;
  T max_abs_residual = T(0);
  double max_relative = 0;  // max |r_e| / max(1, |g_e|)
  std::optional<std::size_t> worst_edge;
  double tolerance = 0;
  bool pass = true;

  friend bool operator==(const isometry_report&, const isometry_report&) = default;
};

enum class isometry_mode { total, partial };

/// Residual per edge; pass iff |r_e| <= tol * max(1, |g_e|) everywhere. In
/// partial mode edges with an unassigned endpoint are skipped.
template <class T>
isometry_report<T> verify_isometry(const indefinite_metric_polyhedron<T>& p, const embedding<T>& tau,
                                   double tol, isometry_mode mode = isometry_mode::total) {
  if (tau.images.size() != p.vertex_count())
    throw dimension_mismatch("embedding covers " + std::to_string(tau.images.size()) + " vertices, polyhedron has " +
                             std::to_string(p.vertex_count()));
  if (mode == isometry_mode::total)
    for (std::size_t v = 0; v < p.vertex_count(); ++v)
      if (!tau.assigned(v)) throw precondition_error("vertex '" + p.name(v) + "' has no image", {p.name(v)});

  isometry_report<T> r;
  r.tolerance = tol;
  const T tol_t = scalar_traits<T>::from_rational(rational(tol));
  for (std::size_t e = 0; e < p.edges().size(); ++e) {
    const auto [a, b] = p.edges()[e];
    if (!tau.assigned(a) || !tau.assigned(b)) continue;
    const T& g = p.lengths()[e];
    const T res = squared_length(*tau.images[a], *tau.images[b]) - g;
    const T mag = scalar_traits<T>::abs(res);
    const T scale = std::max(T(1), scalar_traits<T>::abs(g));
    if (mag > tol_t * scale) r.pass = false;
    const double rel = scalar_traits<T>::to_double(mag) / scalar_traits<T>::to_double(scale);
    if (!r.worst_edge || mag > r.max_abs_residual) {
      r.max_abs_residual = mag;
      r.worst_edge = e;
    }
    r.max_relative = std::max(r.max_relative, rel);
    r.residuals.push_back({e, res});
  }
  return r;
}

enum class gp_mode { exhaustive, sampled };
enum class gp_status { pass, fail, not_certified };

inline std::string to_string(gp_mode m) { return m == gp_mode::exhaustive ? "exhaustive" : "sampled"; }
inline std::string to_string(gp_status s) {
  switch (s) {
    case gp_status::pass: return "pass";
    case gp_status::fail: return "fail";
    case gp_status::not_certified: return "not_certified";
  }
  return "?";
}

struct gp_options {
  gp_mode mode = gp_mode::exhaustive;
  std::size_t budget = 200000;  // max subsets in exhaustive mode
  std::size_t samples = 1000;   // subsets drawn in sampled mode
  std::uint64_t seed = 0;
  tolerance tol{};
};

struct gp_report {
  gp_mode mode = gp_mode::exhaustive;
  gp_status status = gp_status::pass;
  std::vector<std::size_t> witness;  // indices of an affinely dependent subset
  std::size_t subsets_checked = 0;

  friend bool operator==(const gp_report&, const gp_report&) = default;
};

/// C(n, k), saturating at `cap + 1`.
inline std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (r > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(r));
}

namespace detail {

template <class T>
bool subset_independent(const std::vector<vec<T>>& points, const std::vector<std::size_t>& idx, const tolerance& tol) {
  std::vector<vec<T>> pick;
  pick.reserve(idx.size());
  for (auto i : idx) pick.push_back(points[i]);
  return affine_rank(std::span<const vec<T>>(pick), tol) + 1 == pick.size();
}

/// Drops points from a dependent subset while it stays dependent; the result
/// is a minimal dependent subset.
template <class T>
std::vector<std::size_t> shrink_witness(const std::vector<vec<T>>& points, std::vector<std::size_t> idx,
                                        const tolerance& tol) {
  for (std::size_t i = 0; i < idx.size();) {
    auto trial = idx;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (trial.size() >= 2 && !subset_independent(points, trial, tol))
      idx = std::move(trial);
    else
      ++i;
  }
  return idx;
}

}  // namespace detail

/// d-general position: every subset of at most d+1 points is affinely independent.
/// It suffices to test the subsets of size min(d+1, N).
template <class T>
gp_report verify_general_position(const std::vector<vec<T>>& points, std::size_t d, const gp_options& opt = {}) {
  gp_report r;
  r.mode = opt.mode;
  const std::size_t n = points.size();
  for (const auto& p : points)
    if (p.size() != points.front().size()) throw dimension_mismatch("general position: points of different dimension");
  const std::size_t s = std::min(d + 1, n);
  if (n <= 1) return r;

  auto record_failure = [&](const std::vector<std::size_t>& idx) {
    r.status = gp_status::fail;
    r.witness = detail::shrink_witness(points, idx, opt.tol);
  };

  if (opt.mode == gp_mode::exhaustive) {
    if (binomial_capped(n, s, opt.budget) > opt.budget) {
      r.status = gp_status::not_certified;
      return r;
    }
    std::vector<std::size_t> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      ++r.subsets_checked;
      if (!detail::subset_independent(points, idx, opt.tol)) {
        record_failure(idx);
        return r;
      }
      // next combination in lexicographic order
      std::size_t i = s;
      while (i > 0 && idx[i - 1] == n - s + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    return r;
  }

  std::mt19937_64 rng(opt.seed);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t t = 0; t < opt.samples; ++t) {
    std::vector<std::size_t> idx;
    std::sample(all.begin(), all.end(), std::back_inserter(idx), s, rng);
    ++r.subsets_checked;
    if (!detail::subset_independent(points, idx, opt.tol)) {
      record_failure(idx);
      return r;
    }
  }
  return r;
}

template <class T>
gp_report verify_general_position(const std::vector<mink_vector<T>>& points, std::size_t d, const gp_options& opt = {}) {
  std::vector<vec<T>> raw;
  raw.reserve(points.size());
  for (const auto& p : points) raw.push_back(p.coords());
  return verify_general_position(raw, d, opt);
}

enum class injectivity_verdict { embedding, criterion_inapplicable, unverified, not_injective };

inline std::string to_string(injectivity_verdict v) {
  switch (v) {
    case injectivity_verdict::embedding: return "embedding";
    case injectivity_verdict::criterion_inapplicable: return "criterion_inapplicable";
    case injectivity_verdict::unverified: return "unverified";
    case injectivity_verdict::not_injective: return "not_injective";
  }
  return "?";
}

struct injectivity_options {
  std::size_t samples = 1000;  // barycentric sample pairs
  double tol = 1e-9;           // Euclidean separation below which images coincide
  std::uint64_t seed = 0;
};

struct injectivity_report {
  bool applicable = false;  // d >= 2n + 1
  injectivity_verdict verdict = injectivity_verdict::criterion_inapplicable;
  std::vector<std::string> witness;
  std::size_t samples_run = 0;
  double min_separation = -1;  // smallest sampled image distance, -1 if none sampled

  friend bool operator==(const injectivity_report&, const injectivity_report&) = default;
};

/// Injectivity via the general-position criterion (d >= 2n+1 and the vertex
/// images in (2n+1)-general position imply an embedding), plus direct spot
/// checks: distinct vertex images and separated images of random points on
/// random pairs of disjoint simplices.
template <class T>
injectivity_report verify_injectivity(const indefinite_metric_polyhedron<T>& p, const embedding<T>& tau,
                                      gp_status general_position, const injectivity_options& opt = {}) {
  injectivity_report r;
  const std::size_t n = p.dimension();
  r.applicable = tau.d >= 2 * n + 1;
  const std::size_t nv = p.vertex_count();
  std::vector<vec<double>> img(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& c = tau.at(v).coords();
    img[v].reserve(c.size());
    for (const auto& x : c) img[v].push_back(scalar_traits<T>::to_double(x));
  }
  auto distance = [](const vec<double>& a, const vec<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };

  // pairwise distinct vertex images: sort by first coordinate, compare inside the tol window
  if (nv > 1 && !img[0].empty()) {
    std::vector<std::size_t> byx(nv);
    std::iota(byx.begin(), byx.end(), 0);
    std::sort(byx.begin(), byx.end(), [&](auto a, auto b) { return img[a][0] < img[b][0]; });
    for (std::size_t i = 0; i < nv && r.witness.empty(); ++i)
      for (std::size_t j = i + 1; j < nv && img[byx[j]][0] - img[byx[i]][0] <= opt.tol; ++j) {
        bool same = false;
        if constexpr (scalar_traits<T>::exact)
          same = tau.at(byx[i]) == tau.at(byx[j]);
        if (same || distance(img[byx[i]], img[byx[j]]) <= opt.tol) {
          r.witness = {p.name(std::min(byx[i], byx[j])), p.name(std::max(byx[i], byx[j]))};
          break;
        }
      }
  }

  // barycentric samples on disjoint simplex pairs
  const auto& simplices = p.simplices();
  std::mt19937_64 rng(opt.seed);
  if (r.witness.empty() && simplices.size() >= 2) {
    std::uniform_int_distribution<std::size_t> pick(0, simplices.size() - 1);
    std::exponential_distribution<double> expo(1.0);
    std::size_t attempts = 0;
    while (r.samples_run < opt.samples && attempts < 20 * opt.samples + 100) {
      ++attempts;
      const auto& a = simplices[pick(rng)];
      const auto& b_full = simplices[pick(rng)];
      std::vector<std::size_t> b;
      std::set_difference(b_full.begin(), b_full.end(), a.begin(), a.end(), std::back_inserter(b));
      if (b.empty()) continue;
      auto sample_point = [&](const std::vector<std::size_t>& s) {
        std::vector<double> w(s.size());
        double total = 0;
        for (auto& x : w) total += (x = expo(rng));
        vec<double> pt(img[s[0]].size(), 0.0);
        for (std::size_t i = 0; i < s.size(); ++i)
          for (std::size_t c = 0; c < pt.size(); ++c) pt[c] += w[i] / total * img[s[i]][c];
        return pt;
      };
      const double sep = distance(sample_point(a), sample_point(b));
      ++r.samples_run;
      if (r.min_separation < 0 || sep < r.min_separation) r.min_separation = sep;
      if (sep <= opt.tol) {
        auto describe = [&](const std::vector<std::size_t>& s) {
          std::string out = "[";
          for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + p.name(s[i]);
          return out + "]";
        };
        r.witness = {describe(a), describe(b)};
        break;
      }
    }
  }

  if (!r.witness.empty())
    r.verdict = injectivity_verdict::not_injective;
  else if (!r.applicable)
    r.verdict = injectivity_verdict::criterion_inapplicable;
  else
    r.verdict = general_position == gp_status::pass ? injectivity_verdict::embedding : injectivity_verdict::unverified;
  return r;
}

struct verify_options {
  std::optional<double> residual_tol;  // default: 0 for rational, 1e-9 for float
  enum class gp_policy { automatic, exhaustive, sampled, skip } general_position = gp_policy::automatic;
  gp_options gp{};
  injectivity_options injectivity{};
  bool check_injectivity = true;
};

template <class T>
double default_residual_tol() {
  return scalar_traits<T>::exact ? 0.0 : 1e-9;
}

template <class T>
struct verification_report {
  isometry_report<T> isometry;
  std::optional<gp_report> general_position;
  std::optional<injectivity_report> injectivity;
  bool pass = false;

  friend bool operator==(const verification_report&, const verification_report&) = default;
};

/// Image vectors of the assigned vertices, with their vertex indices.
template <class T>
std::pair<std::vector<vec<T>>, std::vector<std::size_t>> assigned_points(const embedding<T>& tau) {
  std::pair<std::vector<vec<T>>, std::vector<std::size_t>> out;
  for (std::size_t v = 0; v < tau.images.size(); ++v)
    if (tau.images[v]) {
      out.first.push_back(tau.images[v]->coords());
      out.second.push_back(v);
    }
  return out;
}

/// General position of the assigned images; automatic policy is exhaustive
/// within budget and sampled beyond it.
template <class T>
gp_report check_general_position(const embedding<T>& tau, const verify_options& opt) {
  auto [points, ids] = assigned_points(tau);
  gp_options g = opt.gp;
  if (opt.general_position == verify_options::gp_policy::sampled) {
    g.mode = gp_mode::sampled;
  } else if (opt.general_position == verify_options::gp_policy::automatic) {
    const std::size_t s = std::min(tau.d + 1, points.size());
    g.mode = binomial_capped(points.size(), s, g.budget) <= g.budget ? gp_mode::exhaustive : gp_mode::sampled;
  } else {
    g.mode = gp_mode::exhaustive;
  }
  auto r = verify_general_position(points, tau.d, g);
  for (auto& w : r.witness) w = ids[w];
  return r;
}

template <class T>
verification_report<T> verify_embedding(const indefinite_metric_polyhedron<T>& p, const embedding<T>& tau,
                                         const verify_options& opt = {}) {
  verification_report<T> r;
  r.isometry = verify_isometry(p, tau, opt.residual_tol.value_or(default_residual_tol<T>()));
  if (opt.general_position != verify_options::gp_policy::skip) r.general_position = check_general_position(tau, opt);
  if (opt.check_injectivity)
    r.injectivity = verify_injectivity(p, tau, r.general_position ? r.general_position->status : gp_status::not_certified,
                                       opt.injectivity);
  r.pass = r.isometry.pass && !(r.general_position && r.general_position->status == gp_status::fail) &&
           !(r.injectivity && r.injectivity->verdict == injectivity_verdict::not_injective);
  return r;
}

}  // namespace isoembed
