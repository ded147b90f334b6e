#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "isoembed/linalg.hpp"

namespace isoembed {

/// A pair of complementary isotropic d-subspaces (Sigma_H, Delta_H) of R^d_d,
/// stored as a block-diagonal Lorentz transform F = diag(F+, F-) that carries
/// them onto the standard pair
///
///   Sigma = {(x, x)},   Delta = {(x, -x)}.
///
/// F+ and F- are orthogonal, so F^{-1} = diag(F+^T, F-^T); both are kept.
///
/// Points are coordinatized relative to the split: for a vector v with
/// F v = (p, m),
///   delta_coords(v) = (p - m) / 2   so that  P_Delta(v) = F^{-1} (w, -w)
///   sigma_coords(v) = (p + m) / 2   so that  P_Sigma(v) = F^{-1} (a, a)
/// and for Delta-point (w,-w) and Sigma-point (a,a) the pairing is 2 <w, a>.
template <class T>
class isotropic_split {
 public:
  /// The standard split in R^d_d (F = identity).
  static isotropic_split standard(std::size_t d) {
    if (d == 0) throw precondition_error("isotropic split needs d >= 1");
    return isotropic_split(d);
  }

  /// Split given by orthogonal blocks F+ (acting on the positive block) and F-.
  isotropic_split(matrix<T> f_plus, matrix<T> f_minus)
      : d_(f_plus.rows()),
        transform_(std::pair{std::move(f_plus), std::move(f_minus)}) {
    const auto& [fp, fm] = *transform_;
    if (fp.rows() != fp.cols() || fm.rows() != fm.cols() || fp.rows() != fm.rows() || d_ == 0)
      throw dimension_mismatch("isotropic split blocks must be square d x d, d >= 1");
    inverse_ = std::pair{fp.transpose(), fm.transpose()};
  }

  std::size_t d() const noexcept { return d_; }
  bool is_standard() const noexcept { return !transform_.has_value(); }

  /// F as a full 2d x 2d matrix.
  matrix<T> transform() const { return assemble(transform_); }
  matrix<T> inverse() const { return assemble(inverse_); }

  /// F v: coordinates in the frame where this split is the standard one.
  mink_vector<T> to_standard(const mink_vector<T>& v) const { return apply(transform_, v); }
  /// F^{-1} v
  mink_vector<T> from_standard(const mink_vector<T>& v) const { return apply(inverse_, v); }

  vec<T> delta_coords(const mink_vector<T>& v) const {
    const auto s = to_standard(v);
    vec<T> w(d_);
    for (std::size_t i = 0; i < d_; ++i) w[i] = (s[i] - s[d_ + i]) / T(2);
    return w;
  }

  vec<T> sigma_coords(const mink_vector<T>& v) const {
    const auto s = to_standard(v);
    vec<T> a(d_);
    for (std::size_t i = 0; i < d_; ++i) a[i] = (s[i] + s[d_ + i]) / T(2);
    return a;
  }

  /// The point of Delta_H with coordinates w.
  mink_vector<T> delta_point(const vec<T>& w) const { return from_coords(w, vec<T>(d_, T(0))); }
  /// The point of Sigma_H with coordinates a.
  mink_vector<T> sigma_point(const vec<T>& a) const { return from_coords(vec<T>(d_, T(0)), a); }

  /// delta_point(w) + sigma_point(a), computed in one pass.
  mink_vector<T> from_coords(const vec<T>& w, const vec<T>& a) const {
    if (w.size() != d_ || a.size() != d_)
      throw dimension_mismatch("split coordinates must have length d=" + std::to_string(d_));
    vec<T> plus(d_), minus(d_);
    for (std::size_t i = 0; i < d_; ++i) {
      plus[i] = w[i] + a[i];
      minus[i] = a[i] - w[i];
    }
    return from_standard(mink_vector<T>(plus, minus));
  }

  mink_vector<T> project_delta(const mink_vector<T>& v) const { return delta_point(delta_coords(v)); }
  mink_vector<T> project_sigma(const mink_vector<T>& v) const { return sigma_point(sigma_coords(v)); }

 private:
  using blocks = std::optional<std::pair<matrix<T>, matrix<T>>>;

  explicit isotropic_split(std::size_t d) : d_(d) {}

  mink_vector<T> apply(const blocks& b, const mink_vector<T>& v) const {
    if (v.d() != d_)
      throw dimension_mismatch("vector with d=" + std::to_string(v.d()) + " used with split of d=" +
                               std::to_string(d_));
    if (!b) return v;
    const auto& [fp, fm] = *b;
    const vec<T> plus(v.plus().begin(), v.plus().end());
    const vec<T> minus(v.minus().begin(), v.minus().end());
    return mink_vector<T>(fp * plus, fm * minus);
  }

  matrix<T> assemble(const blocks& b) const {
    if (!b) return matrix<T>::identity(2 * d_);
    const auto& [fp, fm] = *b;
    matrix<T> f(2 * d_, 2 * d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) {
        f(i, j) = fp(i, j);
        f(d_ + i, d_ + j) = fm(i, j);
      }
    return f;
  }

  std::size_t d_;
  blocks transform_;
  blocks inverse_;
};

template <class T>
isotropic_split<T> standard_split(std::size_t d) {
  return isotropic_split<T>::standard(d);
}

template <class T>
mink_vector<T> project_delta(const isotropic_split<T>& split, const mink_vector<T>& v) {
  return split.project_delta(v);
}

template <class T>
mink_vector<T> project_sigma(const isotropic_split<T>& split, const mink_vector<T>& v) {
  return split.project_sigma(v);
}

template <class T>
mink_vector<T> delta_point(const isotropic_split<T>& split, const vec<T>& w) {
  return split.delta_point(w);
}

}  // namespace isoembed
