#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isoembed/error.hpp"
#include "isoembed/scalar.hpp"

namespace isoembed {

template <class T>
using vec = std::vector<T>;

/// Dense row-major matrix. Sizes here are at most a few hundred.
template <class T>
class matrix {
 public:
  matrix() = default;
  matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static matrix identity(std::size_t n) {
    matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  /// Matrix whose columns are the given vectors (all of equal length).
  static matrix from_columns(std::span<const vec<T>> columns, std::size_t rows) {
    matrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != rows) throw dimension_mismatch("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  vec<T> column(std::size_t j) const {
    vec<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  matrix transpose() const {
    matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Sub-block [r0, r0+nr) x [c0, c0+nc).
  matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  friend matrix operator*(const matrix& a, const matrix& b) {
    if (a.cols_ != b.rows_) throw dimension_mismatch("matrix product shape mismatch");
    matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend vec<T> operator*(const matrix& a, const vec<T>& x) {
    if (a.cols_ != x.size()) throw dimension_mismatch("matrix-vector shape mismatch");
    vec<T> y(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend matrix operator-(const matrix& a, const matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw dimension_mismatch("matrix difference shape mismatch");
    matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }

  friend matrix operator+(const matrix& a, const matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw dimension_mismatch("matrix sum shape mismatch");
    matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }

  friend bool operator==(const matrix&, const matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

inline double max_abs(const matrix<double>& m) {
  double r = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r = std::max(r, std::fabs(m(i, j)));
  return r;
}

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw dimension_mismatch("dot product length mismatch");
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
T dot(const vec<T>& a, const vec<T>& b) {
  return dot(std::span<const T>(a), std::span<const T>(b));
}

template <class T>
vec<T> operator-(const vec<T>& a, const vec<T>& b) {
  if (a.size() != b.size()) throw dimension_mismatch("vector length mismatch");
  vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

template <class T>
vec<T> operator+(const vec<T>& a, const vec<T>& b) {
  if (a.size() != b.size()) throw dimension_mismatch("vector length mismatch");
  vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline double norm2(std::span<const double> a) {
  double s = 0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

/// A point of R^d_d: 2d coordinates, the first d form the positive block v+,
/// the last d the negative block v-.
template <class T>
class mink_vector {
 public:
  mink_vector() = default;
  explicit mink_vector(std::size_t d) : coords_(2 * d, T(0)) {}
  explicit mink_vector(vec<T> coords) : coords_(std::move(coords)) {
    if (coords_.size() % 2 != 0)
      throw dimension_mismatch("Minkowski vector needs an even number of coordinates, got " +
                               std::to_string(coords_.size()));
  }
  /// Assembles (plus, minus).
  mink_vector(const vec<T>& plus, const vec<T>& minus) {
    if (plus.size() != minus.size()) throw dimension_mismatch("positive/negative block length mismatch");
    coords_.reserve(2 * plus.size());
    coords_.insert(coords_.end(), plus.begin(), plus.end());
    coords_.insert(coords_.end(), minus.begin(), minus.end());
  }

  std::size_t d() const noexcept { return coords_.size() / 2; }
  std::size_t size() const noexcept { return coords_.size(); }
  const vec<T>& coords() const noexcept { return coords_; }

  std::span<const T> plus() const { return {coords_.data(), d()}; }
  std::span<const T> minus() const { return {coords_.data() + d(), d()}; }

  T& operator[](std::size_t i) { return coords_[i]; }
  const T& operator[](std::size_t i) const { return coords_[i]; }

  friend mink_vector operator+(const mink_vector& a, const mink_vector& b) {
    check_same(a, b);
    return mink_vector(a.coords_ + b.coords_);
  }
  friend mink_vector operator-(const mink_vector& a, const mink_vector& b) {
    check_same(a, b);
    return mink_vector(a.coords_ - b.coords_);
  }
  friend bool operator==(const mink_vector&, const mink_vector&) = default;

  static void check_same(const mink_vector& a, const mink_vector& b) {
    if (a.d() != b.d())
      throw dimension_mismatch("Minkowski vectors of different signature: d=" + std::to_string(a.d()) +
                               " vs d=" + std::to_string(b.d()));
  }

 private:
  vec<T> coords_;
};

/// <u+, v+> - <u-, v->
template <class T>
T mink_inner(const mink_vector<T>& u, const mink_vector<T>& v) {
  mink_vector<T>::check_same(u, v);
  return dot(u.plus(), v.plus()) - dot(u.minus(), v.minus());
}

template <class T>
T squared_length(const mink_vector<T>& u, const mink_vector<T>& v) {
  auto diff = u - v;
  return mink_inner(diff, diff);
}

/// (t, t^2, ..., t^d)
template <class T>
vec<T> moment_curve_point(const T& t, std::size_t d) {
  vec<T> p(d);
  T power = t;
  for (std::size_t i = 0; i < d; ++i) {
    p[i] = power;
    power *= t;
  }
  return p;
}

namespace detail {

/// Gaussian elimination with full pivoting; destroys `m`. Floating pivots below
/// tol.rank_rel times the first (largest) pivot are treated as zero. A positive
/// `scale` raises that reference, so entries that are pure rounding noise
/// relative to the data count as zero.
template <class T>
std::size_t eliminate_rank(matrix<T>& m, const tolerance& tol, const T& scale = T(0)) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t rank = 0;
  T first_pivot(0);
  for (std::size_t step = 0; step < std::min(rows, cols); ++step) {
    std::size_t pr = step, pc = step;
    T best(0);
    bool found = false;
    for (std::size_t i = step; i < rows && !(found && scalar_traits<T>::exact); ++i)
      for (std::size_t j = step; j < cols; ++j) {
        if constexpr (scalar_traits<T>::exact) {
          // any nonzero pivot is exact; take the first one
          if (m(i, j) != 0) {
            pr = i;
            pc = j;
            best = scalar_traits<T>::abs(m(i, j));
            found = true;
            break;
          }
        } else {
          const T a = scalar_traits<T>::abs(m(i, j));
          if (a > best) {
            best = a;
            pr = i;
            pc = j;
            found = true;
          }
        }
      }
    if (!found) break;
    if (step == 0) first_pivot = best > scale ? best : scale;
    if (best == T(0) || scalar_traits<T>::is_zero(best, first_pivot, tol)) break;
    for (std::size_t j = 0; j < cols; ++j) std::swap(m(step, j), m(pr, j));
    for (std::size_t i = 0; i < rows; ++i) std::swap(m(i, step), m(i, pc));
    const T pivot = m(step, step);
    for (std::size_t i = step + 1; i < rows; ++i) {
      if (m(i, step) == T(0)) continue;
      const T f = m(i, step) / pivot;
      for (std::size_t j = step; j < cols; ++j) m(i, j) -= f * m(step, j);
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

template <class T>
std::size_t matrix_rank(matrix<T> m, const tolerance& tol = {}) {
  return detail::eliminate_rank(m, tol);
}

/// Rank of {p_i - p_0}. Points are affinely independent iff the result is count - 1.
template <class T>
std::size_t affine_rank(std::span<const vec<T>> points, const tolerance& tol = {}) {
  if (points.empty()) throw precondition_error("affine_rank of an empty point set");
  const std::size_t dim = points[0].size();
  matrix<T> diffs(points.size() - 1, dim);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != dim) throw dimension_mismatch("affine_rank: points of different dimension");
    for (std::size_t j = 0; j < dim; ++j) diffs(i - 1, j) = points[i][j] - points[0][j];
  }
  if constexpr (scalar_traits<T>::exact) {
    return detail::eliminate_rank(diffs, tol);
  } else {
    // differences cannot resolve much below rounding error of the coordinates
    T coord(0);
    for (const auto& p : points)
      for (const auto& x : p) coord = std::max(coord, scalar_traits<T>::abs(x));
    return detail::eliminate_rank(diffs, tol, T(coord * 1e-5));
  }
}

template <class T>
std::size_t affine_rank(const std::vector<vec<T>>& points, const tolerance& tol = {}) {
  return affine_rank(std::span<const vec<T>>(points), tol);
}

template <class T>
std::size_t affine_rank(const std::vector<mink_vector<T>>& points, const tolerance& tol = {}) {
  std::vector<vec<T>> raw;
  raw.reserve(points.size());
  for (const auto& p : points) raw.push_back(p.coords());
  return affine_rank(std::span<const vec<T>>(raw), tol);
}

template <class T>
bool affinely_independent(std::span<const vec<T>> points, const tolerance& tol = {}) {
  return points.empty() || affine_rank(points, tol) + 1 == points.size();
}

namespace detail {

inline vec<double> solve_pairing_float(const std::vector<vec<double>>& rows, const vec<double>& rhs,
                                       std::size_t d, const tolerance& tol) {
  // Householder QR of A^T (d x k): A^T = Q R, so A x = b becomes R^T (Q^T x) = b.
  // The minimum-norm solution keeps the trailing d-k components of Q^T x at zero.
  const std::size_t k = rows.size();
  matrix<double> at(d, k);
  double max_row = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < d; ++j) at(j, i) = rows[i][j];
    max_row = std::max(max_row, norm2(rows[i]));
  }
  std::vector<vec<double>> reflectors;
  reflectors.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    vec<double> v(d - j);
    for (std::size_t i = j; i < d; ++i) v[i - j] = at(i, j);
    const double alpha = norm2(v);
    if (alpha <= tol.rank_rel * max_row || max_row == 0)
      throw rank_deficient(j, "pairing system row " + std::to_string(j) +
                                  " is linearly dependent on the preceding rows");
    const double beta = v[0] >= 0 ? -alpha : alpha;
    v[0] -= beta;
    const double vnorm = norm2(v);
    for (double& x : v) x /= vnorm;
    for (std::size_t c = j; c < k; ++c) {
      double s = 0;
      for (std::size_t i = j; i < d; ++i) s += v[i - j] * at(i, c);
      for (std::size_t i = j; i < d; ++i) at(i, c) -= 2 * s * v[i - j];
    }
    reflectors.push_back(std::move(v));
  }
  // forward substitution with R^T (lower triangular)
  vec<double> y(d, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double s = rhs[i];
    for (std::size_t j = 0; j < i; ++j) s -= at(j, i) * y[j];
    y[i] = s / at(i, i);
  }
  // x = Q y, Q = H_0 H_1 ... H_{k-1}
  for (std::size_t jj = k; jj-- > 0;) {
    const auto& v = reflectors[jj];
    double s = 0;
    for (std::size_t i = jj; i < d; ++i) s += v[i - jj] * y[i];
    for (std::size_t i = jj; i < d; ++i) y[i] -= 2 * s * v[i - jj];
  }
  return y;
}

template <class T>
vec<T> solve_pairing_exact(const std::vector<vec<T>>& rows, const vec<T>& rhs, std::size_t d) {
  // x = A^T (A A^T)^{-1} b. Elimination on the Gram matrix needs no pivoting: the
  // i-th pivot is the squared distance of row i from the span of the earlier rows.
  const std::size_t k = rows.size();
  matrix<T> gram(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = dot(rows[i], rows[j]);
  vec<T> y = rhs;
  for (std::size_t p = 0; p < k; ++p) {
    if (gram(p, p) == 0)
      throw rank_deficient(p, "pairing system row " + std::to_string(p) +
                                  " is linearly dependent on the preceding rows");
    for (std::size_t i = p + 1; i < k; ++i) {
      if (gram(i, p) == 0) continue;
      const T f = gram(i, p) / gram(p, p);
      for (std::size_t j = p; j < k; ++j) gram(i, j) -= f * gram(p, j);
      y[i] -= f * y[p];
    }
  }
  for (std::size_t i = k; i-- > 0;) {
    T s = y[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= gram(i, j) * y[j];
    y[i] = s / gram(i, i);
  }
  vec<T> x(d, T(0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) x[j] += rows[i][j] * y[i];
  return x;
}

}  // namespace detail

/// Solves rows * x = rhs for x in R^d, k = rows.size() <= d. Underdetermined
/// systems return the minimum Euclidean norm solution. Throws rank_deficient
/// naming the first row that depends on its predecessors.
template <class T>
vec<T> solve_pairing_system(const std::vector<vec<T>>& rows, const vec<T>& rhs, std::size_t d,
                            const tolerance& tol = {}) {
  if (rows.size() != rhs.size())
    throw dimension_mismatch("pairing system: " + std::to_string(rows.size()) + " rows but " +
                             std::to_string(rhs.size()) + " right-hand sides");
  if (rows.size() > d)
    throw dimension_mismatch("pairing system: " + std::to_string(rows.size()) +
                             " equations exceed dimension " + std::to_string(d));
  for (const auto& r : rows)
    if (r.size() != d) throw dimension_mismatch("pairing system: row length differs from d");
  if (rows.empty()) return vec<T>(d, T(0));
  if constexpr (scalar_traits<T>::exact)
    return detail::solve_pairing_exact(rows, rhs, d);
  else
    return detail::solve_pairing_float(rows, rhs, d, tol);
}

/// A = Q L with Q orthogonal and L lower triangular, diag(L) >= 0.
struct ql_result {
  matrix<double> q;
  matrix<double> l;
};

/// QL by Gram-Schmidt run over the columns from last to first, with one
/// re-orthogonalization pass. A column that is numerically in the span of the
/// later ones gets a zero diagonal and Q is completed with a unit vector
/// orthogonal to the columns found so far.
inline ql_result ql_decompose(const matrix<double>& a) {
  if (a.rows() != a.cols()) throw dimension_mismatch("ql_decompose needs a square matrix");
  const std::size_t n = a.rows();
  matrix<double> q(n, n), l(n, n);
  double scale = 0;
  for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, norm2(a.column(j)));
  const double drop = 1e-14 * scale;

  auto orthogonalize = [&](vec<double>& v, std::size_t from, std::size_t col, bool record) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = from; i < n; ++i) {
        double r = 0;
        for (std::size_t t = 0; t < n; ++t) r += q(t, i) * v[t];
        if (record) l(i, col) += r;
        for (std::size_t t = 0; t < n; ++t) v[t] -= r * q(t, i);
      }
  };

  for (std::size_t j = n; j-- > 0;) {
    vec<double> v = a.column(j);
    orthogonalize(v, j + 1, j, true);
    double nrm = norm2(v);
    if (nrm > drop && nrm > 0) {
      l(j, j) = nrm;
    } else {
      // complete the basis with the standard vector that survives best
      double best = -1;
      vec<double> pick;
      for (std::size_t e = 0; e < n; ++e) {
        vec<double> c(n, 0.0);
        c[e] = 1.0;
        orthogonalize(c, j + 1, j, false);
        double cn = norm2(c);
        if (cn > best) {
          best = cn;
          pick = std::move(c);
        }
      }
      v = std::move(pick);
      nrm = best;
      l(j, j) = 0.0;
    }
    for (std::size_t t = 0; t < n; ++t) q(t, j) = v[t] / nrm;
  }
  return {std::move(q), std::move(l)};
}

}  // namespace isoembed
