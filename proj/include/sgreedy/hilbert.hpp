#pragma once

// Inner-product geometry on the model space R^d: points, Gram matrices,
// orthogonal projection onto finite spans, and a Jacobi eigenvalue routine
// for the small symmetric matrices the dictionary analytics need.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgreedy/errors.hpp"

namespace sgreedy {

/// A vector of the model Hilbert space R^d.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim) : coords_(dim, 0.0) {}
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {
    if (!is_finite()) throw InvalidInput("Point: non-finite coordinate");
  }
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }

  bool is_finite() const {
    return std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); });
  }

  /// this += a * x
  Point& axpy(double a, const Point& x) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += a * x.coords_[i];
    return *this;
  }

  Point& operator+=(const Point& x) { return axpy(1.0, x); }
  Point& operator-=(const Point& x) { return axpy(-1.0, x); }
  Point& operator*=(double a) {
    for (auto& v : coords_) v *= a;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(double a, Point x) { return x *= a; }
  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

inline void require_same_dim(const Point& x, const Point& y, const char* where) {
  if (x.dim() != y.dim()) {
    throw InvalidInput(std::string(where) + ": dimension mismatch (" + std::to_string(x.dim()) +
                       " vs " + std::to_string(y.dim()) + ")");
  }
}

inline double inner(const Point& x, const Point& y) {
  require_same_dim(x, y, "inner");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) sum += x[i] * y[i];
  return sum;
}

inline double norm(const Point& x) { return std::sqrt(inner(x, x)); }

/// Dense symmetric matrix, row-major. Symmetry is checked exactly on
/// construction from explicit entries.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t order) : order_(order), entries_(order * order, 0.0) {}

  SymMatrix(std::size_t order, std::vector<double> entries) : order_(order), entries_(std::move(entries)) {
    if (entries_.size() != order_ * order_) throw InvalidInput("SymMatrix: entry count is not order^2");
    for (std::size_t i = 0; i < order_; ++i)
      for (std::size_t j = i + 1; j < order_; ++j)
        if (at(i, j) != at(j, i)) throw InvalidInput("SymMatrix: input is not symmetric");
  }

  SymMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    order_ = rows.size();
    for (const auto& row : rows) {
      if (row.size() != order_) throw InvalidInput("SymMatrix: ragged rows");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
    *this = SymMatrix(order_, std::move(entries_));
  }

  std::size_t order() const { return order_; }
  double at(std::size_t i, std::size_t j) const { return entries_[i * order_ + j]; }

  /// Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) {
    entries_[i * order_ + j] = v;
    entries_[j * order_ + i] = v;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t order_ = 0;
  std::vector<double> entries_;
};

/// Gram matrix of a list of elements given by pointer.
inline SymMatrix gram(std::span<const Point* const> elements) {
  if (elements.empty()) throw InvalidInput("gram: empty element list");
  const std::size_t n = elements.size();
  for (const Point* e : elements) require_same_dim(*elements[0], *e, "gram");
  SymMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) g.set(i, j, inner(*elements[i], *elements[j]));
  return g;
}

inline std::vector<const Point*> pointers_to(std::span<const Point> elements) {
  std::vector<const Point*> out;
  out.reserve(elements.size());
  for (const auto& e : elements) out.push_back(&e);
  return out;
}

inline SymMatrix gram(std::span<const Point> elements) { return gram(std::span<const Point* const>(pointers_to(elements))); }

struct Projection {
  Point projection;
  /// Aligned with `kept`.
  std::vector<double> coeffs;
  /// Positions into the input element list that survived pivoting, ascending.
  std::vector<std::size_t> kept;
};

inline constexpr double kDefaultRegTol = 1e-10;

namespace detail {

// Solves G_CC c = rhs where `chol` holds the pivoted factor rows for the
// chosen pivots in pivot order: chol[a][b] = L(chosen[a], b).
inline std::vector<double> cholesky_solve(const std::vector<std::vector<double>>& chol,
                                          std::span<const double> rhs) {
  const std::size_t k = rhs.size();
  std::vector<double> y(k);
  for (std::size_t a = 0; a < k; ++a) {
    double sum = rhs[a];
    for (std::size_t b = 0; b < a; ++b) sum -= chol[a][b] * y[b];
    y[a] = sum / chol[a][a];
  }
  std::vector<double> c(k);
  for (std::size_t a = k; a-- > 0;) {
    double sum = y[a];
    for (std::size_t b = a + 1; b < k; ++b) sum -= chol[b][a] * c[b];
    c[a] = sum / chol[a][a];
  }
  return c;
}

}  // namespace detail

/// Orthogonal projection of `x` onto span(elements).
///
/// Solves the Gram system by symmetric elimination with diagonal pivoting
/// (largest remaining Schur diagonal first, lowest position on ties). A pivot
/// is rejected when its Schur diagonal, i.e. the squared distance of that
/// element to the span of the already kept ones, is at most
/// reg_tol * max_i G_ii; elimination stops at the first rejected pivot. One
/// step of iterative refinement follows the solve.
inline Projection project_span(const Point& x, std::span<const Point* const> elements,
                               double reg_tol = kDefaultRegTol) {
  if (!(reg_tol > 0.0)) throw InvalidInput("project_span: reg_tol must be > 0");
  if (elements.empty()) throw InvalidInput("project_span: empty element list");
  for (const Point* e : elements) require_same_dim(x, *e, "project_span");

  const std::size_t n = elements.size();
  const SymMatrix g = gram(elements);

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, g.at(i, i));
  const double threshold = reg_tol * max_diag;

  std::vector<double> schur(n);
  for (std::size_t i = 0; i < n; ++i) schur[i] = g.at(i, i);
  std::vector<std::vector<double>> lower(n, std::vector<double>(n, 0.0));  // L(i, step)
  std::vector<bool> used(n, false);
  std::vector<std::size_t> order;

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pivot = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && (pivot == n || schur[i] > schur[pivot])) pivot = i;
    if (pivot == n || !(schur[pivot] > threshold)) break;
    used[pivot] = true;
    order.push_back(pivot);
    const double d = std::sqrt(schur[pivot]);
    lower[pivot][step] = d;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      double v = g.at(i, pivot);
      for (std::size_t b = 0; b < step; ++b) v -= lower[i][b] * lower[pivot][b];
      v /= d;
      lower[i][step] = v;
      schur[i] -= v * v;
    }
  }

  Projection out{Point(x.dim()), {}, {}};
  if (order.empty()) return out;

  const std::size_t k = order.size();
  std::vector<std::vector<double>> chol(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b <= a; ++b) chol[a][b] = lower[order[a]][b];

  std::vector<double> rhs(k);
  for (std::size_t a = 0; a < k; ++a) rhs[a] = inner(*elements[order[a]], x);
  std::vector<double> c = detail::cholesky_solve(chol, rhs);

  auto synthesize = [&](const std::vector<double>& coeffs) {
    Point p(x.dim());
    for (std::size_t a = 0; a < k; ++a) p.axpy(coeffs[a], *elements[order[a]]);
    return p;
  };

  Point residual = x - synthesize(c);
  for (std::size_t a = 0; a < k; ++a) rhs[a] = inner(*elements[order[a]], residual);
  const std::vector<double> delta = detail::cholesky_solve(chol, rhs);
  for (std::size_t a = 0; a < k; ++a) c[a] += delta[a];

  out.projection = synthesize(c);
  std::vector<std::size_t> perm(k);
  for (std::size_t a = 0; a < k; ++a) perm[a] = a;
  std::sort(perm.begin(), perm.end(), [&](std::size_t u, std::size_t v) { return order[u] < order[v]; });
  for (std::size_t a : perm) {
    out.kept.push_back(order[a]);
    out.coeffs.push_back(c[a]);
  }
  return out;
}

inline Projection project_span(const Point& x, std::span<const Point> elements, double reg_tol = kDefaultRegTol) {
  return project_span(x, std::span<const Point* const>(pointers_to(elements)), reg_tol);
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// ascending. Sweeps until every off-diagonal magnitude is below
/// 1e-12 times the max-norm of the input.
inline std::vector<double> eigenvalues_sym(const SymMatrix& m) {
  const std::size_t n = m.order();
  if (n == 0) throw InvalidInput("eigenvalues_sym: empty matrix");
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m.at(i, j);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  const double tol = 1e-12 * m.max_abs();
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(at(i, j)));
    if (off <= tol) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

inline double max_eigen_sym(const SymMatrix& m) { return eigenvalues_sym(m).back(); }
inline double min_eigen_sym(const SymMatrix& m) { return eigenvalues_sym(m).front(); }

}  // namespace sgreedy
