#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace sdpcut {

/// Number of entries in the packed upper triangle of an order-n matrix.
constexpr std::size_t packed_size(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
}

/// Position of (i, j), i <= j, inside the packed upper triangle (column-major).
constexpr std::size_t packed_index(int i, int j) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(j + 1) / 2 +
         static_cast<std::size_t>(i);
}

/// Dense symmetric matrix stored as its packed upper triangle, so X(i, j) and
/// X(j, i) always address the same cell. Entries are finite.
class SymMat {
 public:
  SymMat() = default;
  /// Zero matrix of order n.
  explicit SymMat(int n);
  /// Takes ownership of packed upper-triangle storage.
  SymMat(int n, std::vector<double> packed);

  static SymMat identity(int n);
  static SymMat diagonal(const Eigen::VectorXd& d);
  /// Reads the upper triangle of `m`; throws if `m` is not symmetric within
  /// `tol` (relative to its largest entry).
  static SymMat from_dense(const Eigen::MatrixXd& m, double tol = 1e-12);

  int order() const { return n_; }
  double operator()(int i, int j) const { return data_[packed_index(i, j)]; }
  void set(int i, int j, double v);
  void add(int i, int j, double v);

  const std::vector<double>& packed() const { return data_; }

  Eigen::MatrixXd dense() const;
  double trace() const;
  /// tr(X^2), i.e. the squared Frobenius norm.
  double trace_of_square() const;
  double frobenius_norm() const;
  double max_abs() const;
  /// Entrywise 1-norm of the full matrix (off-diagonals counted twice).
  double entrywise_l1() const;
  /// Frobenius inner product <X, Y>.
  double inner(const SymMat& other) const;

  SymMat& operator+=(const SymMat& other);
  SymMat& operator-=(const SymMat& other);
  SymMat& operator*=(double s);
  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(double s, SymMat a) { return a *= s; }

  bool operator==(const SymMat& other) const = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Eigenpairs in ascending eigenvalue order; column k of `vectors` pairs with
/// `values[k]`, so the smallest eigenpair is always index 0.
struct SpectralDecomp {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  double min() const { return values(0); }
  double max() const { return values(values.size() - 1); }
};

/// Full dense symmetric eigendecomposition. Throws NumericalError carrying the
/// order and Frobenius norm of X when the eigensolver does not converge.
SpectralDecomp eigh(const SymMat& x);

/// Smallest eigenvalue only.
double lambda_min(const SymMat& x);

/// Sum of |lambda_i|; equals tr(X) exactly when X is PSD.
double nuclear_norm(const SymMat& x);

/// Lower bound on lambda_min of any symmetric matrix of order n with the given
/// tr(X) and tr(X^2) (Wolkowicz-Styan). Throws DomainError when the pair is
/// infeasible, i.e. trace_sq < trace^2 / n.
double eigenvalue_trace_bound(double trace, double trace_sq, int n);

/// Worst-case lambda_min over the LP 2x2-minor region with tr(X) = T.
double lambda_min_bound_lp(int n, double trace_bound);

/// The looser closed form T/n - nT that the LP bound dominates.
double lambda_min_bound_lp_loose(int n, double trace_bound);

/// Worst-case lambda_min over the SOC 2x2-minor region with tr(X) <= T.
double lambda_min_bound_soc(int n, double trace_bound);

}  // namespace sdpcut
