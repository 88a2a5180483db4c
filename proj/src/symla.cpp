#include "sdpcut/symla.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdpcut/errors.hpp"

namespace sdpcut {

namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) {
    throw DomainError("SymMat entries must be finite");
  }
}

void require_same_order(const SymMat& a, const SymMat& b) {
  if (a.order() != b.order()) {
    throw DimensionError("matrix orders differ: " + std::to_string(a.order()) +
                         " vs " + std::to_string(b.order()));
  }
}

}  // namespace

SymMat::SymMat(int n) : n_(n), data_(packed_size(n), 0.0) {
  if (n < 0) throw DomainError("matrix order must be non-negative");
}

SymMat::SymMat(int n, std::vector<double> packed) : n_(n), data_(std::move(packed)) {
  if (n < 0) throw DomainError("matrix order must be non-negative");
  if (data_.size() != packed_size(n)) {
    throw DimensionError("packed storage has " + std::to_string(data_.size()) +
                         " entries, order " + std::to_string(n) + " needs " +
                         std::to_string(packed_size(n)));
  }
  for (double v : data_) require_finite(v);
}

SymMat SymMat::identity(int n) {
  SymMat m(n);
  for (int i = 0; i < n; ++i) m.data_[packed_index(i, i)] = 1.0;
  return m;
}

SymMat SymMat::diagonal(const Eigen::VectorXd& d) {
  SymMat m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n_; ++i) m.set(i, i, d(i));
  return m;
}

SymMat SymMat::from_dense(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  SymMat out(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      if (std::abs(m(i, j) - m(j, i)) > tol * scale) {
        throw DomainError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
      out.set(i, j, m(i, j));
    }
  }
  return out;
}

namespace {
void check_index(int i, int j, int n) {
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw DimensionError("index (" + std::to_string(i) + ", " + std::to_string(j) + ") outside order " +
                         std::to_string(n));
  }
}
}  // namespace

void SymMat::set(int i, int j, double v) {
  check_index(i, j, n_);
  require_finite(v);
  data_[packed_index(i, j)] = v;
}

void SymMat::add(int i, int j, double v) {
  check_index(i, j, n_);
  double& cell = data_[packed_index(i, j)];
  cell += v;
  require_finite(cell);
}

Eigen::MatrixXd SymMat::dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double v = data_[packed_index(i, j)];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

double SymMat::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += data_[packed_index(i, i)];
  return t;
}

double SymMat::trace_of_square() const { return inner(*this); }

double SymMat::frobenius_norm() const { return std::sqrt(trace_of_square()); }

double SymMat::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double SymMat::entrywise_l1() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i <= j; ++i) {
      s += (i == j ? 1.0 : 2.0) * std::abs(data_[packed_index(i, j)]);
    }
  }
  return s;
}

double SymMat::inner(const SymMat& other) const {
  require_same_order(*this, other);
  double s = 0.0;
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i <= j; ++i) {
      const std::size_t k = packed_index(i, j);
      s += (i == j ? 1.0 : 2.0) * data_[k] * other.data_[k];
    }
  }
  return s;
}

SymMat& SymMat::operator+=(const SymMat& other) {
  require_same_order(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& other) {
  require_same_order(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

SymMat& SymMat::operator*=(double s) {
  require_finite(s);
  for (double& v : data_) v *= s;
  return *this;
}

SpectralDecomp eigh(const SymMat& x) {
  if (x.order() == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense());
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver did not converge (order " << x.order()
        << ", Frobenius norm " << x.frobenius_norm() << ")";
    throw NumericalError(msg.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double lambda_min(const SymMat& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver did not converge (order " << x.order()
        << ", Frobenius norm " << x.frobenius_norm() << ")";
    throw NumericalError(msg.str());
  }
  return solver.eigenvalues()(0);
}

double nuclear_norm(const SymMat& x) {
  if (x.order() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver did not converge (order " << x.order()
        << ", Frobenius norm " << x.frobenius_norm() << ")";
    throw NumericalError(msg.str());
  }
  return solver.eigenvalues().cwiseAbs().sum();
}

double eigenvalue_trace_bound(double trace, double trace_sq, int n) {
  if (n < 1) throw DomainError("order must be at least 1");
  const double nn = static_cast<double>(n);
  const double spread = trace_sq / nn - trace * trace / (nn * nn);
  // Rounding can push a feasible pair slightly below zero.
  const double slack = 1e-12 * std::max(1.0, std::abs(trace_sq));
  if (spread < -slack) {
    throw DomainError("infeasible (trace, trace_sq) pair: tr(X^2) < tr(X)^2 / n");
  }
  if (n == 1) return trace;
  return trace / nn - std::sqrt((nn - 1.0) * std::max(0.0, spread));
}

double lambda_min_bound_lp(int n, double trace_bound) {
  if (n < 1) throw DomainError("order must be at least 1");
  if (trace_bound < 0.0) throw DomainError("trace bound must be non-negative");
  const double nn = static_cast<double>(n);
  return trace_bound / nn - trace_bound * std::sqrt((nn * nn * nn - 1.0) * (nn - 1.0)) / nn;
}

double lambda_min_bound_lp_loose(int n, double trace_bound) {
  if (n < 1) throw DomainError("order must be at least 1");
  if (trace_bound < 0.0) throw DomainError("trace bound must be non-negative");
  const double nn = static_cast<double>(n);
  return trace_bound / nn - nn * trace_bound;
}

double lambda_min_bound_soc(int n, double trace_bound) {
  if (n < 1) throw DomainError("order must be at least 1");
  if (trace_bound < 0.0) throw DomainError("trace bound must be non-negative");
  return 2.0 * trace_bound / static_cast<double>(n) - trace_bound;
}

}  // namespace sdpcut
