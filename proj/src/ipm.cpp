#include "sdpcut/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Cholesky>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "sdpcut/errors.hpp"

namespace sdpcut {

using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using SpMatRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

namespace ipm_detail {

std::optional<SocScaling> nt_scaling_soc(const VectorXd& s, const VectorXd& z) {
  const long d = s.size();
  const double s1n = s.tail(d - 1).norm();
  const double z1n = z.tail(d - 1).norm();
  const double sres = (s(0) - s1n) * (s(0) + s1n);
  const double zres = (z(0) - z1n) * (z(0) + z1n);
  if (!(s(0) > 0.0 && z(0) > 0.0 && sres > 0.0 && zres > 0.0)) return std::nullopt;
  const double sn = std::sqrt(sres);
  const double zn = std::sqrt(zres);
  const VectorXd sb = s / sn;
  const VectorXd zb = z / zn;
  const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
  SocScaling sc;
  sc.eta = std::sqrt(sn / zn);
  sc.wbar.resize(d);
  sc.wbar(0) = (sb(0) + zb(0)) / (2.0 * gamma);
  sc.wbar.tail(d - 1) = (sb.tail(d - 1) - zb.tail(d - 1)) / (2.0 * gamma);
  return sc;
}

VectorXd soc_apply_w(const SocScaling& sc, const VectorXd& v) {
  const long d = v.size();
  const double w0 = sc.wbar(0);
  const double dot = sc.wbar.tail(d - 1).dot(v.tail(d - 1));
  VectorXd out(d);
  out(0) = w0 * v(0) + dot;
  out.tail(d - 1) = v.tail(d - 1) + (v(0) + dot / (1.0 + w0)) * sc.wbar.tail(d - 1);
  return sc.eta * out;
}

VectorXd soc_apply_winv(const SocScaling& sc, const VectorXd& v) {
  const long d = v.size();
  const double w0 = sc.wbar(0);
  const double dot = sc.wbar.tail(d - 1).dot(v.tail(d - 1));
  VectorXd out(d);
  out(0) = w0 * v(0) - dot;
  out.tail(d - 1) = v.tail(d - 1) + (-v(0) + dot / (1.0 + w0)) * sc.wbar.tail(d - 1);
  return out / sc.eta;
}

Eigen::MatrixXd soc_w2_dense(const SocScaling& sc) {
  const long d = sc.wbar.size();
  Eigen::MatrixXd m = 2.0 * sc.wbar * sc.wbar.transpose();
  m(0, 0) -= 1.0;
  for (long i = 1; i < d; ++i) m(i, i) += 1.0;
  return sc.eta * sc.eta * m;
}

namespace {

struct Expansion {
  double d1, u0, u1, v1;
};

// W^2 = eta^2 (D - v v' + u u') with D = diag(d1, 1, ..., 1),
// v = (0, v1 w1), u = (u0, u1 w1); keeps the KKT block sparse.
Expansion expansion_of(const SocScaling& sc) {
  const long d = sc.wbar.size();
  const double a = sc.wbar(0);
  const double w = sc.wbar.tail(d - 1).squaredNorm();
  const double c = (1.0 + a) + w / (1.0 + a);
  const double dd = 1.0 + 2.0 / (1.0 + a) + w / ((1.0 + a) * (1.0 + a));
  Expansion e{};
  e.d1 = std::max(0.0, 0.5 * (a * a + w * (1.0 - c * c / (1.0 + w * dd))));
  e.u0 = std::sqrt(std::max(0.0, a * a + w - e.d1));
  e.u1 = e.u0 > 0.0 ? c / e.u0 : 0.0;
  e.v1 = std::sqrt(std::max(0.0, e.u1 * e.u1 - dd));
  return e;
}

}  // namespace

Eigen::MatrixXd soc_w2_from_expansion(const SocScaling& sc) {
  const long d = sc.wbar.size();
  const Expansion e = expansion_of(sc);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  m(0, 0) = e.d1;
  VectorXd v = VectorXd::Zero(d), u(d);
  v.tail(d - 1) = e.v1 * sc.wbar.tail(d - 1);
  u(0) = e.u0;
  u.tail(d - 1) = e.u1 * sc.wbar.tail(d - 1);
  m += u * u.transpose() - v * v.transpose();
  return sc.eta * sc.eta * m;
}

double soc_max_step(const VectorXd& u, const VectorXd& v) {
  const long d = u.size();
  const double a = v(0) * v(0) - v.tail(d - 1).squaredNorm();
  const double b = 2.0 * (u(0) * v(0) - u.tail(d - 1).dot(v.tail(d - 1)));
  const double c = u(0) * u(0) - u.tail(d - 1).squaredNorm();
  const double inf = std::numeric_limits<double>::infinity();
  if (c <= 0.0) return 0.0;
  // t must stay positive; near the axis the discriminant alone can round the
  // wrong way and report an unbounded step
  double best = v(0) < 0.0 ? -u(0) / v(0) : inf;
  if (a == 0.0) return b < 0.0 ? std::min(best, -c / b) : best;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return best;
  const double t = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  for (double r : {t / a, t != 0.0 ? c / t : inf}) {
    if (r > 0.0 && r < best) best = r;
  }
  return best;
}

}  // namespace ipm_detail

namespace {

using ipm_detail::SocScaling;

struct Cones {
  int l = 0;
  std::vector<int> q;
  std::vector<int> start;
  int m = 0;
  int degree() const { return l + static_cast<int>(q.size()); }
};

Cones make_cones(const ConeProblem& p) {
  Cones k;
  k.l = p.orthant_dim;
  k.q = p.soc_dims;
  int off = k.l;
  for (int d : k.q) {
    k.start.push_back(off);
    off += d;
  }
  k.m = off;
  return k;
}

struct Scalings {
  VectorXd w;  // orthant: sqrt(s / z)
  std::vector<SocScaling> soc;
  VectorXd lambda;
};

Scalings identity_scalings(const Cones& k) {
  Scalings sc;
  sc.w = VectorXd::Ones(k.l);
  for (int d : k.q) {
    SocScaling s;
    s.wbar = VectorXd::Zero(d);
    s.wbar(0) = 1.0;
    sc.soc.push_back(std::move(s));
  }
  sc.lambda = VectorXd::Zero(k.m);
  return sc;
}

// power in {1, -1, 2, -2}
VectorXd apply_w(const Cones& k, const Scalings& sc, const VectorXd& v, int power) {
  VectorXd out(k.m);
  for (int i = 0; i < k.l; ++i) out(i) = v(i) * std::pow(sc.w(i), power);
  for (std::size_t c = 0; c < k.q.size(); ++c) {
    const int st = k.start[c], d = k.q[c];
    const SocScaling& s = sc.soc[c];
    const VectorXd seg = v.segment(st, d);
    switch (power) {
      case 1:
        out.segment(st, d) = ipm_detail::soc_apply_w(s, seg);
        break;
      case -1:
        out.segment(st, d) = ipm_detail::soc_apply_winv(s, seg);
        break;
      case 2:
        out.segment(st, d) = ipm_detail::soc_apply_w(s, ipm_detail::soc_apply_w(s, seg));
        break;
      default:
        out.segment(st, d) = ipm_detail::soc_apply_winv(s, ipm_detail::soc_apply_winv(s, seg));
        break;
    }
  }
  return out;
}

bool update_scalings(const Cones& k, const VectorXd& s, const VectorXd& z, Scalings& sc) {
  sc.w.resize(k.l);
  for (int i = 0; i < k.l; ++i) {
    if (!(s(i) > 0.0 && z(i) > 0.0)) return false;
    sc.w(i) = std::sqrt(s(i) / z(i));
  }
  sc.soc.clear();
  for (std::size_t c = 0; c < k.q.size(); ++c) {
    auto r = ipm_detail::nt_scaling_soc(s.segment(k.start[c], k.q[c]), z.segment(k.start[c], k.q[c]));
    if (!r) return false;
    sc.soc.push_back(std::move(*r));
  }
  sc.lambda = apply_w(k, sc, z, 1);
  return true;
}

VectorXd jordan_product(const Cones& k, const VectorXd& u, const VectorXd& v) {
  VectorXd out(k.m);
  out.head(k.l) = u.head(k.l).cwiseProduct(v.head(k.l));
  for (std::size_t c = 0; c < k.q.size(); ++c) {
    const int st = k.start[c], d = k.q[c];
    out(st) = u.segment(st, d).dot(v.segment(st, d));
    out.segment(st + 1, d - 1) = u(st) * v.segment(st + 1, d - 1) + v(st) * u.segment(st + 1, d - 1);
  }
  return out;
}

// Solves lambda o x = v.
VectorXd jordan_divide(const Cones& k, const VectorXd& lambda, const VectorXd& v) {
  VectorXd out(k.m);
  out.head(k.l) = v.head(k.l).cwiseQuotient(lambda.head(k.l));
  for (std::size_t c = 0; c < k.q.size(); ++c) {
    const int st = k.start[c], d = k.q[c];
    const double l0 = lambda(st);
    const auto l1 = lambda.segment(st + 1, d - 1);
    const double rho = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * v(st) - l1.dot(v.segment(st + 1, d - 1))) / rho;
    out(st) = x0;
    out.segment(st + 1, d - 1) = (v.segment(st + 1, d - 1) - x0 * l1) / l0;
  }
  return out;
}

void add_identity(const Cones& k, VectorXd& v, double alpha) {
  for (int i = 0; i < k.l; ++i) v(i) += alpha;
  for (int st : k.start) v(st) += alpha;
}

void bring_to_cone(const Cones& k, VectorXd& r) {
  if (k.m == 0) return;
  double alpha = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.l; ++i) alpha = std::max(alpha, -r(i));
  for (std::size_t c = 0; c < k.q.size(); ++c) {
    const int st = k.start[c], d = k.q[c];
    alpha = std::max(alpha, r.segment(st + 1, d - 1).norm() - r(st));
  }
  if (alpha >= 0.0) add_identity(k, r, 1.0 + alpha);
}

double max_step_cone(const Cones& k, const VectorXd& u, const VectorXd& v) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.l; ++i) {
    if (v(i) < 0.0) alpha = std::min(alpha, -u(i) / v(i));
  }
  for (std::size_t c = 0; c < k.q.size(); ++c) {
    const int st = k.start[c], d = k.q[c];
    alpha = std::min(alpha, ipm_detail::soc_max_step(u.segment(st, d), v.segment(st, d)));
  }
  return alpha;
}

// ---------------------------------------------------------------------------
// Linear systems  [0 A' G'; A 0 0; G 0 -W^2] [x; y; z] = rhs, solved with a
// small static regularization; callers refine against the exact matrix.

// Sparse matrix whose heavy rows (cuts touch every entry of X) are held
// densely, so products run at dense speed.
class RowSplitMatrix {
 public:
  RowSplitMatrix() = default;
  explicit RowSplitMatrix(const SpMat& m) : cols_(static_cast<int>(m.cols())) {
    const SpMatRow r(m);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < r.rows(); ++i) {
      if (r.row(i).nonZeros() > kDenseRow) {
        dense_rows_.push_back(i);
        continue;
      }
      for (SpMatRow::InnerIterator it(r, i); it; ++it) t.emplace_back(i, static_cast<int>(it.col()), it.value());
    }
    sparse_.resize(m.rows(), m.cols());
    sparse_.setFromTriplets(t.begin(), t.end());
    sparse_t_ = sparse_.transpose();
    dense_.setZero(static_cast<long>(dense_rows_.size()), m.cols());
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) {
      for (SpMatRow::InnerIterator it(r, dense_rows_[k]); it; ++it) dense_(static_cast<long>(k), it.col()) = it.value();
    }
  }

  VectorXd mul(const VectorXd& x) const {
    VectorXd y = sparse_ * x;
    if (!dense_rows_.empty()) {
      const VectorXd d = dense_ * x;
      for (std::size_t k = 0; k < dense_rows_.size(); ++k) y(dense_rows_[k]) += d(static_cast<long>(k));
    }
    return y;
  }

  VectorXd tmul(const VectorXd& z) const {
    VectorXd y = sparse_t_ * z;
    if (!dense_rows_.empty()) {
      VectorXd zd(static_cast<long>(dense_rows_.size()));
      for (std::size_t k = 0; k < dense_rows_.size(); ++k) zd(static_cast<long>(k)) = z(dense_rows_[k]);
      y.noalias() += dense_.transpose() * zd;
    }
    return y;
  }

 private:
  static constexpr int kDenseRow = 64;
  int cols_ = 0;
  SpMat sparse_, sparse_t_;
  Eigen::MatrixXd dense_;
  std::vector<int> dense_rows_;
};

class KktSystem {
 public:
  virtual ~KktSystem() = default;
  virtual bool factor(const Scalings& sc) = 0;
  virtual VectorXd solve(const VectorXd& rhs) = 0;
};

// Reduced normal equations: H = G' W^-2 G + delta I, then a Schur complement on A.
class DenseKkt final : public KktSystem {
 public:
  DenseKkt(const ConeProblem& p, const Cones& k, double delta, const RowSplitMatrix& g)
      : p_(p), k_(k), delta_(delta), g_(g), grow_(p.G), ad_(p.A.toDense()) {}

  bool factor(const Scalings& sc) override {
    sc_ = &sc;
    const int n = p_.num_vars();
    double delta = delta_;
    for (int attempt = 0; attempt < 6; ++attempt, delta *= 100.0) {
      assemble(sc, delta);
      hllt_.compute(h_);
      if (hllt_.info() == Eigen::Success) break;
      if (attempt == 5) return false;
    }
    const int np = p_.num_equalities();
    if (np > 0) {
      // H^-1 A' is kept so each solve needs a single pass through the factor
      hinv_at_ = hllt_.solve(ad_.transpose());
      Eigen::MatrixXd s = ad_ * hinv_at_;
      s.diagonal().array() += delta_;
      sllt_.compute(s);
      if (sllt_.info() != Eigen::Success) return false;
    }
    (void)n;
    return true;
  }

  VectorXd solve(const VectorXd& rhs) override {
    const int n = p_.num_vars(), np = p_.num_equalities(), m = k_.m;
    const VectorXd r1 = rhs.head(n), r2 = rhs.segment(n, np), r3 = rhs.tail(m);
    const VectorXd t = apply_w(k_, *sc_, r3, -2);
    const VectorXd rt = r1 + g_.tmul(t);
    VectorXd x, y(np);
    if (np > 0) {
      const VectorXd v = hllt_.solve(rt);
      y = sllt_.solve(ad_ * v - r2);
      x = v - hinv_at_ * y;
    } else {
      x = hllt_.solve(rt);
    }
    const VectorXd z = apply_w(k_, *sc_, VectorXd(g_.mul(x) - r3), -2);
    VectorXd out(n + np + m);
    out << x, y, z;
    return out;
  }

 private:
  void add_row(int r, double weight) {
    for (SpMatRow::InnerIterator a(grow_, r); a; ++a) {
      for (SpMatRow::InnerIterator b(grow_, r); b; ++b) {
        if (b.col() > a.col()) break;
        h_(a.col(), b.col()) += weight * a.value() * b.value();
      }
    }
  }

  void add_outer(const VectorXd& u, const std::vector<int>& idx, double weight) {
    if (static_cast<int>(idx.size()) > kDenseRow) {
      h_.selfadjointView<Eigen::Lower>().rankUpdate(u, weight);
      return;
    }
    for (int a : idx) {
      for (int b : idx) {
        if (b <= a) h_(a, b) += weight * u(a) * u(b);
      }
    }
  }

  void assemble(const Scalings& sc, double delta) {
    const int n = p_.num_vars();
    h_.setZero(n, n);
    h_.diagonal().array() += delta;
    std::vector<int> dense_rows;
    std::vector<double> dense_w;
    for (int r = 0; r < k_.l; ++r) {
      const double wt = 1.0 / (sc.w(r) * sc.w(r));
      if (grow_.row(r).nonZeros() > kDenseRow) {
        dense_rows.push_back(r);
        dense_w.push_back(wt);
      } else {
        add_row(r, wt);
      }
    }
    if (!dense_rows.empty()) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, static_cast<long>(dense_rows.size()));
      for (std::size_t c = 0; c < dense_rows.size(); ++c) {
        const double sw = std::sqrt(dense_w[c]);
        for (SpMatRow::InnerIterator it(grow_, dense_rows[c]); it; ++it) b(it.col(), static_cast<long>(c)) = sw * it.value();
      }
      h_.selfadjointView<Eigen::Lower>().rankUpdate(b);
    }
    // W^-2 = eta^-2 (2 vt vt' - J) with vt = J wbar.
    VectorXd u = VectorXd::Zero(n);
    std::vector<int> idx;
    std::vector<char> seen(n, 0);
    for (std::size_t c = 0; c < k_.q.size(); ++c) {
      const int st = k_.start[c], d = k_.q[c];
      const SocScaling& s = sc.soc[c];
      const double ie2 = 1.0 / (s.eta * s.eta);
      add_row(st, -ie2);
      for (int i = 1; i < d; ++i) add_row(st + i, ie2);
      for (int i = 0; i < d; ++i) {
        const double vt = i == 0 ? s.wbar(0) : -s.wbar(i);
        for (SpMatRow::InnerIterator it(grow_, st + i); it; ++it) {
          const int j = static_cast<int>(it.col());
          if (!seen[j]) {
            seen[j] = 1;
            idx.push_back(j);
          }
          u(j) += vt * it.value();
        }
      }
      add_outer(u, idx, 2.0 * ie2);
      for (int j : idx) {
        u(j) = 0.0;
        seen[j] = 0;
      }
      idx.clear();
    }
  }

  static constexpr int kDenseRow = 64;
  const ConeProblem& p_;
  const Cones& k_;
  double delta_;
  const RowSplitMatrix& g_;
  SpMatRow grow_;
  Eigen::MatrixXd ad_;
  Eigen::MatrixXd hinv_at_;
  Eigen::MatrixXd h_;
  Eigen::LLT<Eigen::MatrixXd> hllt_;
  Eigen::LLT<Eigen::MatrixXd> sllt_;
  const Scalings* sc_ = nullptr;
};

// Quasi-definite expanded KKT matrix factored with a sparse LDL'. Cones of
// dimension above kSmallCone use two extra rows so their block stays sparse.
class SparseKkt final : public KktSystem {
 public:
  SparseKkt(const ConeProblem& p, const Cones& k, double delta) : p_(p), k_(k), delta_(delta) {
    const int n = p.num_vars(), np = p.num_equalities();
    zoff_ = n + np;
    int extra = zoff_ + k.m;
    for (int d : k.q) {
      ext_.push_back(d > kSmallCone ? extra : -1);
      if (d > kSmallCone) extra += 2;
    }
    dim_ = extra;
    for (int i = 0; i < n; ++i) fixed_.emplace_back(i, i, delta);
    for (int j = 0; j < p.A.outerSize(); ++j) {
      for (SpMat::InnerIterator it(p.A, j); it; ++it) fixed_.emplace_back(n + it.row(), j, it.value());
    }
    for (int r = 0; r < np; ++r) fixed_.emplace_back(n + r, n + r, -delta);
    for (int j = 0; j < p.G.outerSize(); ++j) {
      for (SpMat::InnerIterator it(p.G, j); it; ++it) fixed_.emplace_back(zoff_ + it.row(), j, it.value());
    }
  }

  bool factor(const Scalings& sc) override {
    std::vector<Eigen::Triplet<double>> t = fixed_;
    for (int i = 0; i < k_.l; ++i) t.emplace_back(zoff_ + i, zoff_ + i, -sc.w(i) * sc.w(i) - delta_);
    for (std::size_t c = 0; c < k_.q.size(); ++c) {
      const int st = zoff_ + k_.start[c], d = k_.q[c];
      const SocScaling& s = sc.soc[c];
      const double e2 = s.eta * s.eta;
      if (ext_[c] < 0) {
        const Eigen::MatrixXd w2 = ipm_detail::soc_w2_dense(s);
        for (int j = 0; j < d; ++j) {
          for (int i = j; i < d; ++i) t.emplace_back(st + i, st + j, -w2(i, j) - (i == j ? delta_ : 0.0));
        }
        continue;
      }
      const auto e = ipm_detail::expansion_of(s);
      const int ev = ext_[c], eu = ev + 1;
      t.emplace_back(st, st, -e2 * e.d1 - delta_);
      for (int i = 1; i < d; ++i) {
        t.emplace_back(st + i, st + i, -e2 - delta_);
        t.emplace_back(ev, st + i, -e2 * e.v1 * s.wbar(i));
        t.emplace_back(eu, st + i, -e2 * e.u1 * s.wbar(i));
      }
      t.emplace_back(eu, st, -e2 * e.u0);
      t.emplace_back(ev, ev, -e2);
      t.emplace_back(eu, eu, e2);
    }
    SpMat kkt(dim_, dim_);
    kkt.setFromTriplets(t.begin(), t.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(kkt);
      analyzed_ = true;
    }
    ldlt_.factorize(kkt);
    return ldlt_.info() == Eigen::Success;
  }

  VectorXd solve(const VectorXd& rhs) override {
    VectorXd ext = VectorXd::Zero(dim_);
    ext.head(rhs.size()) = rhs;
    const VectorXd sol = ldlt_.solve(ext);
    return sol.head(rhs.size());
  }

 private:
  static constexpr int kSmallCone = 6;
  const ConeProblem& p_;
  const Cones& k_;
  double delta_;
  int zoff_ = 0;
  int dim_ = 0;
  std::vector<int> ext_;
  std::vector<Eigen::Triplet<double>> fixed_;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

// ---------------------------------------------------------------------------

struct Iterate {
  VectorXd x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

struct Stats {
  double pres = 0, dres = 0, gap = 0, relgap = 0, pcost = 0, dcost = 0;
  double pinfres = 0, dinfres = 0, mu = 0;
  double merit() const {
    return std::max({pres, dres, std::min(std::abs(gap), std::abs(relgap))});
  }
};

class Hsd {
 public:
  Hsd(const ConeProblem& p, const IpmSettings& st) : p_(p), st_(st), k_(make_cones(p)) {
    At_ = p.A.transpose();
    g_ = RowSplitMatrix(p.G);
    const int n = p.num_vars();
    bool dense = n <= st.dense_threshold;
    if (st.strategy == KktStrategy::dense) dense = true;
    if (st.strategy == KktStrategy::sparse) dense = false;
    if (dense) {
      kkt_ = std::make_unique<DenseKkt>(p_, k_, st.static_reg, g_);
    } else {
      kkt_ = std::make_unique<SparseKkt>(p_, k_, st.static_reg);
    }
  }

  ConeSolution run();

 private:
  VectorXd kmul(const VectorXd& u) const {
    const int n = p_.num_vars(), np = p_.num_equalities(), m = k_.m;
    const VectorXd x = u.head(n), y = u.segment(n, np), z = u.tail(m);
    VectorXd out(n + np + m);
    out << At_ * y + g_.tmul(z), p_.A * x, g_.mul(x) - apply_w(k_, sc_, z, 2);
    return out;
  }

  VectorXd ksolve(const VectorXd& rhs) {
    VectorXd sol = kkt_->solve(rhs);
    const double bnorm = 1.0 + rhs.lpNorm<Eigen::Infinity>();
    VectorXd best = sol;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= st_.refinement_steps; ++it) {
      const VectorXd err = rhs - kmul(sol);
      const double e = err.lpNorm<Eigen::Infinity>();
      if (e < prev) best = sol;
      // stop once a step no longer halves the residual
      if (!(e < 0.5 * prev) || e < 1e-13 * bnorm || it == st_.refinement_steps) break;
      prev = e;
      sol += kkt_->solve(err);
    }
    return best;
  }

  Stats stats(const Iterate& v) const;
  ConeSolution finish(const Iterate& v, ConeStatus status, std::string msg, int iters) const;

  const ConeProblem& p_;
  const IpmSettings& st_;
  Cones k_;
  SpMat At_;
  RowSplitMatrix g_;
  Scalings sc_;
  std::unique_ptr<KktSystem> kkt_;
};

Stats Hsd::stats(const Iterate& v) const {
  const VectorXd hrx = -(At_ * v.y) - g_.tmul(v.z);
  const VectorXd hry = p_.A * v.x;
  const VectorXd hrz = v.s + g_.mul(v.x);
  const VectorXd rx = hrx - v.tau * p_.c;
  const VectorXd ry = hry - v.tau * p_.b;
  const VectorXd rz = hrz - v.tau * p_.h;
  const double cx = p_.c.dot(v.x), by = p_.b.dot(v.y), hz = p_.h.dot(v.z);
  const double nx = v.x.norm(), ny = v.y.norm(), nz = v.z.norm(), ns = v.s.norm();
  const double resx0 = std::max(1.0, p_.c.norm());
  const double resy0 = std::max(1.0, p_.b.norm());
  const double resz0 = std::max(1.0, p_.h.norm());
  const double inf = std::numeric_limits<double>::infinity();

  Stats s;
  const double sz = v.s.dot(v.z);
  s.mu = (sz + v.kappa * v.tau) / (k_.degree() + 1);
  s.gap = sz / (v.tau * v.tau);
  s.pcost = cx / v.tau;
  s.dcost = -(hz + by) / v.tau;
  if (s.pcost < 0.0) {
    s.relgap = s.gap / -s.pcost;
  } else if (s.dcost > 0.0) {
    s.relgap = s.gap / s.dcost;
  } else {
    s.relgap = inf;
  }
  const double nry = p_.num_equalities() > 0 ? ry.norm() / std::max(resy0 + nx, 1.0) : 0.0;
  const double nrz = k_.m > 0 ? rz.norm() / std::max(resz0 + nx + ns, 1.0) : 0.0;
  s.pres = std::max(nry, nrz) / v.tau;
  s.dres = rx.norm() / std::max(resx0 + ny + nz, 1.0) / v.tau;
  s.pinfres = (hz + by) / std::max(ny + nz, 1.0) < -st_.reltol ? hrx.norm() / std::max(ny + nz, 1.0) : inf;
  s.dinfres = cx / std::max(nx, 1.0) < -st_.reltol
                  ? std::max(hry.norm() / std::max(nx, 1.0), hrz.norm() / std::max(nx + ns, 1.0))
                  : inf;
  return s;
}

ConeSolution Hsd::finish(const Iterate& v, ConeStatus status, std::string msg, int iters) const {
  ConeSolution out;
  out.status = status;
  out.message = std::move(msg);
  out.iterations = iters;
  if (status == ConeStatus::optimal) {
    out.x = v.x / v.tau;
    out.y = v.y / v.tau;
    out.z = v.z / v.tau;
    out.s = v.s / v.tau;
    out.primal_objective = p_.c.dot(out.x);
    out.dual_objective = -(p_.b.dot(out.y) + p_.h.dot(out.z));
  } else {
    // Unscaled certificate directions.
    out.x = v.x;
    out.y = v.y;
    out.z = v.z;
    out.s = v.s;
  }
  return out;
}

ConeSolution Hsd::run() {
  const int n = p_.num_vars(), np = p_.num_equalities(), m = k_.m;
  Iterate v;

  sc_ = identity_scalings(k_);
  if (!kkt_->factor(sc_)) return finish(v, ConeStatus::numerical_trouble, "initial factorization failed", 0);
  VectorXd rhs(n + np + m);
  rhs << VectorXd::Zero(n), p_.b, p_.h;
  VectorXd sol = ksolve(rhs);
  v.x = sol.head(n);
  v.s = -sol.tail(m);
  bring_to_cone(k_, v.s);
  rhs << -p_.c, VectorXd::Zero(np), VectorXd::Zero(m);
  sol = ksolve(rhs);
  v.y = sol.segment(n, np);
  v.z = sol.tail(m);
  bring_to_cone(k_, v.z);

  Iterate best = v;
  Stats best_stats;
  bool have_best = false;
  std::string stop_reason = "iteration limit reached";
  int iter = 0;

  for (;; ++iter) {
    const Stats s = stats(v);
    if (s.pres < st_.feastol && s.dres < st_.feastol && (s.gap < st_.abstol || s.relgap < st_.reltol)) {
      return finish(v, ConeStatus::optimal, "optimal", iter);
    }
    if (s.dinfres < st_.feastol && v.tau < v.kappa) {
      return finish(v, ConeStatus::unbounded, "dual infeasible", iter);
    }
    if ((s.pinfres < st_.feastol && v.tau < v.kappa) ||
        (v.tau < st_.feastol && v.kappa < st_.feastol && s.pinfres < st_.feastol)) {
      return finish(v, ConeStatus::infeasible, "primal infeasible", iter);
    }
    if (have_best && s.pres > 500.0 * std::max(best_stats.pres, st_.feastol)) {
      stop_reason = "primal residual blew up";
      break;
    }
    if (!have_best || (s.gap >= 0.0 && s.merit() <= best_stats.merit())) {
      best = v;
      best_stats = s;
      have_best = true;
    }
    if (iter >= st_.max_iterations) break;

    if (!update_scalings(k_, v.s, v.z, sc_)) {
      stop_reason = "iterate left the cone";
      break;
    }
    if (!kkt_->factor(sc_)) {
      stop_reason = "KKT factorization failed";
      break;
    }

    const VectorXd rx = -(At_ * v.y) - g_.tmul(v.z) - v.tau * p_.c;
    const VectorXd ry = p_.A * v.x - v.tau * p_.b;
    const VectorXd rz = v.s + g_.mul(v.x) - v.tau * p_.h;
    const double rt = v.kappa + p_.c.dot(v.x) + p_.b.dot(v.y) + p_.h.dot(v.z);
    const VectorXd& lam = sc_.lambda;

    rhs << -p_.c, p_.b, p_.h;
    const VectorXd u1 = ksolve(rhs);
    auto dot3 = [&](const VectorXd& u) {
      return p_.c.dot(u.head(n)) + p_.b.dot(u.segment(n, np)) + p_.h.dot(u.tail(m));
    };
    const double denom = v.kappa / v.tau - dot3(u1);

    // affine direction
    rhs << rx, -ry, v.s - rz;
    VectorXd u2 = ksolve(rhs);
    const double dtau_a = (rt - v.kappa + dot3(u2)) / denom;
    const VectorXd da = u2 + dtau_a * u1;
    const VectorXd wdz_a = apply_w(k_, sc_, da.tail(m), 1);
    const VectorXd wids_a = -lam - wdz_a;
    const double dkap_a = -v.kappa - v.kappa / v.tau * dtau_a;

    auto step_to_boundary = [&](const VectorXd& ds, const VectorXd& dz, double dtau, double dkap) {
      double a = std::min(max_step_cone(k_, lam, ds), max_step_cone(k_, lam, dz));
      if (dtau < 0.0) a = std::min(a, -v.tau / dtau);
      if (dkap < 0.0) a = std::min(a, -v.kappa / dkap);
      return a;
    };
    const double alpha_a = std::min(1.0, step_to_boundary(wids_a, wdz_a, dtau_a, dkap_a));
    const double sigma = std::clamp(std::pow(1.0 - alpha_a, 3), 1e-4, 1.0);
    const double mu = s.mu;

    // combined direction
    VectorXd ds1 = jordan_product(k_, lam, lam) + jordan_product(k_, wids_a, wdz_a);
    add_identity(k_, ds1, -sigma * mu);
    const VectorXd lds = jordan_divide(k_, lam, ds1);
    rhs << (1.0 - sigma) * rx, -(1.0 - sigma) * ry, -(1.0 - sigma) * rz + apply_w(k_, sc_, lds, 1);
    u2 = ksolve(rhs);
    const double bkap = v.kappa * v.tau + dkap_a * dtau_a - sigma * mu;
    const double dtau = ((1.0 - sigma) * rt - bkap / v.tau + dot3(u2)) / denom;
    const VectorXd d = u2 + dtau * u1;
    const VectorXd wdz = apply_w(k_, sc_, d.tail(m), 1);
    const VectorXd wids = -lds - wdz;
    const double dkap = -(bkap + v.kappa * dtau) / v.tau;

    const double alpha = std::min(st_.step_fraction * step_to_boundary(wids, wdz, dtau, dkap), 0.999);
    if (!(alpha > 1e-10) || !d.allFinite() || !std::isfinite(dtau)) {
      stop_reason = "step length collapsed";
      break;
    }
    v.x += alpha * d.head(n);
    v.y += alpha * d.segment(n, np);
    v.z += alpha * d.tail(m);
    v.s += alpha * apply_w(k_, sc_, wids, 1);
    v.tau += alpha * dtau;
    v.kappa += alpha * dkap;
  }

  const Stats& b = best_stats;
  if (have_best) {
    if (b.pres < st_.feastol_inacc && b.dres < st_.feastol_inacc &&
        (b.gap < st_.abstol_inacc || b.relgap < st_.reltol_inacc)) {
      return finish(best, ConeStatus::optimal, "close to optimal (" + stop_reason + ")", iter);
    }
    if (b.pinfres < st_.feastol_inacc && best.tau < best.kappa) {
      return finish(best, ConeStatus::infeasible, "close to primal infeasible (" + stop_reason + ")", iter);
    }
    if (b.dinfres < st_.feastol_inacc && best.tau < best.kappa) {
      return finish(best, ConeStatus::unbounded, "close to dual infeasible (" + stop_reason + ")", iter);
    }
  }
  return finish(best, ConeStatus::numerical_trouble, stop_reason, iter);
}

// ---------------------------------------------------------------------------
// Presolve: variables fixed by singleton equality rows are substituted out.

struct Presolved {
  ConeProblem reduced;
  std::vector<int> free_vars;
  std::vector<int> kept_rows;
  VectorXd fixed_values;
  double constant = 0.0;
  bool infeasible = false;
  bool trivial = true;  // nothing was removed
};

Presolved presolve(const ConeProblem& p) {
  const int n = p.num_vars(), np = p.num_equalities();
  Presolved out;
  out.fixed_values = VectorXd::Zero(n);
  std::vector<char> fixed(n, 0), done(np, 0);
  const SpMatRow ar(p.A);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < np; ++r) {
      if (done[r]) continue;
      double rhs = p.b(r);
      int cnt = 0, j = -1;
      double a = 0.0;
      for (SpMatRow::InnerIterator it(ar, r); it; ++it) {
        if (fixed[it.col()]) {
          rhs -= it.value() * out.fixed_values(it.col());
        } else if (it.value() != 0.0) {
          ++cnt;
          j = static_cast<int>(it.col());
          a = it.value();
        }
      }
      if (cnt == 0) {
        if (std::abs(rhs) > 1e-9 * std::max(1.0, std::abs(p.b(r)))) out.infeasible = true;
        done[r] = 1;
      } else if (cnt == 1) {
        fixed[j] = 1;
        out.fixed_values(j) = rhs / a;
        done[r] = 1;
        changed = true;
      }
    }
  }
  std::vector<int> newcol(n, -1);
  for (int j = 0; j < n; ++j) {
    if (!fixed[j]) {
      newcol[j] = static_cast<int>(out.free_vars.size());
      out.free_vars.push_back(j);
    }
  }
  std::vector<int> newrow(np, -1);
  for (int r = 0; r < np; ++r) {
    if (!done[r]) {
      newrow[r] = static_cast<int>(out.kept_rows.size());
      out.kept_rows.push_back(r);
    }
  }
  out.trivial = static_cast<int>(out.free_vars.size()) == n && static_cast<int>(out.kept_rows.size()) == np;
  if (out.trivial || out.infeasible) return out;

  const int nf = static_cast<int>(out.free_vars.size());
  const int nr = static_cast<int>(out.kept_rows.size());
  ConeProblem& q = out.reduced;
  q.c.resize(nf);
  for (int k = 0; k < nf; ++k) q.c(k) = p.c(out.free_vars[k]);
  for (int j = 0; j < n; ++j) {
    if (fixed[j]) out.constant += p.c(j) * out.fixed_values(j);
  }
  std::vector<Eigen::Triplet<double>> ta, tg;
  VectorXd b(nr);
  for (int k = 0; k < nr; ++k) b(k) = p.b(out.kept_rows[k]);
  VectorXd h = p.h;
  for (int j = 0; j < n; ++j) {
    for (SpMat::InnerIterator it(p.A, j); it; ++it) {
      const int r = newrow[it.row()];
      if (r < 0) continue;
      if (fixed[j]) {
        b(r) -= it.value() * out.fixed_values(j);
      } else {
        ta.emplace_back(r, newcol[j], it.value());
      }
    }
    for (SpMat::InnerIterator it(p.G, j); it; ++it) {
      if (fixed[j]) {
        h(it.row()) -= it.value() * out.fixed_values(j);
      } else {
        tg.emplace_back(it.row(), newcol[j], it.value());
      }
    }
  }
  q.A.resize(nr, nf);
  q.A.setFromTriplets(ta.begin(), ta.end());
  q.b = b;
  q.G.resize(p.G.rows(), nf);
  q.G.setFromTriplets(tg.begin(), tg.end());
  q.h = h;
  q.orthant_dim = p.orthant_dim;
  q.soc_dims = p.soc_dims;
  return out;
}

// No free variables left: the cone rows are constants.
ConeSolution solve_constant(const ConeProblem& q, const IpmSettings& st) {
  const Cones k = make_cones(q);
  double viol = 0.0;
  for (int i = 0; i < k.l; ++i) viol = std::max(viol, -q.h(i));
  for (std::size_t c = 0; c < k.q.size(); ++c) {
    const int s0 = k.start[c], d = k.q[c];
    viol = std::max(viol, q.h.segment(s0 + 1, d - 1).norm() - q.h(s0));
  }
  ConeSolution out;
  out.x = VectorXd::Zero(0);
  out.y = VectorXd::Zero(q.num_equalities());
  out.s = q.h;
  out.z = VectorXd::Zero(q.num_cone_rows());
  const bool rows_ok = q.b.size() == 0 || q.b.lpNorm<Eigen::Infinity>() <= st.feastol;
  if (rows_ok && viol <= st.feastol * std::max(1.0, q.h.norm())) {
    out.status = ConeStatus::optimal;
    out.message = "optimal (all variables fixed)";
  } else {
    out.status = ConeStatus::infeasible;
    out.message = "primal infeasible (all variables fixed)";
  }
  return out;
}

void check_finite(const ConeProblem& p) {
  auto bad_sparse = [](const SpMat& m) {
    for (int j = 0; j < m.outerSize(); ++j) {
      for (SpMat::InnerIterator it(m, j); it; ++it) {
        if (!std::isfinite(it.value())) return true;
      }
    }
    return false;
  };
  if (!p.c.allFinite() || !p.b.allFinite() || !p.h.allFinite() || bad_sparse(p.A) || bad_sparse(p.G)) {
    throw DomainError("cone problem contains non-finite data");
  }
}

}  // namespace

ConeSolution InteriorPointBackend::solve(const ConeProblem& problem) const {
  problem.validate();
  check_finite(problem);
  if (!settings_.presolve) return Hsd(problem, settings_).run();

  const Presolved pre = presolve(problem);
  if (pre.infeasible) {
    ConeSolution out;
    out.status = ConeStatus::infeasible;
    out.message = "primal infeasible (inconsistent fixed variables)";
    return out;
  }
  if (pre.trivial) return Hsd(problem, settings_).run();

  const ConeSolution red = pre.free_vars.empty() ? solve_constant(pre.reduced, settings_)
                                                 : Hsd(pre.reduced, settings_).run();
  ConeSolution out = red;
  if (red.status != ConeStatus::optimal) return out;
  out.x = pre.fixed_values;
  for (std::size_t k = 0; k < pre.free_vars.size(); ++k) out.x(pre.free_vars[k]) = red.x(static_cast<long>(k));
  out.y = VectorXd::Zero(problem.num_equalities());
  for (std::size_t k = 0; k < pre.kept_rows.size(); ++k) out.y(pre.kept_rows[k]) = red.y(static_cast<long>(k));
  out.primal_objective = problem.c.dot(out.x);
  out.dual_objective = red.dual_objective + pre.constant;
  return out;
}

}  // namespace sdpcut
