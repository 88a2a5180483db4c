#include "sdpcut/oracle.hpp"

#include <cmath>

#include "sdpcut/errors.hpp"

namespace sdpcut {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("oracle tolerance must be positive");
}

}  // namespace

OracleReport eig_cut_oracle(const SymMat& x, double eps, int max_cuts) {
  check_eps(eps);
  if (max_cuts < 1) throw DomainError("max_cuts must be at least 1");
  const SpectralDecomp d = eigh(x);
  OracleReport r;
  r.violation = std::max(0.0, -d.min());
  r.feasible = r.violation <= eps;
  for (int k = 0; k < d.values.size() && static_cast<int>(r.cuts.size()) < max_cuts; ++k) {
    if (!(d.values(k) < -eps)) break;
    LowRankMatrix g;
    g.scale = -1.0;
    g.terms.push_back({1.0, d.vectors.col(k).normalized()});
    LinearCut cut;
    cut.matrix = std::move(g);
    cut.family = CutFamily::eig;
    r.cuts.push_back(std::move(cut));
  }
  return r;
}

SymMat nuclear_maximizer(const SymMat& x) {
  const SpectralDecomp d = eigh(x);
  const Eigen::VectorXd signs = d.values.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
  return SymMat::from_dense(d.vectors * signs.asDiagonal() * d.vectors.transpose(), 1e-8);
}

OracleReport nuclear_cut_oracle(const SymMat& x, double eps, NuclearMode mode, double theta) {
  check_eps(eps);
  const int n = x.order();
  const SpectralDecomp d = eigh(x);
  double nuc = 0.0, neg = 0.0;
  int nneg = 0;
  for (int k = 0; k < n; ++k) {
    nuc += std::abs(d.values(k));
    if (d.values(k) < 0.0) {
      neg += -d.values(k);
      ++nneg;
    }
  }
  OracleReport r;
  LinearCut cut;
  cut.family = CutFamily::nuclear;
  if (mode == NuclearMode::membership) {
    // ||X||_* - tr X counts the negative part twice; Y* - I = -2 sum_{lambda<0} q q'.
    r.violation = 2.0 * neg;
    if (4 * nneg <= n) {
      LowRankMatrix g;
      g.scale = -2.0;
      for (int k = 0; k < nneg; ++k) g.terms.push_back({1.0, d.vectors.col(k).normalized()});
      cut.matrix = std::move(g);
    } else {
      const Eigen::MatrixXd q = d.vectors.leftCols(nneg);
      cut.matrix = SymMat::from_dense(-2.0 * q * q.transpose(), 1e-8);
    }
  } else {
    r.violation = nuc - theta;
    cut.theta_coef = -1.0;
    const Eigen::VectorXd signs = d.values.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
    cut.matrix = SymMat::from_dense(d.vectors * signs.asDiagonal() * d.vectors.transpose(), 1e-8);
  }
  r.feasible = r.violation <= eps;
  if (!r.feasible) r.cuts.push_back(std::move(cut));
  return r;
}

double lipschitz_constant(CutFamily family, int n) {
  if (n < 1) throw DomainError("order must be positive");
  return family == CutFamily::eig ? 1.0 : 2.0 * std::sqrt(static_cast<double>(n));
}

}  // namespace sdpcut
