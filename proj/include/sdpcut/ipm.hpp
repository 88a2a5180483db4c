#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sdpcut/model.hpp"

namespace sdpcut {

enum class KktStrategy { automatic, dense, sparse };

struct IpmSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  // Looser thresholds accepted when progress stops ("close to optimal").
  double feastol_inacc = 1e-4;
  double abstol_inacc = 5e-5;
  double reltol_inacc = 5e-5;
  int max_iterations = 100;
  int refinement_steps = 8;
  double static_reg = 7e-8;
  double step_fraction = 0.99;
  KktStrategy strategy = KktStrategy::automatic;
  /// automatic picks the dense normal equations up to this many free variables.
  int dense_threshold = 800;
  /// Eliminate variables fixed by singleton equality rows before solving.
  bool presolve = true;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling for
/// linear and second-order cone programs, Mehrotra predictor-corrector steps.
class InteriorPointBackend final : public SolverBackend {
 public:
  InteriorPointBackend() = default;
  explicit InteriorPointBackend(IpmSettings settings) : settings_(settings) {}

  ConeSolution solve(const ConeProblem& problem) const override;
  double feasibility_tolerance() const override { return settings_.feastol; }
  std::string name() const override { return "hsd-ipm"; }
  const IpmSettings& settings() const { return settings_; }

 private:
  IpmSettings settings_;
};

namespace ipm_detail {

/// NT scaling of one second-order cone: W = eta * Wbar(wbar), wbar' J wbar = 1.
struct SocScaling {
  double eta = 1.0;
  Eigen::VectorXd wbar;
};

std::optional<SocScaling> nt_scaling_soc(const Eigen::VectorXd& s, const Eigen::VectorXd& z);
Eigen::VectorXd soc_apply_w(const SocScaling& sc, const Eigen::VectorXd& v);
Eigen::VectorXd soc_apply_winv(const SocScaling& sc, const Eigen::VectorXd& v);
Eigen::MatrixXd soc_w2_dense(const SocScaling& sc);
/// W^2 recovered from the sparse two-extra-row expansion used by the sparse KKT path.
Eigen::MatrixXd soc_w2_from_expansion(const SocScaling& sc);
/// Largest alpha with u + alpha v in the cone (u interior); infinity if unbounded.
double soc_max_step(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace ipm_detail

}  // namespace sdpcut
