#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "dse/kernels.hpp"
#include "dse/models.hpp"
#include "dse/waveform.hpp"

namespace dse {

/// Stopping rule and safeguard knobs for the Gauss-Newton iteration.
struct SolverConfig {
  int max_iterations = 50;
  double cost_delta_tol = 1e-6;   ///< threshold on |J_i - J_{i-1}|
  double initial_damping = 0.0;   ///< lambda; 0 is plain Gauss-Newton
  double damping_growth = 10.0;
  double cost_floor = 1e-30;      ///< residual-power floor inside the log
  bool column_scaling = true;     ///< normalize columns to unit RMS internally
  ExecMode execution = ExecMode::Auto;

  void validate() const;
};

struct EstimationResult {
  StateVector x_hat;
  LoadParams params;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;  ///< accepted J per iteration
  double residual_norm = 0.0;
};

/// eps = y - h(x).
Eigen::VectorXd residual(const Eigen::VectorXd& y, const Eigen::VectorXd& h_x);

/// J = log(eps' eps + floor), natural logarithm.
double cost(const Eigen::VectorXd& eps, double floor = 1e-30);

/// Solves (H'H + lambda I) dx = H' eps via a symmetric factorization;
/// lambda = 0 reproduces the plain Gauss-Newton update. Throws Numerical on
/// a singular system so the caller can escalate lambda.
Eigen::VectorXd gauss_newton_step(const Eigen::MatrixXd& H,
                                  const Eigen::VectorXd& eps, double lambda);
Eigen::VectorXd gauss_newton_step(const Eigen::SparseMatrix<double>& H,
                                  const Eigen::VectorXd& eps, double lambda);

/// Full iteration for one hypothesis: assembles targets from the waveform,
/// starts from initial_state, accepts steps that do not increase J and
/// escalates damping otherwise (at most 8 escalations per iteration).
EstimationResult estimate(const HypothesisModel& model, const WaveformSet& ws,
                          const SolverConfig& cfg);

/// Same but from an explicit starting point.
EstimationResult estimate(const HypothesisModel& model, const WaveformSet& ws,
                          const SolverConfig& cfg, const StateVector& x0);

}  // namespace dse
