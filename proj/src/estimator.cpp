#include "dse/estimator.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dse {

void SolverConfig::validate() const {
  if (max_iterations < 1) throw_error(ErrorKind::Config, "max_iterations must be >= 1");
  if (!(cost_delta_tol > 0.0)) throw_error(ErrorKind::Config, "cost_delta_tol must be > 0");
  if (!(damping_growth > 1.0)) throw_error(ErrorKind::Config, "damping_growth must be > 1");
  if (initial_damping < 0.0) throw_error(ErrorKind::Config, "initial_damping must be >= 0");
  if (!(cost_floor > 0.0)) throw_error(ErrorKind::Config, "cost_floor must be > 0");
}

Eigen::VectorXd residual(const Eigen::VectorXd& y, const Eigen::VectorXd& h_x) {
  if (y.size() != h_x.size()) {
    throw_error(ErrorKind::Shape, "residual operands have unequal lengths");
  }
  return y - h_x;
}

double cost(const Eigen::VectorXd& eps, double floor) {
  return std::log(eps.squaredNorm() + floor);
}

Eigen::VectorXd gauss_newton_step(const Eigen::MatrixXd& H,
                                  const Eigen::VectorXd& eps, double lambda) {
  if (H.rows() != eps.size()) {
    throw_error(ErrorKind::Shape, "Jacobian and residual dimensions disagree");
  }
  Eigen::MatrixXd a = H.transpose() * H;
  a.diagonal().array() += lambda;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw_error(ErrorKind::Numerical, "singular normal equations");
  }
  return lu.solve(H.transpose() * eps);
}

Eigen::VectorXd gauss_newton_step(const Eigen::SparseMatrix<double>& H,
                                  const Eigen::VectorXd& eps, double lambda) {
  if (H.rows() != eps.size()) {
    throw_error(ErrorKind::Shape, "Jacobian and residual dimensions disagree");
  }
  Eigen::SparseMatrix<double> a = Eigen::SparseMatrix<double>(H.transpose()) * H;
  Eigen::SparseMatrix<double> eye(H.cols(), H.cols());
  eye.setIdentity();
  a = a + lambda * eye;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw_error(ErrorKind::Numerical, "singular normal equations");
  }
  Eigen::VectorXd dx = ldlt.solve(H.transpose() * eps);
  if (!dx.allFinite()) throw_error(ErrorKind::Numerical, "singular normal equations");
  return dx;
}

namespace {

double escalate(double lambda, double mean_diag, double growth) {
  if (lambda == 0.0) {
    const double seed = 1e-6 * mean_diag;
    return seed > 0.0 ? seed : 1e-12;
  }
  return lambda * growth;
}

}  // namespace

EstimationResult estimate(const HypothesisModel& model, const WaveformSet& ws,
                          const SolverConfig& cfg) {
  return estimate(model, ws, cfg, initial_state(model, ws));
}

EstimationResult estimate(const HypothesisModel& model, const WaveformSet& ws,
                          const SolverConfig& cfg, const StateVector& x0) {
  cfg.validate();
  ws.validate();
  if (static_cast<int>(ws.n()) != model.n) {
    throw_error(ErrorKind::Shape, "waveform length does not match model");
  }
  if (std::abs(ws.dt - model.dt) > 1e-9 * model.dt) {
    throw_error(ErrorKind::Shape, "waveform sample period does not match model");
  }
  if (x0.values.size() != model.state_dim()) {
    throw_error(ErrorKind::Shape, "initial state does not match model");
  }

  const Eigen::VectorXd y = assemble_targets(model, ws);
  const int dim = model.state_dim();
  const double m_rows = static_cast<double>(model.output_dim());

  StateVector x = x0;
  Eigen::VectorXd h_x;
  eval_h(model, x, h_x, cfg.execution);
  Eigen::VectorXd eps = residual(y, h_x);
  double j_current = cost(eps, cfg.cost_floor);

  EstimationResult result;
  result.cost_trace.reserve(static_cast<std::size_t>(cfg.max_iterations));

  NormalSystem ns;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool pattern_ready = false;
  Eigen::VectorXd scale(dim), g_scaled(dim), dx(dim);
  StateVector x_cand = x;
  Eigen::VectorXd h_cand, eps_cand;
  double lambda = cfg.initial_damping;
  bool converged = false;

  for (int iter = 0; iter < cfg.max_iterations && !converged; ++iter) {
    assemble_normal_system(model, x, eps, ns, cfg.execution);

    // column scaling: unit-RMS columns keep the parameter and trajectory
    // blocks comparably conditioned; the solution is unchanged
    if (cfg.column_scaling) {
      for (int j = 0; j < dim; ++j) {
        const double r = std::sqrt(ns.hth.coeff(j, j) / m_rows);
        scale[j] = r > 0.0 ? r : 1.0;
      }
      for (int k = 0; k < ns.hth.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(ns.hth, k); it; ++it) {
          it.valueRef() /= scale[it.row()] * scale[it.col()];
        }
      }
      g_scaled = ns.htr.cwiseQuotient(scale);
    } else {
      scale.setOnes();
      g_scaled = ns.htr;
    }

    double mean_diag = 0.0;
    for (int j = 0; j < dim; ++j) mean_diag += ns.hth.coeff(j, j);
    mean_diag /= static_cast<double>(dim);

    bool accepted = false;
    double local_lambda = lambda;
    double best_excess = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= 8 && !accepted; ++attempt) {
      Eigen::SparseMatrix<double> a = ns.hth;
      if (local_lambda != 0.0) {
        for (int j = 0; j < dim; ++j) a.coeffRef(j, j) += local_lambda;
      }
      if (!pattern_ready) {
        ldlt.analyzePattern(a);
        pattern_ready = true;
      }
      ldlt.factorize(a);
      bool solved = ldlt.info() == Eigen::Success;
      if (solved) {
        dx = ldlt.solve(g_scaled);
        solved = dx.allFinite();
      }
      if (!solved) {
        local_lambda = escalate(local_lambda, mean_diag, cfg.damping_growth);
        continue;
      }

      x_cand.values = x.values + dx.cwiseQuotient(scale);
      x_cand.param_count = x.param_count;
      x_cand.n = x.n;
      eval_h(model, x_cand, h_cand, cfg.execution);
      eps_cand = y - h_cand;
      const double j_cand = cost(eps_cand, cfg.cost_floor);
      if (j_cand <= j_current) {
        const double delta = j_current - j_cand;
        x = x_cand;
        eps.swap(eps_cand);
        j_current = j_cand;
        result.cost_trace.push_back(j_current);
        lambda = cfg.initial_damping;
        accepted = true;
        if (delta < cfg.cost_delta_tol) converged = true;
      } else {
        best_excess = std::min(best_excess, j_cand - j_current);
        local_lambda = escalate(local_lambda, mean_diag, cfg.damping_growth);
      }
    }
    if (!accepted) {
      // no damping level gave a non-increasing J; if the best rejected
      // candidate moved J by less than the tolerance this is a converged
      // flat spot, otherwise an honest stall
      converged = best_excess < cfg.cost_delta_tol;
      break;
    }
  }

  result.x_hat = x;
  result.params = physical_params(x);
  result.cost = j_current;
  result.iterations = static_cast<int>(result.cost_trace.size());
  result.converged = converged;
  result.residual_norm = eps.norm();
  return result;
}

}  // namespace dse
