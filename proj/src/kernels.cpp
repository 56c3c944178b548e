#include "dse/kernels.hpp"

#include <omp.h>

#include <vector>

namespace dse {

namespace {

constexpr std::size_t kParallelRowThreshold = 8192;

/// Derivative entries (column, value) of one row of H.
struct RowDerivs {
  int cols[12];
  double vals[12];
  int count = 0;
};

inline void row_derivatives(const HypothesisModel& model, const StateVector& x,
                            const HypothesisModel::RowRef& row,
                            const std::vector<Term>& terms, RowDerivs& d) {
  d.count = 0;
  for (int t = 0; t < row.term_count; ++t) {
    const Term& term = terms[row.term_begin + t];
    const int traj_col =
        term.series >= 0 ? model.state_index(term.series, row.pos + term.offset) : -1;
    const double traj_val = traj_col >= 0 ? x.values[traj_col] : 1.0;
    if (term.param >= 0) {
      d.cols[d.count] = term.param;
      d.vals[d.count] = term.coeff * traj_val;
      ++d.count;
    }
    if (traj_col >= 0) {
      const double param_val = term.param >= 0 ? x.values[term.param] : 1.0;
      d.cols[d.count] = traj_col;
      d.vals[d.count] = term.coeff * param_val;
      ++d.count;
    }
  }
}

}  // namespace

bool use_parallel(ExecMode mode, std::size_t rows) {
  switch (mode) {
    case ExecMode::Serial: return false;
    case ExecMode::Parallel: return true;
    case ExecMode::Auto:
      return rows >= kParallelRowThreshold && omp_in_parallel() == 0;
  }
  return false;
}

void eval_h(const HypothesisModel& model, const StateVector& x,
            Eigen::VectorXd& out, ExecMode mode) {
  const auto& rows = model.rows();
  out.resize(static_cast<Eigen::Index>(rows.size()));
  const auto count = static_cast<std::int64_t>(rows.size());
  if (use_parallel(mode, rows.size())) {
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < count; ++r) {
      out[r] = model.eval_row(x, rows[static_cast<std::size_t>(r)]);
    }
  } else {
    for (std::int64_t r = 0; r < count; ++r) {
      out[r] = model.eval_row(x, rows[static_cast<std::size_t>(r)]);
    }
  }
}

void assemble_normal_system(const HypothesisModel& model, const StateVector& x,
                            const Eigen::VectorXd& eps, NormalSystem& out,
                            ExecMode mode) {
  const auto& rows = model.rows();
  const auto& terms = model.flat_terms();
  const auto row_count = static_cast<std::int64_t>(rows.size());
  if (eps.size() != row_count) {
    throw_error(ErrorKind::Shape, "residual length does not match model output");
  }
  const int dim = model.state_dim();

  // fixed per-row slots in the triplet stream keep the assembly order (and
  // therefore the floating-point result) independent of the schedule
  std::vector<std::size_t> a_off(rows.size() + 1, 0);
  std::vector<std::size_t> g_off(rows.size() + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t d = 0;
    const auto& row = rows[r];
    for (int t = 0; t < row.term_count; ++t) {
      const Term& term = terms[row.term_begin + t];
      d += (term.param >= 0 ? 1u : 0u) + (term.series >= 0 ? 1u : 0u);
    }
    a_off[r + 1] = a_off[r] + d * d;
    g_off[r + 1] = g_off[r] + d;
  }

  std::vector<Eigen::Triplet<double>> trips(a_off.back() +
                                            static_cast<std::size_t>(dim));
  std::vector<std::pair<int, double>> gpairs(g_off.back());

  const bool parallel = use_parallel(mode, rows.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t r = 0; r < row_count; ++r) {
    RowDerivs d;
    row_derivatives(model, x, rows[static_cast<std::size_t>(r)], terms, d);
    std::size_t at = a_off[static_cast<std::size_t>(r)];
    for (int i = 0; i < d.count; ++i) {
      for (int j = 0; j < d.count; ++j) {
        trips[at++] = {d.cols[i], d.cols[j], d.vals[i] * d.vals[j]};
      }
    }
    std::size_t gt = g_off[static_cast<std::size_t>(r)];
    const double e = eps[r];
    for (int i = 0; i < d.count; ++i) {
      gpairs[gt++] = {d.cols[i], d.vals[i] * e};
    }
  }

  // keep every diagonal slot in the pattern so damping can be added in place
  for (int j = 0; j < dim; ++j) {
    trips[a_off.back() + static_cast<std::size_t>(j)] = {j, j, 0.0};
  }

  out.hth.resize(dim, dim);
  out.hth.setFromTriplets(trips.begin(), trips.end());
  out.htr = Eigen::VectorXd::Zero(dim);
  for (const auto& [col, val] : gpairs) out.htr[col] += val;
}

}  // namespace dse
