#pragma once

#include <Eigen/Sparse>

#include "dse/models.hpp"

namespace dse {

/// Kernel dispatch. Auto picks the OpenMP path for large row counts when not
/// already inside a parallel region (the hypothesis bank parallelizes at the
/// outer level, in which case inner kernels stay serial).
enum class ExecMode { Serial, Parallel, Auto };

bool use_parallel(ExecMode mode, std::size_t rows);

/// h(x) into a preallocated vector of length output_dim.
void eval_h(const HypothesisModel& model, const StateVector& x,
            Eigen::VectorXd& out, ExecMode mode);

/// Gauss-Newton normal system at x: hth = H^T H (full symmetric pattern,
/// diagonal always present), htr = H^T eps.
struct NormalSystem {
  Eigen::SparseMatrix<double> hth;
  Eigen::VectorXd htr;
};

/// Assembles the normal system. The triplet stream is laid out per row at
/// precomputed offsets, so the result is bitwise identical for any thread
/// count or schedule.
void assemble_normal_system(const HypothesisModel& model, const StateVector& x,
                            const Eigen::VectorXd& eps, NormalSystem& out,
                            ExecMode mode);

}  // namespace dse
