#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "dse/waveform.hpp"

namespace dse {

enum class LoadTopology { SinglePhaseRL, GroundedWyeRL, DeltaRL };

const char* topology_name(LoadTopology t);

/// Fault configuration of one hypothesis in the bank.
struct FaultHypothesis {
  enum class Kind { Unfaulted, LineGround, LineLine };

  Kind kind = Kind::Unfaulted;
  int phase = 0;  ///< LineGround: 0=A, 1=B, 2=C
  int pair = 0;   ///< LineLine: 0=AB, 1=BC, 2=CA

  static FaultHypothesis unfaulted() { return {}; }
  static FaultHypothesis line_ground(int phase) {
    return {Kind::LineGround, phase, 0};
  }
  static FaultHypothesis line_line(int pair) { return {Kind::LineLine, 0, pair}; }

  bool faulted() const { return kind != Kind::Unfaulted; }

  /// Canonical tie-break position: unfaulted < lg-a..c < ll-ab..ca.
  int order_index() const;

  /// "unfaulted", "lg-a", ..., "ll-ca".
  std::string label() const;
  static FaultHypothesis from_label(const std::string& label);

  bool operator==(const FaultHypothesis& o) const;
};

/// Hypothesis bank membership for a topology, in tie-break order.
std::vector<FaultHypothesis> valid_hypotheses(LoadTopology t);
bool hypothesis_valid(LoadTopology t, const FaultHypothesis& h);

/// Parameter slots of the state vector.
inline constexpr int kParamG = 0;      ///< load conductance [S]
inline constexpr int kParamGamma = 1;  ///< inverse inductance [1/H]
inline constexpr int kParamGf = 2;     ///< fault conductance [S]

/// Packed unknowns of one hypothesis: scalar parameters followed by the
/// internal voltage trajectories, one length-n block per series.
struct StateVector {
  Eigen::VectorXd values;
  int param_count = 2;
  int n = 0;

  double g() const { return values[kParamG]; }
  double gamma() const { return values[kParamGamma]; }
  std::optional<double> gf() const {
    if (param_count < 3) return std::nullopt;
    return values[kParamGf];
  }
  double traj(int series, int k) const {
    return values[param_count + series * n + k];
  }
  double& traj(int series, int k) {
    return values[param_count + series * n + k];
  }
};

struct LoadParams {
  double r_ohm = 0.0;
  double l_h = 0.0;
  std::optional<double> rf_ohm;
};

/// One product term of an output row:
///   coeff * (param < 0 ? 1 : x[param]) * (series < 0 ? 1 : traj(series, pos+offset))
struct Term {
  double coeff = 1.0;
  int param = -1;
  int series = -1;
  int offset = 0;
};

/// A block of output rows, one row per window position. Measurement blocks
/// cover positions 0..n-1 and bind to a data channel; constraint blocks
/// cover positions 2..n-1 and have an identically-zero target.
struct OutputChannel {
  enum class Kind { Measurement, Constraint };
  Kind kind = Kind::Measurement;
  ChannelId data = ChannelId::Va;
  std::string name;
  std::vector<Term> terms;
};

/// Discrete state-output map h(x) and its analytic Jacobian for one
/// (topology, fault hypothesis) pair at a fixed sample count and period.
/// Immutable after build_model; safe to evaluate concurrently.
class HypothesisModel {
 public:
  LoadTopology topology = LoadTopology::GroundedWyeRL;
  FaultHypothesis hypothesis;
  int n = 0;
  double dt = 0.0;
  int param_count = 2;
  std::vector<std::string> series_names;
  std::vector<OutputChannel> channels;

  /// Initialization source per series: scaled copy of a measured channel.
  struct SeriesInit {
    ChannelId source = ChannelId::Va;
    double factor = 1.0;
  };
  std::vector<SeriesInit> series_init;

  int series_count() const { return static_cast<int>(series_names.size()); }
  int state_dim() const { return param_count + series_count() * n; }
  int output_dim() const { return total_rows_; }
  int state_index(int series, int k) const { return param_count + series * n + k; }

  int channel_rows(const OutputChannel& ch) const {
    return ch.kind == OutputChannel::Kind::Measurement ? n : n - 2;
  }
  int channel_row_offset(std::size_t channel_idx) const {
    return row_offsets_[channel_idx];
  }
  int series_index(const std::string& name) const;

  /// Flattened per-row view used by the evaluation kernels.
  struct RowRef {
    std::int32_t term_begin = 0;
    std::int32_t term_count = 0;
    std::int32_t pos = 0;  ///< window position within the channel
  };
  const std::vector<RowRef>& rows() const { return rows_; }
  const std::vector<Term>& flat_terms() const { return flat_terms_; }

  /// Expected value of a row given a state; kernels use the same formula.
  double eval_row(const StateVector& x, const RowRef& row) const;

  void finalize();  ///< builds row tables; called by build_model

 private:
  std::vector<int> row_offsets_;
  std::vector<RowRef> rows_;
  std::vector<Term> flat_terms_;
  int total_rows_ = 0;
};

/// Three-point quadrature over [t-2*dt, t]: (2*dt/6)*(f2 + 4*f1 + f0).
/// Exact through cubic integrands.
double simpson_window_integral(double f0, double f1, double f2, double dt);

/// Builds the model for one bank member. Throws Config for an invalid
/// pairing and Size when n is below the estimable minimum for the layout.
HypothesisModel build_model(LoadTopology topology, FaultHypothesis hypothesis,
                            int n, double dt);

/// h(x); length output_dim.
Eigen::VectorXd model_h(const HypothesisModel& model, const StateVector& x);

/// Analytic Jacobian dh/dx (output_dim x state_dim), derived term-by-term
/// from the implemented h.
Eigen::SparseMatrix<double> model_jacobian(const HypothesisModel& model,
                                           const StateVector& x);

/// Deterministic starting point from channel RMS ratios and scaled copies
/// of the measured terminal voltages.
StateVector initial_state(const HypothesisModel& model, const WaveformSet& ws);

/// G, Gamma, Gf -> R, L, Rf. Degenerate values map to IEEE infinities and
/// are reported as found.
LoadParams physical_params(const StateVector& x);

/// Measurement targets for the estimator: channel data for measurement
/// blocks, zeros for constraint blocks.
Eigen::VectorXd assemble_targets(const HypothesisModel& model, const WaveformSet& ws);

}  // namespace dse
