#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dse/models.hpp"
#include "dse/waveform.hpp"

namespace dse {

/// Simulation input: topology, true load/fault parameters, source and
/// timing configuration. Units are SI throughout.
struct Scenario {
  LoadTopology topology = LoadTopology::GroundedWyeRL;
  double r_load = 7.373;    ///< per-branch load resistance [ohm]
  double l_load = 9.779e-3; ///< per-branch load inductance [H]
  FaultHypothesis hypothesis;
  double r_fault = 0.015;   ///< fault resistance [ohm], used when faulted
  double v_source_rms = 120.0;  ///< line-neutral source voltage [V rms]
  double f0 = 60.0;             ///< supply frequency [Hz]
  double source_r = 0.05;       ///< series source resistance [ohm]
  double source_l = 1e-4;       ///< series source inductance [H]
  std::optional<double> i_limit;  ///< peak per-phase limit [A]; default 2x rated
  double hysteresis_release = 0.9;  ///< fraction of i_limit to re-arm voltage mode
  double t_fault = 0.25;
  double t_end = 0.5;
  double dt_sim = 1e-6;
  double dt_out = 1e-4;
  double analysis_start = 0.3;

  void validate() const;
  double omega() const;
  /// Rated load peak current at nominal voltage (line current for delta).
  double rated_peak_current() const;
  double effective_i_limit() const;
};

/// True internal branch voltages recorded alongside the waveform. Series
/// names match the hypothesis-model series (vr_a/vl_a..., vr_ab/..., vf).
struct GroundTruth {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<std::string> series_names;
  std::vector<std::vector<double>> series;
  double g_true = 0.0;
  double gamma_true = 0.0;
  std::optional<double> gf_true;

  const std::vector<double>& by_name(const std::string& name) const;
};

struct SimulationOutput {
  WaveformSet waveform;
  GroundTruth truth;
  /// Per output sample: which phases were in current-limiting mode.
  std::vector<std::array<bool, 3>> limited;
};

/// Per-phase hysteresis limiter state. In limited mode the source tracks a
/// fixed sinusoidal reference of amplitude i_limit whose phase is locked at
/// entry from the branch current's instantaneous value and slope,
/// atan2(omega*i, di/dt), which reproduces the phase of the developing
/// fault current for every phase of the fault loop.
struct LimiterState {
  std::array<bool, 3> limited{false, false, false};
  std::array<double, 3> phi{0.0, 0.0, 0.0};  ///< reference phase offset [rad]
  std::array<double, 3> release_timer{0.0, 0.0, 0.0};
};

/// Reduced analytic circuit of the two-bus microgrid: per-phase Thevenin
/// source with hysteresis current limiting, RL load branches, resistive
/// fault element inserted at t >= t_fault. Bus voltages are algebraic.
class CircuitODE {
 public:
  explicit CircuitODE(const Scenario& s);

  /// Continuous states: 3 source branch currents plus the load branch
  /// currents (3 for wye/delta, 1 for single-phase). The fault branch is
  /// resistive and adds none.
  int state_dim() const { return 3 + load_branch_count_; }
  int load_branch_count() const { return load_branch_count_; }
  int augmented_dim() const { return state_dim() + 3; }  ///< + shadow monitors

  /// Bus voltages from the nodal solve (direct KCL at fault-connected
  /// nodes, differentiated KCL elsewhere).
  std::array<double, 3> bus_voltage(double t, const double* y,
                                    const LimiterState& limiter,
                                    bool fault_active) const;

  void rhs(double t, const double* y, const LimiterState& limiter,
           bool fault_active, double* dy) const;

  double source_reference(int phase, double t) const;
  double current_reference(int phase, double t, const LimiterState& limiter) const;

  const Scenario& scenario() const { return scenario_; }

 private:
  friend SimulationOutput simulate(const Scenario&);

  Scenario scenario_;
  int load_branch_count_ = 3;
  // load branch endpoints; -1 is ground
  std::array<int, 3> branch_from_{};
  std::array<int, 3> branch_to_{};
  double i_lim_ = 0.0;
  double slew_ = 0.0;        ///< current-mode tracking slew bound [A/s]
  double tau_track_ = 2e-5;  ///< current-mode tracking time constant [s]
};

CircuitODE build_circuit(const Scenario& s);

/// Fixed-step RK4 at dt_sim with mode changes applied at step boundaries;
/// output decimated to dt_out. Deterministic.
SimulationOutput simulate(const Scenario& s);

void write_ground_truth_csv(const GroundTruth& gt, std::ostream& out);
void write_ground_truth_csv_file(const GroundTruth& gt, const std::string& path);

}  // namespace dse
