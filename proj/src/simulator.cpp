#include "dse/simulator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace dse {

namespace {

constexpr double kDivergenceBound = 1e9;

struct Affine {
  double c0 = 0.0;
  Eigen::Vector3d cv = Eigen::Vector3d::Zero();
};

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

void Scenario::validate() const {
  if (!(r_load > 0.0) || !(l_load > 0.0)) {
    throw_error(ErrorKind::Config, "load R and L must be positive");
  }
  if (source_r < 0.0 || !(source_l > 0.0)) {
    throw_error(ErrorKind::Config, "source impedance must have R >= 0 and L > 0");
  }
  if (v_source_rms < 0.0) throw_error(ErrorKind::Config, "source voltage must be >= 0");
  if (!(f0 > 0.0)) throw_error(ErrorKind::Config, "f0 must be positive");
  if (!(dt_sim > 0.0) || dt_sim > dt_out) {
    throw_error(ErrorKind::Config, "need 0 < dt_sim <= dt_out");
  }
  if (!(t_fault < analysis_start && analysis_start < t_end)) {
    throw_error(ErrorKind::Config, "need t_fault < analysis_start < t_end");
  }
  if (hypothesis.faulted() && !(r_fault > 0.0)) {
    throw_error(ErrorKind::Config, "fault resistance must be positive");
  }
  if (i_limit && !(*i_limit > 0.0)) throw_error(ErrorKind::Config, "i_limit must be positive");
  if (!(hysteresis_release > 0.0) || hysteresis_release > 1.0) {
    throw_error(ErrorKind::Config, "hysteresis_release must be in (0, 1]");
  }
  if (!hypothesis_valid(topology, hypothesis)) {
    throw_error(ErrorKind::Config, std::string("hypothesis ") + hypothesis.label() +
                                       " is not valid for topology " +
                                       topology_name(topology));
  }
}

double Scenario::omega() const { return 2.0 * M_PI * f0; }

double Scenario::rated_peak_current() const {
  const double z = std::hypot(r_load, omega() * l_load);
  const double branch_peak = std::sqrt(2.0) * v_source_rms / z;
  // delta branches see line-line voltage and the line current is sqrt(3)
  // times the branch current
  if (topology == LoadTopology::DeltaRL) return 3.0 * branch_peak;
  return branch_peak;
}

double Scenario::effective_i_limit() const {
  return i_limit ? *i_limit : 2.0 * rated_peak_current();
}

const std::vector<double>& GroundTruth::by_name(const std::string& name) const {
  for (std::size_t i = 0; i < series_names.size(); ++i) {
    if (series_names[i] == name) return series[i];
  }
  throw_error(ErrorKind::Shape, "no ground-truth series named " + name);
}

CircuitODE::CircuitODE(const Scenario& s) : scenario_(s) {
  s.validate();
  switch (s.topology) {
    case LoadTopology::SinglePhaseRL:
      load_branch_count_ = 1;
      branch_from_ = {0, -1, -1};
      branch_to_ = {-1, -1, -1};
      break;
    case LoadTopology::GroundedWyeRL:
      load_branch_count_ = 3;
      branch_from_ = {0, 1, 2};
      branch_to_ = {-1, -1, -1};
      break;
    case LoadTopology::DeltaRL:
      load_branch_count_ = 3;
      branch_from_ = {0, 1, 2};
      branch_to_ = {1, 2, 0};
      break;
  }
  i_lim_ = s.effective_i_limit();
  slew_ = 4.0 * i_lim_ * s.omega();
}

CircuitODE build_circuit(const Scenario& s) { return CircuitODE(s); }

double CircuitODE::source_reference(int phase, double t) const {
  static const double kPhaseShift[3] = {0.0, -2.0 * M_PI / 3.0, 2.0 * M_PI / 3.0};
  return std::sqrt(2.0) * scenario_.v_source_rms *
         std::sin(scenario_.omega() * t + kPhaseShift[phase]);
}

double CircuitODE::current_reference(int phase, double t,
                                      const LimiterState& limiter) const {
  return i_lim_ * std::sin(scenario_.omega() * t + limiter.phi[phase]);
}

namespace {

/// Everything the per-stage evaluation needs, assembled in one place so the
/// nodal solve and the state derivative stay consistent by construction.
struct StageEval {
  const CircuitODE& ode;
  const Scenario& s;
  double t;
  const double* y;  // [i_s(3), i_load(nb), shadow(3)]
  const LimiterState& limiter;
  bool fault_active;

  const double* i_src() const { return y; }
  const double* i_load() const { return y + 3; }
  const double* shadow() const { return y + 3 + ode.load_branch_count(); }

  double tracking_deriv(int p, double i_lim, double slew, double tau) const {
    const double omega = s.omega();
    const double arg = omega * t + limiter.phi[p];
    const double iref = i_lim * std::sin(arg);
    const double diref = i_lim * omega * std::cos(arg);
    return clamp((iref - i_src()[p]) / tau + diref, -slew, slew);
  }
};

}  // namespace

std::array<double, 3> CircuitODE::bus_voltage(double t, const double* y,
                                              const LimiterState& limiter,
                                              bool fault_active) const {
  const Scenario& s = scenario_;
  StageEval ev{*this, s, t, y, limiter, fault_active};
  const double ls = s.source_l;
  const double rs = s.source_r;
  const double l = s.l_load;
  const double r = s.r_load;

  // source branch current derivative as an affine function of bus voltage
  auto src_aff = [&](int p) {
    Affine a;
    if (limiter.limited[p]) {
      a.c0 = ev.tracking_deriv(p, i_lim_, slew_, tau_track_);
    } else {
      a.c0 = (source_reference(p, t) - rs * ev.i_src()[p]) / ls;
      a.cv[p] = -1.0 / ls;
    }
    return a;
  };
  // load-injection derivative at a node (sum of incident branch derivatives)
  auto inj_aff = [&](int node) {
    Affine a;
    for (int b = 0; b < load_branch_count_; ++b) {
      const int from = branch_from_[b];
      const int to = branch_to_[b];
      double sign = 0.0;
      if (from == node) sign = 1.0;
      else if (to == node) sign = -1.0;
      else continue;
      a.c0 += sign * (-r * ev.i_load()[b]) / l;
      a.cv[from] += sign / l;
      if (to >= 0) a.cv[to] -= sign / l;
    }
    return a;
  };
  // load injection itself (algebraic, for direct KCL rows)
  auto inj_val = [&](int node) {
    double acc = 0.0;
    for (int b = 0; b < load_branch_count_; ++b) {
      if (branch_from_[b] == node) acc += ev.i_load()[b];
      else if (branch_to_[b] == node) acc -= ev.i_load()[b];
    }
    return acc;
  };

  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs3 = Eigen::Vector3d::Zero();
  auto diff_row = [&](int row, std::initializer_list<int> nodes) {
    Affine f;
    for (int p : nodes) {
      const Affine sa = src_aff(p);
      const Affine ia = inj_aff(p);
      f.c0 += sa.c0 - ia.c0;
      f.cv += sa.cv - ia.cv;
    }
    m.row(row) = f.cv.transpose();
    rhs3[row] = -f.c0;
  };

  const FaultHypothesis& hyp = s.hypothesis;
  if (!fault_active || !hyp.faulted()) {
    for (int p = 0; p < 3; ++p) diff_row(p, {p});
  } else if (hyp.kind == FaultHypothesis::Kind::LineGround) {
    const int p = hyp.phase;
    const double gf = 1.0 / s.r_fault;
    m(p, p) = gf;
    rhs3[p] = ev.i_src()[p] - inj_val(p);
    for (int q = 0; q < 3; ++q) {
      if (q != p) diff_row(q, {q});
    }
  } else {
    // line-line fault: one direct KCL row carries the fault loop, the pair
    // cutset uses the differentiated sum, the healthy phase its own row
    const int p = hyp.pair;
    const int q = (hyp.pair + 1) % 3;
    const int r3 = (hyp.pair + 2) % 3;
    const double gf = 1.0 / s.r_fault;
    m(p, p) = gf;
    m(p, q) = -gf;
    rhs3[p] = ev.i_src()[p] - inj_val(p);
    diff_row(q, {p, q});
    diff_row(r3, {r3});
  }

  const Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
  if (!lu.isInvertible()) {
    throw_error(ErrorKind::Numerical, "bus voltage nodal solve is singular");
  }
  const Eigen::Vector3d v = lu.solve(rhs3);
  return {v[0], v[1], v[2]};
}

void CircuitODE::rhs(double t, const double* y, const LimiterState& limiter,
                     bool fault_active, double* dy) const {
  const Scenario& s = scenario_;
  StageEval ev{*this, s, t, y, limiter, fault_active};
  const auto v = bus_voltage(t, y, limiter, fault_active);

  for (int p = 0; p < 3; ++p) {
    if (limiter.limited[p]) {
      dy[p] = ev.tracking_deriv(p, i_lim_, slew_, tau_track_);
    } else {
      dy[p] = (source_reference(p, t) - s.source_r * y[p] - v[p]) / s.source_l;
    }
  }
  for (int b = 0; b < load_branch_count_; ++b) {
    const double vb =
        v[branch_from_[b]] - (branch_to_[b] >= 0 ? v[branch_to_[b]] : 0.0);
    dy[3 + b] = (vb - s.r_load * y[3 + b]) / s.l_load;
  }
  const double* sh = ev.shadow();
  for (int p = 0; p < 3; ++p) {
    dy[3 + load_branch_count_ + p] =
        (source_reference(p, t) - s.source_r * sh[p] - v[p]) / s.source_l;
  }
}

SimulationOutput simulate(const Scenario& s) {
  const CircuitODE ode(s);
  const int adim = ode.augmented_dim();
  const int nb = ode.load_branch_count();
  std::vector<double> y(static_cast<std::size_t>(adim), 0.0);
  std::vector<double> k1(adim), k2(adim), k3(adim), k4(adim), tmp(adim);

  const double h = s.dt_sim;
  const auto steps_total = static_cast<long long>(std::llround(s.t_end / h));
  const auto k_out = static_cast<long long>(std::llround(s.dt_out / h));
  if (k_out < 1 || std::abs(k_out * h - s.dt_out) > 1e-9 * s.dt_out) {
    throw_error(ErrorKind::Config, "dt_out must be an integer multiple of dt_sim");
  }
  const auto fault_step = static_cast<long long>(std::llround(s.t_fault / h));
  const double i_lim = s.effective_i_limit();
  const double release_level = s.hysteresis_release * i_lim;
  const double half_cycle = 0.5 / s.f0;

  LimiterState limiter;

  SimulationOutput out;
  WaveformSet& ws = out.waveform;
  ws.dt = k_out * h;
  ws.t0 = 0.0;
  GroundTruth& gt = out.truth;
  gt.dt = ws.dt;
  gt.g_true = 1.0 / s.r_load;
  gt.gamma_true = 1.0 / s.l_load;
  if (s.hypothesis.faulted()) gt.gf_true = 1.0 / s.r_fault;

  const char* phase_names[3] = {"a", "b", "c"};
  const char* pair_names[3] = {"ab", "bc", "ca"};
  std::array<int, 3> bfrom{}, bto{};
  for (int b = 0; b < nb; ++b) {
    bfrom[b] = ode.branch_from_[b];
    bto[b] = ode.branch_to_[b];
    const std::string suffix = (s.topology == LoadTopology::DeltaRL)
                                   ? pair_names[b]
                                   : phase_names[bfrom[b]];
    gt.series_names.push_back("vr_" + suffix);
    gt.series_names.push_back("vl_" + suffix);
  }
  if (s.hypothesis.faulted()) gt.series_names.push_back("vf");
  gt.series.resize(gt.series_names.size());

  auto record_sample = [&](double t, bool fault_active) {
    const auto v = ode.bus_voltage(t, y.data(), limiter, fault_active);
    ws.va.push_back(v[0]);
    ws.vb.push_back(v[1]);
    ws.vc.push_back(v[2]);
    ws.ia.push_back(y[0]);
    ws.ib.push_back(y[1]);
    ws.ic.push_back(y[2]);
    std::size_t col = 0;
    for (int b = 0; b < nb; ++b) {
      const double vbr = v[bfrom[b]] - (bto[b] >= 0 ? v[bto[b]] : 0.0);
      const double vr = s.r_load * y[3 + b];
      gt.series[col++].push_back(vr);
      gt.series[col++].push_back(vbr - vr);
    }
    if (s.hypothesis.faulted()) {
      double vf = 0.0;
      if (s.hypothesis.kind == FaultHypothesis::Kind::LineGround) {
        vf = v[s.hypothesis.phase];
      } else {
        vf = v[s.hypothesis.pair] - v[(s.hypothesis.pair + 1) % 3];
      }
      gt.series[col++].push_back(vf);
    }
    out.limited.push_back(limiter.limited);
  };

  record_sample(0.0, false);

  bool k1_ready = false;  // end-of-step derivative reused when modes persist
  for (long long step = 0; step < steps_total; ++step) {
    const double t = static_cast<double>(step) * h;
    const bool fault_active = s.hypothesis.faulted() && step >= fault_step;

    if (!k1_ready) ode.rhs(t, y.data(), limiter, fault_active, k1.data());
    for (int i = 0; i < adim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    ode.rhs(t + 0.5 * h, tmp.data(), limiter, fault_active, k2.data());
    for (int i = 0; i < adim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    ode.rhs(t + 0.5 * h, tmp.data(), limiter, fault_active, k3.data());
    for (int i = 0; i < adim; ++i) tmp[i] = y[i] + h * k3[i];
    ode.rhs(t + h, tmp.data(), limiter, fault_active, k4.data());
    for (int i = 0; i < adim; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    for (int i = 0; i < adim; ++i) {
      if (!(std::abs(y[i]) < kDivergenceBound)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "simulation diverged at step %lld (t = %.6g s)", step + 1,
                      (static_cast<double>(step) + 1.0) * h);
        throw_error(ErrorKind::Numerical, msg);
      }
    }

    // hysteresis mode changes are applied at step boundaries. A phase
    // enters limiting when its current would cross i_limit within the next
    // step (the pre-switch slope both triggers the comparator and locks the
    // reference phase), so the state itself never jumps and bus KCL stays
    // an identity across the transition.
    double* shadow = y.data() + 3 + nb;
    const double t_next = static_cast<double>(step + 1) * h;
    const bool fault_next = s.hypothesis.faulted() && (step + 1) >= fault_step;
    ode.rhs(t_next, y.data(), limiter, fault_next, k1.data());
    k1_ready = true;
    bool mode_changed = false;
    for (int p = 0; p < 3; ++p) {
      if (!limiter.limited[p]) {
        const double predicted = y[p] + h * k1[p];
        if (std::abs(y[p]) > i_lim || std::abs(predicted) > i_lim) {
          const double omega = s.omega();
          limiter.limited[p] = true;
          limiter.phi[p] = std::atan2(omega * y[p], k1[p]) - omega * t_next;
          limiter.release_timer[p] = 0.0;
          mode_changed = true;
        }
      } else {
        if (std::abs(shadow[p]) < release_level) {
          limiter.release_timer[p] += h;
        } else {
          limiter.release_timer[p] = 0.0;
        }
        if (limiter.release_timer[p] >= half_cycle) {
          limiter.limited[p] = false;
          shadow[p] = y[p];
          mode_changed = true;
        }
      }
    }
    if (mode_changed || (fault_next && !fault_active)) k1_ready = false;

    if ((step + 1) % k_out == 0) {
      const bool active_next = s.hypothesis.faulted() && (step + 1) >= fault_step;
      record_sample(static_cast<double>(step + 1) * h, active_next);
    }
  }

  ws.validate();
  return out;
}

void write_ground_truth_csv(const GroundTruth& gt, std::ostream& out) {
  out << "time";
  for (const auto& name : gt.series_names) out << ',' << name;
  out << '\n';
  const std::size_t n = gt.series.empty() ? 0 : gt.series.front().size();
  char buf[64];
  for (std::size_t k = 0; k < n; ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g", gt.t0 + static_cast<double>(k) * gt.dt);
    out << buf;
    for (const auto& s : gt.series) {
      std::snprintf(buf, sizeof(buf), ",%.12g", s[k]);
      out << buf;
    }
    out << '\n';
  }
}

void write_ground_truth_csv_file(const GroundTruth& gt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::Format, "cannot open output file: " + path);
  write_ground_truth_csv(gt, out);
}

}  // namespace dse
