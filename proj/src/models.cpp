#include "dse/models.hpp"

#include <algorithm>
#include <cmath>

namespace dse {

namespace {

constexpr const char* kPhaseNames[3] = {"a", "b", "c"};
constexpr const char* kPairNames[3] = {"ab", "bc", "ca"};

ChannelId volt_channel(int phase) {
  return static_cast<ChannelId>(static_cast<int>(ChannelId::Va) + phase);
}
ChannelId curr_channel(int phase) {
  return static_cast<ChannelId>(static_cast<int>(ChannelId::Ia) + phase);
}
ChannelId line_line_channel(int pair) {
  return static_cast<ChannelId>(static_cast<int>(ChannelId::Vab) + pair);
}

/// Pair index (0=AB,1=BC,2=CA) for an ordered phase pair, with the sign of
/// the stored orientation (+1 when (p,q) matches, -1 when reversed).
int pair_of(int p, int q, double* sign) {
  for (int i = 0; i < 3; ++i) {
    if (p == i && q == (i + 1) % 3) { *sign = 1.0; return i; }
    if (q == i && p == (i + 1) % 3) { *sign = -1.0; return i; }
  }
  throw_error(ErrorKind::Config, "invalid phase pair");
}

class ModelBuilder {
 public:
  ModelBuilder(LoadTopology t, FaultHypothesis h, int n, double dt, int params) {
    m_.topology = t;
    m_.hypothesis = h;
    m_.n = n;
    m_.dt = dt;
    m_.param_count = params;
  }

  int series(const std::string& name, ChannelId init_source, double init_factor) {
    m_.series_names.push_back(name);
    m_.series_init.push_back({init_source, init_factor});
    return static_cast<int>(m_.series_names.size()) - 1;
  }

  void measurement(const std::string& name, ChannelId data, std::vector<Term> terms) {
    m_.channels.push_back({OutputChannel::Kind::Measurement, data, name, std::move(terms)});
  }

  /// Simpson-window branch constraint
  ///   G*(vr(k) - vr(k-2)) - (2*dt*Gamma/6)*(vl(k) + 4*vl(k-1) + vl(k-2)) = 0
  void constraint(const std::string& name, int vr, int vl) {
    const double c = 2.0 * m_.dt / 6.0;
    m_.channels.push_back({OutputChannel::Kind::Constraint, ChannelId::Va, name,
                           {{1.0, kParamG, vr, 0},
                            {-1.0, kParamG, vr, -2},
                            {-c, kParamGamma, vl, 0},
                            {-4.0 * c, kParamGamma, vl, -1},
                            {-c, kParamGamma, vl, -2}}});
  }

  HypothesisModel take() {
    m_.finalize();
    return std::move(m_);
  }

 private:
  HypothesisModel m_;
};

HypothesisModel build_single_phase(FaultHypothesis h, int n, double dt) {
  const bool faulted = h.faulted();
  ModelBuilder b(LoadTopology::SinglePhaseRL, h, n, dt, faulted ? 3 : 2);
  const int vr = b.series("vr_a", ChannelId::Va, 0.9);
  const int vl = b.series("vl_a", ChannelId::Va, 0.1);

  b.measurement("v_a", ChannelId::Va, {{1.0, -1, vr, 0}, {1.0, -1, vl, 0}});
  if (faulted) {
    // fault conductance in parallel with the RL branch
    b.measurement("i_a", ChannelId::Ia,
                  {{1.0, kParamGf, vr, 0}, {1.0, kParamGf, vl, 0}, {1.0, kParamG, vr, 0}});
  } else {
    b.measurement("i_a", ChannelId::Ia, {{1.0, kParamG, vr, 0}});
  }
  b.constraint("z_a", vr, vl);
  return b.take();
}

HypothesisModel build_wye_unfaulted(int n, double dt) {
  ModelBuilder b(LoadTopology::GroundedWyeRL, FaultHypothesis::unfaulted(), n, dt, 2);
  int vr[3], vl[3];
  for (int p = 0; p < 3; ++p) {
    vr[p] = b.series(std::string("vr_") + kPhaseNames[p], volt_channel(p), 0.9);
  }
  for (int p = 0; p < 3; ++p) {
    vl[p] = b.series(std::string("vl_") + kPhaseNames[p], volt_channel(p), 0.1);
  }
  for (int p = 0; p < 3; ++p) {
    b.measurement(std::string("v_") + kPhaseNames[p], volt_channel(p),
                  {{1.0, -1, vr[p], 0}, {1.0, -1, vl[p], 0}});
  }
  for (int p = 0; p < 3; ++p) {
    b.measurement(std::string("i_") + kPhaseNames[p], curr_channel(p),
                  {{1.0, kParamG, vr[p], 0}});
  }
  for (int p = 0; p < 3; ++p) {
    b.constraint(std::string("z_") + kPhaseNames[p], vr[p], vl[p]);
  }
  return b.take();
}

HypothesisModel build_wye_line_ground(int fault_phase, int n, double dt) {
  ModelBuilder b(LoadTopology::GroundedWyeRL, FaultHypothesis::line_ground(fault_phase),
                 n, dt, 3);
  int vr[3], vl[3];
  for (int p = 0; p < 3; ++p) {
    vr[p] = b.series(std::string("vr_") + kPhaseNames[p], volt_channel(p), 0.9);
  }
  for (int p = 0; p < 3; ++p) {
    vl[p] = b.series(std::string("vl_") + kPhaseNames[p], volt_channel(p), 0.1);
  }
  for (int p = 0; p < 3; ++p) {
    b.measurement(std::string("v_") + kPhaseNames[p], volt_channel(p),
                  {{1.0, -1, vr[p], 0}, {1.0, -1, vl[p], 0}});
  }
  for (int p = 0; p < 3; ++p) {
    if (p == fault_phase) {
      // bus current feeds both the fault path (Gf * v_p) and the branch
      b.measurement(std::string("i_") + kPhaseNames[p], curr_channel(p),
                    {{1.0, kParamGf, vr[p], 0},
                     {1.0, kParamGf, vl[p], 0},
                     {1.0, kParamG, vr[p], 0}});
    } else {
      b.measurement(std::string("i_") + kPhaseNames[p], curr_channel(p),
                    {{1.0, kParamG, vr[p], 0}});
    }
  }
  for (int p = 0; p < 3; ++p) {
    b.constraint(std::string("z_") + kPhaseNames[p], vr[p], vl[p]);
  }
  return b.take();
}

/// Simplified wye line-line model: the faulted pair is represented by the
/// fault voltage alone, only the healthy phase keeps its RL branch.
HypothesisModel build_wye_line_line(int pair, int n, double dt) {
  const int p = pair;            // first phase of the pair
  const int q = (pair + 1) % 3;  // second phase
  const int r = (pair + 2) % 3;  // healthy phase
  ModelBuilder b(LoadTopology::GroundedWyeRL, FaultHypothesis::line_line(pair), n, dt, 3);
  const int vf = b.series("vf", line_line_channel(pair), 1.0);
  const int vr = b.series(std::string("vr_") + kPhaseNames[r], volt_channel(r), 0.9);
  const int vl = b.series(std::string("vl_") + kPhaseNames[r], volt_channel(r), 0.1);

  b.measurement(std::string("v_") + kPairNames[pair], line_line_channel(pair),
                {{1.0, -1, vf, 0}});
  b.measurement(std::string("v_") + kPhaseNames[r], volt_channel(r),
                {{1.0, -1, vr, 0}, {1.0, -1, vl, 0}});
  b.measurement(std::string("i_") + kPhaseNames[p], curr_channel(p),
                {{1.0, kParamGf, vf, 0}});
  b.measurement(std::string("i_") + kPhaseNames[q], curr_channel(q),
                {{-1.0, kParamGf, vf, 0}});
  b.measurement(std::string("i_") + kPhaseNames[r], curr_channel(r),
                {{1.0, kParamG, vr, 0}});
  b.constraint(std::string("z_") + kPhaseNames[r], vr, vl);
  return b.take();
}

HypothesisModel build_delta_unfaulted(int n, double dt) {
  ModelBuilder b(LoadTopology::DeltaRL, FaultHypothesis::unfaulted(), n, dt, 2);
  int vr[3], vl[3];
  for (int k = 0; k < 3; ++k) {
    vr[k] = b.series(std::string("vr_") + kPairNames[k], line_line_channel(k), 0.9);
  }
  for (int k = 0; k < 3; ++k) {
    vl[k] = b.series(std::string("vl_") + kPairNames[k], line_line_channel(k), 0.1);
  }
  for (int k = 0; k < 3; ++k) {
    b.measurement(std::string("v_") + kPairNames[k], line_line_channel(k),
                  {{1.0, -1, vr[k], 0}, {1.0, -1, vl[k], 0}});
  }
  // node p sees branch (p,p+1) leaving and branch (p-1,p) arriving
  for (int p = 0; p < 3; ++p) {
    const int out = p;
    const int in = (p + 2) % 3;
    b.measurement(std::string("i_") + kPhaseNames[p], curr_channel(p),
                  {{1.0, kParamG, vr[out], 0}, {-1.0, kParamG, vr[in], 0}});
  }
  for (int k = 0; k < 3; ++k) {
    b.constraint(std::string("z_") + kPairNames[k], vr[k], vl[k]);
  }
  return b.take();
}

/// Simplified delta line-line model: the shorted branch is dropped and the
/// faulted pair is carried by the fault voltage.
HypothesisModel build_delta_line_line(int pair, int n, double dt) {
  const int p = pair;
  const int q = (pair + 1) % 3;
  const int r = (pair + 2) % 3;
  double sqr_sign = 1.0, srp_sign = 1.0;
  const int qr = pair_of(q, r, &sqr_sign);  // kept branch between q and r
  const int rp = pair_of(r, p, &srp_sign);  // kept branch between r and p
  ModelBuilder b(LoadTopology::DeltaRL, FaultHypothesis::line_line(pair), n, dt, 3);
  int vr[2], vl[2];
  vr[0] = b.series(std::string("vr_") + kPairNames[qr], line_line_channel(qr), 0.9);
  vr[1] = b.series(std::string("vr_") + kPairNames[rp], line_line_channel(rp), 0.9);
  vl[0] = b.series(std::string("vl_") + kPairNames[qr], line_line_channel(qr), 0.1);
  vl[1] = b.series(std::string("vl_") + kPairNames[rp], line_line_channel(rp), 0.1);
  const int vf = b.series("vf", line_line_channel(pair), 1.0);

  b.measurement(std::string("v_") + kPairNames[pair], line_line_channel(pair),
                {{1.0, -1, vf, 0}});
  b.measurement(std::string("v_") + kPairNames[qr], line_line_channel(qr),
                {{1.0, -1, vr[0], 0}, {1.0, -1, vl[0], 0}});
  b.measurement(std::string("v_") + kPairNames[rp], line_line_channel(rp),
                {{1.0, -1, vr[1], 0}, {1.0, -1, vl[1], 0}});
  // i_p: fault current out, branch (r,p) current in
  b.measurement(std::string("i_") + kPhaseNames[p], curr_channel(p),
                {{1.0, kParamGf, vf, 0}, {-srp_sign, kParamG, vr[1], 0}});
  // i_q: branch (q,r) current out, fault current in
  b.measurement(std::string("i_") + kPhaseNames[q], curr_channel(q),
                {{sqr_sign, kParamG, vr[0], 0}, {-1.0, kParamGf, vf, 0}});
  // i_r: branch (r,p) out, branch (q,r) in
  b.measurement(std::string("i_") + kPhaseNames[r], curr_channel(r),
                {{srp_sign, kParamG, vr[1], 0}, {-sqr_sign, kParamG, vr[0], 0}});
  b.constraint(std::string("z_") + kPairNames[qr], vr[0], vl[0]);
  b.constraint(std::string("z_") + kPairNames[rp], vr[1], vl[1]);
  return b.take();
}

/// Delta line-ground model: all three branches kept, the faulted phase is
/// carried by the fault voltage; the small fault voltage is dropped from the
/// healthy-phase voltage rows and the branch currents at the faulted node.
HypothesisModel build_delta_line_ground(int fault_phase, int n, double dt) {
  const int f = fault_phase;
  const int s = (f + 1) % 3;
  const int t = (f + 2) % 3;
  double sig_fs = 1.0, sig_st = 1.0, sig_tf = 1.0;
  const int fs = pair_of(f, s, &sig_fs);
  const int st = pair_of(s, t, &sig_st);
  const int tf = pair_of(t, f, &sig_tf);
  ModelBuilder b(LoadTopology::DeltaRL, FaultHypothesis::line_ground(fault_phase), n, dt, 3);
  int vr[3], vl[3];  // indexed [fs, st, tf]
  const int order[3] = {fs, st, tf};
  for (int k = 0; k < 3; ++k) {
    vr[k] = b.series(std::string("vr_") + kPairNames[order[k]],
                     line_line_channel(order[k]), 0.9);
  }
  for (int k = 0; k < 3; ++k) {
    vl[k] = b.series(std::string("vl_") + kPairNames[order[k]],
                     line_line_channel(order[k]), 0.1);
  }
  const int vf = b.series("vf", volt_channel(f), 1.0);

  b.measurement(std::string("v_") + kPhaseNames[f], volt_channel(f), {{1.0, -1, vf, 0}});
  // v_s = v_f - v_fs ~ -v_fs, v_t = v_f + v_tf ~ v_tf
  b.measurement(std::string("v_") + kPhaseNames[s], volt_channel(s),
                {{-sig_fs, -1, vr[0], 0}, {-sig_fs, -1, vl[0], 0}});
  b.measurement(std::string("v_") + kPhaseNames[t], volt_channel(t),
                {{sig_tf, -1, vr[2], 0}, {sig_tf, -1, vl[2], 0}});
  b.measurement(std::string("i_") + kPhaseNames[f], curr_channel(f),
                {{1.0, kParamGf, vf, 0}});
  // i_s: branch (s,t) out, branch (f,s) in
  b.measurement(std::string("i_") + kPhaseNames[s], curr_channel(s),
                {{sig_st, kParamG, vr[1], 0}, {-sig_fs, kParamG, vr[0], 0}});
  // i_t: branch (t,f) out, branch (s,t) in
  b.measurement(std::string("i_") + kPhaseNames[t], curr_channel(t),
                {{sig_tf, kParamG, vr[2], 0}, {-sig_st, kParamG, vr[1], 0}});
  for (int k = 0; k < 3; ++k) {
    b.constraint(std::string("z_") + kPairNames[order[k]], vr[k], vl[k]);
  }
  return b.take();
}

}  // namespace

const char* topology_name(LoadTopology t) {
  switch (t) {
    case LoadTopology::SinglePhaseRL: return "1ph";
    case LoadTopology::GroundedWyeRL: return "wye";
    case LoadTopology::DeltaRL: return "delta";
  }
  return "?";
}

int FaultHypothesis::order_index() const {
  switch (kind) {
    case Kind::Unfaulted: return 0;
    case Kind::LineGround: return 1 + phase;
    case Kind::LineLine: return 4 + pair;
  }
  return 7;
}

std::string FaultHypothesis::label() const {
  switch (kind) {
    case Kind::Unfaulted: return "unfaulted";
    case Kind::LineGround: return std::string("lg-") + kPhaseNames[phase];
    case Kind::LineLine: return std::string("ll-") + kPairNames[pair];
  }
  return "?";
}

FaultHypothesis FaultHypothesis::from_label(const std::string& label) {
  if (label == "unfaulted") return unfaulted();
  for (int p = 0; p < 3; ++p) {
    if (label == std::string("lg-") + kPhaseNames[p]) return line_ground(p);
  }
  for (int k = 0; k < 3; ++k) {
    if (label == std::string("ll-") + kPairNames[k]) return line_line(k);
  }
  throw_error(ErrorKind::Config, "unknown fault hypothesis label: " + label);
}

bool FaultHypothesis::operator==(const FaultHypothesis& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::LineGround) return phase == o.phase;
  if (kind == Kind::LineLine) return pair == o.pair;
  return true;
}

std::vector<FaultHypothesis> valid_hypotheses(LoadTopology t) {
  if (t == LoadTopology::SinglePhaseRL) {
    return {FaultHypothesis::unfaulted(), FaultHypothesis::line_ground(0)};
  }
  std::vector<FaultHypothesis> out = {FaultHypothesis::unfaulted()};
  for (int p = 0; p < 3; ++p) out.push_back(FaultHypothesis::line_ground(p));
  for (int k = 0; k < 3; ++k) out.push_back(FaultHypothesis::line_line(k));
  return out;
}

bool hypothesis_valid(LoadTopology t, const FaultHypothesis& h) {
  const auto all = valid_hypotheses(t);
  return std::any_of(all.begin(), all.end(), [&](const FaultHypothesis& v) { return v == h; });
}

int HypothesisModel::series_index(const std::string& name) const {
  for (std::size_t i = 0; i < series_names.size(); ++i) {
    if (series_names[i] == name) return static_cast<int>(i);
  }
  throw_error(ErrorKind::Shape, "unknown series name: " + name);
}

double HypothesisModel::eval_row(const StateVector& x, const RowRef& row) const {
  double acc = 0.0;
  for (int t = 0; t < row.term_count; ++t) {
    const Term& term = flat_terms_[row.term_begin + t];
    double v = term.coeff;
    if (term.param >= 0) v *= x.values[term.param];
    if (term.series >= 0) v *= x.values[state_index(term.series, row.pos + term.offset)];
    acc += v;
  }
  return acc;
}

void HypothesisModel::finalize() {
  row_offsets_.clear();
  rows_.clear();
  flat_terms_.clear();
  int offset = 0;
  for (const OutputChannel& ch : channels) {
    row_offsets_.push_back(offset);
    const int begin = static_cast<int>(flat_terms_.size());
    flat_terms_.insert(flat_terms_.end(), ch.terms.begin(), ch.terms.end());
    const int count = static_cast<int>(ch.terms.size());
    const int first_pos = (ch.kind == OutputChannel::Kind::Measurement) ? 0 : 2;
    for (int pos = first_pos; pos < n; ++pos) {
      rows_.push_back({begin, count, pos});
    }
    offset += channel_rows(ch);
  }
  total_rows_ = offset;
}

double simpson_window_integral(double f0, double f1, double f2, double dt) {
  if (!(dt > 0.0)) throw_error(ErrorKind::Range, "simpson window needs dt > 0");
  return (2.0 * dt / 6.0) * (f2 + 4.0 * f1 + f0);
}

HypothesisModel build_model(LoadTopology topology, FaultHypothesis hypothesis,
                            int n, double dt) {
  if (n < 3) throw_error(ErrorKind::Size, "model needs at least 3 samples");
  if (!(dt > 0.0)) throw_error(ErrorKind::Range, "model needs dt > 0");
  if (!hypothesis_valid(topology, hypothesis)) {
    throw_error(ErrorKind::Config, std::string("hypothesis ") + hypothesis.label() +
                                       " is not valid for topology " +
                                       topology_name(topology));
  }

  HypothesisModel m;
  switch (topology) {
    case LoadTopology::SinglePhaseRL:
      m = build_single_phase(hypothesis, n, dt);
      break;
    case LoadTopology::GroundedWyeRL:
      switch (hypothesis.kind) {
        case FaultHypothesis::Kind::Unfaulted: m = build_wye_unfaulted(n, dt); break;
        case FaultHypothesis::Kind::LineGround:
          m = build_wye_line_ground(hypothesis.phase, n, dt);
          break;
        case FaultHypothesis::Kind::LineLine:
          m = build_wye_line_line(hypothesis.pair, n, dt);
          break;
      }
      break;
    case LoadTopology::DeltaRL:
      switch (hypothesis.kind) {
        case FaultHypothesis::Kind::Unfaulted: m = build_delta_unfaulted(n, dt); break;
        case FaultHypothesis::Kind::LineGround:
          m = build_delta_line_ground(hypothesis.phase, n, dt);
          break;
        case FaultHypothesis::Kind::LineLine:
          m = build_delta_line_line(hypothesis.pair, n, dt);
          break;
      }
      break;
  }

  if (m.output_dim() < m.state_dim()) {
    throw_error(ErrorKind::Size,
                std::string("n too small for estimability of ") + topology_name(topology) +
                    "/" + hypothesis.label());
  }
  return m;
}

Eigen::VectorXd model_h(const HypothesisModel& model, const StateVector& x) {
  if (x.values.size() != model.state_dim()) {
    throw_error(ErrorKind::Shape, "state dimension does not match model");
  }
  const auto& rows = model.rows();
  Eigen::VectorXd out(model.output_dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out[static_cast<Eigen::Index>(r)] = model.eval_row(x, rows[r]);
  }
  return out;
}

Eigen::SparseMatrix<double> model_jacobian(const HypothesisModel& model,
                                           const StateVector& x) {
  if (x.values.size() != model.state_dim()) {
    throw_error(ErrorKind::Shape, "state dimension does not match model");
  }
  std::vector<Eigen::Triplet<double>> trips;
  const auto& rows = model.rows();
  const auto& terms = model.flat_terms();
  trips.reserve(rows.size() * 6);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    for (int t = 0; t < row.term_count; ++t) {
      const Term& term = terms[row.term_begin + t];
      const int traj_col =
          term.series >= 0 ? model.state_index(term.series, row.pos + term.offset) : -1;
      const double traj_val = traj_col >= 0 ? x.values[traj_col] : 1.0;
      const double param_val = term.param >= 0 ? x.values[term.param] : 1.0;
      if (term.param >= 0) {
        trips.emplace_back(static_cast<int>(r), term.param, term.coeff * traj_val);
      }
      if (traj_col >= 0) {
        trips.emplace_back(static_cast<int>(r), traj_col, term.coeff * param_val);
      }
    }
  }
  Eigen::SparseMatrix<double> jac(model.output_dim(), model.state_dim());
  jac.setFromTriplets(trips.begin(), trips.end());
  return jac;
}

StateVector initial_state(const HypothesisModel& model, const WaveformSet& ws) {
  ws.validate();
  if (static_cast<int>(ws.n()) != model.n) {
    throw_error(ErrorKind::Shape, "waveform length does not match model");
  }

  // pooled RMS over the channels the model actually observes
  double v_acc = 0.0, i_acc = 0.0;
  std::size_t v_cnt = 0, i_cnt = 0;
  for (const OutputChannel& ch : model.channels) {
    if (ch.kind != OutputChannel::Kind::Measurement) continue;
    const auto data = ws.channel(ch.data);
    double acc = 0.0;
    for (double v : data) acc += v * v;
    if (ch.data >= ChannelId::Ia && ch.data <= ChannelId::Ic) {
      i_acc += acc;
      i_cnt += data.size();
    } else {
      v_acc += acc;
      v_cnt += data.size();
    }
  }
  const double v_rms = v_cnt ? std::sqrt(v_acc / static_cast<double>(v_cnt)) : 0.0;
  const double i_rms = i_cnt ? std::sqrt(i_acc / static_cast<double>(i_cnt)) : 0.0;
  if (v_rms == 0.0 || i_rms == 0.0) {
    throw_error(ErrorKind::Degenerate, "measured channels are all zero");
  }

  const double g0 = i_rms / v_rms;
  const double omega0 = 2.0 * M_PI * 60.0;

  StateVector x;
  x.param_count = model.param_count;
  x.n = model.n;
  x.values = Eigen::VectorXd::Zero(model.state_dim());
  x.values[kParamG] = g0;
  x.values[kParamGamma] = omega0 * g0;
  if (model.param_count > 2) x.values[kParamGf] = 100.0 * g0;
  for (int s = 0; s < model.series_count(); ++s) {
    const auto& init = model.series_init[s];
    const auto data = ws.channel(init.source);
    for (int k = 0; k < model.n; ++k) {
      x.traj(s, k) = init.factor * data[static_cast<std::size_t>(k)];
    }
  }
  return x;
}

LoadParams physical_params(const StateVector& x) {
  LoadParams p;
  p.r_ohm = 1.0 / x.g();
  p.l_h = 1.0 / x.gamma();
  if (auto gf = x.gf()) p.rf_ohm = 1.0 / *gf;
  return p;
}

Eigen::VectorXd assemble_targets(const HypothesisModel& model, const WaveformSet& ws) {
  ws.validate();
  if (static_cast<int>(ws.n()) != model.n) {
    throw_error(ErrorKind::Shape, "waveform length does not match model");
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(model.output_dim());
  for (std::size_t c = 0; c < model.channels.size(); ++c) {
    const OutputChannel& ch = model.channels[c];
    if (ch.kind != OutputChannel::Kind::Measurement) continue;
    const auto data = ws.channel(ch.data);
    const int offset = model.channel_row_offset(c);
    for (int k = 0; k < model.n; ++k) {
      y[offset + k] = data[static_cast<std::size_t>(k)];
    }
  }
  return y;
}

}  // namespace dse
