#include "dse/scenarios.hpp"

#include <cmath>

namespace dse {

double peak_aligned_t_fault(const FaultHypothesis& h, double f0, double t_nominal) {
  if (!h.faulted()) return t_nominal;
  const double omega = 2.0 * M_PI * f0;
  static const double kShift[3] = {0.0, -2.0 * M_PI / 3.0, 2.0 * M_PI / 3.0};
  // e_p peaks at omega*t + shift = pi/2; e_p - e_q peaks at omega*t + shift + pi/6 = pi/2
  const double target = (h.kind == FaultHypothesis::Kind::LineGround)
                            ? M_PI / 2.0 - kShift[h.phase]
                            : M_PI / 3.0 - kShift[h.pair];
  double frac = std::fmod(target, 2.0 * M_PI);
  if (frac < 0.0) frac += 2.0 * M_PI;
  return t_nominal + frac / omega;
}

Scenario reference_scenario(LoadTopology topology, const FaultHypothesis& h) {
  Scenario s;
  s.topology = topology;
  s.hypothesis = h;
  s.r_load = 7.373;
  s.l_load = 9.779e-3;
  if (h.kind == FaultHypothesis::Kind::LineLine) {
    s.r_fault = 0.010;
  } else if (h.kind == FaultHypothesis::Kind::LineGround) {
    s.r_fault = 0.015;
  }
  s.t_fault = peak_aligned_t_fault(h);
  if (topology == LoadTopology::DeltaRL &&
      h.kind == FaultHypothesis::Kind::LineGround) {
    s.i_limit = 8.0 * s.rated_peak_current();
  }
  return s;
}

}  // namespace dse
