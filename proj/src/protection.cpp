#include "dse/protection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dse {

Classification classify(const WaveformSet& ws, LoadTopology topology,
                        const SolverConfig& cfg, double selection_tolerance) {
  ws.validate();
  cfg.validate();
  if (selection_tolerance < 0.0) {
    throw_error(ErrorKind::Config, "selection tolerance must be >= 0");
  }

  const auto hypotheses = valid_hypotheses(topology);
  Classification c;
  c.entries.resize(hypotheses.size());
  const auto count = static_cast<std::int64_t>(hypotheses.size());

  // building every model up front enforces the bank precondition (the
  // window must be long enough for the largest layout); estimate failures
  // later are recorded per entry instead
  std::vector<HypothesisModel> models;
  models.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    models.push_back(build_model(topology, h, static_cast<int>(ws.n()), ws.dt));
  }

  // results land in fixed slots, so the merge order never depends on the
  // schedule; inner kernels fall back to serial inside this region
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    ClassificationEntry& entry = c.entries[static_cast<std::size_t>(i)];
    entry.hypothesis = hypotheses[static_cast<std::size_t>(i)];
    try {
      entry.result = estimate(models[static_cast<std::size_t>(i)], ws, cfg);
    } catch (const Error& e) {
      entry.error = e.what();
    }
  }

  finalize_selection(c, selection_tolerance);
  return c;
}

void finalize_selection(Classification& c, double selection_tolerance) {
  c.selected.reset();
  c.margin = 0.0;
  // argmin over converged entries with the tie band
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (const auto& entry : c.entries) {
    if (!entry.result || !entry.result->converged) continue;
    const double j = entry.result->cost;
    if (j < best) {
      second = best;
      best = j;
    } else if (j < second) {
      second = j;
    }
  }
  if (std::isfinite(best)) {
    for (const auto& entry : c.entries) {
      if (!entry.result || !entry.result->converged) continue;
      if (entry.result->cost <= best + selection_tolerance) {
        c.selected = entry.hypothesis;
        break;  // entries are already in canonical tie-break order
      }
    }
    c.margin = std::isfinite(second) ? second - best
                                     : std::numeric_limits<double>::infinity();
  }
}

TripDecision trip_decision(const Classification& c, const TripPolicy& policy) {
  if (policy.min_margin < 0.0) {
    throw_error(ErrorKind::Config, "min_margin must be >= 0");
  }
  TripDecision d;
  if (!c.selected) {
    d.reason = "no hypothesis converged";
    return d;
  }
  if (!c.selected->faulted()) {
    d.reason = "selected hypothesis is unfaulted";
    return d;
  }
  if (policy.require_convergence) {
    const auto it = std::find_if(c.entries.begin(), c.entries.end(),
                                 [&](const ClassificationEntry& e) {
                                   return e.hypothesis == *c.selected;
                                 });
    if (it == c.entries.end() || !it->result || !it->result->converged) {
      d.reason = "selected estimator did not converge";
      return d;
    }
  }
  if (c.margin < policy.min_margin) {
    d.reason = "insufficient margin between best and second-best cost";
    return d;
  }
  d.action = TripDecision::Action::Trip;
  d.reason = "fault hypothesis " + c.selected->label() + " selected with sufficient margin";
  return d;
}

}  // namespace dse
