#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dse/estimator.hpp"
#include "dse/models.hpp"
#include "dse/waveform.hpp"

namespace dse {

struct ClassificationEntry {
  FaultHypothesis hypothesis;
  std::optional<EstimationResult> result;
  std::string error;  ///< non-empty when the estimate failed outright
};

/// Outcome of running the full estimator bank over one window. `selected`
/// is the minimum-cost hypothesis among converged entries; hypotheses whose
/// cost is within `selection_tolerance` of the minimum are treated as tied
/// and the earliest in canonical order wins (an unfaulted fit is nested in
/// the fault models, so exact noise-floor costs differ only by fit slack).
struct Classification {
  std::vector<ClassificationEntry> entries;
  std::optional<FaultHypothesis> selected;
  double margin = 0.0;  ///< J_second_best - J_best over converged entries
};

inline constexpr double kDefaultSelectionTolerance = 0.5;

/// Fills `selected` and `margin` from the entries: argmin J over converged
/// entries, ties within the tolerance resolved by canonical entry order.
void finalize_selection(Classification& c, double selection_tolerance);

/// Runs one estimator per valid hypothesis (concurrently when possible) and
/// selects the minimum-cost converged entry. Per-entry failures are
/// recorded, not fatal.
Classification classify(const WaveformSet& ws, LoadTopology topology,
                        const SolverConfig& cfg,
                        double selection_tolerance = kDefaultSelectionTolerance);

struct TripPolicy {
  double min_margin = 0.5;
  bool require_convergence = true;
};

struct TripDecision {
  enum class Action { Trip, Hold };
  Action action = Action::Hold;
  std::string reason;
};

/// Trip iff the selected hypothesis is faulted, converged (when required)
/// and separated from the runner-up by at least min_margin.
TripDecision trip_decision(const Classification& c, const TripPolicy& policy);

}  // namespace dse
