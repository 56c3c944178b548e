#pragma once

#include "dse/simulator.hpp"

namespace dse {

/// Fault inception time at the first positive peak of the driving voltage
/// (phase-ground for line-ground faults, line-line for line-line faults)
/// after the nominal 0.25 s switch time. Peak inception maximizes the
/// initial current slew, so every phase of the fault loop latches its
/// current limiter promptly.
double peak_aligned_t_fault(const FaultHypothesis& h, double f0 = 60.0,
                            double t_nominal = 0.25);

/// Reference scenario for one benchmark case: the published true load
/// (7.373 ohm, 9.779 mH) with 15 mohm line-ground / 10 mohm line-line
/// faults applied at the driving-voltage peak. The delta line-ground case
/// raises the current limit to 8x rated: its fault loop contains no load
/// impedance, so a realistic ground-fault current dwarfs the load current,
/// which is what the simplified fault model assumes.
Scenario reference_scenario(LoadTopology topology, const FaultHypothesis& h);

}  // namespace dse
