#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dse/errors.hpp"

namespace dse {

/// Measurement channels at the protected bus. Vab/Vbc/Vca are derived
/// line-line voltages, not stored channels.
enum class ChannelId { Va, Vb, Vc, Ia, Ib, Ic, Vab, Vbc, Vca };

const char* channel_name(ChannelId id);

/// Uniformly sampled three-phase voltage/current record.
///
/// Immutable by convention once built: every operation below returns a new
/// set, so instances can be shared freely across concurrent estimators.
struct WaveformSet {
  double dt = 0.0;  ///< sample period [s]
  double t0 = 0.0;  ///< timestamp of first sample [s]
  std::vector<double> va, vb, vc;  ///< phase-ground voltages [V]
  std::vector<double> ia, ib, ic;  ///< phase currents into the bus [A]

  std::size_t n() const { return va.size(); }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return n() == 0 ? t0 : time_at(n() - 1); }

  /// Channel samples by id; line-line channels are computed on request.
  std::vector<double> channel(ChannelId id) const;

  /// Enforces the structural invariants (equal lengths, n >= 3, dt > 0).
  void validate() const;
};

struct LineLineChannels {
  std::vector<double> vab, vbc, vca;
};

/// Parses the canonical CSV (`time,va,vb,vc,ia,ib,ic`, '#' comments allowed).
/// dt is the median inter-row step; any step off by more than 1 part in 1e4
/// is rejected as non-uniform sampling.
WaveformSet load_waveform_csv(std::istream& in);
WaveformSet load_waveform_csv_file(const std::string& path);

void write_waveform_csv(const WaveformSet& ws, std::ostream& out);
void write_waveform_csv_file(const WaveformSet& ws, const std::string& path);

/// Contiguous sub-series with timestamps in [t_start, t_end]; dt unchanged.
WaveformSet window(const WaveformSet& ws, double t_start, double t_end);

/// vab[k] = va[k] - vb[k], cyclically.
LineLineChannels derive_line_line(const WaveformSet& ws);

/// Additive zero-mean Gaussian noise at the given per-channel sample-power
/// SNR. Deterministic for a fixed seed; +inf snr_db returns the input.
WaveformSet add_noise(const WaveformSet& ws, double snr_db, std::uint64_t seed);

double rms(const std::vector<double>& x);

}  // namespace dse
