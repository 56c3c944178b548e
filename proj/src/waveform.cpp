#include "dse/waveform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace dse {

const char* channel_name(ChannelId id) {
  switch (id) {
    case ChannelId::Va: return "va";
    case ChannelId::Vb: return "vb";
    case ChannelId::Vc: return "vc";
    case ChannelId::Ia: return "ia";
    case ChannelId::Ib: return "ib";
    case ChannelId::Ic: return "ic";
    case ChannelId::Vab: return "vab";
    case ChannelId::Vbc: return "vbc";
    case ChannelId::Vca: return "vca";
  }
  return "?";
}

double rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

std::vector<double> WaveformSet::channel(ChannelId id) const {
  auto diff = [&](const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[k] - q[k];
    return out;
  };
  switch (id) {
    case ChannelId::Va: return va;
    case ChannelId::Vb: return vb;
    case ChannelId::Vc: return vc;
    case ChannelId::Ia: return ia;
    case ChannelId::Ib: return ib;
    case ChannelId::Ic: return ic;
    case ChannelId::Vab: return diff(va, vb);
    case ChannelId::Vbc: return diff(vb, vc);
    case ChannelId::Vca: return diff(vc, va);
  }
  throw_error(ErrorKind::Shape, "unknown channel id");
}

void WaveformSet::validate() const {
  const std::size_t m = va.size();
  if (vb.size() != m || vc.size() != m || ia.size() != m || ib.size() != m ||
      ic.size() != m) {
    throw_error(ErrorKind::Shape, "waveform channels have unequal lengths");
  }
  if (m < 3) throw_error(ErrorKind::Size, "waveform needs at least 3 samples");
  if (!(dt > 0.0)) throw_error(ErrorKind::Format, "waveform sample period must be positive");
}

namespace {

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

WaveformSet load_waveform_csv(std::istream& in) {
  std::string line;
  bool header_seen = false;
  std::vector<double> times;
  WaveformSet ws;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank_or_comment(line)) continue;
    if (!header_seen) {
      if (strip(line) != "time,va,vb,vc,ia,ib,ic") {
        throw_error(ErrorKind::Format,
                    "bad waveform CSV header, expected 'time,va,vb,vc,ia,ib,ic'");
      }
      header_seen = true;
      continue;
    }
    double f[7];
    const char* p = line.c_str();
    for (int i = 0; i < 7; ++i) {
      char* end = nullptr;
      f[i] = std::strtod(p, &end);
      if (end == p) throw_error(ErrorKind::Format, "non-numeric field in waveform CSV row");
      p = end;
      if (i < 6) {
        while (*p == ' ' || *p == '\t') ++p;
        if (*p != ',') throw_error(ErrorKind::Format, "waveform CSV row has too few columns");
        ++p;
      }
    }
    while (*p == ' ' || *p == '\t') ++p;
    if (*p != '\0') throw_error(ErrorKind::Format, "waveform CSV row has trailing content");
    times.push_back(f[0]);
    ws.va.push_back(f[1]);
    ws.vb.push_back(f[2]);
    ws.vc.push_back(f[3]);
    ws.ia.push_back(f[4]);
    ws.ib.push_back(f[5]);
    ws.ic.push_back(f[6]);
  }
  if (!header_seen) throw_error(ErrorKind::Format, "waveform CSV is empty");
  if (times.size() < 3) throw_error(ErrorKind::Size, "waveform CSV has fewer than 3 rows");

  std::vector<double> steps(times.size() - 1);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) steps[k] = times[k + 1] - times[k];
  std::vector<double> sorted = steps;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(median > 0.0)) throw_error(ErrorKind::Format, "waveform timestamps are not increasing");
  for (double s : steps) {
    if (std::abs(s - median) > 1e-4 * median) {
      throw_error(ErrorKind::Format, "non-uniform sampling in waveform CSV");
    }
  }
  ws.dt = median;
  ws.t0 = times.front();
  ws.validate();
  return ws;
}

WaveformSet load_waveform_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::Format, "cannot open waveform file: " + path);
  return load_waveform_csv(in);
}

void write_waveform_csv(const WaveformSet& ws, std::ostream& out) {
  out << "time,va,vb,vc,ia,ib,ic\n";
  char buf[256];
  for (std::size_t k = 0; k < ws.n(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  ws.time_at(k), ws.va[k], ws.vb[k], ws.vc[k], ws.ia[k], ws.ib[k],
                  ws.ic[k]);
    out << buf;
  }
}

void write_waveform_csv_file(const WaveformSet& ws, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::Format, "cannot open output file: " + path);
  write_waveform_csv(ws, out);
}

WaveformSet window(const WaveformSet& ws, double t_start, double t_end) {
  ws.validate();
  if (!(t_start < t_end)) throw_error(ErrorKind::Range, "empty or reversed window range");
  if (t_start < ws.t0 - 1e-9 * ws.dt || t_end > ws.t_end() + 1e-9 * ws.dt) {
    throw_error(ErrorKind::Range, "window range outside the sampled interval");
  }
  const double eps = 1e-9 * ws.dt;
  const auto lo = static_cast<std::size_t>(
      std::max(0.0, std::ceil((t_start - ws.t0 - eps) / ws.dt)));
  const auto hi = static_cast<std::size_t>(
      std::floor((t_end - ws.t0 + eps) / ws.dt));
  if (hi >= ws.n() || lo > hi) throw_error(ErrorKind::Range, "window selects no samples");
  const std::size_t count = hi - lo + 1;
  if (count < 3) throw_error(ErrorKind::Size, "window yields fewer than 3 samples");

  WaveformSet out;
  out.dt = ws.dt;
  out.t0 = ws.time_at(lo);
  auto slice = [&](const std::vector<double>& src) {
    return std::vector<double>(src.begin() + static_cast<std::ptrdiff_t>(lo),
                               src.begin() + static_cast<std::ptrdiff_t>(lo + count));
  };
  out.va = slice(ws.va);
  out.vb = slice(ws.vb);
  out.vc = slice(ws.vc);
  out.ia = slice(ws.ia);
  out.ib = slice(ws.ib);
  out.ic = slice(ws.ic);
  return out;
}

LineLineChannels derive_line_line(const WaveformSet& ws) {
  ws.validate();
  LineLineChannels out;
  out.vab = ws.channel(ChannelId::Vab);
  out.vbc = ws.channel(ChannelId::Vbc);
  out.vca = ws.channel(ChannelId::Vca);
  return out;
}

WaveformSet add_noise(const WaveformSet& ws, double snr_db, std::uint64_t seed) {
  ws.validate();
  if (std::isinf(snr_db) && snr_db > 0) return ws;
  if (!std::isfinite(snr_db)) throw_error(ErrorKind::Range, "snr_db must be finite or +inf");

  WaveformSet out = ws;
  std::vector<double>* chans[6] = {&out.va, &out.vb, &out.vc, &out.ia, &out.ib, &out.ic};
  const double gain = std::pow(10.0, -snr_db / 20.0);
  for (std::uint64_t c = 0; c < 6; ++c) {
    std::vector<double>& x = *chans[c];
    const double sigma = rms(x) * gain;
    if (sigma == 0.0) continue;
    // one substream per channel so channel order never changes the draw
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + c + 1);
    std::normal_distribution<double> dist(0.0, sigma);
    for (double& v : x) v += dist(rng);
  }
  return out;
}

}  // namespace dse
