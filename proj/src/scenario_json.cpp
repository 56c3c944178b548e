#include "dse/scenario_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dse {

namespace {

LoadTopology topology_from_string(const std::string& s) {
  if (s == "1ph") return LoadTopology::SinglePhaseRL;
  if (s == "wye") return LoadTopology::GroundedWyeRL;
  if (s == "delta") return LoadTopology::DeltaRL;
  throw_error(ErrorKind::Config, "unknown topology: " + s);
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::Format, std::string("scenario JSON parse error: ") + e.what());
  }

  Scenario s;
  try {
    if (j.contains("topology")) s.topology = topology_from_string(j["topology"]);
    if (j.contains("hypothesis")) {
      s.hypothesis = FaultHypothesis::from_label(j["hypothesis"]);
    }
    if (j.contains("r_load_ohm")) s.r_load = j["r_load_ohm"];
    if (j.contains("l_load_h")) s.l_load = j["l_load_h"];
    if (j.contains("r_fault_ohm")) s.r_fault = j["r_fault_ohm"];
    if (j.contains("v_source_rms")) s.v_source_rms = j["v_source_rms"];
    if (j.contains("f0_hz")) s.f0 = j["f0_hz"];
    if (j.contains("source_r_ohm")) s.source_r = j["source_r_ohm"];
    if (j.contains("source_l_h")) s.source_l = j["source_l_h"];
    if (j.contains("i_limit_a") && !j["i_limit_a"].is_null()) {
      s.i_limit = j["i_limit_a"].get<double>();
    }
    if (j.contains("hysteresis_release")) s.hysteresis_release = j["hysteresis_release"];
    if (j.contains("t_fault_s")) s.t_fault = j["t_fault_s"];
    if (j.contains("t_end_s")) s.t_end = j["t_end_s"];
    if (j.contains("dt_sim_s")) s.dt_sim = j["dt_sim_s"];
    if (j.contains("dt_out_s")) s.dt_out = j["dt_out_s"];
    if (j.contains("analysis_start_s")) s.analysis_start = j["analysis_start_s"];
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::Format, std::string("scenario JSON field error: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario scenario_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::Format, "cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

std::string scenario_to_json_text(const Scenario& s) {
  nlohmann::json j;
  j["topology"] = topology_name(s.topology);
  j["hypothesis"] = s.hypothesis.label();
  j["r_load_ohm"] = s.r_load;
  j["l_load_h"] = s.l_load;
  if (s.hypothesis.faulted()) j["r_fault_ohm"] = s.r_fault;
  j["v_source_rms"] = s.v_source_rms;
  j["f0_hz"] = s.f0;
  j["source_r_ohm"] = s.source_r;
  j["source_l_h"] = s.source_l;
  if (s.i_limit) j["i_limit_a"] = *s.i_limit;
  j["hysteresis_release"] = s.hysteresis_release;
  j["t_fault_s"] = s.t_fault;
  j["t_end_s"] = s.t_end;
  j["dt_sim_s"] = s.dt_sim;
  j["dt_out_s"] = s.dt_out;
  j["analysis_start_s"] = s.analysis_start;
  return j.dump(2);
}

}  // namespace dse
