// Command-line front end: simulate fault scenarios, run single-hypothesis
// estimates, classify with the full bank, and reproduce the summary table.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dse/estimator.hpp"
#include "dse/protection.hpp"
#include "dse/scenario_json.hpp"
#include "dse/scenarios.hpp"
#include "dse/simulator.hpp"
#include "dse/waveform.hpp"

namespace {

using nlohmann::json;

int exit_code_for(const dse::Error& e) {
  switch (e.kind()) {
    case dse::ErrorKind::Config:
      return 2;
    case dse::ErrorKind::Format:
    case dse::ErrorKind::Size:
    case dse::ErrorKind::Range:
    case dse::ErrorKind::Shape:
      return 3;
    case dse::ErrorKind::Degenerate:
    case dse::ErrorKind::Numerical:
      return 4;
  }
  return 1;
}

dse::LoadTopology parse_topology(const std::string& s) {
  if (s == "1ph") return dse::LoadTopology::SinglePhaseRL;
  if (s == "wye") return dse::LoadTopology::GroundedWyeRL;
  if (s == "delta") return dse::LoadTopology::DeltaRL;
  throw dse::Error(dse::ErrorKind::Config, "unknown topology: " + s);
}

std::pair<double, double> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw dse::Error(dse::ErrorKind::Config, "window must be start:end in seconds");
  }
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw dse::Error(dse::ErrorKind::Config, "window must be start:end in seconds");
  }
}

json result_to_json(const dse::EstimationResult& r) {
  json j;
  j["r_hat_ohm"] = r.params.r_ohm;
  j["l_hat_h"] = r.params.l_h;
  if (r.params.rf_ohm) j["rf_hat_ohm"] = *r.params.rf_ohm;
  j["cost"] = r.cost;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

struct ReportCase {
  std::string label;
  dse::Scenario scenario;
};

struct ReportConfig {
  double window_start = 0.3;
  double window_end = 0.4;
  dse::SolverConfig solver;
  dse::TripPolicy policy;
  std::vector<ReportCase> cases;
};

ReportConfig default_report_config() {
  ReportConfig cfg;
  cfg.solver.max_iterations = 250;
  cfg.solver.cost_delta_tol = 1e-4;  // rank the bank without deep convergence
  using H = dse::FaultHypothesis;
  cfg.cases = {
      {"Single-Phase RL Load",
       dse::reference_scenario(dse::LoadTopology::SinglePhaseRL, H::line_ground(0))},
      {"Grounded-Wye No Fault",
       dse::reference_scenario(dse::LoadTopology::GroundedWyeRL, H::unfaulted())},
      {"Grounded-Wye Line-Ground Fault",
       dse::reference_scenario(dse::LoadTopology::GroundedWyeRL, H::line_ground(0))},
      {"Grounded-Wye Line-Line Fault",
       dse::reference_scenario(dse::LoadTopology::GroundedWyeRL, H::line_line(0))},
      {"Delta No Fault",
       dse::reference_scenario(dse::LoadTopology::DeltaRL, H::unfaulted())},
      {"Delta Line-Line Fault",
       dse::reference_scenario(dse::LoadTopology::DeltaRL, H::line_line(0))},
      {"Delta Line-Ground Fault",
       dse::reference_scenario(dse::LoadTopology::DeltaRL, H::line_ground(0))},
  };
  return cfg;
}

json report_config_to_json(const ReportConfig& cfg) {
  json j;
  j["window_s"] = {cfg.window_start, cfg.window_end};
  j["solver"] = {{"max_iterations", cfg.solver.max_iterations},
                 {"cost_delta_tol", cfg.solver.cost_delta_tol}};
  j["min_margin"] = cfg.policy.min_margin;
  j["cases"] = json::array();
  for (const auto& c : cfg.cases) {
    j["cases"].push_back(
        {{"label", c.label}, {"scenario", json::parse(dse::scenario_to_json_text(c.scenario))}});
  }
  return j;
}

ReportConfig report_config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dse::Error(dse::ErrorKind::Format, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw dse::Error(dse::ErrorKind::Format, std::string("config parse error: ") + e.what());
  }
  ReportConfig cfg;
  cfg.cases.clear();
  try {
    if (j.contains("window_s")) {
      cfg.window_start = j["window_s"][0];
      cfg.window_end = j["window_s"][1];
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      if (s.contains("max_iterations")) cfg.solver.max_iterations = s["max_iterations"];
      if (s.contains("cost_delta_tol")) cfg.solver.cost_delta_tol = s["cost_delta_tol"];
    }
    if (j.contains("min_margin")) cfg.policy.min_margin = j["min_margin"];
    if (j.contains("cases")) {
      for (const auto& c : j["cases"]) {
        ReportCase rc;
        rc.label = c.at("label");
        rc.scenario = dse::scenario_from_json_text(c.at("scenario").dump());
        cfg.cases.push_back(rc);
      }
    }
  } catch (const json::exception& e) {
    throw dse::Error(dse::ErrorKind::Format, std::string("config field error: ") + e.what());
  }
  return cfg;
}

struct ReportRow {
  std::string label;
  double r_true = 0, l_true = 0;
  std::optional<double> rf_true;
  std::optional<dse::EstimationResult> selected_result;
  std::string selected = "none";
  double j_best = 0, j_margin = 0;
  bool has_selection = false;
  bool converged = false;
  double wall_ms = 0;
  std::string error;
};

std::string num(double v, const char* fmt = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

int cmd_report(const std::string& config_path, const std::string& csv_path,
               bool print_default) {
  if (print_default) {
    std::cout << report_config_to_json(default_report_config()).dump(2) << "\n";
    return 0;
  }
  ReportConfig cfg =
      config_path.empty() ? default_report_config() : report_config_from_file(config_path);

  std::vector<ReportRow> rows(cfg.cases.size());
  const auto count = static_cast<std::int64_t>(cfg.cases.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    const ReportCase& c = cfg.cases[static_cast<std::size_t>(i)];
    ReportRow& row = rows[static_cast<std::size_t>(i)];
    row.label = c.label;
    row.r_true = c.scenario.r_load;
    row.l_true = c.scenario.l_load;
    if (c.scenario.hypothesis.faulted()) row.rf_true = c.scenario.r_fault;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto sim = dse::simulate(c.scenario);
      const auto ws = dse::window(sim.waveform, cfg.window_start, cfg.window_end);
      const auto cls = dse::classify(ws, c.scenario.topology, cfg.solver);
      if (cls.selected) {
        row.has_selection = true;
        row.selected = cls.selected->label();
        for (const auto& e : cls.entries) {
          if (e.hypothesis == *cls.selected) {
            row.selected_result = e.result;
            row.converged = e.result && e.result->converged;
          }
        }
        row.j_best = row.selected_result ? row.selected_result->cost : 0.0;
        row.j_margin = cls.margin;
      }
    } catch (const dse::Error& e) {
      row.error = e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  }

  // human-readable table on stdout
  std::printf("%-32s %9s %9s %9s %9s %9s %9s %-10s %10s %8s %5s %8s\n", "case",
              "R_true", "R_hat", "L_true", "L_hat", "Rf_true", "Rf_hat", "selected",
              "J_best", "margin", "conv", "ms");
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      std::printf("%-32s failed: %s\n", row.label.c_str(), row.error.c_str());
      continue;
    }
    const auto* res = row.selected_result ? &*row.selected_result : nullptr;
    std::printf("%-32s %9.4f %9s %9.5f %9s %9s %9s %-10s %10s %8s %5s %8.1f\n",
                row.label.c_str(), row.r_true,
                res ? num(res->params.r_ohm, "%.4f").c_str() : "--",
                row.l_true * 1e3,
                res ? num(res->params.l_h * 1e3, "%.5f").c_str() : "--",
                row.rf_true ? num(*row.rf_true * 1e3, "%.3f").c_str() : "--",
                (res && res->params.rf_ohm) ? num(*res->params.rf_ohm * 1e3, "%.3f").c_str()
                                            : "--",
                row.selected.c_str(), res ? num(row.j_best, "%.4f").c_str() : "--",
                row.has_selection ? num(row.j_margin, "%.3f").c_str() : "--",
                row.converged ? "yes" : "no", row.wall_ms);
  }

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw dse::Error(dse::ErrorKind::Format, "cannot open csv output: " + csv_path);
    out << "case,R_true,R_hat,L_true,L_hat,Rf_true,Rf_hat,selected,J_best,J_margin,converged\n";
    for (const auto& row : rows) {
      const auto* res = row.selected_result ? &*row.selected_result : nullptr;
      out << row.label << ',' << num(row.r_true) << ','
          << (res ? num(res->params.r_ohm) : "") << ',' << num(row.l_true) << ','
          << (res ? num(res->params.l_h) : "") << ','
          << (row.rf_true ? num(*row.rf_true) : "") << ','
          << (res && res->params.rf_ohm ? num(*res->params.rf_ohm) : "") << ','
          << row.selected << ',' << (res ? num(row.j_best) : "") << ','
          << (row.has_selection ? num(row.j_margin) : "") << ','
          << (row.converged ? "true" : "false") << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic state estimation engine for load-bus protection"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a fault scenario and write CSVs");
  std::string scenario_path, out_waveform, out_truth;
  sim_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
  sim_cmd->add_option("waveform", out_waveform, "output waveform CSV")->required();
  sim_cmd->add_option("truth", out_truth, "output ground-truth CSV")->required();

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "fit one hypothesis to a waveform");
  std::string est_waveform, est_topology, est_hypothesis, est_window;
  int max_iter = dse::SolverConfig{}.max_iterations;
  double tol = dse::SolverConfig{}.cost_delta_tol;
  est_cmd->add_option("waveform", est_waveform, "waveform CSV file")->required();
  est_cmd->add_option("--topology", est_topology, "1ph|wye|delta")->required();
  est_cmd->add_option("--hypothesis", est_hypothesis,
                      "unfaulted|lg-a|lg-b|lg-c|ll-ab|ll-bc|ll-ca")
      ->required();
  est_cmd->add_option("--window", est_window, "analysis window start:end [s]");
  est_cmd->add_option("--max-iter", max_iter, "iteration cap");
  est_cmd->add_option("--tol", tol, "|dJ| convergence threshold");

  // classify
  auto* cls_cmd = app.add_subcommand("classify", "run the full hypothesis bank");
  std::string cls_waveform, cls_topology, cls_window;
  double min_margin = dse::TripPolicy{}.min_margin;
  cls_cmd->add_option("waveform", cls_waveform, "waveform CSV file")->required();
  cls_cmd->add_option("--topology", cls_topology, "1ph|wye|delta")->required();
  cls_cmd->add_option("--window", cls_window, "analysis window start:end [s]");
  cls_cmd->add_option("--max-iter", max_iter, "iteration cap");
  cls_cmd->add_option("--tol", tol, "|dJ| convergence threshold");
  cls_cmd->add_option("--margin", min_margin, "required J separation to trip");

  // report
  auto* rep_cmd = app.add_subcommand("report", "simulate, estimate and classify a case list");
  std::string report_config, report_csv;
  bool print_default = false;
  rep_cmd->add_option("config", report_config, "report config JSON (default: built-in cases)");
  rep_cmd->add_option("--csv", report_csv, "write the report CSV to this path");
  rep_cmd->add_flag("--print-default-config", print_default,
                    "print the built-in config as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim_cmd) {
      const auto scenario = dse::scenario_from_json_file(scenario_path);
      const auto out = dse::simulate(scenario);
      dse::write_waveform_csv_file(out.waveform, out_waveform);
      dse::write_ground_truth_csv_file(out.truth, out_truth);
      std::cerr << "wrote " << out.waveform.n() << " samples to " << out_waveform
                << " and " << out_truth << "\n";
      return 0;
    }

    dse::SolverConfig solver;
    solver.max_iterations = max_iter;
    solver.cost_delta_tol = tol;

    if (*est_cmd) {
      auto ws = dse::load_waveform_csv_file(est_waveform);
      if (!est_window.empty()) {
        const auto [w0, w1] = parse_window(est_window);
        ws = dse::window(ws, w0, w1);
      }
      const auto topology = parse_topology(est_topology);
      const auto hypothesis = dse::FaultHypothesis::from_label(est_hypothesis);
      const auto model =
          dse::build_model(topology, hypothesis, static_cast<int>(ws.n()), ws.dt);
      const auto result = dse::estimate(model, ws, solver);
      std::cout << result_to_json(result).dump(2) << "\n";
      return 0;
    }

    if (*cls_cmd) {
      auto ws = dse::load_waveform_csv_file(cls_waveform);
      if (!cls_window.empty()) {
        const auto [w0, w1] = parse_window(cls_window);
        ws = dse::window(ws, w0, w1);
      }
      const auto topology = parse_topology(cls_topology);
      const auto cls = dse::classify(ws, topology, solver);
      dse::TripPolicy policy;
      policy.min_margin = min_margin;
      const auto trip = dse::trip_decision(cls, policy);

      json j;
      j["topology"] = dse::topology_name(topology);
      j["entries"] = json::array();
      for (const auto& e : cls.entries) {
        json je;
        je["hypothesis"] = e.hypothesis.label();
        if (e.result) {
          je.update(result_to_json(*e.result));
        } else {
          je["error"] = e.error;
        }
        j["entries"].push_back(je);
      }
      j["selected"] = cls.selected ? json(cls.selected->label()) : json(nullptr);
      j["margin"] = (cls.selected && std::isfinite(cls.margin)) ? json(cls.margin)
                                                                : json(nullptr);
      j["trip"] = {{"action",
                    trip.action == dse::TripDecision::Action::Trip ? "trip" : "hold"},
                   {"reason", trip.reason}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*rep_cmd) return cmd_report(report_config, report_csv, print_default);
  } catch (const dse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
