#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dse/scenario_json.hpp"
#include "dse/scenarios.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DSE_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_path(const std::string& name) {
  return std::string("cli_test_") + name;
}

std::string write_scenario(const std::string& name, const dse::Scenario& s) {
  const auto path = temp_path(name);
  std::ofstream out(path);
  out << dse::scenario_to_json_text(s);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

dse::Scenario fast_wye_lg() {
  auto s = dse::reference_scenario(dse::LoadTopology::GroundedWyeRL,
                                   dse::FaultHypothesis::line_ground(0));
  s.t_end = 0.4;
  return s;
}

}  // namespace

TEST_CASE("cli simulate", "[cli]") {
  const auto scenario_path = write_scenario("wye_lg.json", fast_wye_lg());

  SECTION("writes both csv files") {
    const auto r = run_cli("simulate " + scenario_path + " " + temp_path("w.csv") + " " +
                           temp_path("t.csv"));
    CHECK(r.exit_code == 0);
    const auto wave = slurp(temp_path("w.csv"));
    CHECK(wave.rfind("time,va,vb,vc,ia,ib,ic\n", 0) == 0);
    const auto truth = slurp(temp_path("t.csv"));
    CHECK(truth.rfind("time,", 0) == 0);
    CHECK(truth.find("vf") != std::string::npos);
  }

  SECTION("rerun is byte identical") {
    run_cli("simulate " + scenario_path + " " + temp_path("w1.csv") + " " + temp_path("t1.csv"));
    run_cli("simulate " + scenario_path + " " + temp_path("w2.csv") + " " + temp_path("t2.csv"));
    CHECK(slurp(temp_path("w1.csv")) == slurp(temp_path("w2.csv")));
    CHECK(slurp(temp_path("t1.csv")) == slurp(temp_path("t2.csv")));
  }

  SECTION("invalid scenario fails with a nonzero exit") {
    auto bad = fast_wye_lg();
    bad.t_fault = 0.45;  // after analysis_start
    const auto path = write_scenario("bad.json", bad);
    const auto r = run_cli("simulate " + path + " w.csv t.csv");
    CHECK(r.exit_code != 0);
  }

  SECTION("missing scenario file is an input error") {
    const auto r = run_cli("simulate no_such_file.json w.csv t.csv");
    CHECK(r.exit_code == 3);
  }
}

TEST_CASE("cli estimate", "[cli]") {
  const auto scenario_path = write_scenario("wye_lg2.json", fast_wye_lg());
  run_cli("simulate " + scenario_path + " " + temp_path("est.csv") + " " + temp_path("est_t.csv"));

  SECTION("recovers the fault resistance and round-trips json") {
    const auto r = run_cli("estimate " + temp_path("est.csv") +
                           " --topology wye --hypothesis lg-a --window 0.3:0.4 --max-iter 100");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("converged").get<bool>());
    CHECK(j.at("rf_hat_ohm").get<double>() == Catch::Approx(0.015).epsilon(0.02));
    CHECK(j.at("r_hat_ohm").get<double>() == Catch::Approx(7.373).epsilon(0.01));
    CHECK(j.at("l_hat_h").get<double>() == Catch::Approx(9.779e-3).epsilon(0.01));
    CHECK(j.contains("cost"));
    CHECK(j.at("iterations").is_number_integer());

    // numeric fields survive a serialize/parse cycle exactly
    const auto again = json::parse(j.dump());
    CHECK(again.at("rf_hat_ohm").get<double>() == j.at("rf_hat_ohm").get<double>());
    CHECK(again.at("cost").get<double>() == j.at("cost").get<double>());
  }

  SECTION("window flag restricts the samples") {
    const auto r = run_cli("estimate " + temp_path("est.csv") +
                           " --topology wye --hypothesis unfaulted --window 0.1:0.2 --max-iter 40");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    // pre-fault window fits the unfaulted model to the floor
    CHECK(j.at("r_hat_ohm").get<double>() == Catch::Approx(7.373).epsilon(0.01));
  }

  SECTION("invalid pairing is a usage error") {
    const auto r = run_cli("estimate " + temp_path("est.csv") +
                           " --topology 1ph --hypothesis ll-ab");
    CHECK(r.exit_code == 2);
  }

  SECTION("malformed waveform is an input-format error") {
    std::ofstream bad(temp_path("bad.csv"));
    bad << "time,va,vb\n0,1,2\n";
    bad.close();
    const auto r = run_cli("estimate " + temp_path("bad.csv") +
                           " --topology wye --hypothesis lg-a");
    CHECK(r.exit_code == 3);
  }

  SECTION("all-zero waveform is a numerical failure") {
    std::ofstream z(temp_path("zero.csv"));
    z << "time,va,vb,vc,ia,ib,ic\n";
    for (int k = 0; k < 16; ++k) z << k * 1e-4 << ",0,0,0,0,0,0\n";
    z.close();
    const auto r = run_cli("estimate " + temp_path("zero.csv") +
                           " --topology wye --hypothesis lg-a");
    CHECK(r.exit_code == 4);
  }
}

TEST_CASE("cli classify", "[cli]") {
  const auto scenario_path = write_scenario("wye_lg3.json", fast_wye_lg());
  run_cli("simulate " + scenario_path + " " + temp_path("cls.csv") + " " + temp_path("cls_t.csv"));

  SECTION("selects the true hypothesis and trips") {
    const auto r = run_cli("classify " + temp_path("cls.csv") +
                           " --topology wye --window 0.3:0.35 --max-iter 150");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("selected").get<std::string>() == "lg-a");
    CHECK(j.at("trip").at("action").get<std::string>() == "trip");
    CHECK(j.at("entries").size() == 7);
    for (const auto& e : j.at("entries")) {
      CHECK((e.contains("cost") || e.contains("error")));
    }
  }

  SECTION("waveform too short for the bank is a size error") {
    std::ofstream tiny(temp_path("tiny.csv"));
    tiny << "time,va,vb,vc,ia,ib,ic\n";
    for (int k = 0; k < 4; ++k) tiny << k * 1e-4 << ",1,2,3,4,5,6\n";
    tiny.close();
    const auto r = run_cli("classify " + temp_path("tiny.csv") + " --topology delta");
    CHECK(r.exit_code == 3);
  }
}

TEST_CASE("cli report", "[cli]") {
  // a compact two-case config keeps the determinism check fast
  json cfg;
  cfg["window_s"] = {0.3, 0.35};
  cfg["solver"] = {{"max_iterations", 150}, {"cost_delta_tol", 1e-6}};
  auto wye_lg = fast_wye_lg();
  auto wye_unf = dse::reference_scenario(dse::LoadTopology::GroundedWyeRL,
                                         dse::FaultHypothesis::unfaulted());
  wye_unf.t_end = 0.4;
  cfg["cases"] = {{{"label", "Grounded-Wye No Fault"},
                   {"scenario", json::parse(dse::scenario_to_json_text(wye_unf))}},
                  {{"label", "Grounded-Wye Line-Ground Fault"},
                   {"scenario", json::parse(dse::scenario_to_json_text(wye_lg))}}};
  std::ofstream(temp_path("report_cfg.json")) << cfg.dump(2);

  SECTION("csv has the documented columns and is reproducible") {
    const auto r1 = run_cli("report " + temp_path("report_cfg.json") + " --csv " +
                            temp_path("rep1.csv"));
    REQUIRE(r1.exit_code == 0);
    const auto csv1 = slurp(temp_path("rep1.csv"));
    CHECK(csv1.rfind("case,R_true,R_hat,L_true,L_hat,Rf_true,Rf_hat,selected,J_best,"
                     "J_margin,converged\n",
                     0) == 0);
    CHECK(csv1.find("Grounded-Wye Line-Ground Fault") != std::string::npos);
    CHECK(csv1.find("lg-a") != std::string::npos);

    const auto r2 = run_cli("report " + temp_path("report_cfg.json") + " --csv " +
                            temp_path("rep2.csv"));
    REQUIRE(r2.exit_code == 0);
    CHECK(csv1 == slurp(temp_path("rep2.csv")));
  }

  SECTION("empty case list is an empty report with exit 0") {
    json empty;
    empty["cases"] = json::array();
    std::ofstream(temp_path("empty_cfg.json")) << empty.dump();
    const auto r = run_cli("report " + temp_path("empty_cfg.json") + " --csv " +
                           temp_path("rep_empty.csv"));
    CHECK(r.exit_code == 0);
    const auto csv = slurp(temp_path("rep_empty.csv"));
    CHECK(csv ==
          "case,R_true,R_hat,L_true,L_hat,Rf_true,Rf_hat,selected,J_best,J_margin,converged\n");
  }

  SECTION("default config lists the seven published cases") {
    const auto r = run_cli("report --print-default-config");
    REQUIRE(r.exit_code == 0);
    const auto j = json::parse(r.out);
    REQUIRE(j.at("cases").size() == 7);
    CHECK(j["cases"][0]["label"] == "Single-Phase RL Load");
    CHECK(j["cases"][6]["label"] == "Delta Line-Ground Fault");
  }

  SECTION("usage without a subcommand") {
    const auto r = run_cli("");
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("cli full default report", "[cli-report-default]") {
  const auto r = run_cli("report --csv " + temp_path("rep_full.csv"));
  REQUIRE(r.exit_code == 0);
  const auto csv = slurp(temp_path("rep_full.csv"));

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  std::vector<std::string> selected;
  while (std::getline(lines, line)) {
    ++rows;
    // selected sits in the eighth column
    std::size_t pos = 0;
    for (int c = 0; c < 7; ++c) pos = line.find(',', pos) + 1;
    selected.push_back(line.substr(pos, line.find(',', pos) - pos));
  }
  REQUIRE(rows == 7);
  CHECK(selected == std::vector<std::string>{"lg-a", "unfaulted", "lg-a", "ll-ab",
                                             "unfaulted", "ll-ab", "lg-a"});
}
