#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dse/estimator.hpp"
#include "dse/scenarios.hpp"
#include "dse/simulator.hpp"
#include "test_support.hpp"

using namespace dse;

TEST_CASE("residual", "[estimator]") {
  Eigen::VectorXd y(2), h(2);
  y << 1, 2;
  h << 0, 0;
  CHECK(residual(y, h) == y);
  CHECK(residual(y, y).norm() == 0.0);
  Eigen::VectorXd bad(3);
  CHECK_THROWS_AS(residual(y, bad), Error);
}

TEST_CASE("cost", "[estimator]") {
  Eigen::VectorXd e1(2), e2(2), e0(2);
  e1 << 1, 0;
  e2 << 2, 0;
  e0 << 0, 0;
  CHECK(cost(e1) == Catch::Approx(0.0).margin(1e-12));
  CHECK(cost(e2) == Catch::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(cost(e0) == Catch::Approx(std::log(1e-30)).epsilon(1e-12));
  CHECK(cost(e0) == Catch::Approx(-69.0776).margin(1e-3));
}

TEST_CASE("gauss-newton step", "[estimator]") {
  SECTION("identity jacobian returns the residual") {
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd eps(2);
    eps << 0.5, -0.5;
    const auto dx = gauss_newton_step(h, eps, 0.0);
    CHECK(dx[0] == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(dx[1] == Catch::Approx(-0.5).epsilon(1e-14));
  }
  SECTION("diagonal solve") {
    Eigen::MatrixXd h = Eigen::Vector2d(2, 4).asDiagonal();
    Eigen::VectorXd eps(2);
    eps << 2, 4;
    const auto dx = gauss_newton_step(h, eps, 0.0);
    CHECK(dx[0] == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(dx[1] == Catch::Approx(1.0).epsilon(1e-14));
  }
  SECTION("damped rank-deficient system") {
    Eigen::MatrixXd h(2, 2);
    h << 1, 0, 0, 0;
    Eigen::VectorXd eps(2);
    eps << 1, 1;
    const auto dx = gauss_newton_step(h, eps, 1.0);
    CHECK(dx[0] == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(dx[1] == Catch::Approx(0.0).margin(1e-14));
  }
  SECTION("singular system at lambda zero throws the singularity signal") {
    Eigen::MatrixXd h(2, 2);
    h << 1, 0, 0, 0;
    Eigen::VectorXd eps(2);
    eps << 1, 1;
    try {
      gauss_newton_step(h, eps, 0.0);
      FAIL("expected a numerical error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Numerical);
    }
  }
  SECTION("sparse overload matches dense") {
    Eigen::MatrixXd hd(3, 2);
    hd << 1, 2, 0, 1, 3, 0;
    Eigen::VectorXd eps(3);
    eps << 0.3, -1.0, 2.0;
    const Eigen::SparseMatrix<double> hs = hd.sparseView();
    const auto dense = gauss_newton_step(hd, eps, 0.1);
    const auto sparse = gauss_newton_step(hs, eps, 0.1);
    CHECK((dense - sparse).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("fixed point", "[estimator]") {
  for (const auto& [topo, hyp] : test::all_bank_models()) {
    const auto m = build_model(topo, hyp, 12, 1e-4);
    const auto x_true = test::consistent_state(m);
    const auto ws = test::waveform_for_state(m, x_true);
    SolverConfig cfg;
    const auto r = estimate(m, ws, cfg, x_true);
    INFO(topology_name(topo) << "/" << hyp.label());
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    CHECK(r.cost == Catch::Approx(std::log(cfg.cost_floor)).margin(1e-9));
    CHECK((r.x_hat.values - x_true.values).norm() <= 1e-12 * x_true.values.norm());
  }
}

TEST_CASE("estimate on a simulated window", "[estimator]") {
  Scenario s = reference_scenario(LoadTopology::GroundedWyeRL, FaultHypothesis::line_ground(0));
  s.t_end = 0.34;
  const auto sim = simulate(s);
  const auto ws = window(sim.waveform, 0.3, 0.33);
  const auto m = build_model(s.topology, s.hypothesis, static_cast<int>(ws.n()), ws.dt);
  SolverConfig cfg;
  cfg.max_iterations = 100;

  SECTION("accepted costs are non-increasing and parameters are recovered") {
    const auto r = estimate(m, ws, cfg);
    REQUIRE(r.converged);
    REQUIRE(static_cast<int>(r.cost_trace.size()) == r.iterations);
    for (std::size_t i = 1; i < r.cost_trace.size(); ++i) {
      CHECK(r.cost_trace[i] <= r.cost_trace[i - 1]);
    }
    CHECK(r.cost == Catch::Approx(r.cost_trace.back()));
    CHECK(r.params.r_ohm == Catch::Approx(7.373).epsilon(1e-4));
    CHECK(r.params.l_h == Catch::Approx(9.779e-3).epsilon(1e-4));
    REQUIRE(r.params.rf_ohm.has_value());
    CHECK(*r.params.rf_ohm == Catch::Approx(0.015).epsilon(1e-3));
  }

  SECTION("column scaling does not change the solution") {
    SolverConfig plain = cfg;
    plain.column_scaling = false;
    const auto with_scaling = estimate(m, ws, cfg);
    const auto without = estimate(m, ws, plain);
    CHECK(with_scaling.params.r_ohm ==
          Catch::Approx(without.params.r_ohm).epsilon(1e-6));
    CHECK(with_scaling.params.l_h == Catch::Approx(without.params.l_h).epsilon(1e-6));
    CHECK(*with_scaling.params.rf_ohm ==
          Catch::Approx(*without.params.rf_ohm).epsilon(1e-6));
  }

  SECTION("mismatched sample period is a shape error") {
    WaveformSet bad = ws;
    bad.dt *= 2.0;
    CHECK_THROWS_AS(estimate(m, bad, cfg), Error);
  }
}

TEST_CASE("first step equals the explicit normal-equation solve", "[estimator]") {
  const auto m = build_model(LoadTopology::GroundedWyeRL, FaultHypothesis::line_line(0), 10, 1e-4);
  const auto x_true = test::consistent_state(m);
  const auto ws = test::waveform_for_state(m, x_true);

  // perturb with a ripple so every trajectory column carries information
  StateVector x0 = x_true;
  x0.values *= 1.05;
  for (int s = 0; s < m.series_count(); ++s) {
    for (int k = 0; k < m.n; ++k) x0.traj(s, k) += 3.0 * std::sin(0.7 * k + s);
  }

  SolverConfig cfg;
  cfg.max_iterations = 1;
  cfg.column_scaling = false;
  const auto r = estimate(m, ws, cfg, x0);
  REQUIRE(r.iterations == 1);

  const auto y = assemble_targets(m, ws);
  const auto eps = residual(y, model_h(m, x0));
  const auto dx = gauss_newton_step(model_jacobian(m, x0), eps, 0.0);
  const Eigen::VectorXd expected = x0.values + dx;
  CHECK((r.x_hat.values - expected).cwiseAbs().maxCoeff() <=
        1e-8 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("rank-deficient start terminates honestly", "[estimator]") {
  const auto m = build_model(LoadTopology::GroundedWyeRL, FaultHypothesis::line_line(0), 10, 1e-4);
  const auto x_true = test::consistent_state(m);
  const auto ws = test::waveform_for_state(m, x_true);

  StateVector x0 = x_true;
  x0.values.setZero();  // zero trajectories make whole Jacobian columns vanish
  SolverConfig cfg;
  cfg.max_iterations = 20;
  const auto r = estimate(m, ws, cfg, x0);
  CHECK(static_cast<int>(r.cost_trace.size()) == r.iterations);
  for (std::size_t i = 1; i < r.cost_trace.size(); ++i) {
    CHECK(r.cost_trace[i] <= r.cost_trace[i - 1]);
  }
}

TEST_CASE("parameter error shrinks as the sample period halves", "[estimator]") {
  double err_coarse = 0.0, err_fine = 0.0;
  for (double dt : {2e-5, 1e-5}) {
    Scenario s = reference_scenario(LoadTopology::GroundedWyeRL, FaultHypothesis::line_ground(0));
    s.dt_out = dt;
    s.t_end = 0.34;
    const auto sim = simulate(s);
    const auto ws = window(sim.waveform, 0.3, 0.33);
    const auto m = build_model(s.topology, s.hypothesis, static_cast<int>(ws.n()), ws.dt);
    SolverConfig cfg;
    cfg.max_iterations = 200;
    cfg.cost_delta_tol = 1e-12;
    const auto r = estimate(m, ws, cfg);
    const double err = std::abs(r.params.l_h - 9.779e-3) / 9.779e-3;
    (dt == 2e-5 ? err_coarse : err_fine) = err;
  }
  CHECK(err_fine < err_coarse);
  CHECK(err_fine < 1e-9);
}
