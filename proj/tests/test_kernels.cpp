#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dse/kernels.hpp"
#include "test_support.hpp"

using namespace dse;

TEST_CASE("serial and parallel kernels agree bitwise", "[kernels]") {
  std::mt19937_64 rng(42);
  for (const auto& [topo, hyp] : test::all_bank_models()) {
    const auto m = build_model(topo, hyp, 40, 1e-4);
    const auto x = test::random_state(m, rng);
    INFO(topology_name(topo) << "/" << hyp.label());

    Eigen::VectorXd h_serial, h_parallel;
    eval_h(m, x, h_serial, ExecMode::Serial);
    eval_h(m, x, h_parallel, ExecMode::Parallel);
    CHECK(h_serial == h_parallel);

    Eigen::VectorXd eps = Eigen::VectorXd::LinSpaced(m.output_dim(), -1.0, 1.0);
    NormalSystem serial, parallel;
    assemble_normal_system(m, x, eps, serial, ExecMode::Serial);
    assemble_normal_system(m, x, eps, parallel, ExecMode::Parallel);
    CHECK(serial.htr == parallel.htr);
    CHECK(Eigen::MatrixXd(serial.hth) == Eigen::MatrixXd(parallel.hth));
  }
}

TEST_CASE("normal system matches the explicit jacobian", "[kernels]") {
  std::mt19937_64 rng(43);
  const auto m = build_model(LoadTopology::DeltaRL, FaultHypothesis::line_ground(1), 24, 1e-4);
  const auto x = test::random_state(m, rng);
  Eigen::VectorXd eps = Eigen::VectorXd::Random(m.output_dim());

  NormalSystem ns;
  assemble_normal_system(m, x, eps, ns, ExecMode::Serial);

  const Eigen::SparseMatrix<double> jac = model_jacobian(m, x);
  const Eigen::MatrixXd expected_a = Eigen::MatrixXd(jac.transpose() * jac);
  const Eigen::VectorXd expected_g = jac.transpose() * eps;

  const double a_scale = expected_a.cwiseAbs().maxCoeff();
  const double g_scale = expected_g.cwiseAbs().maxCoeff();
  CHECK((Eigen::MatrixXd(ns.hth) - expected_a).cwiseAbs().maxCoeff() <= 1e-12 * a_scale);
  CHECK((ns.htr - expected_g).cwiseAbs().maxCoeff() <= 1e-12 * g_scale);
}

TEST_CASE("normal system keeps the full diagonal in its pattern", "[kernels]") {
  const auto m = build_model(LoadTopology::GroundedWyeRL, FaultHypothesis::line_line(2), 12, 1e-4);
  StateVector x;
  x.param_count = m.param_count;
  x.n = m.n;
  x.values = Eigen::VectorXd::Zero(m.state_dim());  // zero state: many zero columns
  x.values[kParamG] = 0.1;
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(m.output_dim());
  NormalSystem ns;
  assemble_normal_system(m, x, eps, ns, ExecMode::Serial);
  for (int j = 0; j < m.state_dim(); ++j) {
    bool found = false;
    for (Eigen::SparseMatrix<double>::InnerIterator it(ns.hth, j); it; ++it) {
      if (it.row() == j) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("mode resolution", "[kernels]") {
  CHECK(use_parallel(ExecMode::Serial, 1u << 20) == false);
  CHECK(use_parallel(ExecMode::Parallel, 4) == true);
  CHECK(use_parallel(ExecMode::Auto, 16) == false);
}
