#include <doctest.h>

#include <cmath>

#include "sgdlab/errors.hpp"
#include "sgdlab/montecarlo.hpp"
#include "sgdlab/oracle.hpp"
#include "sgdlab/rng.hpp"

using namespace sgdlab;

TEST_CASE("counter rng is a pure function of key and counter") {
  CounterRng a = CounterRng::substream(7, 3);
  CounterRng b = CounterRng::substream(7, 3);
  CounterRng c = CounterRng::substream(7, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  double sum = 0.0, sum_sq = 0.0;
  CounterRng n = CounterRng::substream(1, 0);
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double z = n.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::fabs(sum / count) < 0.01);
  CHECK(std::fabs(sum_sq / count - 1.0) < 0.02);
}

TEST_CASE("starting at the optimum without noise stays there") {
  const ProblemInstance inst(make_spectrum(SpectrumKind::Poly, 16, 1.0), make_target(TargetKind::Inv, 16),
                             make_target(TargetKind::Inv, 16), 0.0);
  SimConfig cfg;
  cfg.master_seed = 11;
  const auto w = run_sgd(inst, Schedule::tail_geometric(0.1, 300, 150, 20), cfg, 0);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == inst.w_star()[i]);
}

TEST_CASE("run_sgd is deterministic in seed and run index") {
  const ProblemInstance inst(make_spectrum(SpectrumKind::Exp, 8, 0.0), std::vector<double>(8, 1.0),
                             std::vector<double>(8, 0.0), 1.0);
  const auto sched = Schedule::tail_geometric(0.2, 256, 128, 30);
  SimConfig cfg;
  cfg.master_seed = 42;
  CHECK(run_sgd(inst, sched, cfg, 3) == run_sgd(inst, sched, cfg, 3));
  CHECK(run_sgd(inst, sched, cfg, 3) != run_sgd(inst, sched, cfg, 4));
  cfg.output = IterateOutput::TailAverage;
  CHECK(run_sgd(inst, sched, cfg, 3) == run_sgd(inst, sched, cfg, 3));
}

TEST_CASE("estimate_excess_risk") {
  const ProblemInstance inst(make_spectrum({1.0, 0.5}), {1.0, 2.0}, {0.0, 0.0}, 1.0);
  const std::vector<double> w{0.0, 0.0};
  CHECK(estimate_excess_risk(inst, w) == 1.5);  // (1 + 0.5 * 4) / 2
  const std::vector<double> at_opt{1.0, 2.0};
  CHECK(estimate_excess_risk(inst, at_opt) == 0.0);
  for (double c : {0.5, 2.0, 3.0}) {
    const std::vector<double> scaled{1.0 + c * 0.3, 2.0 - c * 0.7};
    const std::vector<double> unit{1.3, 1.3};
    CHECK(estimate_excess_risk(inst, scaled) ==
          doctest::Approx(c * c * estimate_excess_risk(inst, unit)).epsilon(1e-13));
  }
  const std::vector<double> short_w{1.0};
  CHECK_THROWS_AS(estimate_excess_risk(inst, short_w), ValidationError);
}

TEST_CASE("mc_risk reduction") {
  const ProblemInstance inst(make_spectrum(SpectrumKind::Poly, 8, 1.0), std::vector<double>(8, 1.0),
                             std::vector<double>(8, 0.0), 1.0);
  const auto sched = Schedule::tail_geometric(0.1, 128, 64, 16);
  SimConfig cfg;
  cfg.master_seed = 9;
  const auto single = mc_risk(inst, sched, cfg);
  CHECK(single.std_error == 0.0);
  CHECK(single.runs == 1);

  cfg.runs = 64;
  cfg.threads = 1;
  const auto serial = mc_risk(inst, sched, cfg);
  cfg.threads = 5;
  const auto threaded = mc_risk(inst, sched, cfg);
  CHECK(serial.mean == threaded.mean);
  CHECK(serial.std_error == threaded.std_error);
  CHECK(serial.std_error > 0.0);

  cfg.runs = 0;
  CHECK_THROWS_AS(mc_risk(inst, sched, cfg), ValidationError);
}

TEST_CASE("divergent runs are flagged, not averaged") {
  const ProblemInstance inst(make_spectrum({1.0, 1.0}), {1.0, 1.0}, {0.0, 0.0}, 1.0);
  SimConfig cfg;
  cfg.runs = 4;
  const auto est = mc_risk(inst, Schedule::constant(5.0, 2000), cfg);
  CHECK(est.diverged);
  CHECK(std::isinf(est.mean));
  REQUIRE(est.divergence_step.has_value());
  CHECK(*est.divergence_step >= 1);
  CHECK(*est.divergence_gamma == 5.0);
}

TEST_CASE("Monte Carlo mean agrees with the exact oracle") {
  const ProblemInstance inst(make_spectrum(SpectrumKind::Poly, 16, 1.0), std::vector<double>(16, 1.0),
                             std::vector<double>(16, 0.0), 1.0);
  const long n = 1024;
  const long s = n / 2;
  const long k = default_phase_length(n, s);
  const auto sched = Schedule::tail_geometric(0.5 * max_initial_stepsize(inst, s, k), n, s, k);
  const double exact = exact_trajectory(inst, sched).excess_risk.back();
  SimConfig cfg;
  cfg.runs = 1000;
  cfg.master_seed = 2024;
  cfg.threads = 4;
  const auto est = mc_risk(inst, sched, cfg);
  CHECK(std::fabs(est.mean - exact) <= 4.0 * est.std_error);
}

TEST_CASE("Gaussian fourth moment") {
  const ProblemInstance one(make_spectrum({1.0}), {0.0}, {0.0}, 1.0);
  const std::vector<double> a{1.0};
  // E[x^4] = 3 for a standard normal.
  CHECK(verify_fourth_moment(one, a, 100000, 5) < 0.05);
  const std::vector<double> zero{0.0};
  CHECK(verify_fourth_moment(one, zero, 1000, 5) == 0.0);

  const ProblemInstance four(make_spectrum({1.0, 0.5, 0.25, 0.125}), std::vector<double>(4, 0.0),
                             std::vector<double>(4, 0.0), 1.0);
  CHECK(verify_fourth_moment(four, 100000, 17) < 0.05);
}

TEST_CASE("stochastic gradient is unbiased") {
  const ProblemInstance inst(make_spectrum({1.0, 0.5, 0.1}), {1.0, -1.0, 2.0}, {0.0, 0.0, 0.0}, 1.0);
  const std::vector<double> w{0.5, 0.5, 0.5};
  const auto g = sample_gradient(inst, w, 200000, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double expected = inst.spectrum()[i] * (inst.w_star()[i] - w[i]);
    CHECK(std::fabs(g.mean[i] - expected) <= 5.0 * g.std_error[i]);
  }
}
