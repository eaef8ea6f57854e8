#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sgdlab/errors.hpp"
#include "sgdlab/oracle.hpp"

using namespace sgdlab;

namespace {

ProblemInstance unit_instance(double sigma2, double w0) {
  return ProblemInstance(make_spectrum({1.0}), {0.0}, {w0}, sigma2);
}

// Dense d x d matrix stored row-major.
using Dense = std::vector<double>;

// B - g (HB + BH) + g^2 (2 HBH + tr(HB) H) for diagonal H.
Dense dense_step(const Dense& b, const std::vector<double>& h, double g, std::size_t d) {
  double tr_hb = 0.0;
  for (std::size_t i = 0; i < d; ++i) tr_hb += h[i] * b[i * d + i];
  Dense out(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double bij = b[i * d + j];
      double v = bij - g * (h[i] * bij + bij * h[j]) + g * g * 2.0 * h[i] * bij * h[j];
      if (i == j) v += g * g * tr_hb * h[i];
      out[i * d + j] = v;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("step on one coordinate") {
  const auto inst = unit_instance(0.0, 1.0);
  const auto next = step(initial_state(inst), 0.1, inst);
  CHECK(next.b[0] == doctest::Approx(0.83).epsilon(1e-15));
  CHECK(next.c[0] == 0.0);
  CHECK(next.t == 1);

  // Agrees with E[(1 - g x^2)^2] = 1 - 2 g + 3 g^2 for x ~ N(0, 1).
  for (double g : {0.01, 0.2, 0.5}) {
    CHECK(step(initial_state(inst), g, inst).b[0] ==
          doctest::Approx(1.0 - 2.0 * g + 3.0 * g * g).epsilon(1e-14));
  }

  const auto noisy = unit_instance(1.0, 0.0);
  CHECK(step(initial_state(noisy), 0.1, noisy).c[0] == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("zero state is a fixed point without noise") {
  const ProblemInstance inst(make_spectrum(SpectrumKind::Poly, 8, 1.0), std::vector<double>(8, 0.3),
                             std::vector<double>(8, 0.3), 0.0);
  RiskState state = initial_state(inst);
  for (int t = 0; t < 5; ++t) state = step(state, 0.4, inst);
  CHECK(state.t == 5);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(state.b[i] == 0.0);
    CHECK(state.c[i] == 0.0);
  }
}

TEST_CASE("exact_trajectory small cases") {
  const auto inst = unit_instance(0.0, 1.0);
  const auto traj = exact_trajectory(inst, Schedule::constant(0.1, 1));
  REQUIRE(traj.horizon() == 1);
  CHECK(traj.excess_risk[0] == 0.5);
  CHECK(traj.excess_risk[1] == doctest::Approx(0.415).epsilon(1e-15));
  CHECK(traj.gamma[0] == 0.0);
  CHECK(traj.gamma[1] == 0.1);

  const ProblemInstance twin(make_spectrum({1.0, 1.0}), {0.5, -0.5}, {0.5, -0.5}, 1.0);
  const auto twin_traj = exact_trajectory(twin, Schedule::constant(0.1, 1));
  CHECK(twin_traj.variance[1] == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(twin_traj.bias[1] == 0.0);
  CHECK(twin_traj.excess_risk[1] == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("w0 = w* and sigma2 = 0 keeps the risk at zero") {
  const ProblemInstance inst(make_spectrum(SpectrumKind::Exp, 12, 0.0), make_target(TargetKind::Inv, 12),
                             make_target(TargetKind::Inv, 12), 0.0);
  const auto traj = exact_trajectory(inst, Schedule::tail_geometric(0.3, 200, 100, 20));
  for (double r : traj.excess_risk) REQUIRE(r == 0.0);
}

TEST_CASE("non-Gaussian instances are routed to Monte Carlo") {
  const ProblemInstance inst(make_spectrum({1.0}), {1.0}, {0.0}, 1.0, 5.0, 1.0);
  CHECK_THROWS_AS(exact_trajectory(inst, Schedule::constant(0.1, 3)), UnsupportedModelError);
  CHECK_THROWS_AS(step(initial_state(inst), 0.1, inst), UnsupportedModelError);
}

TEST_CASE("diagonal recursion matches the dense matrix recursion") {
  std::mt19937_64 gen(20261016);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (std::size_t d = 1; d <= 8; ++d) {
    std::vector<double> h(d);
    for (auto& v : h) v = unif(gen);
    std::sort(h.begin(), h.end(), std::greater<>());
    // Random PSD B0 = G G^T, generally non-diagonal.
    Dense g(d * d);
    for (auto& v : g) v = normal(gen);
    Dense b(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) b[i * d + j] += g[i * d + k] * g[j * d + k];

    RiskState state;
    state.b.resize(d);
    state.c.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) state.b[i] = b[i * d + i];
    const ProblemInstance inst(make_spectrum(h), std::vector<double>(d, 0.0),
                               std::vector<double>(d, 0.0), 0.0);
    const auto sched = Schedule::tail_geometric(0.3, 60, 20, 10);
    for (long t = 1; t <= sched.horizon(); ++t) {
      b = dense_step(b, h, sched.at(t), d);
      state = step(state, sched.at(t), inst);
    }
    for (std::size_t i = 0; i < d; ++i) {
      CHECK(state.b[i] == doctest::Approx(b[i * d + i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant-stepsize variance stays below the crude ceiling") {
  for (double r : {0.5, 1.0}) {
    const auto h = make_spectrum(SpectrumKind::Poly, 64, r);
    const ProblemInstance inst(h, std::vector<double>(64, 0.0), std::vector<double>(64, 0.0), 1.0);
    for (double frac : {0.1, 0.5, 0.9}) {
      const double gamma = frac / (3.0 * h.trace());
      const double ceiling = gamma * h.trace() / (1.0 - 3.0 * gamma * h.trace());
      const auto traj = exact_trajectory(inst, Schedule::constant(gamma, 2000));
      for (long t = 1; t < traj.horizon(); ++t) {
        REQUIRE(traj.variance[t] <= ceiling + 1e-9);
        REQUIRE(traj.variance[t + 1] >= traj.variance[t]);
      }
    }
  }
}

TEST_CASE("trajectory CSV layout") {
  const auto inst = unit_instance(1.0, 1.0);
  std::ostringstream out;
  write_trajectory_csv(out, exact_trajectory(inst, Schedule::constant(0.5, 2)));
  const std::string text = out.str();
  CHECK(text.rfind("t,gamma_t,bias,variance,excess_risk\n0,0,1,0,0.5\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("weighted_trace") {
  const auto h = make_spectrum({2.0, 1.0, 0.5});
  CHECK(weighted_trace(h, {1.0, 2.0, 4.0}) == 6.0);
}
