#include "sgdlab/oracle.hpp"

#include <ostream>

#include "sgdlab/csv.hpp"
#include "sgdlab/errors.hpp"
#include "sgdlab/numeric.hpp"

namespace sgdlab {

namespace {

void require_gaussian(const ProblemInstance& instance) {
  if (!instance.is_gaussian()) {
    throw UnsupportedModelError(
        "exact risk needs Gaussian features (alpha = 3, beta = 1); use Monte Carlo for other "
        "fourth-moment models");
  }
}

// In-place update; both weighted sums are read before any entry changes.
void advance(RiskState& state, double gamma, const ProblemInstance& instance) {
  const Spectrum& spectrum = instance.spectrum();
  const double s_b = weighted_trace(spectrum, state.b);
  const double s_c = weighted_trace(spectrum, state.c);
  const double g2 = gamma * gamma;
  const double noise = g2 * instance.sigma2();
  for (std::size_t i = 0; i < spectrum.dim(); ++i) {
    const double lambda = spectrum[i];
    const double gl = gamma * lambda;
    const double contraction = 1.0 - 2.0 * gl + 2.0 * gl * gl;
    state.b[i] = contraction * state.b[i] + g2 * lambda * s_b;
    state.c[i] = contraction * state.c[i] + g2 * lambda * s_c + noise * lambda;
  }
  ++state.t;
}

}  // namespace

double weighted_trace(const Spectrum& spectrum, const std::vector<double>& diagonal) {
  const std::size_t d = spectrum.dim();
  if (d > kCompensatedSumThreshold) {
    CompensatedSum sum;
    for (std::size_t i = 0; i < d; ++i) {
      sum.add(spectrum[i] * diagonal[i]);
    }
    return sum.value();
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    sum += spectrum[i] * diagonal[i];
  }
  return sum;
}

RiskState initial_state(const ProblemInstance& instance) {
  RiskState state;
  state.b = instance.initial_error();
  for (double& e : state.b) {
    e *= e;
  }
  state.c.assign(instance.dim(), 0.0);
  return state;
}

RiskState step(const RiskState& state, double gamma, const ProblemInstance& instance) {
  require_gaussian(instance);
  if (state.b.size() != instance.dim() || state.c.size() != instance.dim()) {
    throw ValidationError("risk state dimension does not match the instance");
  }
  RiskState next = state;
  advance(next, gamma, instance);
  return next;
}

RiskTrajectory exact_trajectory(const ProblemInstance& instance, const Schedule& schedule) {
  require_gaussian(instance);
  const long n = schedule.horizon();
  RiskTrajectory out;
  out.gamma.reserve(n + 1);
  out.bias.reserve(n + 1);
  out.variance.reserve(n + 1);
  out.excess_risk.reserve(n + 1);

  RiskState state = initial_state(instance);
  auto record = [&](double gamma) {
    const double bias = weighted_trace(instance.spectrum(), state.b);
    const double variance = weighted_trace(instance.spectrum(), state.c);
    out.gamma.push_back(gamma);
    out.bias.push_back(bias);
    out.variance.push_back(variance);
    out.excess_risk.push_back((bias + variance) / 2.0);
  };

  record(0.0);
  for (long t = 1; t <= n; ++t) {
    const double gamma = schedule.at(t);
    advance(state, gamma, instance);
    record(gamma);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const RiskTrajectory& trajectory) {
  CsvWriter csv(out);
  csv.header({"t", "gamma_t", "bias", "variance", "excess_risk"});
  for (std::size_t t = 0; t < trajectory.bias.size(); ++t) {
    csv.row(static_cast<long>(t), trajectory.gamma[t], trajectory.bias[t], trajectory.variance[t],
            trajectory.excess_risk[t]);
  }
}

}  // namespace sgdlab
