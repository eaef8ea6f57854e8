#pragma once

#include <iosfwd>
#include <vector>

#include "sgdlab/problem.hpp"
#include "sgdlab/schedule.hpp"

namespace sgdlab {

/// Diagonals of the bias and variance second-moment matrices B_t, C_t in the
/// eigenbasis: b_i = E[(eta^bias_t)_i^2], c_i = E[(eta^var_t)_i^2].
struct RiskState {
  std::vector<double> b;
  std::vector<double> c;
  long t = 0;
};

/// b_i = (w0_i - w*_i)^2, c_i = 0, t = 0.
RiskState initial_state(const ProblemInstance& instance);

/// One step of the bias/variance recursions for Gaussian features, where the
/// fourth moment is E[x x^T A x x^T] = 2 H A H + tr(HA) H. With S = sum_j
/// lambda_j b_j taken from the input state,
///
///   b_i' = (1 - 2 g lambda_i + 2 g^2 lambda_i^2) b_i + g^2 lambda_i S_b
///   c_i' = (1 - 2 g lambda_i + 2 g^2 lambda_i^2) c_i + g^2 lambda_i S_c + g^2 sigma^2 lambda_i
///
/// Throws UnsupportedModelError unless the instance is Gaussian.
RiskState step(const RiskState& state, double gamma, const ProblemInstance& instance);

/// Exact expected risk of last-iterate SGD, recorded for t = 0..N.
struct RiskTrajectory {
  std::vector<double> gamma;        // gamma[0] = 0, gamma[t] = gamma_t
  std::vector<double> bias;         // <H, B_t>
  std::vector<double> variance;     // <H, C_t>
  std::vector<double> excess_risk;  // (bias + variance) / 2

  long horizon() const noexcept { return static_cast<long>(bias.size()) - 1; }
};

RiskTrajectory exact_trajectory(const ProblemInstance& instance, const Schedule& schedule);

/// Columns t, gamma_t, bias, variance, excess_risk.
void write_trajectory_csv(std::ostream& out, const RiskTrajectory& trajectory);

/// <H, D> for a diagonal D given by its entries.
double weighted_trace(const Spectrum& spectrum, const std::vector<double>& diagonal);

}  // namespace sgdlab
