#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sgdlab/problem.hpp"
#include "sgdlab/schedule.hpp"

namespace sgdlab {

// Precondition flag names used in BoundReport::preconditions.
inline constexpr const char* kStepsizeCondition = "gamma0_lt_inv_3alpha_trH_log_sK";
inline constexpr const char* kPhaseAtLeastTen = "K_ge_10";
inline constexpr const char* kBelowInvLambda1 = "gamma0_lt_inv_lambda1";
inline constexpr const char* kBelowQuarterInvLambda1 = "gamma0_lt_inv_4lambda1";
inline constexpr const char* kHoldDominatesTail = "s_gamma0_ge_tail_sum";

struct Precondition {
  std::string name;
  bool ok = false;
};

/// Evaluated risk bound. Bias bounds are on <H, B_N> and variance bounds on
/// <H, C_N>; the excess risk is half their sum. A bound is absent when a
/// precondition fails.
struct BoundReport {
  std::string constants;  // which explicit constant set is in force
  std::size_t k_star = 0;
  std::size_t k_dagger = 0;
  double dim_eff = 0.0;
  std::optional<double> bias_upper;
  std::optional<double> var_upper;
  std::optional<double> bias_lower;
  std::optional<double> var_lower;
  std::vector<Precondition> preconditions;

  bool all_preconditions_hold() const;
};

/// max{k : lambda_k >= 1/(gamma0 K)}, 0 if none.
std::size_t k_star_geo(const Spectrum& spectrum, double gamma0, long K);
/// max{k : lambda_k >= 1/(gamma0 (s+K))}, 0 if none.
std::size_t k_dagger_geo(const Spectrum& spectrum, double gamma0, long s, long K);

/// D = k* + gamma0 K sum_{k*<i<=k+} lambda_i + gamma0^2 K (s+K) sum_{i>k+} lambda_i^2.
/// Throws DomainError when k_star > k_dagger or k_dagger > d.
double effective_dim_geo(const Spectrum& spectrum, double gamma0, long s, long K,
                         std::size_t k_star, std::size_t k_dagger);

/// Tail-geometric upper bound with the explicit constants
///   variance <= 8 sigma^2 / (1 - gamma0 alpha tr H) * D / K
///   bias     <= 12e <(1/(gamma0 K)) I_{0:k*} + H_{k*:inf}, (I - gamma0 H)^{2(s+K)} B_0>
///             + 108e alpha log2(s+K) <(1/(gamma0 (s+K))) I_{0:k+} + H_{k+:inf}, B_0> D / K
/// Indices default to the minimizing thresholds.
BoundReport upper_bound_geo(const ProblemInstance& instance, const Schedule& schedule,
                            std::optional<std::size_t> k_star = std::nullopt,
                            std::optional<std::size_t> k_dagger = std::nullopt);

/// Tail-geometric lower bound (needs K >= 10 and gamma0 < 1/lambda_1):
///   variance >= sigma^2 / 400 * D / K
///   bias     >= ||(I - gamma0 H)^{s+2K} (w0 - w*)||_H^2
///               + beta / 1200 * ||w0 - w*||^2_{H_{k+:inf}} * D / K
BoundReport lower_bound_geo(const ProblemInstance& instance, const Schedule& schedule);

/// Tail-polynomial lower bound, dispatching on a < 1 and a = 1. Needs
/// gamma0 < 1/(4 lambda_1) and s gamma0 >= sum_{t>s} gamma_t.
BoundReport lower_bound_poly(const ProblemInstance& instance, const Schedule& schedule);

/// Scalar function bounded above by min{2(s+K)x^2, 2x, 8/K}:
///   x (1-(1-x)^{s+K}) prod_{j=1}^{L-1} (1-x/2^j)^K
///   + sum_{l=1}^{L-1} x/2^l (1-(1-x/2^l)^K) prod_{j=l+1}^{L-1} (1-x/2^j)^K
double f_upper_form(double x, long s, long K, long L);

/// Scalar function bounded below by the piecewise envelope:
///   x/2 (1-(1-2x)^{s+K}) (1-2x)^K
///   + sum_{l=1}^{L-1} x/2^{l+1} (1-(1-x/2^{l-1})^K) (1-x/2^{l-1})^K
double f_lower_form(double x, long s, long K, long L);

double upper_envelope_f(double x, long s, long K);
/// (s+K)x^2/40 below 1/(s+K), x/40 below 1/K, 1/(400K) above. Needs K >= 10.
double lower_envelope_f(double x, long s, long K);

struct ComparisonResult {
  double ratio = 0.0;      // R(N)
  std::size_t k_dagger = 0;
  double exp_risk = 0.0;   // tail-geometric, s = N/2, default K
  double poly_risk = 0.0;  // tail-polynomial, s = N/2, a = 1
};

/// R(N) = (||w0-w*||^2_{I_{0:k+}} / (gamma0 N) + ||w0-w*||^2_{H_{k+:inf}}) / sigma^2
/// with k+ = max{k : lambda_k >= 1/(gamma0 N)}, plus the exact risks of both
/// schedules at s = N/2. Throws DomainError when sigma^2 = 0.
ComparisonResult comparison_ratio(const ProblemInstance& instance, double gamma0, long N);

}  // namespace sgdlab
