#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sgdlab/problem.hpp"
#include "sgdlab/schedule.hpp"

namespace sgdlab {

enum class IterateOutput { Last, TailAverage };

struct SimConfig {
  std::size_t runs = 1;
  std::uint64_t master_seed = 0;
  IterateOutput output = IterateOutput::Last;
  // First averaged iterate index for TailAverage; defaults to N/2.
  std::optional<long> average_from;
  unsigned threads = 1;
};

/// Per-coordinate magnitude above which a run is declared divergent.
inline constexpr double kDivergenceThreshold = 1e300;

/// One SGD trajectory on fresh Gaussian samples x_i = sqrt(lambda_i) z_i,
/// y = <w*, x> + sigma eps. Returns w_N, or the mean of w_s..w_{N-1} for
/// TailAverage. Deterministic in (master_seed, run_index).
/// Throws DivergenceError when any |w_i| exceeds kDivergenceThreshold.
std::vector<double> run_sgd(const ProblemInstance& instance, const Schedule& schedule,
                            const SimConfig& config, std::size_t run_index);

/// (1/2) sum_i lambda_i (w_i - w*_i)^2.
double estimate_excess_risk(const ProblemInstance& instance, std::span<const double> w);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t runs = 0;
  bool diverged = false;
  // First divergent run, in run_index order.
  std::optional<long> divergence_step;
  std::optional<double> divergence_gamma;
};

/// Sample mean and standard error of the excess risk over config.runs
/// independent runs. The reduction is in run_index order, so the result does
/// not depend on config.threads.
McEstimate mc_risk(const ProblemInstance& instance, const Schedule& schedule,
                   const SimConfig& config);

/// Max relative error, over diagonal entries, between a Monte Carlo estimate
/// of E[x x^T A x x^T] and 2 H A H + tr(HA) H for diagonal PSD A. Off-diagonal
/// entries are identically zero in the closed form and are skipped by the
/// relative-error threshold.
double verify_fourth_moment(const ProblemInstance& instance, std::span<const double> a_diagonal,
                            std::size_t samples, std::uint64_t seed);

/// Same, with A drawn uniformly from [0, 1]^d using `seed`.
double verify_fourth_moment(const ProblemInstance& instance, std::size_t samples,
                            std::uint64_t seed);

/// Mean and standard error of the stochastic gradient direction
/// (y - <w, x>) x at a fixed w, for checking E[.] = H (w* - w).
struct GradientEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
};

GradientEstimate sample_gradient(const ProblemInstance& instance, std::span<const double> w,
                                 std::size_t samples, std::uint64_t seed);

}  // namespace sgdlab
