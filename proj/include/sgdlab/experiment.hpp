#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdlab/montecarlo.hpp"
#include "sgdlab/problem.hpp"
#include "sgdlab/schedule.hpp"

namespace sgdlab {

enum class ExperimentKind { ScheduleTrace, ExactCurve, McSweep, BoundsTable, Fig2, Rates, Compare };

ExperimentKind experiment_kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

/// Schedule shape whose gamma0 and N are filled in per sweep cell. The hold
/// length is either fixed (`hold`) or a fraction of N (`hold_fraction`); a
/// missing K means default_phase_length(N, s).
struct ScheduleTemplate {
  std::string label;
  ScheduleKind kind = ScheduleKind::TailGeometric;
  std::optional<long> hold;
  double hold_fraction = 0.5;
  std::optional<long> phase;
  double exponent = 1.0;
  std::optional<double> gamma0;
  std::optional<long> horizon;

  Schedule instantiate(double gamma0, long N) const;
};

struct NamedInstance {
  std::string id;
  ProblemInstance instance;
};

/// The 18-value initial-stepsize grid used for grid-best selection.
std::vector<double> default_gamma0_grid();

/// d = 256, sigma^2 = 1, w0 = 0; spectra i^-1 and i^-2 crossed with targets
/// 1, i^-1, i^-2.
std::vector<NamedInstance> fig2_instances();

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ScheduleTrace;
  std::vector<NamedInstance> instances;
  std::vector<ScheduleTemplate> schedules;
  std::vector<long> horizons;
  std::vector<double> gamma0_grid;
  SimConfig sim;
  std::string output_path;
};

/// Parses a config document, applying the per-kind defaults for anything
/// omitted. Throws ValidationError with a field path ("config.N[2]: ...").
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentKind kind);
ExperimentConfig default_config(ExperimentKind kind);

/// Writes the experiment's CSV (or JSON for bounds_table) to `out`.
/// `rates` also writes the fit as a trailing JSON document to `fit_out` when
/// given.
void run_experiment(const ExperimentConfig& config, std::ostream& out,
                    std::ostream* fit_out = nullptr);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

struct RatePoint {
  long n = 0;
  double risk = 0.0;
};

/// Least squares on (log2 N, log2 risk). Needs >= 3 points, strictly
/// increasing N and positive risks; otherwise DomainError.
RateFit fit_rate(std::span<const RatePoint> points);

struct RateRow {
  long n = 0;
  double gamma0 = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double excess_risk = 0.0;
};

/// Exact final risk per N under `shape`, with gamma0 from the template or,
/// when unset, 1 / (4 alpha tr(H) log2 N).
std::vector<RateRow> exact_rate_curve(const ProblemInstance& instance,
                                      const ScheduleTemplate& shape, std::span<const long> horizons);

enum class Fig2Variant { TailAverage, ExpDecay, TailExpDecay, TailPolyDecay };
std::string to_string(Fig2Variant variant);

struct Fig2Row {
  std::string instance_id;
  Fig2Variant variant = Fig2Variant::TailAverage;
  long n = 0;
  std::optional<double> best_gamma0;  // empty when every grid value diverged
  McEstimate best;
};

/// Grid-best Monte Carlo risk per (instance, N, variant), in that nesting
/// order. Ties keep the smaller gamma0.
std::vector<Fig2Row> fig2_grid_best(std::span<const NamedInstance> instances,
                                    std::span<const long> horizons,
                                    std::span<const double> gamma0_grid, const SimConfig& sim);

}  // namespace sgdlab
