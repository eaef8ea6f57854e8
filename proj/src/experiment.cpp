#include "sgdlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "sgdlab/bounds.hpp"
#include "sgdlab/csv.hpp"
#include "sgdlab/errors.hpp"
#include "sgdlab/json_io.hpp"
#include "sgdlab/oracle.hpp"

namespace sgdlab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

ScheduleTemplate make_template(std::string label, ScheduleKind kind, std::optional<long> hold,
                               double fraction, double exponent = 1.0) {
  ScheduleTemplate t;
  t.label = std::move(label);
  t.kind = kind;
  t.hold = hold;
  t.hold_fraction = fraction;
  t.exponent = exponent;
  return t;
}

std::vector<ScheduleTemplate> fig1_schedules() {
  return {
      make_template("exp_decay", ScheduleKind::TailGeometric, 0, 0.0),
      make_template("tail_exp_decay", ScheduleKind::TailGeometric, std::nullopt, 0.5),
      make_template("tail_poly_decay_sqrt", ScheduleKind::TailPolynomial, std::nullopt, 0.5, 0.5),
      make_template("tail_poly_decay_inv", ScheduleKind::TailPolynomial, std::nullopt, 0.5, 1.0),
  };
}

NamedInstance default_instance() {
  return {"poly1_d64", ProblemInstance(make_spectrum(SpectrumKind::Poly, 64, 1.0),
                                       make_target(TargetKind::Ones, 64),
                                       std::vector<double>(64, 0.0), 1.0)};
}

ScheduleTemplate template_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  if (!doc.contains("variant") || !doc["variant"].is_string()) {
    fail(path + ".variant", "missing or not a string");
  }
  ScheduleTemplate t;
  try {
    t.kind = schedule_kind_from_string(doc["variant"].get<std::string>());
  } catch (const std::exception& e) {
    fail(path + ".variant", e.what());
  }
  t.label = doc.value("label", to_string(t.kind));
  auto read_int = [&](const char* key) -> std::optional<long> {
    if (!doc.contains(key)) return std::nullopt;
    if (!doc[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return doc[key].get<long>();
  };
  auto read_real = [&](const char* key) -> std::optional<double> {
    if (!doc.contains(key)) return std::nullopt;
    if (!doc[key].is_number()) fail(path + "." + key, "expected a number");
    return doc[key].get<double>();
  };
  t.hold = read_int("s");
  t.hold_fraction = read_real("s_fraction").value_or(0.5);
  if (!(t.hold_fraction >= 0.0 && t.hold_fraction <= 1.0)) {
    fail(path + ".s_fraction", "must lie in [0, 1]");
  }
  t.phase = read_int("K");
  t.exponent = read_real("a").value_or(1.0);
  t.gamma0 = read_real("gamma0");
  t.horizon = read_int("N");
  if (t.gamma0 && !(*t.gamma0 > 0.0)) fail(path + ".gamma0", "must be positive");
  return t;
}

template <typename T>
std::vector<T> list_from_json(const json& doc, const std::string& path) {
  if (!doc.is_array() || doc.empty()) fail(path, "expected a non-empty array");
  std::vector<T> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    if constexpr (std::is_integral_v<T>) {
      if (!doc[i].is_number_integer() || doc[i].get<long>() < 1) fail(item, "expected a positive integer");
    } else {
      if (!doc[i].is_number() || !(doc[i].get<double>() > 0.0)) fail(item, "expected a positive number");
    }
    out.push_back(doc[i].get<T>());
  }
  return out;
}

NamedInstance named_instance_from_json(const json& doc, const std::string& path, std::size_t index) {
  std::string id = "instance" + std::to_string(index);
  if (doc.is_object() && doc.contains("id")) {
    if (!doc["id"].is_string()) fail(path + ".id", "expected a string");
    id = doc["id"].get<std::string>();
  }
  return {id, instance_from_json(doc, path)};
}

void write_schedule_trace(const ExperimentConfig& config, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"schedule", "t", "gamma_t"});
  for (const auto& shape : config.schedules) {
    const double gamma0 = shape.gamma0.value_or(config.gamma0_grid.front());
    const long n = shape.horizon.value_or(config.horizons.front());
    const Schedule schedule = shape.instantiate(gamma0, n);
    for (long t = 1; t <= n; ++t) csv.row(shape.label, t, schedule.at(t));
  }
}

void write_exact_curve(const ExperimentConfig& config, std::ostream& out) {
  const auto& shape = config.schedules.front();
  const Schedule schedule = shape.instantiate(shape.gamma0.value_or(config.gamma0_grid.front()),
                                              shape.horizon.value_or(config.horizons.front()));
  write_trajectory_csv(out, exact_trajectory(config.instances.front().instance, schedule));
}

void write_mc_sweep(const ExperimentConfig& config, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"instance_id", "schedule", "gamma0", "N", "runs", "mean", "stderr", "diverged"});
  for (const auto& named : config.instances) {
    for (const auto& shape : config.schedules) {
      for (long n : config.horizons) {
        for (double gamma0 : config.gamma0_grid) {
          const McEstimate est = mc_risk(named.instance, shape.instantiate(gamma0, n), config.sim);
          csv.row(named.id, shape.label, gamma0, n, est.runs, est.mean, est.std_error, est.diverged);
        }
      }
    }
  }
}

void write_bounds_table(const ExperimentConfig& config, std::ostream& out) {
  json rows = json::array();
  for (const auto& named : config.instances) {
    for (const auto& shape : config.schedules) {
      for (long n : config.horizons) {
        for (double gamma0 : config.gamma0_grid) {
          const Schedule schedule = shape.instantiate(gamma0, n);
          json row{{"instance_id", named.id},
                   {"schedule_label", shape.label},
                   {"schedule", schedule_to_json(schedule)}};
          if (schedule.kind() == ScheduleKind::TailGeometric) {
            row["upper"] = bound_report_to_json(upper_bound_geo(named.instance, schedule));
            row["lower"] = bound_report_to_json(lower_bound_geo(named.instance, schedule));
          } else if (schedule.kind() == ScheduleKind::TailPolynomial) {
            row["lower"] = bound_report_to_json(lower_bound_poly(named.instance, schedule));
          }
          if (named.instance.is_gaussian()) {
            const auto traj = exact_trajectory(named.instance, schedule);
            row["oracle"] = json{{"bias", traj.bias.back()},
                                 {"variance", traj.variance.back()},
                                 {"excess_risk", traj.excess_risk.back()}};
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  out << rows.dump(2) << '\n';
}

void write_fig2(const ExperimentConfig& config, std::ostream& out) {
  const auto rows = fig2_grid_best(config.instances, config.horizons, config.gamma0_grid, config.sim);
  CsvWriter csv(out);
  csv.header({"instance_id", "variant", "N", "best_gamma0", "mean", "stderr", "runs", "diverged"});
  for (const auto& row : rows) {
    const bool none = !row.best_gamma0.has_value();
    csv.row(row.instance_id, to_string(row.variant), row.n,
            none ? std::string("nan") : CsvWriter::format(*row.best_gamma0), row.best.mean,
            row.best.std_error, row.best.runs, none);
  }
}

void write_rates(const ExperimentConfig& config, std::ostream& out, std::ostream* fit_out) {
  const auto rows =
      exact_rate_curve(config.instances.front().instance, config.schedules.front(), config.horizons);
  CsvWriter csv(out);
  csv.header({"N", "gamma0", "bias", "variance", "excess_risk"});
  std::vector<RatePoint> points;
  for (const auto& r : rows) {
    csv.row(r.n, r.gamma0, r.bias, r.variance, r.excess_risk);
    points.push_back({r.n, r.excess_risk});
  }
  if (fit_out != nullptr) {
    const RateFit fit = fit_rate(points);
    *fit_out << json{{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}}
                    .dump(2)
             << '\n';
  }
}

void write_compare(const ExperimentConfig& config, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"instance_id", "N", "gamma0", "k_dagger", "R_N", "exp_risk", "poly_risk"});
  for (const auto& named : config.instances) {
    for (long n : config.horizons) {
      for (double gamma0 : config.gamma0_grid) {
        const auto cmp = comparison_ratio(named.instance, gamma0, n);
        csv.row(named.id, n, gamma0, cmp.k_dagger, cmp.ratio, cmp.exp_risk, cmp.poly_risk);
      }
    }
  }
}

}  // namespace

Schedule ScheduleTemplate::instantiate(double gamma0, long N) const {
  if (kind == ScheduleKind::Constant) return Schedule::constant(gamma0, N);
  const long s = hold.value_or(static_cast<long>(std::floor(hold_fraction * static_cast<double>(N))));
  if (kind == ScheduleKind::TailGeometric) {
    return Schedule::tail_geometric(gamma0, N, s, phase.value_or(default_phase_length(N, s)));
  }
  return Schedule::tail_polynomial(gamma0, N, s, exponent);
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "schedule_trace") return ExperimentKind::ScheduleTrace;
  if (name == "exact_curve") return ExperimentKind::ExactCurve;
  if (name == "mc_sweep") return ExperimentKind::McSweep;
  if (name == "bounds_table") return ExperimentKind::BoundsTable;
  if (name == "fig2") return ExperimentKind::Fig2;
  if (name == "rates") return ExperimentKind::Rates;
  if (name == "compare") return ExperimentKind::Compare;
  throw ValidationError("unknown experiment '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ScheduleTrace: return "schedule_trace";
    case ExperimentKind::ExactCurve: return "exact_curve";
    case ExperimentKind::McSweep: return "mc_sweep";
    case ExperimentKind::BoundsTable: return "bounds_table";
    case ExperimentKind::Fig2: return "fig2";
    case ExperimentKind::Rates: return "rates";
    case ExperimentKind::Compare: return "compare";
  }
  return "unknown";
}

std::string to_string(Fig2Variant variant) {
  switch (variant) {
    case Fig2Variant::TailAverage: return "tail_average";
    case Fig2Variant::ExpDecay: return "exp_decay";
    case Fig2Variant::TailExpDecay: return "tail_exp_decay";
    case Fig2Variant::TailPolyDecay: return "tail_poly_decay";
  }
  return "unknown";
}

std::vector<double> default_gamma0_grid() {
  return {1e-4, 2e-4, 5e-4, 7e-4, 1e-3, 2e-3, 5e-3, 0.01,  0.02,
          0.03, 0.05, 0.075, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0};
}

std::vector<NamedInstance> fig2_instances() {
  constexpr std::size_t d = 256;
  std::vector<double> harmonic(d);
  for (std::size_t i = 0; i < d; ++i) harmonic[i] = 1.0 / static_cast<double>(i + 1);
  const Spectrum inv = make_spectrum(harmonic);
  const Spectrum inv_sq = make_spectrum(SpectrumKind::Poly, d, 1.0);

  std::vector<NamedInstance> out;
  const std::pair<const char*, const Spectrum*> spectra[] = {{"lambda_inv", &inv},
                                                             {"lambda_inv_sq", &inv_sq}};
  const TargetKind targets[] = {TargetKind::Ones, TargetKind::Inv, TargetKind::InvSq};
  for (const auto& [name, spectrum] : spectra) {
    for (TargetKind target : targets) {
      out.push_back({std::string(name) + "_w_" + to_string(target),
                     ProblemInstance(*spectrum, make_target(target, d), std::vector<double>(d, 0.0), 1.0)});
    }
  }
  return out;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig config;
  config.kind = kind;
  config.gamma0_grid = default_gamma0_grid();
  config.sim.runs = 20;
  config.output_path = to_string(kind) + (kind == ExperimentKind::BoundsTable ? ".json" : ".csv");
  switch (kind) {
    case ExperimentKind::ScheduleTrace:
      config.schedules = fig1_schedules();
      config.horizons = {4096};
      config.gamma0_grid = {1.0};
      break;
    case ExperimentKind::ExactCurve:
      config.instances = {default_instance()};
      config.schedules = {make_template("tail_exp_decay", ScheduleKind::TailGeometric, std::nullopt, 0.5)};
      config.horizons = {4096};
      config.gamma0_grid = {0.01};
      break;
    case ExperimentKind::McSweep:
    case ExperimentKind::BoundsTable:
      config.instances = {default_instance()};
      config.schedules = {make_template("tail_exp_decay", ScheduleKind::TailGeometric, std::nullopt, 0.5)};
      config.horizons = {512, 1024, 2048, 4096};
      break;
    case ExperimentKind::Fig2:
      config.instances = fig2_instances();
      config.horizons = {512, 1024, 2048, 4096};
      break;
    case ExperimentKind::Rates: {
      const std::size_t d = 4096;
      config.instances = {{"poly1_d4096",
                           ProblemInstance(make_spectrum(SpectrumKind::Poly, d, 1.0),
                                           make_target(TargetKind::Ones, d), std::vector<double>(d, 0.0), 1.0)}};
      config.schedules = {make_template("tail_exp_decay", ScheduleKind::TailGeometric, std::nullopt, 0.5)};
      config.horizons = {1024, 2048, 4096, 8192, 16384};
      break;
    }
    case ExperimentKind::Compare:
      config.instances = {default_instance()};
      config.horizons = {512, 1024, 2048, 4096};
      break;
  }
  return config;
}

ExperimentConfig config_from_json(const json& doc, ExperimentKind kind) {
  const std::string root = "config";
  if (!doc.is_object()) fail(root, "expected an object");
  ExperimentConfig config = default_config(kind);
  if (doc.contains("experiment")) {
    if (!doc["experiment"].is_string() || doc["experiment"].get<std::string>() != to_string(kind)) {
      fail(root + ".experiment", "does not match subcommand '" + to_string(kind) + "'");
    }
  }
  if (doc.contains("instance")) {
    config.instances = {named_instance_from_json(doc["instance"], root + ".instance", 0)};
  }
  if (doc.contains("instances")) {
    const json& list = doc["instances"];
    if (!list.is_array() || list.empty()) fail(root + ".instances", "expected a non-empty array");
    config.instances.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      config.instances.push_back(
          named_instance_from_json(list[i], root + ".instances[" + std::to_string(i) + "]", i));
    }
  }
  if (doc.contains("schedule")) {
    config.schedules = {template_from_json(doc["schedule"], root + ".schedule")};
  }
  if (doc.contains("schedules")) {
    const json& list = doc["schedules"];
    if (!list.is_array() || list.empty()) fail(root + ".schedules", "expected a non-empty array");
    config.schedules.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      config.schedules.push_back(template_from_json(list[i], root + ".schedules[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("N")) config.horizons = list_from_json<long>(doc["N"], root + ".N");
  if (doc.contains("gamma0_grid")) {
    config.gamma0_grid = list_from_json<double>(doc["gamma0_grid"], root + ".gamma0_grid");
  }
  if (doc.contains("sim")) {
    const json& sim = doc["sim"];
    const std::string path = root + ".sim";
    if (!sim.is_object()) fail(path, "expected an object");
    if (sim.contains("runs")) {
      if (!sim["runs"].is_number_integer() || sim["runs"].get<long>() < 1) fail(path + ".runs", "must be a positive integer");
      config.sim.runs = sim["runs"].get<std::size_t>();
    }
    if (sim.contains("seed")) {
      if (!sim["seed"].is_number_integer()) fail(path + ".seed", "expected an integer");
      config.sim.master_seed = sim["seed"].get<std::uint64_t>();
    }
    if (sim.contains("output")) {
      const std::string out = sim["output"].is_string() ? sim["output"].get<std::string>() : "";
      if (out == "last") {
        config.sim.output = IterateOutput::Last;
      } else if (out == "tail_average") {
        config.sim.output = IterateOutput::TailAverage;
      } else {
        fail(path + ".output", "expected \"last\" or \"tail_average\"");
      }
    }
    if (sim.contains("threads")) {
      if (!sim["threads"].is_number_integer() || sim["threads"].get<long>() < 1) fail(path + ".threads", "must be a positive integer");
      config.sim.threads = sim["threads"].get<unsigned>();
    }
  }
  if (doc.contains("output_path")) {
    if (!doc["output_path"].is_string()) fail(root + ".output_path", "expected a string");
    config.output_path = doc["output_path"].get<std::string>();
  }

  const bool needs_single = kind == ExperimentKind::ExactCurve || kind == ExperimentKind::Rates;
  if (needs_single && (config.instances.size() != 1 || config.schedules.size() != 1)) {
    fail(root, to_string(kind) + " takes exactly one instance and one schedule");
  }
  if (kind == ExperimentKind::Compare) {
    for (std::size_t i = 0; i < config.instances.size(); ++i) {
      if (!(config.instances[i].instance.sigma2() > 0.0)) {
        fail(root + ".instances[" + std::to_string(i) + "].sigma2", "compare needs sigma2 > 0");
      }
    }
  }
  return config;
}

void run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream* fit_out) {
  if (config.horizons.empty()) fail("config.N", "expected a non-empty array");
  if (config.gamma0_grid.empty()) fail("config.gamma0_grid", "expected a non-empty array");
  switch (config.kind) {
    case ExperimentKind::ScheduleTrace: return write_schedule_trace(config, out);
    case ExperimentKind::ExactCurve: return write_exact_curve(config, out);
    case ExperimentKind::McSweep: return write_mc_sweep(config, out);
    case ExperimentKind::BoundsTable: return write_bounds_table(config, out);
    case ExperimentKind::Fig2: return write_fig2(config, out);
    case ExperimentKind::Rates: return write_rates(config, out, fit_out);
    case ExperimentKind::Compare: return write_compare(config, out);
  }
}

RateFit fit_rate(std::span<const RatePoint> points) {
  if (points.size() < 3) throw DomainError("rate fit needs at least 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].risk > 0.0)) throw DomainError("rate fit needs positive risks");
    if (points[i].n < 1 || (i > 0 && points[i].n <= points[i - 1].n)) {
      throw DomainError("rate fit needs strictly increasing positive N");
    }
  }
  const double m = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += std::log2(static_cast<double>(p.n));
    my += std::log2(p.risk);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log2(static_cast<double>(p.n)) - mx;
    const double dy = std::log2(p.risk) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A constant series is fit exactly by the flat line.
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<RateRow> exact_rate_curve(const ProblemInstance& instance, const ScheduleTemplate& shape,
                                      std::span<const long> horizons) {
  std::vector<RateRow> rows;
  for (long n : horizons) {
    const double gamma0 = shape.gamma0.value_or(
        1.0 / (4.0 * instance.alpha() * instance.spectrum().trace() * std::log2(static_cast<double>(n))));
    const auto traj = exact_trajectory(instance, shape.instantiate(gamma0, n));
    rows.push_back({n, gamma0, traj.bias.back(), traj.variance.back(), traj.excess_risk.back()});
  }
  return rows;
}

std::vector<Fig2Row> fig2_grid_best(std::span<const NamedInstance> instances,
                                    std::span<const long> horizons,
                                    std::span<const double> gamma0_grid, const SimConfig& sim) {
  constexpr Fig2Variant variants[] = {Fig2Variant::TailAverage, Fig2Variant::ExpDecay,
                                      Fig2Variant::TailExpDecay, Fig2Variant::TailPolyDecay};
  std::vector<Fig2Row> rows;
  for (const auto& named : instances) {
    for (long n : horizons) {
      const long half = n / 2;
      for (Fig2Variant variant : variants) {
        SimConfig cell = sim;
        cell.output = IterateOutput::Last;
        cell.average_from.reset();
        Fig2Row row{named.id, variant, n, std::nullopt, McEstimate{}};
        row.best.runs = sim.runs;
        row.best.diverged = true;
        row.best.mean = std::numeric_limits<double>::infinity();
        row.best.std_error = std::numeric_limits<double>::infinity();
        for (double gamma0 : gamma0_grid) {
          std::optional<Schedule> schedule;
          switch (variant) {
            case Fig2Variant::TailAverage:
              schedule = Schedule::constant(gamma0, n);
              cell.output = IterateOutput::TailAverage;
              cell.average_from = half;
              break;
            case Fig2Variant::ExpDecay:
              schedule = Schedule::tail_geometric(gamma0, n, 0, default_phase_length(n, 0));
              break;
            case Fig2Variant::TailExpDecay:
              schedule = Schedule::tail_geometric(gamma0, n, half, default_phase_length(n, half));
              break;
            case Fig2Variant::TailPolyDecay:
              schedule = Schedule::tail_polynomial(gamma0, n, half, 1.0);
              break;
          }
          const McEstimate est = mc_risk(named.instance, *schedule, cell);
          if (!est.diverged && std::isfinite(est.mean) &&
              (!row.best_gamma0 || est.mean < row.best.mean)) {
            row.best_gamma0 = gamma0;
            row.best = est;
          }
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace sgdlab
