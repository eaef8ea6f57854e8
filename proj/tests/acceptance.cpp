// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sgdlab/bounds.hpp"
#include "sgdlab/experiment.hpp"
#include "sgdlab/montecarlo.hpp"
#include "sgdlab/oracle.hpp"
#include "sgdlab/rng.hpp"

using namespace sgdlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct SpectrumSpec {
  const char* name;
  SpectrumKind kind;
  double param;
};

constexpr SpectrumSpec kGridSpectra[] = {
    {"poly(1)", SpectrumKind::Poly, 1.0},
    {"poly(0.5)", SpectrumKind::Poly, 0.5},
    {"polylog(2)", SpectrumKind::PolyLog, 2.0},
    {"exp", SpectrumKind::Exp, 0.0},
};

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

ProblemInstance grid_instance(const SpectrumSpec& spec, std::size_t d, double sigma2, TargetKind target) {
  return ProblemInstance(make_spectrum(spec.kind, d, spec.param), make_target(target, d),
                         std::vector<double>(d, 0.0), sigma2);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

bool above(double lower, double value) {
  return lower <= value + 1e-12 * std::fabs(value) + 1e-300;
}

Outcome oracle_vs_monte_carlo() {
  struct Case {
    SpectrumSpec spec;
    std::size_t d;
    double sigma2;
  };
  const Case cases[] = {
      {kGridSpectra[0], 16, 0.0}, {kGridSpectra[0], 16, 1.0}, {kGridSpectra[0], 64, 0.0},
      {kGridSpectra[0], 64, 1.0}, {kGridSpectra[1], 16, 1.0}, {kGridSpectra[1], 64, 0.0},
      {kGridSpectra[3], 16, 0.0}, {kGridSpectra[3], 64, 1.0},
  };
  const long n = 1024, s = n / 2, k = default_phase_length(n, s);
  int agree = 0;
  double worst = 0.0;
  std::size_t index = 0;
  for (const auto& c : cases) {
    const auto inst = grid_instance(c.spec, c.d, c.sigma2, TargetKind::Ones);
    const auto sched = Schedule::tail_geometric(0.5 * max_initial_stepsize(inst, s, k), n, s, k);
    const double exact = exact_trajectory(inst, sched).excess_risk.back();
    SimConfig sim;
    sim.runs = 1000;
    sim.master_seed = 1000 + index++;
    sim.threads = worker_threads();
    const auto est = mc_risk(inst, sched, sim);
    const double z = std::fabs(est.mean - exact) / est.std_error;
    worst = std::max(worst, z);
    if (!est.diverged && z <= 3.0) ++agree;
  }
  return {agree >= 7, fmt("%.0f/8 within 3 stderr, worst |z| = %.2f", agree, worst)};
}

// Sandwich cells: spectra x d x sigma2 x N x targets x stepsize fractions.
Outcome bound_sandwich() {
  const double fractions[] = {0.1, 0.5, 0.99};
  long checked = 0, poly_checked = 0, violations = 0;
  std::string first_violation;
  auto note = [&](bool ok, const std::string& what) {
    if (ok) return;
    if (violations++ == 0) first_violation = what;
  };
  for (const auto& spec : kGridSpectra) {
    for (std::size_t d : {16u, 64u}) {
      for (double sigma2 : {0.0, 1.0}) {
        for (TargetKind target : {TargetKind::Ones, TargetKind::Inv}) {
          const auto inst = grid_instance(spec, d, sigma2, target);
          for (long n : {512L, 2048L}) {
            const long s = n / 2, k = default_phase_length(n, s);
            for (double frac : fractions) {
              const double g = frac * max_initial_stepsize(inst, s, k);
              const std::string cell = std::string(spec.name) + " d=" + std::to_string(d) +
                                       " sigma2=" + std::to_string(sigma2) + " N=" + std::to_string(n) +
                                       " frac=" + std::to_string(frac);
              const auto geo = Schedule::tail_geometric(g, n, s, k);
              const auto traj = exact_trajectory(inst, geo);
              const double bias = traj.bias.back(), var = traj.variance.back();
              const auto up = upper_bound_geo(inst, geo);
              const auto lo = lower_bound_geo(inst, geo);
              if (up.all_preconditions_hold() && lo.all_preconditions_hold()) {
                ++checked;
                note(above(*lo.var_lower, var), cell + " var_lower");
                note(above(var, *up.var_upper), cell + " var_upper");
                note(above(*lo.bias_lower, bias), cell + " bias_lower");
                note(above(bias, *up.bias_upper), cell + " bias_upper");
              }
              for (double a : {0.5, 1.0}) {
                const auto poly = Schedule::tail_polynomial(g, n, s, a);
                const auto report = lower_bound_poly(inst, poly);
                if (!report.all_preconditions_hold()) continue;
                ++poly_checked;
                const auto ptraj = exact_trajectory(inst, poly);
                const std::string pcell = cell + " a=" + std::to_string(a);
                note(above(*report.var_lower, ptraj.variance.back()), pcell + " poly var_lower");
                note(above(*report.bias_lower, ptraj.bias.back()), pcell + " poly bias_lower");
              }
            }
          }
        }
      }
    }
  }
  std::string detail = fmt("%.0f geometric and %.0f polynomial cells, %.0f violations", checked,
                           poly_checked, violations);
  if (violations > 0) detail += " (first: " + first_violation + ")";
  return {violations == 0 && checked > 0 && poly_checked > 0, detail};
}

Outcome scalar_envelopes() {
  long violations = 0, points = 0;
  for (long s : {0L, 128L, 1024L}) {
    for (long k : {10L, 100L, 342L}) {
      const long levels = static_cast<long>(std::floor(std::log2(static_cast<double>(k)))) + 1;
      for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, -8.0 + 8.0 * i / 999.0);
        ++points;
        if (f_upper_form(x, s, k, levels) > upper_envelope_f(x, s, k) * (1.0 + 1e-12)) ++violations;
        if (f_lower_form(x, s, k, levels) < lower_envelope_f(x, s, k) * (1.0 - 1e-12)) ++violations;
      }
    }
  }
  return {violations == 0, fmt("%.0f points over 9 cells, %.0f violations", points, violations)};
}

Outcome rate_slopes() {
  const std::vector<long> ns{1L << 10, 1L << 11, 1L << 12, 1L << 13, 1L << 14};
  ScheduleTemplate shape;
  shape.kind = ScheduleKind::TailGeometric;
  auto slope_of = [&](const ProblemInstance& inst) {
    std::vector<RatePoint> points;
    for (const auto& row : exact_rate_curve(inst, shape, ns)) points.push_back({row.n, row.excess_risk});
    return fit_rate(points).slope;
  };
  const std::size_t d = 4096;
  const ProblemInstance poly(make_spectrum(SpectrumKind::Poly, d, 1.0), make_target(TargetKind::Ones, d),
                             std::vector<double>(d, 0.0), 1.0);
  const ProblemInstance geometric(make_spectrum(SpectrumKind::Exp, 64, 0.0), make_target(TargetKind::Ones, 64),
                                  std::vector<double>(64, 0.0), 1.0);
  const double s1 = slope_of(poly);
  const double s3 = slope_of(geometric);
  const bool ok = s1 >= -0.65 && s1 <= -0.35 && s3 >= -1.25 && s3 <= -0.75;
  return {ok, fmt("poly(1) slope %.4f in [-0.65, -0.35], exp slope %.4f in [-1.25, -0.75]", s1, s3)};
}

Outcome fig2_ordering() {
  const auto instances = fig2_instances();
  const std::vector<long> ns{4096};
  const auto grid = default_gamma0_grid();
  SimConfig sim;
  sim.runs = 20;
  sim.master_seed = 20240;
  sim.threads = worker_threads();
  const auto rows = fig2_grid_best(instances, ns, grid, sim);
  int ordered = 0;
  double worst = 0.0;
  for (const auto& named : instances) {
    double exp_risk = NAN, poly_risk = NAN;
    for (const auto& row : rows) {
      if (row.instance_id != named.id) continue;
      if (row.variant == Fig2Variant::TailExpDecay) exp_risk = row.best.mean;
      if (row.variant == Fig2Variant::TailPolyDecay) poly_risk = row.best.mean;
    }
    const double ratio = exp_risk / poly_risk;
    worst = std::max(worst, ratio);
    if (ratio <= 1.1) ++ordered;
  }
  return {ordered == 6, fmt("%.0f/6 panels with tail-exp <= 1.1 x tail-poly, worst ratio %.4f", ordered, worst)};
}

Outcome variance_ceiling() {
  long trajectories = 0, violations = 0;
  for (const auto& spec : kGridSpectra) {
    for (std::size_t d : {16u, 64u}) {
      for (double sigma2 : {0.0, 1.0}) {
        const auto inst = grid_instance(spec, d, sigma2, TargetKind::Ones);
        const double tr = inst.spectrum().trace();
        for (double frac : {0.05, 0.3, 0.6, 0.9, 0.99}) {
          const double g = frac / (inst.alpha() * tr);
          const double ceiling = g * sigma2 * tr / (1.0 - inst.alpha() * g * tr) + 1e-9;
          const auto traj = exact_trajectory(inst, Schedule::constant(g, 4096));
          ++trajectories;
          for (double v : traj.variance) {
            if (v > ceiling) {
              ++violations;
              break;
            }
          }
        }
      }
    }
  }
  return {violations == 0, fmt("%.0f trajectories, %.0f exceed the ceiling", trajectories, violations)};
}

Outcome fourth_moment() {
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const ProblemInstance inst(make_spectrum(SpectrumKind::Poly, d, 1.0), std::vector<double>(d, 0.0),
                               std::vector<double>(d, 0.0), 1.0);
    worst = std::max(worst, verify_fourth_moment(inst, 100000, 500 + trial));
  }
  return {worst < 0.05, fmt("max relative error %.4f over 10 random diagonal A", worst)};
}

Outcome determinism() {
  auto render = [](ExperimentConfig config, unsigned threads) {
    config.sim.threads = threads;
    std::ostringstream out;
    run_experiment(config, out);
    return out.str();
  };
  auto sweep = default_config(ExperimentKind::McSweep);
  sweep.horizons = {256, 512};
  sweep.gamma0_grid = {0.005, 0.05, 0.5};
  sweep.sim.runs = 16;
  sweep.sim.master_seed = 99;
  auto fig2 = default_config(ExperimentKind::Fig2);
  fig2.horizons = {256};
  fig2.gamma0_grid = {0.01, 0.1, 1.0};
  fig2.sim.runs = 4;
  fig2.sim.master_seed = 99;

  bool ok = true;
  for (const auto& config : {sweep, fig2}) {
    const auto reference = render(config, 1);
    for (unsigned threads : {1u, 2u, 4u, 7u}) ok = ok && render(config, threads) == reference;
  }
  return {ok, ok ? "mc_sweep and fig2 CSV identical for 1, 2, 4 and 7 threads" : "CSV differs across runs"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;
  };
  const Criterion criteria[] = {
      {"oracle_monte_carlo_agreement", oracle_vs_monte_carlo, 120.0},
      {"bound_sandwich", bound_sandwich, 60.0},
      {"scalar_envelopes", scalar_envelopes, 0.0},
      {"rate_slopes", rate_slopes, 60.0},
      {"fig2_ordering", fig2_ordering, 1200.0},
      {"crude_variance_ceiling", variance_ceiling, 0.0},
      {"gaussian_fourth_moment", fourth_moment, 0.0},
      {"determinism", determinism, 0.0},
  };
  int failures = 0;
  int number = 0;
  for (const auto& c : criteria) {
    ++number;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = outcome.pass;
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      pass = false;
      outcome.detail += fmt("; over the %.0f s budget", c.budget_seconds);
    }
    if (!pass) ++failures;
    std::printf("%s criterion %d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", number, c.name,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
