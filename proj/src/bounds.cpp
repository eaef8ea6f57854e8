#include "sgdlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sgdlab/errors.hpp"
#include "sgdlab/oracle.hpp"

namespace sgdlab {

namespace {

constexpr double kE = std::numbers::e;

// Number of leading eigenvalues with lambda_k >= threshold.
std::size_t count_at_least(const Spectrum& spectrum, double threshold) {
  const auto values = spectrum.values();
  // values are non-increasing, so the qualifying set is a prefix.
  const auto it = std::partition_point(values.begin(), values.end(),
                                       [threshold](double v) { return v >= threshold; });
  return static_cast<std::size_t>(it - values.begin());
}

double sum_range(const Spectrum& spectrum, std::size_t first, std::size_t last, int power) {
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    s += power == 1 ? spectrum[i] : spectrum[i] * spectrum[i];
  }
  return s;
}

// sum_i lambda_i (1 - gamma0 lambda_i)^{2p} e_i^2 for a real power p.
double contracted_h_norm(const Spectrum& spectrum, const std::vector<double>& error,
                         double gamma0, double power) {
  double s = 0.0;
  for (std::size_t i = 0; i < spectrum.dim(); ++i) {
    const double base = 1.0 - gamma0 * spectrum[i];
    const double factor = std::exp(2.0 * power * std::log(base));
    s += spectrum[i] * factor * error[i] * error[i];
  }
  return s;
}

double tail_h_norm(const Spectrum& spectrum, const std::vector<double>& error, std::size_t from) {
  double s = 0.0;
  for (std::size_t i = from; i < spectrum.dim(); ++i) s += spectrum[i] * error[i] * error[i];
  return s;
}

void require_kind(const Schedule& schedule, ScheduleKind kind, const char* what) {
  if (schedule.kind() != kind) {
    throw std::logic_error(std::string(what) + " needs a " + to_string(kind) + " schedule");
  }
}

void require_unit_interval(double x) {
  if (!(x > 0.0 && x <= 1.0)) {
    throw DomainError("scalar envelope argument must lie in (0, 1]");
  }
}

}  // namespace

bool BoundReport::all_preconditions_hold() const {
  return std::all_of(preconditions.begin(), preconditions.end(),
                     [](const Precondition& p) { return p.ok; });
}

std::size_t k_star_geo(const Spectrum& spectrum, double gamma0, long K) {
  return count_at_least(spectrum, 1.0 / (gamma0 * static_cast<double>(K)));
}

std::size_t k_dagger_geo(const Spectrum& spectrum, double gamma0, long s, long K) {
  return count_at_least(spectrum, 1.0 / (gamma0 * static_cast<double>(s + K)));
}

double effective_dim_geo(const Spectrum& spectrum, double gamma0, long s, long K,
                         std::size_t k_star, std::size_t k_dagger) {
  if (k_star > k_dagger || k_dagger > spectrum.dim()) {
    throw DomainError("effective dimension needs 0 <= k* <= k+ <= d");
  }
  const double k = static_cast<double>(K);
  return static_cast<double>(k_star) + gamma0 * k * sum_range(spectrum, k_star, k_dagger, 1) +
         gamma0 * gamma0 * k * static_cast<double>(s + K) *
             sum_range(spectrum, k_dagger, spectrum.dim(), 2);
}

BoundReport upper_bound_geo(const ProblemInstance& instance, const Schedule& schedule,
                            std::optional<std::size_t> k_star, std::optional<std::size_t> k_dagger) {
  require_kind(schedule, ScheduleKind::TailGeometric, "upper_bound_geo");
  const Spectrum& h = instance.spectrum();
  const double gamma0 = schedule.gamma0();
  const long s = schedule.hold_steps();
  const long K = schedule.phase_length();

  BoundReport report;
  report.constants = "upper: bias 12e and 108e*alpha*log2(s+K), variance 8/(1-alpha*gamma0*trH)";
  report.k_star = k_star.value_or(k_star_geo(h, gamma0, K));
  report.k_dagger = k_dagger.value_or(k_dagger_geo(h, gamma0, s, K));
  report.dim_eff = effective_dim_geo(h, gamma0, s, K, report.k_star, report.k_dagger);

  const bool stepsize_ok = s + K >= 2 && gamma0 < max_initial_stepsize(instance, s, K);
  report.preconditions.push_back({kStepsizeCondition, stepsize_ok});
  if (!stepsize_ok) return report;

  const double k = static_cast<double>(K);
  const double horizon = static_cast<double>(s + K);
  const double r2 = instance.alpha() * h.trace();
  report.var_upper = 8.0 * instance.sigma2() / (1.0 - gamma0 * r2) * report.dim_eff / k;

  const auto error = instance.initial_error();
  double contracted = 0.0;
  double initial = 0.0;
  for (std::size_t i = 0; i < h.dim(); ++i) {
    const double b0 = error[i] * error[i];
    const double decay = std::pow(1.0 - gamma0 * h[i], 2.0 * horizon);
    contracted += (i < report.k_star ? 1.0 / (gamma0 * k) : h[i]) * decay * b0;
    initial += (i < report.k_dagger ? 1.0 / (gamma0 * horizon) : h[i]) * b0;
  }
  report.bias_upper = 12.0 * kE * contracted + 108.0 * kE * instance.alpha() *
                                                   std::log2(horizon) * initial *
                                                   report.dim_eff / k;
  return report;
}

BoundReport lower_bound_geo(const ProblemInstance& instance, const Schedule& schedule) {
  require_kind(schedule, ScheduleKind::TailGeometric, "lower_bound_geo");
  const Spectrum& h = instance.spectrum();
  const double gamma0 = schedule.gamma0();
  const long s = schedule.hold_steps();
  const long K = schedule.phase_length();

  BoundReport report;
  report.constants = "lower: variance sigma^2/400, bias beta/1200";
  report.k_star = k_star_geo(h, gamma0, K);
  report.k_dagger = k_dagger_geo(h, gamma0, s, K);
  report.dim_eff = effective_dim_geo(h, gamma0, s, K, report.k_star, report.k_dagger);

  const bool long_phase = K >= 10;
  const bool stable = gamma0 < 1.0 / h.largest();
  report.preconditions.push_back({kPhaseAtLeastTen, long_phase});
  report.preconditions.push_back({kBelowInvLambda1, stable});
  if (!long_phase || !stable) return report;

  const double ratio = report.dim_eff / static_cast<double>(K);
  report.var_lower = instance.sigma2() / 400.0 * ratio;
  const auto error = instance.initial_error();
  report.bias_lower =
      contracted_h_norm(h, error, gamma0, static_cast<double>(s + 2 * K)) +
      instance.beta() / 1200.0 * tail_h_norm(h, error, report.k_dagger) * ratio;
  return report;
}

BoundReport lower_bound_poly(const ProblemInstance& instance, const Schedule& schedule) {
  require_kind(schedule, ScheduleKind::TailPolynomial, "lower_bound_poly");
  const Spectrum& h = instance.spectrum();
  const double gamma0 = schedule.gamma0();
  const double a = schedule.exponent();
  const long s = schedule.hold_steps();
  const long N = schedule.horizon();
  const double n = static_cast<double>(N);
  const double inf = std::numeric_limits<double>::infinity();

  BoundReport report;
  report.constants = a < 1.0 ? "poly lower (a<1): (1-a)^2 sigma^2, (1-a)^2 beta/e^4"
                             : "poly lower (a=1): sigma^2, beta/e^4";

  // Thresholds are on gamma0 * lambda_k.
  double head_threshold = inf;
  if (a < 1.0) {
    if (N > s) head_threshold = (1.0 - a) / (2.0 * std::pow(static_cast<double>(N - s), 1.0 - a));
  } else {
    if (N - s < 2) throw DomainError("a = 1 lower bound needs N - s >= 2");
    head_threshold = 1.0 / (2.0 + 2.0 * std::log2(static_cast<double>(N - s - 1)));
  }
  const double tail_threshold = s > 0 ? 1.0 / (2.0 * static_cast<double>(s)) : inf;
  report.k_star = count_at_least(h, head_threshold / gamma0);
  report.k_dagger = count_at_least(h, tail_threshold / gamma0);
  // Head, middle and tail index sets stay disjoint if k* > k+.
  const std::size_t tail_from = std::max(report.k_star, report.k_dagger);

  double dim = 0.0;
  for (std::size_t i = 0; i < report.k_star; ++i) {
    const double gl = gamma0 * h[i];
    if (a < 1.0) {
      dim += std::max(std::pow(n, 1.0 - a) * gl, a * std::log2(n) / (16.0 * kE));
    } else {
      dim += std::pow(n, 1.0 - 4.0 * gl) * gl * gl;
    }
  }
  for (std::size_t i = report.k_star; i < report.k_dagger; ++i) {
    dim += n * gamma0 * h[i] / (4.0 * kE * kE);
  }
  for (std::size_t i = tail_from; i < h.dim(); ++i) {
    const double gl = gamma0 * h[i];
    dim += static_cast<double>(s) * n * gl * gl / (2.0 * kE * kE);
  }
  report.dim_eff = dim;

  const bool stable = gamma0 < 1.0 / (4.0 * h.largest());
  const bool hold_dominates = poly_precondition_holds(schedule);
  report.preconditions.push_back({kBelowQuarterInvLambda1, stable});
  report.preconditions.push_back({kHoldDominatesTail, hold_dominates});
  if (!stable || !hold_dominates) return report;

  const double weight = a < 1.0 ? (1.0 - a) * (1.0 - a) : 1.0;
  const double power = a < 1.0 ? static_cast<double>(s) + 2.0 * std::pow(n, 1.0 - a) / (1.0 - a)
                               : static_cast<double>(s) + 2.0 * std::log2(n);
  const auto error = instance.initial_error();
  report.var_lower = weight * instance.sigma2() * dim / n;
  report.bias_lower = contracted_h_norm(h, error, gamma0, power) +
                      weight * instance.beta() / std::pow(kE, 4) *
                          tail_h_norm(h, error, report.k_dagger) * dim / n;
  return report;
}

double f_upper_form(double x, long s, long K, long L) {
  require_unit_interval(x);
  const double k = static_cast<double>(K);
  // suffix[l] = prod_{j=l}^{L-1} (1 - x/2^j)^K, with suffix[L] = 1.
  std::vector<double> suffix(static_cast<std::size_t>(std::max<long>(L, 1)) + 1, 1.0);
  for (long j = L - 1; j >= 1; --j) {
    suffix[j] = suffix[j + 1] * std::pow(1.0 - std::ldexp(x, -static_cast<int>(j)), k);
  }
  const double after_first = L >= 2 ? suffix[1] : 1.0;
  double value = x * (1.0 - std::pow(1.0 - x, static_cast<double>(s + K))) * after_first;
  for (long l = 1; l <= L - 1; ++l) {
    const double xl = std::ldexp(x, -static_cast<int>(l));
    value += xl * (1.0 - std::pow(1.0 - xl, k)) * suffix[l + 1];
  }
  return value;
}

double f_lower_form(double x, long s, long K, long L) {
  require_unit_interval(x);
  const double k = static_cast<double>(K);
  double value =
      0.5 * x * (1.0 - std::pow(1.0 - 2.0 * x, static_cast<double>(s + K))) * std::pow(1.0 - 2.0 * x, k);
  for (long l = 1; l <= L - 1; ++l) {
    const double rate = std::ldexp(x, -static_cast<int>(l - 1));
    const double keep = std::pow(1.0 - rate, k);
    value += std::ldexp(x, -static_cast<int>(l + 1)) * (1.0 - keep) * keep;
  }
  return value;
}

double upper_envelope_f(double x, long s, long K) {
  require_unit_interval(x);
  return std::min({2.0 * static_cast<double>(s + K) * x * x, 2.0 * x, 8.0 / static_cast<double>(K)});
}

double lower_envelope_f(double x, long s, long K) {
  require_unit_interval(x);
  if (K < 10) throw DomainError("lower envelope needs K >= 10");
  const double horizon = static_cast<double>(s + K);
  const double k = static_cast<double>(K);
  if (x < 1.0 / horizon) return horizon * x * x / 40.0;
  if (x < 1.0 / k) return x / 40.0;
  return 1.0 / (400.0 * k);
}

ComparisonResult comparison_ratio(const ProblemInstance& instance, double gamma0, long N) {
  if (!(instance.sigma2() > 0.0)) {
    throw DomainError("comparison ratio is undefined for sigma^2 = 0");
  }
  if (N < 4) throw DomainError("comparison ratio needs N >= 4");
  const Spectrum& h = instance.spectrum();
  const double n = static_cast<double>(N);
  const long s = N / 2;

  ComparisonResult out;
  out.k_dagger = count_at_least(h, 1.0 / (gamma0 * n));
  const auto error = instance.initial_error();
  double head = 0.0;
  for (std::size_t i = 0; i < out.k_dagger; ++i) head += error[i] * error[i];
  out.ratio = (head / (gamma0 * n) + tail_h_norm(h, error, out.k_dagger)) / instance.sigma2();

  const auto geometric = Schedule::tail_geometric(gamma0, N, s, default_phase_length(N, s));
  const auto polynomial = Schedule::tail_polynomial(gamma0, N, s, 1.0);
  out.exp_risk = exact_trajectory(instance, geometric).excess_risk.back();
  out.poly_risk = exact_trajectory(instance, polynomial).excess_risk.back();
  return out;
}

}  // namespace sgdlab
