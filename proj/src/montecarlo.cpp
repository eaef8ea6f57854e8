#include "sgdlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgdlab/errors.hpp"
#include "sgdlab/parallel.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {

namespace {

std::vector<double> sqrt_spectrum(const Spectrum& spectrum) {
  std::vector<double> roots(spectrum.dim());
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = std::sqrt(spectrum[i]);
  return roots;
}

void draw_features(CounterRng& rng, const std::vector<double>& roots, std::vector<double>& x) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = roots[i] * rng.normal();
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<double> run_sgd(const ProblemInstance& instance, const Schedule& schedule,
                            const SimConfig& config, std::size_t run_index) {
  const std::size_t d = instance.dim();
  const long n = schedule.horizon();
  const double sigma = std::sqrt(instance.sigma2());
  const auto roots = sqrt_spectrum(instance.spectrum());
  const auto w_star = instance.w_star();

  const bool averaging = config.output == IterateOutput::TailAverage;
  const long average_from = config.average_from.value_or(n / 2);
  if (averaging && (average_from < 0 || average_from >= n)) {
    throw ValidationError("tail averaging needs 0 <= s < N");
  }

  CounterRng rng = CounterRng::substream(config.master_seed, run_index);
  std::vector<double> w(instance.w0().begin(), instance.w0().end());
  std::vector<double> x(d);
  std::vector<double> average;
  if (averaging) average.assign(d, 0.0);

  for (long t = 1; t <= n; ++t) {
    // w currently holds w_{t-1}.
    if (averaging && t - 1 >= average_from) {
      for (std::size_t i = 0; i < d; ++i) average[i] += w[i];
    }
    const double gamma = schedule.at(t);
    draw_features(rng, roots, x);
    const double noise = sigma * rng.normal();
    const double residual = (dot(w_star, x) + noise) - dot(w, x);
    const double scale = gamma * residual;
    double peak = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] += scale * x[i];
      peak = std::max(peak, std::fabs(w[i]));
    }
    if (!(peak <= kDivergenceThreshold)) {
      throw DivergenceError(t, gamma);
    }
  }

  if (averaging) {
    const double count = static_cast<double>(n - average_from);
    for (double& v : average) v /= count;
    return average;
  }
  return w;
}

double estimate_excess_risk(const ProblemInstance& instance, std::span<const double> w) {
  if (w.size() != instance.dim()) {
    throw ValidationError("parameter length does not match the instance dimension");
  }
  const auto w_star = instance.w_star();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = w[i] - w_star[i];
    sum += instance.spectrum()[i] * e * e;
  }
  return 0.5 * sum;
}

McEstimate mc_risk(const ProblemInstance& instance, const Schedule& schedule,
                   const SimConfig& config) {
  if (config.runs == 0) {
    throw ValidationError("runs must be at least 1");
  }
  struct Outcome {
    double risk = 0.0;
    bool diverged = false;
    long step = 0;
    double gamma = 0.0;
  };
  std::vector<Outcome> outcomes(config.runs);
  parallel_for(config.runs, config.threads, [&](std::size_t r) {
    try {
      const auto w = run_sgd(instance, schedule, config, r);
      outcomes[r].risk = estimate_excess_risk(instance, w);
    } catch (const DivergenceError& e) {
      outcomes[r] = Outcome{0.0, true, e.step(), e.gamma()};
    }
  });

  McEstimate estimate;
  estimate.runs = config.runs;
  for (const auto& o : outcomes) {
    if (o.diverged) {
      estimate.diverged = true;
      estimate.divergence_step = o.step;
      estimate.divergence_gamma = o.gamma;
      estimate.mean = std::numeric_limits<double>::infinity();
      estimate.std_error = std::numeric_limits<double>::infinity();
      return estimate;
    }
  }

  double sum = 0.0;
  for (const auto& o : outcomes) sum += o.risk;
  const double n = static_cast<double>(config.runs);
  estimate.mean = sum / n;
  if (config.runs > 1) {
    double ss = 0.0;
    for (const auto& o : outcomes) {
      const double dev = o.risk - estimate.mean;
      ss += dev * dev;
    }
    estimate.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return estimate;
}

double verify_fourth_moment(const ProblemInstance& instance, std::span<const double> a_diagonal,
                            std::size_t samples, std::uint64_t seed) {
  const std::size_t d = instance.dim();
  if (a_diagonal.size() != d) {
    throw ValidationError("A must have one diagonal entry per dimension");
  }
  if (samples == 0) {
    throw ValidationError("samples must be positive");
  }
  const Spectrum& h = instance.spectrum();
  double tr_ha = 0.0;
  for (std::size_t i = 0; i < d; ++i) tr_ha += h[i] * a_diagonal[i];

  // (x x^T A x x^T)_{ij} = x_i x_j * q with q = sum_k A_k x_k^2.
  std::vector<double> accum(d * d, 0.0);
  const auto roots = sqrt_spectrum(h);
  std::vector<double> x(d);
  CounterRng rng = CounterRng::substream(seed, 0);
  for (std::size_t n = 0; n < samples; ++n) {
    draw_features(rng, roots, x);
    double q = 0.0;
    for (std::size_t k = 0; k < d; ++k) q += a_diagonal[k] * x[k] * x[k];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) accum[i * d + j] += x[i] * x[j] * q;
  }

  const double floor = 1e-12 * h.trace() * h.trace();
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double truth =
          i == j ? 2.0 * h[i] * a_diagonal[i] * h[i] + tr_ha * h[i] : 0.0;
      if (std::fabs(truth) <= floor) continue;
      const double estimate = accum[i * d + j] / static_cast<double>(samples);
      worst = std::max(worst, std::fabs(estimate - truth) / std::fabs(truth));
    }
  }
  return worst;
}

double verify_fourth_moment(const ProblemInstance& instance, std::size_t samples,
                            std::uint64_t seed) {
  CounterRng rng = CounterRng::substream(seed, ~std::uint64_t{0});
  std::vector<double> a(instance.dim());
  for (double& v : a) v = rng.uniform_open();
  return verify_fourth_moment(instance, a, samples, seed);
}

GradientEstimate sample_gradient(const ProblemInstance& instance, std::span<const double> w,
                                 std::size_t samples, std::uint64_t seed) {
  const std::size_t d = instance.dim();
  if (w.size() != d || samples < 2) {
    throw ValidationError("sample_gradient needs a full-length w and at least 2 samples");
  }
  const double sigma = std::sqrt(instance.sigma2());
  const auto roots = sqrt_spectrum(instance.spectrum());
  CounterRng rng = CounterRng::substream(seed, 0);
  std::vector<double> x(d), sum(d, 0.0), sum_sq(d, 0.0);
  for (std::size_t n = 0; n < samples; ++n) {
    draw_features(rng, roots, x);
    const double residual = dot(instance.w_star(), x) + sigma * rng.normal() - dot(w, x);
    for (std::size_t i = 0; i < d; ++i) {
      const double g = residual * x[i];
      sum[i] += g;
      sum_sq[i] += g * g;
    }
  }
  GradientEstimate out{std::vector<double>(d), std::vector<double>(d)};
  const double m = static_cast<double>(samples);
  for (std::size_t i = 0; i < d; ++i) {
    out.mean[i] = sum[i] / m;
    const double var = std::max(0.0, (sum_sq[i] - m * out.mean[i] * out.mean[i]) / (m - 1.0));
    out.std_error[i] = std::sqrt(var / m);
  }
  return out;
}

}  // namespace sgdlab
