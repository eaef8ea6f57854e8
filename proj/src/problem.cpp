#include "sgdlab/problem.hpp"

#include <cmath>
#include <numbers>

#include "sgdlab/errors.hpp"
#include "sgdlab/numeric.hpp"

namespace sgdlab {

namespace {

constexpr double kTruncationTolerance = 1e-6;

}  // namespace

Spectrum::Spectrum(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  if (values_.empty()) {
    throw ValidationError("spectrum must contain at least one eigenvalue");
  }
  CompensatedSum sum;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("spectrum entry at index " + std::to_string(i) +
                            " is not a finite positive number");
    }
    if (i > 0 && v > values_[i - 1]) {
      throw ValidationError("spectrum is not non-increasing at index " + std::to_string(i));
    }
    sum.add(v);
  }
  trace_ = sum.value();
}

Spectrum make_spectrum(SpectrumKind kind, std::size_t d, double param) {
  if (kind == SpectrumKind::Explicit) {
    throw ValidationError("explicit spectra are built from a value list");
  }
  if (d == 0) {
    throw DomainError("spectrum dimension must be positive");
  }
  if (kind == SpectrumKind::Exp && d > 1074) {
    throw DomainError("exp spectrum underflows double precision beyond d = 1074");
  }
  if (kind == SpectrumKind::Poly && !(param > 0.0)) {
    throw DomainError("poly spectrum requires r > 0");
  }
  if (kind == SpectrumKind::PolyLog && !(param > 1.0)) {
    throw DomainError("polylog spectrum requires r > 1");
  }
  std::vector<double> values(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double k = static_cast<double>(i + 1);
    switch (kind) {
      case SpectrumKind::Poly:
        values[i] = std::pow(k, -(1.0 + param));
        break;
      case SpectrumKind::PolyLog:
        values[i] = 1.0 / (k * std::pow(std::log2(k + 1.0), param));
        break;
      case SpectrumKind::Exp:
        values[i] = std::ldexp(1.0, -static_cast<int>(i + 1));
        break;
      case SpectrumKind::Explicit:
        break;
    }
  }
  return Spectrum(std::move(values));
}

Spectrum make_spectrum(std::vector<double> explicit_values) {
  return Spectrum(std::move(explicit_values));
}

std::optional<double> truncated_tail_trace(SpectrumKind kind, std::size_t d, double param) {
  const double x = static_cast<double>(d);
  switch (kind) {
    case SpectrumKind::Poly:
      // sum_{k>d} k^-(1+r) <= int_d^inf x^-(1+r) dx
      return std::pow(x, -param) / param;
    case SpectrumKind::PolyLog:
      // int_d^inf dx / (x log2^r x) = ln 2 * log2(d)^(1-r) / (r-1)
      if (d < 2) {
        return std::nullopt;
      }
      return std::numbers::ln2 * std::pow(std::log2(x), 1.0 - param) / (param - 1.0);
    case SpectrumKind::Exp:
      return std::ldexp(1.0, -static_cast<int>(d));
    case SpectrumKind::Explicit:
      return std::nullopt;
  }
  return std::nullopt;
}

bool truncation_warning(SpectrumKind kind, std::size_t d, double param) {
  const auto tail = truncated_tail_trace(kind, d, param);
  if (!tail) {
    return kind == SpectrumKind::PolyLog;
  }
  const double kept = make_spectrum(kind, d, param).trace();
  return *tail > kTruncationTolerance * kept;
}

std::vector<double> make_target(TargetKind kind, std::size_t d) {
  std::vector<double> w(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double k = static_cast<double>(i + 1);
    switch (kind) {
      case TargetKind::Ones:
        w[i] = 1.0;
        break;
      case TargetKind::Inv:
        w[i] = 1.0 / k;
        break;
      case TargetKind::InvSq:
        w[i] = 1.0 / (k * k);
        break;
    }
  }
  return w;
}

ProblemInstance::ProblemInstance(Spectrum spectrum, std::vector<double> w_star,
                                 std::vector<double> w0, double sigma2, double alpha,
                                 double beta)
    : spectrum_(std::move(spectrum)),
      w_star_(std::move(w_star)),
      w0_(std::move(w0)),
      sigma2_(sigma2),
      alpha_(alpha),
      beta_(beta) {
  if (w_star_.size() != spectrum_.dim()) {
    throw ValidationError("w_star has length " + std::to_string(w_star_.size()) +
                          ", expected " + std::to_string(spectrum_.dim()));
  }
  if (w0_.size() != spectrum_.dim()) {
    throw ValidationError("w0 has length " + std::to_string(w0_.size()) + ", expected " +
                          std::to_string(spectrum_.dim()));
  }
  if (!(sigma2_ >= 0.0)) {
    throw ValidationError("sigma2 must be non-negative");
  }
  if (!(alpha_ >= 1.0)) {
    throw ValidationError("alpha must be at least 1");
  }
  if (!(beta_ >= 0.0)) {
    throw ValidationError("beta must be non-negative");
  }
}

std::vector<double> ProblemInstance::initial_error() const {
  std::vector<double> e(dim());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = w0_[i] - w_star_[i];
  }
  return e;
}

double max_initial_stepsize(const ProblemInstance& instance, long s, long K) {
  if (s < 0 || K < 1 || s + K < 2) {
    throw DomainError("max_initial_stepsize requires s >= 0, K >= 1 and s + K >= 2");
  }
  const double log_len = std::log2(static_cast<double>(s + K));
  return 1.0 / (3.0 * instance.alpha() * instance.spectrum().trace() * log_len);
}

std::string to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::Poly:
      return "poly";
    case SpectrumKind::PolyLog:
      return "polylog";
    case SpectrumKind::Exp:
      return "exp";
    case SpectrumKind::Explicit:
      return "explicit";
  }
  return "unknown";
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Ones:
      return "ones";
    case TargetKind::Inv:
      return "inv";
    case TargetKind::InvSq:
      return "inv_sq";
  }
  return "unknown";
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
  if (name == "poly") return SpectrumKind::Poly;
  if (name == "polylog") return SpectrumKind::PolyLog;
  if (name == "exp") return SpectrumKind::Exp;
  if (name == "explicit") return SpectrumKind::Explicit;
  throw ValidationError("unknown spectrum kind '" + name + "'");
}

TargetKind target_kind_from_string(const std::string& name) {
  if (name == "ones") return TargetKind::Ones;
  if (name == "inv") return TargetKind::Inv;
  if (name == "inv_sq") return TargetKind::InvSq;
  throw ValidationError("unknown target kind '" + name + "'");
}

}  // namespace sgdlab
