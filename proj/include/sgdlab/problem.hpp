#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sgdlab {

/// Eigenvalues of the data covariance H, sorted non-increasing and strictly
/// positive. All parameters in this library live in the eigenbasis of H, so a
/// Spectrum is the whole covariance.
class Spectrum {
 public:
  /// Validates order and positivity; the list is never re-sorted.
  /// Throws ValidationError naming the first offending index.
  explicit Spectrum(std::vector<double> eigenvalues);

  std::size_t dim() const noexcept { return values_.size(); }
  double trace() const noexcept { return trace_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double largest() const noexcept { return values_.front(); }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
  double trace_ = 0.0;
};

enum class SpectrumKind { Poly, PolyLog, Exp, Explicit };

// poly(r):    lambda_k = k^-(1+r)
// polylog(r): lambda_k = 1 / (k log2^r(k+1))
// exp:        lambda_k = 2^-k
Spectrum make_spectrum(SpectrumKind kind, std::size_t d, double param);
Spectrum make_spectrum(std::vector<double> explicit_values);

/// Integral estimate of the trace dropped by truncating an infinite spectrum
/// at d. Empty for kinds without an infinite tail model (exp is bounded by
/// 2^-d, explicit has no tail).
std::optional<double> truncated_tail_trace(SpectrumKind kind, std::size_t d, double param);

/// True when the omitted tail exceeds 1e-6 of the retained trace.
bool truncation_warning(SpectrumKind kind, std::size_t d, double param);

enum class TargetKind { Ones, Inv, InvSq };

std::vector<double> make_target(TargetKind kind, std::size_t d);

/// Linear-regression problem in the eigenbasis of H:
/// y = <w*, x> + eps, eps ~ N(0, sigma2) independent of x, initialization w0,
/// and fourth-moment constants (alpha, beta).
class ProblemInstance {
 public:
  ProblemInstance(Spectrum spectrum, std::vector<double> w_star, std::vector<double> w0,
                  double sigma2, double alpha = 3.0, double beta = 1.0);

  const Spectrum& spectrum() const noexcept { return spectrum_; }
  std::size_t dim() const noexcept { return spectrum_.dim(); }
  std::span<const double> w_star() const noexcept { return w_star_; }
  std::span<const double> w0() const noexcept { return w0_; }
  double sigma2() const noexcept { return sigma2_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// Gaussian features are the only model with alpha = 3, beta = 1.
  bool is_gaussian() const noexcept { return alpha_ == 3.0 && beta_ == 1.0; }

  /// Coordinates of w0 - w*.
  std::vector<double> initial_error() const;

 private:
  Spectrum spectrum_;
  std::vector<double> w_star_;
  std::vector<double> w0_;
  double sigma2_;
  double alpha_;
  double beta_;
};

/// Upper limit 1 / (3 alpha tr(H) log2(s+K)) on the initial stepsize of the
/// tail-geometric upper bound; callers compare with strict inequality.
double max_initial_stepsize(const ProblemInstance& instance, long s, long K);

std::string to_string(SpectrumKind kind);
std::string to_string(TargetKind kind);
SpectrumKind spectrum_kind_from_string(const std::string& name);
TargetKind target_kind_from_string(const std::string& name);

}  // namespace sgdlab
