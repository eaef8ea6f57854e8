#pragma once

#include <string>

namespace sgdlab {

enum class ScheduleKind { Constant, TailGeometric, TailPolynomial };

/// Stepsize schedule gamma_t over steps t = 1..N.
///
///   Constant:        gamma_t = gamma0 (stored with s = N)
///   TailGeometric:   gamma0 for t <= s, then gamma0 / 2^floor((t-s)/K)
///   TailPolynomial:  gamma0 for t <= s, then gamma0 / (t-s)^a
///
/// When N - s is not a multiple of K the last geometric phase is simply cut
/// off at t = N.
class Schedule {
 public:
  static Schedule constant(double gamma0, long N);
  static Schedule tail_geometric(double gamma0, long N, long s, long K);
  static Schedule tail_polynomial(double gamma0, long N, long s, double a);

  /// Throws DomainError for t outside [1, N].
  double at(long t) const;

  ScheduleKind kind() const noexcept { return kind_; }
  double gamma0() const noexcept { return gamma0_; }
  long horizon() const noexcept { return horizon_; }
  long hold_steps() const noexcept { return hold_; }
  long phase_length() const noexcept { return phase_; }
  double exponent() const noexcept { return exponent_; }

  /// Copy with a different initial stepsize.
  Schedule with_gamma0(double gamma0) const;

  /// Short human-readable label, e.g. "tail_geometric(s=2048,K=187)".
  std::string label() const;

 private:
  Schedule(ScheduleKind kind, double gamma0, long N, long s, long K, double a);

  ScheduleKind kind_;
  double gamma0_;
  long horizon_;
  long hold_;
  long phase_ = 0;
  double exponent_ = 0.0;
};

/// ceil((N-s) / log2(N-s)); requires N - s >= 2.
long default_phase_length(long N, long s);

/// sum_{t=1}^N gamma_t, compensated.
double total_length(const Schedule& schedule);

/// s * gamma0 >= sum_{t>s} gamma_t. Only defined for TailPolynomial.
bool poly_precondition_holds(const Schedule& schedule);

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

}  // namespace sgdlab
