#include "sgdlab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sgdlab/errors.hpp"
#include "sgdlab/numeric.hpp"

namespace sgdlab {

Schedule::Schedule(ScheduleKind kind, double gamma0, long N, long s, long K, double a)
    : kind_(kind), gamma0_(gamma0), horizon_(N), hold_(s), phase_(K), exponent_(a) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw ValidationError("gamma0 must be a finite positive number");
  }
  if (N < 1) {
    throw ValidationError("horizon N must be positive");
  }
  if (s < 0 || s > N) {
    throw ValidationError("hold length s must lie in [0, N]");
  }
  if (kind == ScheduleKind::TailGeometric && K < 1) {
    throw ValidationError("tail-geometric phase length K must be at least 1");
  }
  if (kind == ScheduleKind::TailPolynomial && !(a >= 0.0 && a <= 1.0)) {
    throw DomainError("tail-polynomial exponent a must lie in [0, 1]");
  }
}

Schedule Schedule::constant(double gamma0, long N) {
  return Schedule(ScheduleKind::Constant, gamma0, N, N, 0, 0.0);
}

Schedule Schedule::tail_geometric(double gamma0, long N, long s, long K) {
  return Schedule(ScheduleKind::TailGeometric, gamma0, N, s, K, 0.0);
}

Schedule Schedule::tail_polynomial(double gamma0, long N, long s, double a) {
  return Schedule(ScheduleKind::TailPolynomial, gamma0, N, s, 0, a);
}

Schedule Schedule::with_gamma0(double gamma0) const {
  return Schedule(kind_, gamma0, horizon_, hold_, phase_, exponent_);
}

double Schedule::at(long t) const {
  if (t < 1 || t > horizon_) {
    throw DomainError("step " + std::to_string(t) + " outside [1, " + std::to_string(horizon_) +
                      "]");
  }
  if (t <= hold_) {
    return gamma0_;
  }
  switch (kind_) {
    case ScheduleKind::Constant:
      return gamma0_;
    case ScheduleKind::TailGeometric: {
      const long level = (t - hold_) / phase_;
      // ldexp underflows gradually, so gamma_t stays exact down to 2^-1074.
      return std::ldexp(gamma0_, -static_cast<int>(std::min<long>(level, 2000)));
    }
    case ScheduleKind::TailPolynomial:
      return gamma0_ / std::pow(static_cast<double>(t - hold_), exponent_);
  }
  return gamma0_;
}

std::string Schedule::label() const {
  switch (kind_) {
    case ScheduleKind::Constant:
      return "constant";
    case ScheduleKind::TailGeometric:
      return "tail_geometric(s=" + std::to_string(hold_) + ",K=" + std::to_string(phase_) + ")";
    case ScheduleKind::TailPolynomial: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "tail_polynomial(s=%ld,a=%g)", hold_, exponent_);
      return buf;
    }
  }
  return "unknown";
}

long default_phase_length(long N, long s) {
  const long span = N - s;
  if (span < 2) {
    throw DomainError("default_phase_length requires N - s >= 2");
  }
  return static_cast<long>(std::ceil(static_cast<double>(span) / std::log2(static_cast<double>(span))));
}

double total_length(const Schedule& schedule) {
  CompensatedSum sum;
  for (long t = 1; t <= schedule.horizon(); ++t) {
    sum.add(schedule.at(t));
  }
  return sum.value();
}

bool poly_precondition_holds(const Schedule& schedule) {
  if (schedule.kind() != ScheduleKind::TailPolynomial) {
    throw std::logic_error("poly_precondition_holds applies to tail-polynomial schedules only");
  }
  CompensatedSum tail;
  for (long t = schedule.hold_steps() + 1; t <= schedule.horizon(); ++t) {
    tail.add(schedule.at(t));
  }
  return static_cast<double>(schedule.hold_steps()) * schedule.gamma0() >= tail.value();
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Constant:
      return "constant";
    case ScheduleKind::TailGeometric:
      return "tail_geometric";
    case ScheduleKind::TailPolynomial:
      return "tail_polynomial";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "constant") return ScheduleKind::Constant;
  if (name == "tail_geometric") return ScheduleKind::TailGeometric;
  if (name == "tail_polynomial") return ScheduleKind::TailPolynomial;
  throw ValidationError("unknown schedule variant '" + name + "'");
}

}  // namespace sgdlab
