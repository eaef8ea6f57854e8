#pragma once

#include <cmath>
#include <cstddef>

namespace sgdlab {

/// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Dimension above which weighted eigen-sums switch to compensated summation.
inline constexpr std::size_t kCompensatedSumThreshold = 10'000;

}  // namespace sgdlab
