#pragma once

#include <cstddef>
#include <span>

namespace divdis {

// Kahan-Babuska (Neumaier) compensated sum. Order-dependent, so callers feed
// samples in a fixed order to get bit-stable results.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_mean(std::span<const double> xs) noexcept {
  if (xs.empty()) return 0.0;
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

}  // namespace divdis
