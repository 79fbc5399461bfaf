#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace polylab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Neumaier-compensated summation.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(sum exp(x_i)); -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  KahanSum s;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s.value());
}

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean and standard error (unbiased variance / n), summed in index order.
inline MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate e;
  e.count = xs.size();
  if (xs.empty()) return e;
  KahanSum s;
  for (double x : xs) s += x;
  e.mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    KahanSum q;
    for (double x : xs) q += (x - e.mean) * (x - e.mean);
    e.standard_error = std::sqrt(q.value() / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return e;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

/// Largest m with m^4 <= n.
inline long long fourth_root_floor(long long n) {
  long long m = static_cast<long long>(std::floor(std::pow(static_cast<double>(n), 0.25)));
  while (m > 0 && m * m * m * m > n) --m;
  while ((m + 1) * (m + 1) * (m + 1) * (m + 1) <= n) ++m;
  return m;
}

}  // namespace polylab
