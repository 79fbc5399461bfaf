#pragma once

#include <cstdint>
#include <span>

#include "polylab/lattice.hpp"

namespace polylab {

/// Read-only source of space-time weights zeta_{k,x}, k >= 1.
///
/// The transfer recursion pulls one row at a time through fill_row(), so
/// implementations with per-row setup (hash prefixes, lookups) can amortize it.
class SiteWeights {
 public:
  virtual ~SiteWeights() = default;

  virtual double value(std::int64_t k, const Site& x) const = 0;

  /// out[j] = value(k, first + j * step * e_axis).
  virtual void fill_row(std::int64_t k, Site first, int axis, int step, std::span<double> out) const {
    for (auto& v : out) {
      v = value(k, first);
      first[axis] += step;
    }
  }
};

/// zeta == 1: the simple random walk itself.
class UnitWeights final : public SiteWeights {
 public:
  double value(std::int64_t, const Site&) const override { return 1.0; }
  void fill_row(std::int64_t, Site, int, int, std::span<double> out) const override {
    for (auto& v : out) v = 1.0;
  }
};

/// Weights of `base` up to time `horizon`, then 1. W_m(g) for a functional g
/// of the path up to time n > m is the horizon-m mass of the n-step recursion.
class HorizonWeights final : public SiteWeights {
 public:
  HorizonWeights(const SiteWeights& base, std::int64_t horizon) : base_(&base), horizon_(horizon) {}

  double value(std::int64_t k, const Site& x) const override {
    return k <= horizon_ ? base_->value(k, x) : 1.0;
  }
  void fill_row(std::int64_t k, Site first, int axis, int step, std::span<double> out) const override {
    if (k <= horizon_) {
      base_->fill_row(k, first, axis, step, out);
    } else {
      for (auto& v : out) v = 1.0;
    }
  }

 private:
  const SiteWeights* base_;
  std::int64_t horizon_;
};

}  // namespace polylab
