#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "polylab/keyed_rng.hpp"
#include "polylab/lattice.hpp"
#include "polylab/partition.hpp"

namespace polylab {

using Point = std::array<double, kMaxDim>;

/// Raised when a polymer measure is requested on the event W_n = 0.
class NoMeasureError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A nearest-neighbour path X_0 = 0, X_1, ..., X_n.
struct PolymerPath {
  int dim = 1;
  std::vector<Site> sites;

  std::int64_t length() const { return static_cast<std::int64_t>(sites.size()) - 1; }
  /// Throws std::logic_error if X_0 != 0 or some step is not a unit step.
  void check_invariants() const;
};

/// Piecewise-linear extension: X_s = (1 - f) X_k + f X_{k+1}, k = floor(s), f = s - k.
/// Throws std::invalid_argument for s outside [0, length].
Point interpolate(const PolymerPath& path, double s);

/// t -> n^{-1/2} X_{nt} on [0, 1].
class RescaledPath {
 public:
  RescaledPath(const PolymerPath& path, std::int64_t n);

  std::int64_t horizon() const { return n_; }
  int dim() const { return path_->dim; }
  Point operator()(double t) const;
  /// Values on a time grid, flattened as [t][coordinate].
  std::vector<double> on_grid(std::span<const double> tgrid) const;

 private:
  const PolymerPath* path_;
  std::int64_t n_;
};

RescaledPath rescale(const PolymerPath& path, std::int64_t n);

/// Sampling randomness for path `path_index` of replica `replica`. Independent
/// of the environment stream, so sampling order never perturbs the field.
inline KeyedStream sampler_stream(std::uint64_t seed, std::uint64_t replica, std::uint64_t path_index) {
  return KeyedStream::derive(seed, keys::kSamplerTag, replica, path_index);
}

/// Draws X_n with probability u_n(z) / W_n by inversion of the cumulative weights.
class EndpointSampler {
 public:
  /// Throws NoMeasureError when the slice carries no mass.
  explicit EndpointSampler(const PartitionSlice& slice);

  Site draw(double u) const;
  double probability(const Site& z) const;

 private:
  const PartitionSlice* slice_;
  std::vector<double> cumulative_;
};

/// Exact draw from P_n: X_n ~ u_n, then X_{k-1} | X_k = z with probability
/// proportional to u_{k-1}(y) over the 2d neighbours y of z.
/// `slices` must be slices 0..n of one recursion.
PolymerPath backward_sample(std::span<const PartitionSlice> slices, const KeyedStream& stream);

/// Same, reusing a prepared endpoint sampler for slices.back().
PolymerPath backward_sample(std::span<const PartitionSlice> slices, const EndpointSampler& endpoint,
                            const KeyedStream& stream);

}  // namespace polylab
