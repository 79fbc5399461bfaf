#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "polylab/environment.hpp"
#include "polylab/functionals.hpp"
#include "polylab/lattice.hpp"
#include "polylab/site_weights.hpp"

namespace polylab {

/// Optional support window: at time k only |z_i| <= min(k, ceil(c sqrt(k)))
/// is kept. c <= 0 keeps the exact support.
struct Truncation {
  double c = 0.0;

  bool enabled() const { return c > 0.0; }
  int radius_at(std::int64_t k) const;
};

/// Point-to-point partition weights u_n(z) = W_n(X_n = z) at one time n.
///
/// Values live on a dense box in scaled linear form: u_n(z) = scaled(z) *
/// exp(log_scale), with max scaled = 1 after every step. Entries off the
/// reachable set (|z|_1 > n or wrong parity) are exactly zero.
class PartitionSlice {
 public:
  PartitionSlice(int d, std::int64_t n, int radius, std::vector<double> scaled, double log_scale,
                 double discarded = 0.0);

  /// u_0 = 1 at the origin.
  static PartitionSlice origin(int d);

  int dim() const { return box_.dim(); }
  std::int64_t time() const { return n_; }
  const Box& box() const { return box_; }
  double log_scale() const { return log_scale_; }
  std::span<const double> scaled() const { return scaled_; }

  /// log u_n(z); -inf off the support.
  double log_weight(const Site& z) const;
  /// log W_n; -inf when every path has zero weight.
  double log_total() const;
  /// Accumulated relative mass dropped by truncation (0 for exact runs).
  double discarded_fraction() const { return discarded_; }
  std::size_t support_size() const;

  /// fn(site, log u) for every site with positive weight, in box order.
  template <class Fn>
  void for_each_support(Fn&& fn) const {
    for (std::size_t i = 0; i < scaled_.size(); ++i) {
      if (scaled_[i] > 0.0) fn(box_.site(i), std::log(scaled_[i]) + log_scale_);
    }
  }

  /// Throws std::logic_error on a negative/non-finite entry or mass off the reachable set.
  void check_invariants() const;

 private:
  Box box_;
  std::int64_t n_ = 0;
  std::vector<double> scaled_;
  double log_scale_ = 0.0;
  double discarded_ = 0.0;
};

/// u_{n+1}(z) = zeta_{n+1,z} / (2d) * sum_{|y-z|_1=1} u_n(y).
PartitionSlice forward_step(const SiteWeights& weights, const PartitionSlice& slice,
                            const Truncation& truncation = {});

/// One step with the increment forced to unit_step(dir):
/// u_{n+1}(z) = zeta_{n+1,z} / (2d) * u_n(z - e_dir).
PartitionSlice forced_step(const SiteWeights& weights, const PartitionSlice& slice, int dir,
                           const Truncation& truncation = {});

/// Free forward recursion from slice.time() to time `to`.
PartitionSlice propagate(const SiteWeights& weights, PartitionSlice slice, std::int64_t to,
                         const Truncation& truncation = {});

/// Slices 0..n; slices[k].time() == k.
std::vector<PartitionSlice> forward_slices(const SiteWeights& weights, int d, std::int64_t n,
                                           const Truncation& truncation = {});

/// log W_n.
double total_mass(const PartitionSlice& slice);

/// log sum_z u_n(z) g(z). Throws std::invalid_argument if g leaves [0, 1] on the support.
double endpoint_mass(const PartitionSlice& slice, const EndpointFunctional& g);

/// log W_n(B) for a cylinder event B with end() <= n. Throws std::invalid_argument otherwise.
double constrained_mass(const SiteWeights& weights, std::int64_t n, const CylinderEvent& event,
                        const Truncation& truncation = {});

struct DecompositionResidual {
  double value = 0.0;
  bool degenerate = false;  ///< W_{n+k} = 0: value is the absolute residual
};

/// |W_{n+k} - sum_z u_n(z) W_k(theta_{n,z} zeta)| / W_{n+k}, on the exact support.
DecompositionResidual decomposition_residual(const EnvironmentField& field, int d, std::int64_t n,
                                             std::int64_t k);

/// Debug export: one row "z_1,..,z_d,log_u" per support site.
void write_csv(std::ostream& os, const PartitionSlice& slice);

}  // namespace polylab
