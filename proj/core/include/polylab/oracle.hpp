#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polylab/environment.hpp"
#include "polylab/lattice.hpp"
#include "polylab/sampler.hpp"
#include "polylab/site_weights.hpp"

// Brute-force references. Everything here is exponential in the instance
// size and deliberately shares no code with the transfer recursion.

namespace polylab {

/// Raised when an enumeration would exceed its size bound.
class TooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Largest number of paths or environment atoms any oracle will enumerate.
inline constexpr std::uint64_t kOracleLimit = std::uint64_t{1} << 24;

using PathFunctional = std::function<double(const PolymerPath&)>;

/// Path p in [0, (2d)^n) takes step (p / (2d)^{k-1}) mod 2d at time k.
PolymerPath decode_path(int d, std::int64_t n, std::uint64_t index);

struct PathEnumeration {
  int dim = 1;
  std::int64_t n = 0;
  double total = 0.0;                 ///< W_n
  std::map<Site, double> endpoint;    ///< z -> W_n(X_n = z), only z reached by some path
  std::vector<double> probability;    ///< P_n(path) by path index; all zero when W_n = 0
};

/// Exhaustive evaluation of W_n = (2d)^{-n} sum_paths prod_k zeta_{k, X_k}.
/// Throws TooLargeError when (2d)^n > kOracleLimit.
PathEnumeration enumerate_partition(const SiteWeights& weights, int d, std::int64_t n);

/// W_n(f) = (2d)^{-n} sum_paths f(path) prod_k zeta_{k, X_k}, for any path functional f.
double enumerate_path_mass(const SiteWeights& weights, int d, std::int64_t n, const PathFunctional& f);

/// The environment of a TinyInstance: zeta at instance site i is `high` when
/// bit i of the atom is set and `low` otherwise; 1 outside the instance.
class TinyInstance;
class AtomWeights final : public SiteWeights {
 public:
  AtomWeights(const TinyInstance& inst, std::uint64_t atom) : inst_(&inst), atom_(atom) {}
  double value(std::int64_t k, const Site& x) const override;

 private:
  const TinyInstance* inst_;
  std::uint64_t atom_;
};

/// A two-point environment on every site reachable by time n, small enough to
/// enumerate all 2^sites configurations. Sites are numbered layer by layer.
class TinyInstance {
 public:
  /// Throws TooLargeError when 2^sites > kOracleLimit.
  TinyInstance(int d, std::int64_t n, TwoPointLaw law);

  int dim() const { return d_; }
  std::int64_t horizon() const { return n_; }
  const TwoPointLaw& law() const { return law_; }
  int site_count() const { return static_cast<int>(sites_.size()); }
  std::uint64_t atom_count() const { return std::uint64_t{1} << sites_.size(); }
  /// Instance sites at time k occupy indices [first, second).
  std::pair<int, int> layer(std::int64_t k) const;
  /// -1 when (k, x) is not an instance site.
  int site_index(std::int64_t k, const Site& x) const;
  const std::pair<std::int64_t, Site>& site(int i) const { return sites_[static_cast<std::size_t>(i)]; }

  double probability(std::uint64_t atom) const;
  AtomWeights weights(std::uint64_t atom) const { return AtomWeights(*this, atom); }

 private:
  int d_;
  std::int64_t n_;
  TwoPointLaw law_;
  std::vector<std::pair<std::int64_t, Site>> sites_;
  std::vector<int> layer_begin_;
  std::vector<std::vector<int>> lookup_;  ///< per layer, Box(d, k) index -> site index
};

/// E[F(zeta)] = sum over all atoms of P(atom) F(atom), compensated and summed
/// in atom order. `threads` splits the atoms into fixed chunks; the result does
/// not depend on it.
double enumerate_environment_expectation(const TinyInstance& inst,
                                         const std::function<double(const AtomWeights&)>& functional,
                                         int threads = 1);

}  // namespace polylab
