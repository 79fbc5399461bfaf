#include "polylab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polylab/numerics.hpp"
#include "polylab/parallel.hpp"

namespace polylab {

namespace {

std::uint64_t path_count(int d, std::int64_t n) {
  check_dimension(d);
  if (n < 0) throw std::invalid_argument("path enumeration: n must be >= 0");
  std::uint64_t count = 1;
  for (std::int64_t k = 0; k < n; ++k) {
    count *= static_cast<std::uint64_t>(2 * d);
    if (count > kOracleLimit) {
      throw TooLargeError("path enumeration: (2d)^n exceeds 2^24 for d = " + std::to_string(d) +
                          ", n = " + std::to_string(n));
    }
  }
  return count;
}

/// Visits every path as fn(index, path, weight) with weight = prod_k zeta_{k, X_k}.
template <class Fn>
void for_each_path(const SiteWeights& weights, int d, std::int64_t n, Fn&& fn) {
  const std::uint64_t count = path_count(d, n);
  PolymerPath path{d, std::vector<Site>(static_cast<std::size_t>(n + 1))};
  for (std::uint64_t p = 0; p < count; ++p) {
    double w = 1.0;
    std::uint64_t rest = p;
    for (std::int64_t k = 1; k <= n; ++k) {
      const int dir = static_cast<int>(rest % static_cast<std::uint64_t>(2 * d));
      rest /= static_cast<std::uint64_t>(2 * d);
      const auto ku = static_cast<std::size_t>(k);
      path.sites[ku] = path.sites[ku - 1] + unit_step(dir);
      w *= weights.value(k, path.sites[ku]);
    }
    fn(p, path, w);
  }
}

}  // namespace

PolymerPath decode_path(int d, std::int64_t n, std::uint64_t index) {
  const std::uint64_t count = path_count(d, n);
  if (index >= count) throw std::invalid_argument("decode_path: index out of range");
  PolymerPath path{d, std::vector<Site>(static_cast<std::size_t>(n + 1))};
  for (std::int64_t k = 1; k <= n; ++k) {
    const int dir = static_cast<int>(index % static_cast<std::uint64_t>(2 * d));
    index /= static_cast<std::uint64_t>(2 * d);
    path.sites[static_cast<std::size_t>(k)] = path.sites[static_cast<std::size_t>(k - 1)] + unit_step(dir);
  }
  return path;
}

PathEnumeration enumerate_partition(const SiteWeights& weights, int d, std::int64_t n) {
  PathEnumeration out;
  out.dim = d;
  out.n = n;
  out.probability.assign(path_count(d, n), 0.0);
  const double norm = std::pow(2.0 * d, -static_cast<double>(n));
  KahanSum total;
  std::map<Site, KahanSum> ends;
  for_each_path(weights, d, n, [&](std::uint64_t p, const PolymerPath& path, double w) {
    out.probability[p] = w;
    total += w;
    ends[path.sites.back()] += w;
  });
  const double sum = total.value();
  out.total = sum * norm;
  for (const auto& [z, s] : ends) out.endpoint[z] = s.value() * norm;
  for (double& w : out.probability) w = sum > 0.0 ? w / sum : 0.0;
  return out;
}

double enumerate_path_mass(const SiteWeights& weights, int d, std::int64_t n, const PathFunctional& f) {
  KahanSum total;
  for_each_path(weights, d, n, [&](std::uint64_t, const PolymerPath& path, double w) {
    if (w != 0.0) total += w * f(path);
  });
  return total.value() * std::pow(2.0 * d, -static_cast<double>(n));
}

double AtomWeights::value(std::int64_t k, const Site& x) const {
  const int i = inst_->site_index(k, x);
  if (i < 0) return 1.0;
  return (atom_ >> i) & 1U ? inst_->law().high : inst_->law().low;
}

TinyInstance::TinyInstance(int d, std::int64_t n, TwoPointLaw law) : d_(d), n_(n), law_(law) {
  check_dimension(d);
  if (n < 0) throw std::invalid_argument("TinyInstance: n must be >= 0");
  validate_law(law);
  lookup_.emplace_back();  // time 0 carries no weight
  for (std::int64_t k = 1; k <= n; ++k) {
    const Box box(d, static_cast<int>(k));
    std::vector<int> table(box.size(), -1);
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Site z = box.site(i);
      if (!reachable(z, k)) continue;
      if (sites_.size() >= 24) {
        throw TooLargeError("TinyInstance: more than 24 environment sites for d = " + std::to_string(d) +
                            ", n = " + std::to_string(n));
      }
      table[i] = static_cast<int>(sites_.size());
      sites_.emplace_back(k, z);
    }
    lookup_.push_back(std::move(table));
  }
  layer_begin_.assign(static_cast<std::size_t>(n + 2), 0);
  for (const auto& [k, z] : sites_) ++layer_begin_[static_cast<std::size_t>(k + 1)];
  for (std::size_t k = 1; k < layer_begin_.size(); ++k) layer_begin_[k] += layer_begin_[k - 1];
}

std::pair<int, int> TinyInstance::layer(std::int64_t k) const {
  if (k < 1 || k > n_) return {0, 0};
  return {layer_begin_[static_cast<std::size_t>(k)], layer_begin_[static_cast<std::size_t>(k + 1)]};
}

int TinyInstance::site_index(std::int64_t k, const Site& x) const {
  if (k < 1 || k > n_) return -1;
  const Box box(d_, static_cast<int>(k));
  if (!box.contains(x)) return -1;
  return lookup_[static_cast<std::size_t>(k)][box.index(x)];
}

double TinyInstance::probability(std::uint64_t atom) const {
  double p = 1.0;
  for (std::size_t i = 0; i < sites_.size(); ++i) p *= (atom >> i) & 1U ? 1.0 - law_.p_low : law_.p_low;
  return p;
}

double enumerate_environment_expectation(const TinyInstance& inst,
                                         const std::function<double(const AtomWeights&)>& functional,
                                         int threads) {
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t atoms = inst.atom_count();
  const auto chunks = static_cast<std::size_t>((atoms + kChunk - 1) / kChunk);
  std::vector<KahanSum> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(atoms, lo + kChunk);
    for (std::uint64_t a = lo; a < hi; ++a) {
      const double p = inst.probability(a);
      if (p == 0.0) continue;
      partial[c] += p * functional(inst.weights(a));
    }
  });
  KahanSum total;
  for (const auto& s : partial) total += s.value();
  return total.value();
}

}  // namespace polylab
