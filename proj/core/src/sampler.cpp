#include "polylab/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "polylab/numerics.hpp"

namespace polylab {

void PolymerPath::check_invariants() const {
  if (sites.empty()) throw std::logic_error("PolymerPath: empty path");
  if (sites.front() != Site{}) throw std::logic_error("PolymerPath: X_0 must be the origin");
  for (std::size_t k = 1; k < sites.size(); ++k) {
    if (l1_norm(sites[k] - sites[k - 1]) != 1) {
      throw std::logic_error("PolymerPath: step " + std::to_string(k) + " is not a unit step");
    }
  }
}

Point interpolate(const PolymerPath& path, double s) {
  const auto n = path.length();
  if (!(s >= 0.0 && s <= static_cast<double>(n))) {
    throw std::invalid_argument("interpolate: s must lie in [0, n]");
  }
  const auto k = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(s)), n);
  const double f = s - static_cast<double>(k);
  Point p{};
  const Site& a = path.sites[static_cast<std::size_t>(k)];
  if (f == 0.0) {
    for (int i = 0; i < path.dim; ++i) p[static_cast<std::size_t>(i)] = a[i];
    return p;
  }
  const Site& b = path.sites[static_cast<std::size_t>(k + 1)];
  for (int i = 0; i < path.dim; ++i) p[static_cast<std::size_t>(i)] = (1.0 - f) * a[i] + f * b[i];
  return p;
}

RescaledPath::RescaledPath(const PolymerPath& path, std::int64_t n) : path_(&path), n_(n) {
  if (n < 1) throw std::invalid_argument("rescale: n must be >= 1");
  if (path.length() < n) throw std::invalid_argument("rescale: path shorter than n");
}

Point RescaledPath::operator()(double t) const {
  Point p = interpolate(*path_, std::clamp(t, 0.0, 1.0) * static_cast<double>(n_));
  const double inv = 1.0 / std::sqrt(static_cast<double>(n_));
  for (auto& v : p) v *= inv;
  return p;
}

std::vector<double> RescaledPath::on_grid(std::span<const double> tgrid) const {
  std::vector<double> out;
  out.reserve(tgrid.size() * static_cast<std::size_t>(dim()));
  for (double t : tgrid) {
    const Point p = (*this)(t);
    for (int i = 0; i < dim(); ++i) out.push_back(p[static_cast<std::size_t>(i)]);
  }
  return out;
}

RescaledPath rescale(const PolymerPath& path, std::int64_t n) { return RescaledPath(path, n); }

EndpointSampler::EndpointSampler(const PartitionSlice& slice) : slice_(&slice) {
  const auto values = slice.scaled();
  cumulative_.resize(values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i];
    cumulative_[i] = acc;
  }
  if (!(acc > 0.0)) throw NoMeasureError("polymer measure undefined: W_n = 0");
}

Site EndpointSampler::draw(double u) const {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  // Skip zero-weight cells that share the cumulative value.
  const auto values = slice_->scaled();
  while (values[idx] <= 0.0 && idx + 1 < values.size()) ++idx;
  while (values[idx] <= 0.0 && idx > 0) --idx;
  return slice_->box().site(idx);
}

double EndpointSampler::probability(const Site& z) const {
  if (!slice_->box().contains(z)) return 0.0;
  return slice_->scaled()[slice_->box().index(z)] / cumulative_.back();
}

PolymerPath backward_sample(std::span<const PartitionSlice> slices, const EndpointSampler& endpoint,
                            const KeyedStream& stream) {
  if (slices.empty()) throw std::invalid_argument("backward_sample: no slices");
  const int d = slices.front().dim();
  const auto n = static_cast<std::int64_t>(slices.size()) - 1;
  PolymerPath path{d, std::vector<Site>(static_cast<std::size_t>(n + 1))};
  Site z = endpoint.draw(stream.uniform(0));
  path.sites[static_cast<std::size_t>(n)] = z;

  double w[2 * kMaxDim];
  for (std::int64_t k = n; k >= 1; --k) {
    const PartitionSlice& prev = slices[static_cast<std::size_t>(k - 1)];
    const auto values = prev.scaled();
    double total = 0.0;
    for (int dir = 0; dir < 2 * d; ++dir) {
      const Site y = z - unit_step(dir);
      w[dir] = prev.box().contains(y) ? values[prev.box().index(y)] : 0.0;
      total += w[dir];
    }
    if (!(total > 0.0)) throw std::logic_error("backward_sample: slices are inconsistent");
    const double target = stream.uniform(static_cast<std::uint64_t>(k)) * total;
    int chosen = -1;
    double acc = 0.0;
    for (int dir = 0; dir < 2 * d; ++dir) {
      if (w[dir] <= 0.0) continue;
      chosen = dir;
      acc += w[dir];
      if (target < acc) break;
    }
    z = z - unit_step(chosen);
    path.sites[static_cast<std::size_t>(k - 1)] = z;
  }
  return path;
}

PolymerPath backward_sample(std::span<const PartitionSlice> slices, const KeyedStream& stream) {
  if (slices.empty()) throw std::invalid_argument("backward_sample: no slices");
  const EndpointSampler endpoint(slices.back());
  return backward_sample(slices, endpoint, stream);
}

}  // namespace polylab
