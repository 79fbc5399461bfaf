#include "polylab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "polylab/numerics.hpp"

namespace polylab {

int Truncation::radius_at(std::int64_t k) const {
  if (!enabled()) return static_cast<int>(k);
  const auto window = static_cast<std::int64_t>(std::ceil(c * std::sqrt(static_cast<double>(k))));
  return static_cast<int>(std::min(k, window));
}

PartitionSlice::PartitionSlice(int d, std::int64_t n, int radius, std::vector<double> scaled, double log_scale,
                               double discarded)
    : box_(d, radius), n_(n), scaled_(std::move(scaled)), log_scale_(log_scale), discarded_(discarded) {
  if (n < 0) throw std::invalid_argument("PartitionSlice: time must be >= 0");
  if (scaled_.size() != box_.size()) throw std::invalid_argument("PartitionSlice: value count does not match box");
}

PartitionSlice PartitionSlice::origin(int d) { return PartitionSlice(d, 0, 0, {1.0}, 0.0); }

double PartitionSlice::log_weight(const Site& z) const {
  if (!box_.contains(z)) return kNegInf;
  const double v = scaled_[box_.index(z)];
  return v > 0.0 ? std::log(v) + log_scale_ : kNegInf;
}

double PartitionSlice::log_total() const {
  KahanSum s;
  for (double v : scaled_) s += v;
  const double total = s.value();
  return total > 0.0 ? std::log(total) + log_scale_ : kNegInf;
}

std::size_t PartitionSlice::support_size() const {
  return static_cast<std::size_t>(std::count_if(scaled_.begin(), scaled_.end(), [](double v) { return v > 0.0; }));
}

void PartitionSlice::check_invariants() const {
  if (!std::isfinite(log_scale_)) throw std::logic_error("PartitionSlice: non-finite log scale");
  for (std::size_t i = 0; i < scaled_.size(); ++i) {
    const double v = scaled_[i];
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::logic_error("PartitionSlice: negative or non-finite entry");
    if (v > 0.0 && !reachable(box_.site(i), n_)) {
      throw std::logic_error("PartitionSlice: mass outside the reachable support at time " + std::to_string(n_));
    }
  }
  if (n_ == 0 && std::fabs(log_total()) != 0.0) throw std::logic_error("PartitionSlice: slice 0 must have mass 1");
}

namespace {

/// Copies `slice` into a zero-padded box of radius `radius` (>= slice radius).
std::vector<double> embed(const PartitionSlice& slice, const Box& target) {
  std::vector<double> out(target.size(), 0.0);
  const Box& src = slice.box();
  const auto row = static_cast<std::size_t>(src.side());
  const auto values = slice.scaled();
  for (std::size_t start = 0; start < src.size(); start += row) {
    const Site first = src.site(start);
    std::memcpy(out.data() + target.index(first), values.data() + start, row * sizeof(double));
  }
  return out;
}

/// Sum of values on the face {z : z_axis = coord} of `box`.
double face_sum(const Box& box, std::span<const double> values, int axis, int coord) {
  const int d = box.dim();
  const int r = box.radius();
  double s = 0.0;
  Site z;
  for (int i = 0; i < d; ++i) z[i] = -r;
  z[axis] = coord;
  for (;;) {
    s += values[box.index(z)];
    int i = d - 1;
    for (; i >= 0; --i) {
      if (i == axis) continue;
      if (++z[i] <= r) break;
      z[i] = -r;
    }
    if (i < 0) break;
  }
  return s;
}

/// Core transfer step. `dirs` lists the allowed increments; the new value at z
/// collects u(z - e_dir) over dir in dirs.
PartitionSlice transfer(const SiteWeights& weights, const PartitionSlice& prev, std::span<const int> dirs,
                        const Truncation& truncation) {
  const int d = prev.dim();
  const std::int64_t n1 = prev.time() + 1;
  const int r_new = std::min(truncation.radius_at(n1), prev.box().radius() + 1);
  const Box out_box(d, r_new);
  const Box pad_box(d, r_new + 1);
  const std::vector<double> pad = embed(prev, pad_box);

  // Source offset (in padded index space) for each allowed increment.
  std::vector<std::ptrdiff_t> offsets;
  offsets.reserve(dirs.size());
  for (int dir : dirs) {
    const auto stride = static_cast<std::ptrdiff_t>(pad_box.stride(dir / 2));
    offsets.push_back(dir % 2 == 0 ? -stride : stride);
  }

  std::vector<double> out(out_box.size(), 0.0);
  std::vector<double> zeta(static_cast<std::size_t>(out_box.side()));
  const double inv2d = 1.0 / (2.0 * d);
  double max_value = 0.0;

  // Odometer over the first d-1 coordinates; the last axis is the inner row.
  Site prefix;
  for (int i = 0; i + 1 < d; ++i) prefix[i] = -r_new;
  for (;;) {
    std::int64_t prefix_norm = 0;
    std::int64_t prefix_sum = 0;
    for (int i = 0; i + 1 < d; ++i) {
      prefix_norm += std::abs(prefix[i]);
      prefix_sum += prefix[i];
    }
    const std::int64_t room = n1 - prefix_norm;
    if (room >= 0) {
      const int lim = static_cast<int>(std::min<std::int64_t>(r_new, room));
      // Reachable cells satisfy sum(z) == n1 (mod 2).
      int start = -lim;
      if (((prefix_sum + start - n1) % 2 + 2) % 2 != 0) ++start;
      if (start <= lim) {
        const auto count = static_cast<std::size_t>((lim - start) / 2 + 1);
        Site first = prefix;
        first[d - 1] = start;
        weights.fill_row(n1, first, d - 1, 2, std::span<double>(zeta.data(), count));
        auto oi = out_box.index(first);
        auto pi = static_cast<std::ptrdiff_t>(pad_box.index(first));
        for (std::size_t j = 0; j < count; ++j, oi += 2, pi += 2) {
          double acc = 0.0;
          for (auto off : offsets) acc += pad[static_cast<std::size_t>(pi + off)];
          const double v = zeta[j] * acc * inv2d;
          out[oi] = v;
          max_value = std::max(max_value, v);
        }
      }
    }
    int axis = d - 2;
    while (axis >= 0 && ++prefix[axis] > r_new) {
      prefix[axis] = -r_new;
      --axis;
    }
    if (axis < 0) break;
  }

  // Expected relative mass lost across the window edge (truncated runs only).
  double discarded = prev.discarded_fraction();
  if (r_new <= prev.box().radius()) {
    const Box& pb = prev.box();
    const auto values = prev.scaled();
    double total = 0.0;
    for (double v : values) total += v;
    double lost = 0.0;
    for (int dir : dirs) {
      const int axis = dir / 2;
      const int face = dir % 2 == 0 ? pb.radius() : -pb.radius();
      lost += face_sum(pb, values, axis, face);
    }
    const double moved = total * static_cast<double>(dirs.size());
    if (moved > 0.0) discarded += lost / moved;
  }

  double log_scale = prev.log_scale();
  if (max_value > 0.0) {
    const double inv = 1.0 / max_value;
    for (double& v : out) v *= inv;
    log_scale += std::log(max_value);
  }
  return PartitionSlice(d, n1, r_new, std::move(out), log_scale, discarded);
}

}  // namespace

PartitionSlice forward_step(const SiteWeights& weights, const PartitionSlice& slice, const Truncation& truncation) {
  int dirs[2 * kMaxDim];
  for (int i = 0; i < 2 * slice.dim(); ++i) dirs[i] = i;
  return transfer(weights, slice, std::span<const int>(dirs, static_cast<std::size_t>(2 * slice.dim())), truncation);
}

PartitionSlice forced_step(const SiteWeights& weights, const PartitionSlice& slice, int dir,
                           const Truncation& truncation) {
  if (dir < 0 || dir >= 2 * slice.dim()) throw std::invalid_argument("forced_step: step index out of range");
  return transfer(weights, slice, std::span<const int>(&dir, 1), truncation);
}

PartitionSlice propagate(const SiteWeights& weights, PartitionSlice slice, std::int64_t to,
                         const Truncation& truncation) {
  if (to < slice.time()) throw std::invalid_argument("propagate: target time precedes the slice");
  while (slice.time() < to) slice = forward_step(weights, slice, truncation);
  return slice;
}

std::vector<PartitionSlice> forward_slices(const SiteWeights& weights, int d, std::int64_t n,
                                           const Truncation& truncation) {
  if (n < 0) throw std::invalid_argument("forward_slices: n must be >= 0");
  std::vector<PartitionSlice> slices;
  slices.reserve(static_cast<std::size_t>(n + 1));
  slices.push_back(PartitionSlice::origin(d));
  for (std::int64_t k = 0; k < n; ++k) slices.push_back(forward_step(weights, slices.back(), truncation));
  return slices;
}

double total_mass(const PartitionSlice& slice) { return slice.log_total(); }

double endpoint_mass(const PartitionSlice& slice, const EndpointFunctional& g) {
  KahanSum s;
  const auto values = slice.scaled();
  const Box& box = slice.box();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    const double gz = g(box.site(i));
    require_unit_range(gz, "endpoint functional " + g.id());
    s += values[i] * gz;
  }
  const double total = s.value();
  return total > 0.0 ? std::log(total) + slice.log_scale() : kNegInf;
}

double constrained_mass(const SiteWeights& weights, std::int64_t n, const CylinderEvent& event,
                        const Truncation& truncation) {
  event.validate();
  if (event.end() > n) {
    throw std::invalid_argument("constrained_mass: event ends at time " + std::to_string(event.end()) +
                                " beyond n = " + std::to_string(n));
  }
  PartitionSlice slice = propagate(weights, PartitionSlice::origin(event.dim), event.offset, truncation);
  for (int dir : event.steps) slice = forced_step(weights, slice, dir, truncation);
  slice = propagate(weights, std::move(slice), n, truncation);
  return total_mass(slice);
}

DecompositionResidual decomposition_residual(const EnvironmentField& field, int d, std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0) throw std::invalid_argument("decomposition_residual: n and k must be >= 0");
  const PartitionSlice head = propagate(field, PartitionSlice::origin(d), n);
  const double direct = total_mass(propagate(field, head, n + k));

  // log W_k of the shifted environment for every support site of u_n.
  const auto values = head.scaled();
  std::vector<double> tail(values.size(), kNegInf);
  double tail_max = kNegInf;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    const EnvironmentField moved = field.shifted(n, head.box().site(i));
    tail[i] = total_mass(propagate(moved, PartitionSlice::origin(d), k));
    tail_max = std::max(tail_max, tail[i]);
  }
  double recomposed = kNegInf;
  if (tail_max > kNegInf) {
    KahanSum s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > 0.0 && tail[i] > kNegInf) s += values[i] * std::exp(tail[i] - tail_max);
    }
    if (s.value() > 0.0) recomposed = std::log(s.value()) + head.log_scale() + tail_max;
  }

  if (direct == kNegInf) return {recomposed == kNegInf ? 0.0 : std::exp(recomposed), true};
  if (recomposed == kNegInf) return {1.0, false};
  return {std::fabs(std::expm1(recomposed - direct)), false};
}

void write_csv(std::ostream& os, const PartitionSlice& slice) {
  const int d = slice.dim();
  for (int i = 0; i < d; ++i) os << "z_" << (i + 1) << ',';
  os << "log_u\n";
  os.precision(17);
  slice.for_each_support([&](const Site& z, double log_u) {
    for (int i = 0; i < d; ++i) os << z[i] << ',';
    os << log_u << '\n';
  });
}

}  // namespace polylab
