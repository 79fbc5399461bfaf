#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace polylab {

/// Largest lattice dimension supported by the fixed-size site type.
inline constexpr int kMaxDim = 4;

/// A point of Z^d. Coordinates beyond the active dimension are kept at zero,
/// so sites of different dimensions never need to be mixed.
struct Site {
  std::array<std::int32_t, kMaxDim> coord{};

  constexpr std::int32_t& operator[](int i) { return coord[static_cast<std::size_t>(i)]; }
  constexpr std::int32_t operator[](int i) const { return coord[static_cast<std::size_t>(i)]; }

  friend constexpr bool operator==(const Site&, const Site&) = default;
  friend constexpr auto operator<=>(const Site&, const Site&) = default;

  friend constexpr Site operator+(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
    return a;
  }
  friend constexpr Site operator-(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] -= b[i];
    return a;
  }
};

inline void check_dimension(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("lattice dimension must lie in [1, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(d));
  }
}

/// Nearest-neighbour steps are numbered 0..2d-1: step 2i is +e_i, step 2i+1 is -e_i.
constexpr Site unit_step(int dir) {
  Site s;
  s[dir / 2] = (dir % 2 == 0) ? 1 : -1;
  return s;
}

constexpr int step_count(int d) { return 2 * d; }

constexpr std::int64_t l1_norm(const Site& z) {
  std::int64_t r = 0;
  for (int i = 0; i < kMaxDim; ++i) r += z[i] < 0 ? -std::int64_t{z[i]} : std::int64_t{z[i]};
  return r;
}

constexpr std::int64_t coordinate_sum(const Site& z) {
  std::int64_t r = 0;
  for (int i = 0; i < kMaxDim; ++i) r += z[i];
  return r;
}

/// True when z can be the position of a nearest-neighbour walk at time n.
constexpr bool reachable(const Site& z, std::int64_t n) {
  const auto norm = l1_norm(z);
  return norm <= n && ((coordinate_sum(z) - n) % 2 == 0);
}

/// Dense cube [-radius, radius]^d in row-major order (last axis fastest).
class Box {
 public:
  Box() = default;
  Box(int d, int radius) : d_(d), radius_(radius), side_(2 * radius + 1) {
    check_dimension(d);
    if (radius < 0) throw std::invalid_argument("box radius must be nonnegative");
    size_ = 1;
    for (int i = 0; i < d; ++i) {
      stride_[static_cast<std::size_t>(d - 1 - i)] = size_;
      size_ *= static_cast<std::size_t>(side_);
    }
  }

  int dim() const { return d_; }
  int radius() const { return radius_; }
  int side() const { return side_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

  bool contains(const Site& z) const {
    for (int i = 0; i < d_; ++i) {
      if (z[i] < -radius_ || z[i] > radius_) return false;
    }
    for (int i = d_; i < kMaxDim; ++i) {
      if (z[i] != 0) return false;
    }
    return true;
  }

  std::size_t index(const Site& z) const {
    std::size_t idx = 0;
    for (int i = 0; i < d_; ++i) {
      idx += static_cast<std::size_t>(z[i] + radius_) * stride_[static_cast<std::size_t>(i)];
    }
    return idx;
  }

  Site site(std::size_t idx) const {
    Site z;
    for (int i = 0; i < d_; ++i) {
      const auto s = stride_[static_cast<std::size_t>(i)];
      z[i] = static_cast<std::int32_t>(idx / s) - radius_;
      idx %= s;
    }
    return z;
  }

 private:
  int d_ = 1;
  int radius_ = 0;
  int side_ = 1;
  std::size_t size_ = 1;
  std::array<std::size_t, kMaxDim> stride_{};
};

}  // namespace polylab
