#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polylab/lattice.hpp"

namespace polylab {

/// A map g: Z^d -> [0, 1] applied to the endpoint X_n of the walk.
/// The range is checked where g is evaluated, not at construction.
class EndpointFunctional {
 public:
  using Rule = std::function<double(const Site&)>;

  EndpointFunctional(std::string id, Rule rule) : id_(std::move(id)), rule_(std::move(rule)) {}

  const std::string& id() const { return id_; }
  double operator()(const Site& z) const { return rule_(z); }

  static EndpointFunctional constant(double c);
  /// 1{z_axis > threshold}
  static EndpointFunctional half_space(int axis, double threshold);
  /// 1{|z|_1 <= radius}
  static EndpointFunctional l1_ball(std::int64_t radius);
  /// 1 / (1 + exp(-(z_axis - center) / width))
  static EndpointFunctional sigmoid(int axis, double center, double width);
  /// (1 + cos(frequency * z_axis)) / 2
  static EndpointFunctional cosine(int axis, double frequency);
  /// psi(z / sqrt(n)) for psi on R^d: the endpoint of the diffusively rescaled path.
  static EndpointFunctional rescaled(std::string id, std::function<double(std::span<const double>)> psi,
                                     std::int64_t n, int d);

 private:
  std::string id_;
  Rule rule_;
};

/// Throws std::invalid_argument when v is not in [0, 1].
void require_unit_range(double v, const std::string& what);

/// The event {X_{offset+i} - X_{offset+i-1} = step_i, i = 1..j}: determined
/// by increments after time `offset` only.
struct CylinderEvent {
  int dim = 1;
  std::int64_t offset = 0;
  std::vector<int> steps;  ///< step indices in [0, 2*dim), see unit_step()

  std::int64_t length() const { return static_cast<std::int64_t>(steps.size()); }
  std::int64_t end() const { return offset + length(); }
  /// Probability under the simple random walk, (2d)^{-j}.
  double walk_probability() const;
  /// Throws std::invalid_argument for an empty pattern or an invalid step.
  void validate() const;
  std::string id() const;
};

/// All (2d)^j patterns of length j at a given offset, in lexicographic order.
std::vector<CylinderEvent> all_patterns(int d, std::int64_t offset, int length);

}  // namespace polylab
