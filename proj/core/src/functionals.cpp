#include "polylab/functionals.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polylab {

namespace {
std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace

EndpointFunctional EndpointFunctional::constant(double c) {
  return EndpointFunctional("const(" + fmt_num(c) + ")", [c](const Site&) { return c; });
}

EndpointFunctional EndpointFunctional::half_space(int axis, double threshold) {
  return EndpointFunctional("half_space(x" + std::to_string(axis + 1) + ">" + fmt_num(threshold) + ")",
                            [axis, threshold](const Site& z) { return z[axis] > threshold ? 1.0 : 0.0; });
}

EndpointFunctional EndpointFunctional::l1_ball(std::int64_t radius) {
  return EndpointFunctional("l1_ball(" + std::to_string(radius) + ")",
                            [radius](const Site& z) { return l1_norm(z) <= radius ? 1.0 : 0.0; });
}

EndpointFunctional EndpointFunctional::sigmoid(int axis, double center, double width) {
  return EndpointFunctional(
      "sigmoid(x" + std::to_string(axis + 1) + "," + fmt_num(center) + "," + fmt_num(width) + ")",
      [=](const Site& z) { return 1.0 / (1.0 + std::exp(-(z[axis] - center) / width)); });
}

EndpointFunctional EndpointFunctional::cosine(int axis, double frequency) {
  return EndpointFunctional("cosine(x" + std::to_string(axis + 1) + "," + fmt_num(frequency) + ")",
                            [=](const Site& z) { return 0.5 * (1.0 + std::cos(frequency * z[axis])); });
}

EndpointFunctional EndpointFunctional::rescaled(std::string id, std::function<double(std::span<const double>)> psi,
                                                std::int64_t n, int d) {
  check_dimension(d);
  if (n < 1) throw std::invalid_argument("rescaled functional needs n >= 1");
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  return EndpointFunctional(std::move(id), [psi = std::move(psi), inv, d](const Site& z) {
    double theta[kMaxDim] = {};
    for (int i = 0; i < d; ++i) theta[i] = z[i] * inv;
    return psi(std::span<const double>(theta, static_cast<std::size_t>(d)));
  });
}

void require_unit_range(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(what + " must take values in [0, 1], got " + fmt_num(v));
  }
}

double CylinderEvent::walk_probability() const {
  return std::pow(2.0 * dim, -static_cast<double>(steps.size()));
}

void CylinderEvent::validate() const {
  check_dimension(dim);
  if (offset < 0) throw std::invalid_argument("cylinder event offset must be >= 0");
  if (steps.empty()) throw std::invalid_argument("cylinder event needs at least one step");
  for (int s : steps) {
    if (s < 0 || s >= 2 * dim) {
      throw std::invalid_argument("cylinder event step index " + std::to_string(s) + " out of range for d=" +
                                  std::to_string(dim));
    }
  }
}

std::string CylinderEvent::id() const {
  std::string s = "cyl(m=" + std::to_string(offset) + ":";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const int st = steps[i];
    s += (i ? "," : "");
    s += (st % 2 == 0 ? "+e" : "-e") + std::to_string(st / 2 + 1);
  }
  return s + ")";
}

std::vector<CylinderEvent> all_patterns(int d, std::int64_t offset, int length) {
  check_dimension(d);
  if (length < 1) throw std::invalid_argument("all_patterns: length must be >= 1");
  std::vector<CylinderEvent> out;
  std::vector<int> digits(static_cast<std::size_t>(length), 0);
  for (;;) {
    out.push_back(CylinderEvent{d, offset, digits});
    int i = length - 1;
    while (i >= 0 && ++digits[static_cast<std::size_t>(i)] == 2 * d) {
      digits[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

}  // namespace polylab
