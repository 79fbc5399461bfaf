#include "polylab/environment.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "polylab/keyed_rng.hpp"
#include "polylab/normal.hpp"

namespace polylab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double two_point_quantile(const TwoPointLaw& law, double u) {
  const bool ordered = law.low <= law.high;
  const double lo = ordered ? law.low : law.high;
  const double hi = ordered ? law.high : law.low;
  const double p_lo = ordered ? law.p_low : 1.0 - law.p_low;
  return u <= p_lo ? lo : hi;
}

double lognormal_quantile(const LogNormalLaw& law, double u) {
  if (law.beta == 0.0) return 1.0;
  return std::exp(law.beta * normal_quantile(u) - 0.5 * law.beta * law.beta);
}

double pareto_quantile(const ParetoTailLaw& law, double u) {
  return (law.alpha - 1.0) / law.alpha * std::pow(1.0 - u, -1.0 / law.alpha);
}

double get_param(const nlohmann::json& params, const char* name) {
  if (!params.contains(name) || !params.at(name).is_number()) {
    throw std::invalid_argument(std::string("environment.params.") + name + " must be a number");
  }
  return params.at(name).get<double>();
}

}  // namespace

Family family_of(const SiteLaw& law) {
  return std::visit(overloaded{[](const ConstantLaw&) { return Family::Constant; },
                               [](const TwoPointLaw&) { return Family::TwoPoint; },
                               [](const LogNormalLaw&) { return Family::LogNormal; },
                               [](const ParetoTailLaw&) { return Family::ParetoTail; }},
                    law);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Constant: return "Constant";
    case Family::TwoPoint: return "TwoPoint";
    case Family::LogNormal: return "LogNormal";
    case Family::ParetoTail: return "ParetoTail";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "Constant") return Family::Constant;
  if (name == "TwoPoint") return Family::TwoPoint;
  if (name == "LogNormal") return Family::LogNormal;
  if (name == "ParetoTail") return Family::ParetoTail;
  throw std::invalid_argument("environment.family: unknown family '" + name + "'");
}

void validate_law(const SiteLaw& law) {
  std::visit(
      overloaded{
          [](const ConstantLaw&) {},
          [](const TwoPointLaw& l) {
            if (!(l.low >= 0.0) || !(l.high > 0.0)) {
              throw std::invalid_argument("environment.params: two-point atoms need a >= 0 and b > 0");
            }
            if (!(l.p_low > 0.0 && l.p_low < 1.0)) {
              throw std::invalid_argument("environment.params.p must lie in (0, 1)");
            }
            if (std::fabs(l.p_low * l.low + (1.0 - l.p_low) * l.high - 1.0) > 1e-12) {
              throw std::invalid_argument("environment.params: p*a + (1-p)*b must equal 1");
            }
          },
          [](const LogNormalLaw& l) {
            if (!(l.beta >= 0.0) || !std::isfinite(l.beta)) {
              throw std::invalid_argument("environment.params.beta must be finite and >= 0");
            }
          },
          [](const ParetoTailLaw& l) {
            if (!(l.alpha > 1.0 && l.alpha <= 2.0)) {
              throw std::invalid_argument("environment.params.alpha must lie in (1, 2]");
            }
          }},
      law);
}

double quantile(const SiteLaw& law, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile: u must lie in (0, 1)");
  return std::visit(overloaded{[](const ConstantLaw&) { return 1.0; },
                               [u](const TwoPointLaw& l) { return two_point_quantile(l, u); },
                               [u](const LogNormalLaw& l) { return lognormal_quantile(l, u); },
                               [u](const ParetoTailLaw& l) { return pareto_quantile(l, u); }},
                    law);
}

double analytic_mean(const SiteLaw& law) {
  return std::visit(
      overloaded{[](const ConstantLaw&) { return 1.0; },
                 [](const TwoPointLaw& l) { return l.p_low * l.low + (1.0 - l.p_low) * l.high; },
                 [](const LogNormalLaw&) { return 1.0; },
                 [](const ParetoTailLaw& l) { return (l.alpha - 1.0) / l.alpha * (l.alpha / (l.alpha - 1.0)); }},
      law);
}

bool has_finite_second_moment(const SiteLaw& law) {
  // E[U^{-2/alpha}] < infinity iff alpha > 2.
  if (const auto* p = std::get_if<ParetoTailLaw>(&law)) return p->alpha > 2.0;
  return true;
}

double support_minimum(const SiteLaw& law) {
  return std::visit(overloaded{[](const ConstantLaw&) { return 1.0; },
                               [](const TwoPointLaw& l) { return std::min(l.low, l.high); },
                               [](const LogNormalLaw& l) { return l.beta == 0.0 ? 1.0 : 0.0; },
                               [](const ParetoTailLaw& l) { return (l.alpha - 1.0) / l.alpha; }},
                    law);
}

void to_json(nlohmann::json& j, const EnvironmentSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  std::visit(overloaded{[](const ConstantLaw&) {},
                        [&](const TwoPointLaw& l) {
                          params["a"] = l.low;
                          params["b"] = l.high;
                          params["p"] = l.p_low;
                        },
                        [&](const LogNormalLaw& l) { params["beta"] = l.beta; },
                        [&](const ParetoTailLaw& l) { params["alpha"] = l.alpha; }},
             spec.law);
  j = nlohmann::json{{"family", family_name(family_of(spec.law))}, {"params", params}, {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, EnvironmentSpec& spec) {
  if (!j.is_object()) throw std::invalid_argument("environment must be an object");
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw std::invalid_argument("environment.family must be a string");
  }
  const auto fam = parse_family(j.at("family").get<std::string>());
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (!params.is_object()) throw std::invalid_argument("environment.params must be an object");
  switch (fam) {
    case Family::Constant: spec.law = ConstantLaw{}; break;
    case Family::TwoPoint:
      spec.law = TwoPointLaw{get_param(params, "a"), get_param(params, "b"), get_param(params, "p")};
      break;
    case Family::LogNormal: spec.law = LogNormalLaw{get_param(params, "beta")}; break;
    case Family::ParetoTail: spec.law = ParetoTailLaw{get_param(params, "alpha")}; break;
  }
  spec.seed = 0;
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (s.is_number_unsigned()) {
      spec.seed = s.get<std::uint64_t>();
    } else if (s.is_string()) {
      const auto text = s.get<std::string>();
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(text, &used, 10);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size() || text.front() == '-') {
        throw std::invalid_argument("environment.seed must be a decimal 64-bit unsigned integer");
      }
      spec.seed = v;
    } else {
      throw std::invalid_argument("environment.seed must be a decimal 64-bit unsigned integer");
    }
  }
  validate_law(spec.law);
}

EnvironmentField::EnvironmentField(EnvironmentSpec spec, Shift shift)
    : spec_(std::move(spec)), shift_(shift) {
  validate_law(spec_.law);
}

double EnvironmentField::value(std::int64_t k, const Site& x) const {
  if (std::holds_alternative<ConstantLaw>(spec_.law)) return 1.0;
  const auto h = site_hash(spec_.seed, shift_.time + k, shift_.space + x);
  return quantile(spec_.law, to_open_unit(h));
}

void EnvironmentField::fill_row(std::int64_t k, Site first, int axis, int step, std::span<double> out) const {
  if (std::holds_alternative<ConstantLaw>(spec_.law)) {
    for (auto& v : out) v = 1.0;
    return;
  }
  // Row-invariant parts of the site hash are computed once.
  const Site origin = shift_.space + first;
  const std::uint64_t time_part = spec_.seed ^ mix64(static_cast<std::uint64_t>(shift_.time + k) * keys::kTime);
  Site rest = origin;
  rest[axis] = 0;
  const std::uint64_t packed_rest = pack_site(rest);
  const std::uint64_t mult = keys::kCoord[axis];
  std::int64_t c = origin[axis];

  auto run = [&](auto&& transform) {
    for (auto& v : out) {
      const std::uint64_t h = mix64(time_part ^ mix64(packed_rest + zigzag(c) * mult));
      v = transform(to_open_unit(h));
      c += step;
    }
  };
  std::visit(overloaded{[](const ConstantLaw&) {},
                        [&](const TwoPointLaw& l) { run([&](double u) { return two_point_quantile(l, u); }); },
                        [&](const LogNormalLaw& l) { run([&](double u) { return lognormal_quantile(l, u); }); },
                        [&](const ParetoTailLaw& l) { run([&](double u) { return pareto_quantile(l, u); }); }},
             spec_.law);
}

EnvironmentField EnvironmentField::shifted(std::int64_t n, const Site& z) const {
  if (n < 0) throw std::invalid_argument("shifted: time offset must be nonnegative");
  return EnvironmentField(spec_, Shift{shift_.time + n, shift_.space + z});
}

EnvironmentField EnvironmentField::with_seed(std::uint64_t seed) const {
  EnvironmentSpec s = spec_;
  s.seed = seed;
  return EnvironmentField(std::move(s), shift_);
}

}  // namespace polylab
