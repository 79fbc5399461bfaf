#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "polylab/lattice.hpp"
#include "polylab/site_weights.hpp"

namespace polylab {

// Mean-one laws for the site weights zeta.

struct ConstantLaw {
  friend bool operator==(const ConstantLaw&, const ConstantLaw&) = default;
};

/// P(zeta = low) = p_low, P(zeta = high) = 1 - p_low, with p_low*low + (1-p_low)*high = 1.
/// low = 0 is admitted so that P(zeta > 0) < 1 can be studied.
struct TwoPointLaw {
  double low = 0.5;
  double high = 1.5;
  double p_low = 0.5;
  friend bool operator==(const TwoPointLaw&, const TwoPointLaw&) = default;
};

/// zeta = exp(beta G - beta^2 / 2), G standard normal.
struct LogNormalLaw {
  double beta = 0.0;
  friend bool operator==(const LogNormalLaw&, const LogNormalLaw&) = default;
};

/// zeta = ((alpha-1)/alpha) U^{-1/alpha}, U uniform; infinite variance for alpha <= 2.
struct ParetoTailLaw {
  double alpha = 1.5;
  friend bool operator==(const ParetoTailLaw&, const ParetoTailLaw&) = default;
};

using SiteLaw = std::variant<ConstantLaw, TwoPointLaw, LogNormalLaw, ParetoTailLaw>;

enum class Family { Constant, TwoPoint, LogNormal, ParetoTail };

Family family_of(const SiteLaw& law);
std::string family_name(Family f);
Family parse_family(const std::string& name);

/// Throws std::invalid_argument when parameters violate the law's constraints.
void validate_law(const SiteLaw& law);

/// Inverse CDF (left-continuous generalized inverse). Nondecreasing in u.
/// Throws std::invalid_argument for u outside (0, 1).
double quantile(const SiteLaw& law, double u);

double analytic_mean(const SiteLaw& law);
bool has_finite_second_moment(const SiteLaw& law);
/// Lower end of the support; zero for a two-point law with an atom at 0.
double support_minimum(const SiteLaw& law);

struct EnvironmentSpec {
  SiteLaw law = ConstantLaw{};
  std::uint64_t seed = 0;
  friend bool operator==(const EnvironmentSpec&, const EnvironmentSpec&) = default;
};

void to_json(nlohmann::json& j, const EnvironmentSpec& spec);
void from_json(const nlohmann::json& j, EnvironmentSpec& spec);

struct Shift {
  std::int64_t time = 0;
  Site space{};
  friend bool operator==(const Shift&, const Shift&) = default;
};

/// The i.i.d. field zeta, keyed by (seed, k, x), possibly viewed through a
/// space-time shift: value(k, x) = zeta_{shift.time + k, shift.space + x}.
///
/// Immutable and cheap to copy; safe to share across threads.
class EnvironmentField final : public SiteWeights {
 public:
  explicit EnvironmentField(EnvironmentSpec spec, Shift shift = {});

  const EnvironmentSpec& spec() const { return spec_; }
  const Shift& shift() const { return shift_; }

  double value(std::int64_t k, const Site& x) const override;
  void fill_row(std::int64_t k, Site first, int axis, int step, std::span<double> out) const override;

  /// Shifts compose additively: shifted(a).shifted(b) == shifted(a + b).
  EnvironmentField shifted(std::int64_t n, const Site& z) const;

  /// Same law and shift, different seed (replica r of a run).
  EnvironmentField with_seed(std::uint64_t seed) const;

 private:
  EnvironmentSpec spec_;
  Shift shift_;
};

/// zeta_{k,x} of `field`; k >= 1.
inline double site_value(const EnvironmentField& field, std::int64_t k, const Site& x) {
  return field.value(k, x);
}

inline EnvironmentField shifted(const EnvironmentField& field, std::int64_t n, const Site& z) {
  return field.shifted(n, z);
}

}  // namespace polylab
