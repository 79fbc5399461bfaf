#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "polylab/environment.hpp"
#include "polylab/normal.hpp"
#include "polylab/numerics.hpp"
#include "test_support.hpp"

namespace {

using namespace polylab;

std::vector<SiteLaw> sample_laws() {
  return {ConstantLaw{}, TwoPointLaw{0.5, 1.5, 0.5}, TwoPointLaw{0.0, 2.0, 0.5}, TwoPointLaw{0.2, 1.8, 0.5},
          LogNormalLaw{0.2}, LogNormalLaw{1.5}, ParetoTailLaw{1.5}, ParetoTailLaw{2.0}};
}

Site site2(int x, int y) {
  Site s;
  s[0] = x;
  s[1] = y;
  return s;
}

TEST(NormalQuantile, InvertsTheCdf) {
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.99, 1 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-9 * std::max(1.0, p));
  }
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_THROW(normal_quantile(0.0), std::invalid_argument);
  EXPECT_THROW(normal_quantile(1.0), std::invalid_argument);
}

TEST(GaussHermite, IntegratesPolynomialMoments) {
  const auto rule = gauss_hermite_probabilists(10);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    m0 += w;
    m2 += w * x * x;
    m4 += w * std::pow(x, 4);
    m6 += w * std::pow(x, 6);
  }
  EXPECT_NEAR(m0, 1.0, 1e-13);
  EXPECT_NEAR(m2, 1.0, 1e-12);
  EXPECT_NEAR(m4, 3.0, 1e-12);
  EXPECT_NEAR(m6, 15.0, 1e-11);
}

// Property: the quantile is nondecreasing in u for every law.
TEST(Quantile, MonotoneProperty) {
  for (const auto& law : sample_laws()) {
    double prev = -1.0;
    for (int i = 1; i < 4000; ++i) {
      const double q = quantile(law, i / 4000.0);
      EXPECT_GE(q, prev) << family_name(family_of(law)) << " u=" << i / 4000.0;
      EXPECT_GE(q, support_minimum(law));
      prev = q;
    }
  }
}

// Oracle: midpoint quadrature of the quantile function gives E[zeta] = 1.
TEST(Quantile, MeanOneByQuadrature) {
  for (const auto& law : sample_laws()) {
    if (!has_finite_second_moment(law)) continue;
    // Midpoint cells cannot resolve the lognormal tail beyond beta ~ 1.
    if (const auto* ln = std::get_if<LogNormalLaw>(&law); ln && ln->beta > 1.0) continue;
    const int cells = 200000;
    KahanSum s;
    for (int i = 0; i < cells; ++i) s += quantile(law, (i + 0.5) / cells);
    EXPECT_NEAR(s.value() / cells, 1.0, 1e-4) << family_name(family_of(law));
    EXPECT_DOUBLE_EQ(analytic_mean(law), 1.0);
  }
}

TEST(Quantile, ParetoTailMeanOneAnalytically) {
  // E[c U^{-1/alpha}] = c * alpha / (alpha - 1) with c = (alpha - 1) / alpha.
  for (double alpha : {1.2, 1.5, 2.0}) EXPECT_NEAR(analytic_mean(ParetoTailLaw{alpha}), 1.0, 1e-15);
  EXPECT_FALSE(has_finite_second_moment(ParetoTailLaw{1.5}));
}

TEST(Quantile, RejectsClosedEndpoints) {
  EXPECT_THROW(quantile(LogNormalLaw{1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(quantile(LogNormalLaw{1.0}, 1.0), std::invalid_argument);
}

TEST(ValidateLaw, RejectsInvalidParameters) {
  EXPECT_THROW(validate_law(TwoPointLaw{0.5, 1.0, 0.5}), std::invalid_argument);  // mean != 1
  EXPECT_THROW(validate_law(TwoPointLaw{0.5, 1.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(validate_law(LogNormalLaw{-0.1}), std::invalid_argument);
  EXPECT_THROW(validate_law(ParetoTailLaw{1.0}), std::invalid_argument);
  EXPECT_THROW(validate_law(ParetoTailLaw{2.5}), std::invalid_argument);
  EXPECT_NO_THROW(validate_law(TwoPointLaw{0.0, 2.0, 0.5}));
}

TEST(EnvironmentField, IsDeterministicAndSeedSensitive) {
  const auto a = fixtures::lognormal(1.0, 17);
  const auto b = fixtures::lognormal(1.0, 17);
  const auto c = fixtures::lognormal(1.0, 18);
  int differ = 0;
  for (std::int64_t k = 1; k < 30; ++k) {
    for (int x = -5; x <= 5; ++x) {
      EXPECT_EQ(site_value(a, k, site2(x, 0)), site_value(b, k, site2(x, 0)));
      differ += site_value(a, k, site2(x, 0)) != site_value(c, k, site2(x, 0));
    }
  }
  EXPECT_EQ(differ, 29 * 11);
}

// Property: shifts compose additively and index the same underlying field.
TEST(EnvironmentField, ShiftCompositionProperty) {
  const auto field = fixtures::lognormal(0.7, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t n1 = trial % 7, n2 = (trial * 3) % 5;
    const Site z1 = site2(trial % 4 - 2, trial % 3), z2 = site2(-(trial % 5), 1);
    const auto twice = shifted(shifted(field, n1, z1), n2, z2);
    const auto once = shifted(field, n1 + n2, z1 + z2);
    for (std::int64_t k = 1; k < 6; ++k) {
      const Site x = site2(static_cast<int>(k) - 3, trial % 2);
      EXPECT_EQ(site_value(twice, k, x), site_value(once, k, x));
      EXPECT_EQ(site_value(once, k, x), site_value(field, k + n1 + n2, x + z1 + z2));
    }
  }
  EXPECT_THROW(field.shifted(-1, Site{}), std::invalid_argument);
}

// Property: the batched row fill agrees with per-site evaluation.
TEST(EnvironmentField, FillRowMatchesValueProperty) {
  for (const auto& law : sample_laws()) {
    const EnvironmentField field(EnvironmentSpec{law, 1234}, Shift{3, site2(1, -2)});
    for (int axis = 0; axis < 2; ++axis) {
      for (int step : {1, 2}) {
        std::vector<double> row(13);
        const Site first = site2(-6, 4);
        field.fill_row(9, first, axis, step, row);
        Site x = first;
        for (double v : row) {
          EXPECT_EQ(v, field.value(9, x));
          x[axis] += step;
        }
      }
    }
  }
}

TEST(EnvironmentField, EmpiricalLawMatchesTwoPointAtoms) {
  const auto field = fixtures::two_point(0.0, 2.0, 0.5, 8);
  int zeros = 0, total = 0;
  for (std::int64_t k = 1; k <= 200; ++k) {
    for (int x = -50; x <= 50; ++x) {
      const double v = site_value(field, k, site2(x, 0));
      ASSERT_TRUE(v == 0.0 || v == 2.0);
      zeros += v == 0.0;
      ++total;
    }
  }
  const double p = static_cast<double>(zeros) / total;
  EXPECT_NEAR(p, 0.5, 5.0 * std::sqrt(0.25 / total));
}

TEST(EnvironmentSpec, JsonRoundTrip) {
  for (const auto& law : sample_laws()) {
    const EnvironmentSpec spec{law, 0xFFFFFFFFFFFFFFFFULL};
    const nlohmann::json j = spec;
    EXPECT_EQ(j.get<EnvironmentSpec>(), spec) << j.dump();
  }
}

TEST(EnvironmentSpec, SeedAcceptsDecimalStrings) {
  const auto j = nlohmann::json::parse(R"({"family": "LogNormal", "params": {"beta": 0.5}, "seed": "18446744073709551615"})");
  EXPECT_EQ(j.get<EnvironmentSpec>().seed, 0xFFFFFFFFFFFFFFFFULL);
  const auto bad = nlohmann::json::parse(R"({"family": "LogNormal", "params": {"beta": 0.5}, "seed": "-1"})");
  EXPECT_THROW(bad.get<EnvironmentSpec>(), std::invalid_argument);
  const auto unknown = nlohmann::json::parse(R"({"family": "Gamma"})");
  EXPECT_THROW(unknown.get<EnvironmentSpec>(), std::invalid_argument);
}

}  // namespace
