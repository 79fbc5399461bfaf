#include <gtest/gtest.h>

#include <cmath>

#include "polylab/config.hpp"
#include "polylab/oracle.hpp"
#include "polylab/verify.hpp"
#include "test_support.hpp"

namespace {

using namespace polylab;

ReplicaPlan plan_for(SiteLaw law, int d, std::size_t replicas, std::uint64_t seed = 1) {
  ReplicaPlan p;
  p.environment = EnvironmentSpec{law, seed};
  p.d = d;
  p.replicas = replicas;
  return p;
}

std::vector<NamedPathFunctional> tiny_family(int d) {
  std::vector<NamedPathFunctional> out;
  for (const auto& spec : default_g_family()) out.push_back(endpoint_as_path(make_endpoint_functional(spec, d)));
  return out;
}

TEST(Martingale, ExactResidualVanishes) {
  for (const auto& [d, n, law] : {std::tuple{1, 3, TwoPointLaw{0.0, 2.0, 0.5}}, std::tuple{1, 4, TwoPointLaw{0.25, 1.75, 0.5}},
                                  std::tuple{2, 2, TwoPointLaw{0.5, 2.0, 2.0 / 3.0}}}) {
    const TinyInstance inst(d, n, law);
    EXPECT_LE(martingale_residual_exact(inst), 1e-12) << "d=" << d << " n=" << n;
  }
}

// Independent recomputation of E|W_n(g) - W_m(g)| straight from the oracles.
TEST(Contraction, ExhaustiveMatchesDirectOracle) {
  const TinyInstance inst(1, 3, TwoPointLaw{0.0, 2.0, 0.5});
  const auto family = tiny_family(1);
  const auto records = contraction_exhaustive(inst, 1, family);
  ASSERT_EQ(records.size(), family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& f = family[i].f;
    const double lhs = enumerate_environment_expectation(inst, [&](const AtomWeights& w) {
      const HorizonWeights wm(w, 1);
      return std::fabs(enumerate_path_mass(w, 1, 3, f) - enumerate_path_mass(wm, 1, 3, f));
    });
    EXPECT_NEAR(records[i].lhs, lhs, 1e-14) << records[i].g_id;
    EXPECT_TRUE(records[i].pass) << records[i].g_id;
    EXPECT_LE(records[i].lhs, records[i].rhs + 1e-12);
    EXPECT_EQ(records[i].mode, "exhaustive");
  }
  // g == 1 turns the inequality into an equality.
  EXPECT_NEAR(records[0].lhs, records[0].rhs, 1e-15);
}

TEST(Contraction, RejectsFunctionalsOutsideUnitRange) {
  const TinyInstance inst(1, 2, TwoPointLaw{});
  const std::vector<NamedPathFunctional> bad{{"two", [](const PolymerPath&) { return 2.0; }}};
  EXPECT_THROW(contraction_exhaustive(inst, 1, bad), std::invalid_argument);
}

TEST(Contraction, MonteCarloOnConstantEnvironmentIsExact) {
  const std::vector<EndpointFunctional> g{EndpointFunctional::half_space(0, 0.0)};
  const auto recs = contraction_monte_carlo(plan_for(ConstantLaw{}, 1, 10), 2, 6, g);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_NEAR(recs[0].lhs, 0.0, 1e-15);
  EXPECT_NEAR(recs[0].rhs, 0.0, 1e-15);
  EXPECT_TRUE(recs[0].pass);
}

TEST(Contraction, MonteCarloHoldsInWeakDisorder) {
  std::vector<EndpointFunctional> g;
  for (const auto& spec : default_g_family()) g.push_back(make_endpoint_functional(spec, 1));
  for (const auto& r : contraction_monte_carlo(plan_for(LogNormalLaw{0.5}, 1, 300), 3, 12, g)) {
    EXPECT_TRUE(r.pass) << r.g_id << " lhs=" << r.lhs << " rhs=" << r.rhs;
    EXPECT_NEAR(r.allowance, 4.0 * std::hypot(r.lhs_se, r.rhs_se), 1e-15);
  }
}

TEST(Fkg, BernoulliVariance) {
  const double p = 0.3;
  ProductSpace space{{{1 - p, p}, {0.5, 0.5}}};
  const ProductFunction x0 = [](std::span<const int> v) { return static_cast<double>(v[0]); };
  const auto r = fkg_exhaustive(space, x0, x0);
  EXPECT_NEAR(r.covariance, p * (1 - p), 1e-15);
  EXPECT_NEAR(r.mean_f, p, 1e-15);
}

TEST(Fkg, IndependentCoordinatesHaveZeroCovariance) {
  ProductSpace space{{{0.2, 0.3, 0.5}, {0.6, 0.4}}};
  const ProductFunction a = [](std::span<const int> v) { return static_cast<double>(v[0] * v[0]); };
  const ProductFunction b = [](std::span<const int> v) { return static_cast<double>(v[1]); };
  EXPECT_NEAR(fkg_exhaustive(space, a, b).covariance, 0.0, 1e-15);
}

TEST(Fkg, RejectsNonMonotoneFunctions) {
  ProductSpace space{{{0.5, 0.5}, {0.5, 0.5}}};
  const ProductFunction up = [](std::span<const int> v) { return static_cast<double>(v[0] + v[1]); };
  const ProductFunction down = [](std::span<const int> v) { return -static_cast<double>(v[1]); };
  try {
    fkg_exhaustive(space, up, down);
    FAIL() << "expected NonMonotoneError";
  } catch (const NonMonotoneError& e) {
    EXPECT_EQ(e.coordinate(), 1);
  }
  ProductSpace bad{{{0.5, 0.6}}};
  EXPECT_THROW(fkg_exhaustive(bad, up, up), std::invalid_argument);
}

// Property: random coordinatewise increasing pairs are positively correlated.
TEST(Fkg, RandomIncreasingPairsProperty) {
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const KeyedStream s = KeyedStream::derive(trial, keys::kCalibrationTag, 0, 0);
    std::uint64_t c = 0;
    ProductSpace space;
    const int coords = 1 + static_cast<int>(s.uniform(c++) * 6);
    for (int i = 0; i < coords; ++i) {
      const int levels = 2 + static_cast<int>(s.uniform(c++) * 2);
      std::vector<double> p(static_cast<std::size_t>(levels));
      double total = 0.0;
      for (auto& x : p) total += (x = 0.05 + s.uniform(c++));
      for (auto& x : p) x /= total;
      space.probabilities.push_back(p);
    }
    // f = sum_i w_i v_i^2, g = max_i u_i v_i: both nondecreasing.
    std::vector<double> w(static_cast<std::size_t>(coords)), u(static_cast<std::size_t>(coords));
    for (int i = 0; i < coords; ++i) {
      w[static_cast<std::size_t>(i)] = s.uniform(c++);
      u[static_cast<std::size_t>(i)] = s.uniform(c++);
    }
    const ProductFunction f = [&](std::span<const int> v) {
      double r = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) r += w[i] * v[i] * v[i];
      return r;
    };
    const ProductFunction g = [&](std::span<const int> v) {
      double r = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, u[i] * v[i]);
      return r;
    };
    EXPECT_GE(fkg_exhaustive(space, f, g).covariance, -1e-12) << "trial " << trial;
  }
}

TEST(Fkg, LemmaPairIsPositivelyCorrelated) {
  const TinyInstance inst(1, 4, TwoPointLaw{0.0, 2.0, 0.5});
  for (const auto& spec : default_g_family()) {
    const auto g = make_endpoint_functional(spec, 1);
    for (std::int64_t m : {0, 1, 2}) {
      for (const auto& r : fkg_lemma_pair(inst, m, g)) {
        EXPECT_GE(r.covariance, -1e-12) << g.id() << " m=" << m << " atom " << r.fixed_atom;
        EXPECT_NEAR(r.mean_f, 0.0, 1e-12);
      }
    }
  }
}

TEST(Survival, ConstantEnvironmentNeverDecays) {
  const std::vector<std::int64_t> grid{5, 10, 20};
  const auto scan = survival_scan(plan_for(ConstantLaw{}, 2, 5), grid, 1e-3);
  ASSERT_EQ(scan.rows.size(), 3u);
  for (const auto& row : scan.rows) {
    EXPECT_NEAR(row.mean_w, 1.0, 1e-12);
    EXPECT_EQ(row.frac_above, 1.0);
    EXPECT_NEAR(row.mean_log_rate, 0.0, 1e-12);
  }
  EXPECT_TRUE(scan.positivity_nested);
  EXPECT_THROW(survival_scan(plan_for(ConstantLaw{}, 1, 2), std::vector<std::int64_t>{4, 4}, 1e-3), std::invalid_argument);
}

TEST(Survival, PositivityShrinksWithAtomAtZero) {
  const std::vector<std::int64_t> grid{2, 4, 8, 16};
  const auto scan = survival_scan(plan_for(TwoPointLaw{0.0, 2.0, 0.5}, 1, 300), grid, 1e-3);
  EXPECT_TRUE(scan.positivity_nested);
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    EXPECT_LE(scan.rows[i].frac_positive, scan.rows[i - 1].frac_positive);
  }
  EXPECT_LT(scan.rows.back().frac_positive, 0.5);
}

TEST(Survival, MeanOneWithinStandardErrors) {
  const std::vector<std::int64_t> grid{10};
  const auto scan = survival_scan(plan_for(LogNormalLaw{0.5}, 1, 2000, 3), grid, 1e-3);
  EXPECT_LE(std::fabs(scan.rows[0].mean_z), 4.0);
}

TEST(BrownianExpectation, ClosedForms) {
  for (int d = 1; d <= 3; ++d) {
    const auto bump = make_brownian_functional({"gaussianBump", {{"scale", 1.0}}}, d);
    EXPECT_NEAR(brownian_expectation(bump, d), std::pow(1.0 + 2.0 / d, -d / 2.0), 1e-12);
    const auto cosine = make_brownian_functional({"cosine", {{"axis", 1.0}, {"frequency", 2.0}}}, d);
    EXPECT_NEAR(brownian_expectation(cosine, d), 0.5 * (1.0 + std::exp(-2.0 / d)), 1e-12);
    const auto sig = make_brownian_functional({"sigmoid", {{"axis", 1.0}, {"center", 0.0}, {"width", 0.5}}}, d);
    EXPECT_NEAR(brownian_expectation(sig, d), 0.5, 1e-12);
  }
}

TEST(Schedule, ConstantEnvironmentHasNoFirstColumn) {
  const std::vector<std::int64_t> grid{16, 81};
  std::vector<BrownianFunctional> phis;
  for (const auto& spec : default_phi_family()) phis.push_back(make_brownian_functional(spec, 2));
  const auto rows = theorem_schedule_check(plan_for(ConstantLaw{}, 2, 3), grid, phis, 1e-3);
  ASSERT_EQ(rows.size(), 2 * phis.size());
  for (const auto& r : rows) {
    EXPECT_LT(r.median_first, 1e-12) << r.phi_id;
    EXPECT_EQ(r.m, r.n == 16 ? 2 : 3);
    EXPECT_EQ(r.survivors, 3u);
  }
}

TEST(Schedule, NoSurvivorsIsDegenerate) {
  const std::vector<std::int64_t> grid{16};
  const std::vector<BrownianFunctional> phis{make_brownian_functional({"gaussianBump", {}}, 1)};
  EXPECT_THROW(theorem_schedule_check(plan_for(LogNormalLaw{3.0}, 1, 3), grid, phis, 1e300), DegenerateInputError);
}

TEST(Uniformity, ConstrainedMassAnyMatchesOracle) {
  const auto field = fixtures::lognormal(0.8, 4);
  for (std::int64_t offset = 0; offset <= 5; ++offset) {
    const CylinderEvent e{2, offset, {0, 3}};
    const std::int64_t n = 4;
    const double oracle = enumerate_path_mass(HorizonWeights(field, n), 2, std::max(n, e.end()), [&](const PolymerPath& p) {
      for (std::int64_t i = 0; i < e.length(); ++i) {
        const auto k = static_cast<std::size_t>(e.offset + i);
        if (p.sites[k + 1] - p.sites[k] != unit_step(e.steps[static_cast<std::size_t>(i)])) return 0.0;
      }
      return 1.0;
    });
    EXPECT_LE(fixtures::relative_error(std::exp(constrained_mass_any(field, n, e)), oracle), 1e-12) << offset;
  }
}

TEST(Uniformity, ExactlyZeroWhenEventStartsAfterHorizon) {
  const std::vector<std::int64_t> m_grid{0, 4, 8};
  const std::vector<std::int64_t> n_grid{2, 4, 8, 16};
  const std::vector<std::vector<int>> patterns{{0}, {1, 2}};
  const auto recs = uniformity_check(plan_for(LogNormalLaw{0.5}, 2, 6), m_grid, n_grid, patterns, 1e-3);
  ASSERT_EQ(recs.size(), m_grid.size() * n_grid.size() * patterns.size());
  for (const auto& r : recs) {
    if (r.n <= r.m) {
      EXPECT_EQ(r.value, 0.0) << r.event_id << " n=" << r.n;
      EXPECT_EQ(r.standard_error, 0.0);
    }
  }
  const auto sups = uniformity_sup(recs);
  EXPECT_EQ(sups.size(), m_grid.size() * patterns.size());
  for (const auto& s : sups) {
    for (const auto& r : recs) {
      if (r.m == s.m && r.event_id == s.event_id) EXPECT_LE(r.value, s.value);
    }
  }
}

TEST(Uniformity, ConstantEnvironmentGivesWalkProbability) {
  const std::vector<std::int64_t> m_grid{0, 3};
  const std::vector<std::int64_t> n_grid{5, 10};
  const std::vector<std::vector<int>> patterns{{0, 0}};
  for (const auto& r : uniformity_check(plan_for(ConstantLaw{}, 3, 2), m_grid, n_grid, patterns, 1e-3)) {
    EXPECT_LT(r.value, 1e-14);
  }
}

TEST(ReplicaField, SeedsDifferPerReplica) {
  const EnvironmentSpec spec{LogNormalLaw{1.0}, 5};
  EXPECT_EQ(replica_field(spec, 3).spec().seed, replica_field(spec, 3).spec().seed);
  EXPECT_NE(replica_field(spec, 3).spec().seed, replica_field(spec, 4).spec().seed);
}

}  // namespace
