#include <gtest/gtest.h>

#include <cmath>

#include "polylab/numerics.hpp"
#include "polylab/oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace polylab;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

TEST(DecodePath, StepsAreBaseTwoDDigits) {
  // d = 1, n = 3, index 0b110: steps 0 (+), 1 (-), 1 (-).
  const auto p = decode_path(1, 3, 6);
  ASSERT_EQ(p.sites.size(), 4u);
  EXPECT_EQ(p.sites[1][0], 1);
  EXPECT_EQ(p.sites[2][0], 0);
  EXPECT_EQ(p.sites[3][0], -1);
  p.check_invariants();
  // d = 2: digit 3 is -e2.
  const auto q = decode_path(2, 1, 3);
  EXPECT_EQ(q.sites[1][1], -1);
}

TEST(EnumeratePartition, SimpleRandomWalkEndpointIsBinomial) {
  const UnitWeights unit;
  for (int n = 1; n <= 10; ++n) {
    const auto e = enumerate_partition(unit, 1, n);
    EXPECT_DOUBLE_EQ(e.total, 1.0);
    for (int k = 0; k <= n; ++k) {
      Site z;
      z[0] = 2 * k - n;
      EXPECT_NEAR(e.endpoint.at(z), binomial(n, k) / std::pow(2.0, n), 1e-15);
    }
    for (double p : e.probability) EXPECT_DOUBLE_EQ(p, std::pow(2.0, -n));
  }
}

TEST(EnumeratePartition, ProbabilitiesSumToOne) {
  const auto field = fixtures::lognormal(1.0, 4);
  const auto e = enumerate_partition(field, 2, 6);
  KahanSum s;
  for (double p : e.probability) s += p;
  EXPECT_NEAR(s.value(), 1.0, 1e-12);
  KahanSum t;
  for (const auto& [z, w] : e.endpoint) t += w;
  EXPECT_NEAR(t.value(), e.total, 1e-12 * e.total);
}

TEST(EnumeratePartition, AllZeroWhenEveryPathDies) {
  // Kill both sites at time 1.
  struct Kill final : SiteWeights {
    double value(std::int64_t k, const Site&) const override { return k == 1 ? 0.0 : 1.0; }
  } kill;
  const auto e = enumerate_partition(kill, 1, 4);
  EXPECT_EQ(e.total, 0.0);
  for (double p : e.probability) EXPECT_EQ(p, 0.0);
}

TEST(EnumeratePartition, RefusesOversizedInstances) {
  const UnitWeights unit;
  EXPECT_THROW(enumerate_partition(unit, 2, 13), TooLargeError);
  EXPECT_NO_THROW(enumerate_partition(unit, 2, 8));
}

TEST(EnumeratePathMass, IndicatorOfFirstStep) {
  const UnitWeights unit;
  const double m = enumerate_path_mass(unit, 2, 3, [](const PolymerPath& p) { return p.sites[1][0] == 1 ? 1.0 : 0.0; });
  EXPECT_DOUBLE_EQ(m, 0.25);
}

TEST(TinyInstance, SitesAreTheReachableLayers) {
  const TinyInstance d1(1, 3, TwoPointLaw{});
  EXPECT_EQ(d1.site_count(), 2 + 3 + 4);
  EXPECT_EQ(d1.layer(1), std::make_pair(0, 2));
  EXPECT_EQ(d1.layer(3), std::make_pair(5, 9));
  const TinyInstance d2(2, 2, TwoPointLaw{});
  EXPECT_EQ(d2.site_count(), 4 + 9);
  for (int i = 0; i < d2.site_count(); ++i) {
    const auto& [k, x] = d2.site(i);
    EXPECT_EQ(d2.site_index(k, x), i);
    EXPECT_TRUE(reachable(x, k));
  }
  Site off;
  off[0] = 1;
  EXPECT_EQ(d2.site_index(2, off), -1);
  EXPECT_THROW(TinyInstance(2, 3, TwoPointLaw{}), TooLargeError);
}

TEST(TinyInstance, AtomProbabilitiesSumToOne) {
  const TinyInstance inst(1, 3, TwoPointLaw{0.0, 2.0, 0.5});
  const TinyInstance skew(1, 2, TwoPointLaw{0.25, 1.75, 0.5});
  for (const auto* t : {&inst, &skew}) {
    KahanSum s;
    for (std::uint64_t a = 0; a < t->atom_count(); ++a) s += t->probability(a);
    EXPECT_NEAR(s.value(), 1.0, 1e-14);
  }
  const TinyInstance biased(1, 2, TwoPointLaw{0.5, 2.0, 2.0 / 3.0});
  EXPECT_NEAR(biased.probability(0), std::pow(2.0 / 3.0, 5), 1e-15);
}

TEST(TinyInstance, AtomWeightsReadBits) {
  const TinyInstance inst(1, 2, TwoPointLaw{0.0, 2.0, 0.5});
  const auto w = inst.weights(0b00001);
  EXPECT_EQ(w.value(1, inst.site(0).second), 2.0);
  EXPECT_EQ(w.value(1, inst.site(1).second), 0.0);
  EXPECT_EQ(w.value(5, Site{}), 1.0);
}

// Oracle expectation of W_n over all atoms is exactly one (mean-one weights).
TEST(EnvironmentExpectation, MeanOfPartitionFunctionIsOne) {
  const TinyInstance inst(1, 3, TwoPointLaw{0.0, 2.0, 0.5});
  const double ew = enumerate_environment_expectation(
      inst, [](const AtomWeights& w) { return enumerate_partition(w, 1, 3).total; });
  EXPECT_NEAR(ew, 1.0, 1e-14);
}

TEST(EnvironmentExpectation, IndependentOfThreadCount) {
  const TinyInstance inst(1, 4, TwoPointLaw{0.25, 1.75, 0.5});
  auto f = [](const AtomWeights& w) { return std::sqrt(enumerate_partition(w, 1, 4).total); };
  const double one = enumerate_environment_expectation(inst, f, 1);
  EXPECT_EQ(one, enumerate_environment_expectation(inst, f, 3));
  EXPECT_LT(one, 1.0);  // Jensen
}

}  // namespace
