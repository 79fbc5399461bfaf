#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "polylab/numerics.hpp"
#include "polylab/oracle.hpp"
#include "polylab/partition.hpp"
#include "test_support.hpp"

namespace {

using namespace polylab;
using fixtures::relative_error;

struct Case {
  const char* name;
  SiteLaw law;
};

std::vector<Case> cases() {
  return {{"lognormal", LogNormalLaw{1.0}}, {"twopoint", TwoPointLaw{0.0, 2.0, 0.5}},
          {"pareto", ParetoTailLaw{1.5}}, {"constant", ConstantLaw{}}};
}

// Oracle comparison over small (d, n) grids with several seeds per law.
TEST(ForwardStep, AgreesWithPathEnumeration) {
  for (const auto& c : cases()) {
    for (int d = 1; d <= 2; ++d) {
      for (std::int64_t n = 1; n <= (d == 1 ? 10 : 6); ++n) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          const EnvironmentField field(EnvironmentSpec{c.law, seed});
          const auto oracle = enumerate_partition(field, d, n);
          const auto slice = propagate(field, PartitionSlice::origin(d), n);
          slice.check_invariants();
          if (oracle.total == 0.0) {
            EXPECT_EQ(total_mass(slice), kNegInf);
            continue;
          }
          EXPECT_LE(relative_error(std::exp(total_mass(slice)), oracle.total), 1e-12) << c.name << " d=" << d << " n=" << n;
          for (const auto& [z, w] : oracle.endpoint) {
            const double dp = std::exp(slice.log_weight(z));
            EXPECT_LE(relative_error(dp, w), 1e-12) << c.name << " endpoint";
          }
        }
      }
    }
  }
}

TEST(ForwardStep, ConstantEnvironmentIsSimpleRandomWalk) {
  const UnitWeights unit;
  const auto slice = propagate(unit, PartitionSlice::origin(3), 40);
  EXPECT_NEAR(total_mass(slice), 0.0, 1e-13);
  Site z;
  z[0] = 40;
  EXPECT_NEAR(slice.log_weight(z), -40 * std::log(6.0), 1e-10);
}

TEST(ForwardStep, SupportIsTheReachableSet) {
  const auto field = fixtures::lognormal(0.5, 1);
  const auto slice = propagate(field, PartitionSlice::origin(2), 7);
  std::size_t expected = 0;
  const Box box(2, 7);
  for (std::size_t i = 0; i < box.size(); ++i) expected += reachable(box.site(i), 7);
  EXPECT_EQ(slice.support_size(), expected);
  EXPECT_NO_THROW(slice.check_invariants());
}

TEST(ForwardStep, LogScaleKeepsLongRunsFinite) {
  const auto field = fixtures::lognormal(2.0, 9);
  const auto slice = propagate(field, PartitionSlice::origin(1), 3000);
  EXPECT_TRUE(std::isfinite(total_mass(slice)));
  EXPECT_LT(total_mass(slice), -1000.0);
}

TEST(ForwardSlices, MatchesIncrementalPropagation) {
  const auto field = fixtures::lognormal(0.8, 2);
  const auto slices = forward_slices(field, 2, 12);
  ASSERT_EQ(slices.size(), 13u);
  PartitionSlice s = PartitionSlice::origin(2);
  for (std::int64_t k = 0; k <= 12; ++k) {
    EXPECT_EQ(slices[static_cast<std::size_t>(k)].time(), k);
    EXPECT_EQ(total_mass(slices[static_cast<std::size_t>(k)]), total_mass(s));
    s = forward_step(field, s);
  }
}

TEST(EndpointMass, AgreesWithOracleAndRejectsOutOfRange) {
  const auto field = fixtures::lognormal(1.0, 6);
  const auto g = EndpointFunctional::half_space(0, 0.0);
  const auto slice = propagate(field, PartitionSlice::origin(2), 6);
  const double oracle = enumerate_path_mass(field, 2, 6, [&](const PolymerPath& p) { return g(p.sites.back()); });
  EXPECT_LE(relative_error(std::exp(endpoint_mass(slice, g)), oracle), 1e-12);
  const EndpointFunctional bad("bad", [](const Site&) { return 1.5; });
  EXPECT_THROW(endpoint_mass(slice, bad), std::invalid_argument);
}

TEST(ConstrainedMass, AgreesWithOracleForEveryPattern) {
  const auto field = fixtures::lognormal(1.0, 12);
  for (int d = 1; d <= 2; ++d) {
    for (std::int64_t offset = 0; offset <= 2; ++offset) {
      for (const auto& event : all_patterns(d, offset, 2)) {
        const std::int64_t n = 5;
        const double oracle = enumerate_path_mass(field, d, n, [&](const PolymerPath& p) {
          for (std::int64_t i = 0; i < event.length(); ++i) {
            const auto k = static_cast<std::size_t>(event.offset + i);
            if (p.sites[k + 1] - p.sites[k] != unit_step(event.steps[static_cast<std::size_t>(i)])) return 0.0;
          }
          return 1.0;
        });
        EXPECT_LE(relative_error(std::exp(constrained_mass(field, n, event)), oracle), 1e-12) << event.id();
      }
    }
  }
  CylinderEvent late{1, 4, {0, 0}};
  EXPECT_THROW(constrained_mass(field, 5, late), std::invalid_argument);
}

// Property: summing W_n(B) over all patterns at one offset recovers W_n.
TEST(ConstrainedMass, PatternsPartitionTheMass) {
  const auto field = fixtures::lognormal(0.6, 21);
  for (std::int64_t offset : {0, 3, 6}) {
    std::vector<double> logs;
    for (const auto& e : all_patterns(2, offset, 2)) logs.push_back(constrained_mass(field, 8, e));
    const double total = total_mass(propagate(field, PartitionSlice::origin(2), 8));
    EXPECT_NEAR(log_sum_exp(logs), total, 1e-12);
  }
}

TEST(Truncation, WideWindowIsExact) {
  const auto field = fixtures::lognormal(0.3, 5);
  const auto exact = propagate(field, PartitionSlice::origin(3), 30);
  const auto wide = propagate(field, PartitionSlice::origin(3), 30, Truncation{100.0});
  EXPECT_EQ(total_mass(exact), total_mass(wide));
  EXPECT_EQ(wide.discarded_fraction(), 0.0);
}

TEST(Truncation, NarrowWindowReportsDiscardedMass) {
  const auto field = fixtures::lognormal(0.3, 5);
  const auto exact = propagate(field, PartitionSlice::origin(2), 200);
  const auto narrow = propagate(field, PartitionSlice::origin(2), 200, Truncation{1.0});
  EXPECT_GT(narrow.discarded_fraction(), 0.0);
  EXPECT_LT(total_mass(narrow), total_mass(exact));
  const auto fine = propagate(field, PartitionSlice::origin(2), 200, Truncation{3.0});
  EXPECT_LT(fine.discarded_fraction(), 1e-3);
  EXPECT_NEAR(total_mass(fine), total_mass(exact), 2e-3);
  EXPECT_EQ(Truncation{3.0}.radius_at(4), 4);
  EXPECT_EQ(Truncation{3.0}.radius_at(100), 30);
}

TEST(ForcedStep, RestrictsTheIncrement) {
  const UnitWeights unit;
  const auto s = forced_step(unit, PartitionSlice::origin(2), 2);
  EXPECT_NEAR(total_mass(s), -std::log(4.0), 1e-15);
  EXPECT_EQ(s.support_size(), 1u);
  EXPECT_THROW(forced_step(unit, PartitionSlice::origin(2), 4), std::invalid_argument);
}

TEST(Decomposition, ResidualIsTiny) {
  for (int d = 1; d <= 3; ++d) {
    const auto field = fixtures::lognormal(1.0, 30 + d);
    for (std::int64_t n : {0, 1, 4, 9}) {
      for (std::int64_t k : {0, 1, 5, 10}) {
        const auto r = decomposition_residual(field, d, n, k);
        EXPECT_LE(r.value, 1e-10) << "d=" << d << " n=" << n << " k=" << k;
        EXPECT_FALSE(r.degenerate);
      }
    }
  }
}

TEST(Decomposition, DegenerateWhenTheEnvironmentKillsEverything) {
  const auto field = fixtures::two_point(0.0, 2.0, 0.5, 77);
  bool saw = false;
  for (std::int64_t k = 1; k <= 40 && !saw; ++k) {
    const auto r = decomposition_residual(field, 1, 3, k);
    if (r.degenerate) {
      saw = true;
      EXPECT_EQ(r.value, 0.0);
    }
  }
  EXPECT_TRUE(saw);
}

TEST(PartitionSlice, InvariantViolationsAreReported) {
  PartitionSlice bad(1, 1, 1, {0.0, 1.0, 0.0}, 0.0);  // mass at the origin at odd time
  EXPECT_THROW(bad.check_invariants(), std::logic_error);
  PartitionSlice neg(1, 1, 1, {-1.0, 0.0, 1.0}, 0.0);
  EXPECT_THROW(neg.check_invariants(), std::logic_error);
  EXPECT_THROW(PartitionSlice(1, 1, 1, {1.0}, 0.0), std::invalid_argument);
}

TEST(PartitionSlice, CsvHasOneRowPerSupportSite) {
  const UnitWeights unit;
  const auto s = propagate(unit, PartitionSlice::origin(1), 3);
  std::ostringstream os;
  write_csv(os, s);
  std::size_t lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 1 + 4u);
}

}  // namespace
