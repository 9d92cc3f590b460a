#include <gtest/gtest.h>

#include <json.hpp>

#include "gridshield/cas.hpp"
#include "gridshield/errors.hpp"
#include "gridshield/oracle.hpp"
#include "gridshield/protect.hpp"
#include "test_support.hpp"

namespace gs = gridshield;
using gs::testing::load_data_grid;
using gs::testing::make_cas;

TEST(Trilevel, ToyProtectsBranch) {
  const auto r = gs::brute_force_trilevel(gs::testing::toy_grid(), 1, 1);
  EXPECT_EQ(r.protected_components.branches.count("AB"), 1u);
  EXPECT_EQ(r.worst_case_lost_load_mw, 0.0);
  EXPECT_TRUE(r.exhausted);
}

TEST(Trilevel, ZeroBudgetIsWorstCase) {
  const auto g = load_data_grid("ieee9");
  const auto r = gs::brute_force_trilevel(g, 0, 2);
  const auto cas = gs::enumerate_cas(g, 2, {1, 0.0});
  EXPECT_NEAR(r.worst_case_lost_load_mw, cas.records.front().lost_load_mw, 1e-9);
  EXPECT_TRUE(r.protected_components.empty());
}

TEST(Trilevel, Ieee9MatchesProtection) {
  const auto g = load_data_grid("ieee9");
  const auto cas = gs::enumerate_cas(g, 2, gs::StopRule::unbounded());
  const auto r = gs::brute_force_trilevel(g, 2, 2);
  EXPECT_NEAR(r.worst_case_lost_load_mw, 90.0, 1e-6);
  EXPECT_NEAR(r.worst_case_lost_load_mw, *gs::optimal_protection(cas, 2).remaining_worst_case_mw,
              1e-6);
  const auto doc = nlohmann::json::parse(gs::trilevel_to_json(r, 2, 2));
  EXPECT_EQ(doc.at("budget"), 2);
  EXPECT_EQ(doc.at("z_max"), 2);
  EXPECT_NEAR(doc.at("remaining_worst_case_mw").get<double>(), 90.0, 1e-6);
}

TEST(Trilevel, GuardRefusesLargeInputs) {
  // C(46, 5) * C(46, 3) is far beyond the guard
  EXPECT_THROW(gs::brute_force_trilevel(load_data_grid("ieee30"), 5, 3), gs::GuardError);
}

TEST(ProtectionIp, SmallExamples) {
  const auto tri = make_cas({{"a", "b"}, {"a", "c"}, {"b", "c"}}, {10, 10, 10}, 2);
  auto r = gs::brute_force_protection_ip(tri, 1);
  EXPECT_EQ(r.objective, 2);
  ASSERT_EQ(r.plans.size(), 1u);
  EXPECT_EQ(r.plans[0].branches.count("a"), 1u);
  r = gs::brute_force_protection_ip(tri, 2);
  EXPECT_EQ(r.objective, 3);
  EXPECT_EQ(gs::brute_force_protection_ip(tri, 0).objective, 0);
  EXPECT_EQ(gs::brute_force_protection_ip(make_cas({}, {}, 2), 3).objective, 0);
}

TEST(ProtectionIp, Guard) {
  const auto cas = gs::testing::random_cas(5, 60, 60, 3);
  EXPECT_THROW(gs::brute_force_protection_ip(cas, 5), gs::GuardError);
  EXPECT_NO_THROW(gs::brute_force_protection_ip(gs::testing::random_cas(5, 12, 20, 3), 12));
}
