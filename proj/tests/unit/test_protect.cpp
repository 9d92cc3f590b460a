#include <gtest/gtest.h>

#include "gridshield/cas.hpp"
#include "gridshield/errors.hpp"
#include "gridshield/oracle.hpp"
#include "gridshield/protect.hpp"
#include "test_support.hpp"

namespace gs = gridshield;
using gs::testing::make_cas;

namespace {

gs::ComponentSet set_of(std::initializer_list<const char*> ids) {
  gs::ComponentSet s;
  for (const char* id : ids) s.branches.insert(id);
  return s;
}

const gs::CasList kTriangle = make_cas({{"a", "b"}, {"a", "c"}, {"b", "c"}}, {10, 10, 10}, 2);

}  // namespace

TEST(Protect, EmptyList) {
  const auto empty = make_cas({}, {}, 2);
  for (int x : {0, 1, 3}) {
    const auto plan = gs::optimal_protection(empty, x);
    EXPECT_EQ(plan.consecutive_excluded, 0);
    EXPECT_TRUE(plan.protected_components.empty());
  }
}

TEST(Protect, ZeroBudget) {
  const auto plan = gs::optimal_protection(kTriangle, 0);
  EXPECT_EQ(plan.consecutive_excluded, 0);
  EXPECT_EQ(plan.total_excluded, 0);
  ASSERT_TRUE(plan.remaining_worst_case_mw);
  EXPECT_EQ(*plan.remaining_worst_case_mw, 10.0);
}

TEST(Protect, TriangleSingleBudget) {
  for (auto tb : {gs::TieBreak::paper, gs::TieBreak::extended}) {
    const auto plan = gs::optimal_protection(kTriangle, 1, tb);
    EXPECT_EQ(plan.protected_components, set_of({"a"}));
    EXPECT_EQ(plan.consecutive_excluded, 2);
    EXPECT_EQ(plan.total_excluded, 2);
    ASSERT_TRUE(plan.remaining_worst_case_mw);
    EXPECT_EQ(*plan.remaining_worst_case_mw, kTriangle.records[2].lost_load_mw);
  }
}

TEST(Protect, SymmetricOptima) {
  const auto cas = make_cas({{"a", "b"}}, {10}, 2);
  const auto plans = gs::enumerate_optimal_protections(cas, 1, 10);
  ASSERT_EQ(plans.size(), 2u);
  EXPECT_EQ(plans[0].protected_components, set_of({"a"}));
  EXPECT_EQ(plans[1].protected_components, set_of({"b"}));
  EXPECT_TRUE(plans[0].all_excluded());
}

TEST(Protect, TriangleAlternatives) {
  const auto plans = gs::enumerate_optimal_protections(kTriangle, 1, 10);
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_EQ(plans[0].protected_components, set_of({"a"}));
}

TEST(Protect, LimitOneIsTheOptimalPlan) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto cas = gs::testing::random_cas(seed, 10, 15, 3);
    for (int x = 0; x <= 3; ++x) {
      for (auto tb : {gs::TieBreak::paper, gs::TieBreak::extended}) {
        const auto plans = gs::enumerate_optimal_protections(cas, x, 1, tb);
        ASSERT_EQ(plans.size(), 1u);
        EXPECT_EQ(plans[0], gs::optimal_protection(cas, x, tb)) << seed << " " << x;
      }
    }
  }
}

TEST(Protect, InvalidArguments) {
  EXPECT_THROW(gs::optimal_protection(kTriangle, -1), gs::InputError);
  EXPECT_THROW(gs::enumerate_optimal_protections(kTriangle, 1, 0), gs::InputError);
  EXPECT_THROW(gs::budget_sweep(kTriangle, std::vector<int>{}), gs::InputError);
}

TEST(Protect, AllExcludedOnIncompleteList) {
  auto cas = make_cas({{"a", "b"}, {"a", "c"}}, {30, 20}, 2, false);
  const auto plan = gs::optimal_protection(cas, 1);
  EXPECT_TRUE(plan.all_excluded());
  ASSERT_TRUE(plan.remaining_upper_bound_mw);
  EXPECT_EQ(*plan.remaining_upper_bound_mw, 20.0);
  cas.complete = true;
  EXPECT_FALSE(gs::optimal_protection(cas, 1).remaining_upper_bound_mw);
}

TEST(Protect, TieBreakOrders) {
  // {a} and {b} both exclude only rank 1; {b} also hits ranks 3 and 4
  const auto cas = make_cas({{"a", "b"}, {"c", "e"}, {"b", "f"}, {"b", "g"}}, {50, 40, 30, 20}, 2);
  const auto paper = gs::optimal_protection(cas, 1, gs::TieBreak::paper);
  const auto extended = gs::optimal_protection(cas, 1, gs::TieBreak::extended);
  EXPECT_EQ(paper.consecutive_excluded, 1);
  EXPECT_EQ(extended.consecutive_excluded, 1);
  EXPECT_EQ(paper.protected_components, set_of({"a"}));
  EXPECT_EQ(extended.protected_components, set_of({"b"}));
  EXPECT_EQ(extended.total_excluded, 3);
}

TEST(Protect, PrefersFewerComponents) {
  // {a} already excludes everything reachable; padding it never helps
  const auto cas = make_cas({{"a", "b"}, {"a", "c"}, {"d", "e"}}, {30, 20, 10}, 2);
  for (auto tb : {gs::TieBreak::paper, gs::TieBreak::extended}) {
    const auto plan = gs::optimal_protection(cas, 3, tb);
    EXPECT_EQ(plan.consecutive_excluded, 3);
    EXPECT_EQ(plan.protected_components.size(), 2u);
    EXPECT_EQ(plan.protected_components, set_of({"a", "d"}));
  }
}

TEST(Protect, ScoreProtection) {
  const auto plan = gs::score_protection(kTriangle, set_of({"c"}), 1);
  EXPECT_EQ(plan.consecutive_excluded, 0);
  EXPECT_EQ(plan.total_excluded, 2);
  EXPECT_EQ(*plan.remaining_worst_case_mw, 10.0);
}

TEST(Protect, MatchesBruteForceIp) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const int comps = 4 + static_cast<int>(seed % 9);
    const auto cas = gs::testing::random_cas(seed, comps, 3 + static_cast<int>(seed % 18), 3);
    for (int x = 0; x <= 4; ++x) {
      const auto brute = gs::brute_force_protection_ip(cas, x);
      const auto plan = gs::optimal_protection(cas, x, gs::TieBreak::paper);
      EXPECT_EQ(plan.consecutive_excluded, brute.objective) << "seed " << seed << " x " << x;
      EXPECT_LE(static_cast<int>(plan.protected_components.size()), x);
      EXPECT_EQ(gs::score_protection(cas, plan.protected_components, x), plan);
      // every optimal plan the brute force finds is reported, capped at size
      const auto all = gs::enumerate_optimal_protections(cas, x, 100000, gs::TieBreak::paper);
      EXPECT_EQ(all.size(), brute.plans.size()) << "seed " << seed << " x " << x;
    }
  }
}

TEST(Protect, BudgetSweepMonotone) {
  const auto cas = gs::enumerate_cas(gs::testing::load_data_grid("ieee30"), 2, {100, 0.0});
  const std::vector<int> budgets = {0, 1, 2, 3, 4, 5};
  const auto plans = gs::budget_sweep(cas, budgets);
  ASSERT_EQ(plans.size(), budgets.size());
  for (std::size_t i = 1; i < plans.size(); ++i) {
    EXPECT_GE(plans[i].consecutive_excluded, plans[i - 1].consecutive_excluded);
    if (plans[i - 1].remaining_worst_case_mw && plans[i].remaining_worst_case_mw)
      EXPECT_LE(*plans[i].remaining_worst_case_mw, *plans[i - 1].remaining_worst_case_mw);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const auto brute = gs::brute_force_protection_ip(cas, budgets[i]);
    EXPECT_EQ(plans[i].consecutive_excluded, brute.objective);
  }
  const std::vector<int> twice = {2, 2};
  const auto same = gs::budget_sweep(cas, twice);
  EXPECT_EQ(same[0], same[1]);
}

TEST(Evaluate, EmptyPlanIsWorstCase) {
  const auto g = gs::testing::load_data_grid("ieee9");
  const auto ev = gs::evaluate_protection(g, {}, 2);
  EXPECT_NEAR(ev.worst_case_mw, gs::worst_case_attack(g, 2, {}).lost_load_mw, 1e-9);
  EXPECT_FALSE(ev.exhausted);
}

TEST(Evaluate, ToyProtectedBranch) {
  gs::ProtectionPlan plan;
  plan.protected_components = set_of({"AB"});
  const auto ev = gs::evaluate_protection(gs::testing::toy_grid(), plan, 1);
  EXPECT_EQ(ev.worst_case_mw, 0.0);
  EXPECT_TRUE(ev.exhausted);
  EXPECT_EQ(ev.attack_size, 0);
}

TEST(Evaluate, Ieee9PlanMatchesRemaining) {
  const auto g = gs::testing::load_data_grid("ieee9");
  const auto cas = gs::enumerate_cas(g, 2, gs::StopRule::unbounded());
  for (int x = 0; x <= 4; ++x) {
    const auto plan = gs::optimal_protection(cas, x);
    const auto ev = gs::evaluate_protection(g, plan, 2);
    ASSERT_TRUE(plan.remaining_worst_case_mw);
    EXPECT_NEAR(ev.worst_case_mw, *plan.remaining_worst_case_mw, 1e-6) << "x " << x;
  }
}

TEST(PlanJson, RoundTrip) {
  const auto cas = make_cas({{"a", "b"}, {"a", "c"}}, {30, 20}, 2, false);
  for (int x : {0, 1}) {
    const auto plan = gs::optimal_protection(cas, x);
    EXPECT_EQ(gs::parse_plan(gs::plan_to_json(plan)), plan);
  }
}

TEST(Protect, SyntheticListIsWellFormed) {
  const auto cas = gs::testing::synthetic_cas(272, 526, 4);
  EXPECT_EQ(cas.records.size(), 526u);
  EXPECT_TRUE(gs::check_cas_list(cas).empty());
}
