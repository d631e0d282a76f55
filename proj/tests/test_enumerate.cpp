#include <gtest/gtest.h>

#include "fdlab/fdlab.hpp"
#include "support.hpp"

namespace fdlab {
namespace {

using testing::Idle;
using testing::Ping;
using testing::pid;

std::size_t choose(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

EnumerationBounds small(std::size_t n, Time horizon, std::size_t max_steps) {
  EnumerationBounds b;
  b.n = n;
  b.horizon = horizon;
  b.max_steps = max_steps;
  b.patterns = {FailurePattern(n, horizon)};
  return b;
}

TEST(EnumerateRuns, IdleCountIsClosedForm) {
  // L steps: n^L actor sequences times C(H+1, L) increasing time choices
  for (Time horizon : {2U, 3U, 4U}) {
    const auto b = small(2, horizon, 2);
    std::size_t expected = 0;
    for (std::size_t l = 0; l <= 2; ++l) expected += (l == 0 ? 1 : (l == 1 ? 2 : 4)) * choose(horizon + 1, l);
    EXPECT_EQ(enumerate_runs(Idle(2), FDSpec::perfect(), b, [](const auto&) {}), expected) << horizon;
  }
}

TEST(EnumerateRuns, EveryRunIsValidAndDistinct) {
  EnumerationBounds b;
  b.n = 2;
  b.horizon = 3;
  b.max_steps = 3;
  b.history_budget = 1;
  for (const auto& spec : {FDSpec::perfect(), FDSpec::marabout(), FDSpec::pk(1)}) {
    const auto runs = collect_runs(Ping(2), spec, b);
    ASSERT_FALSE(runs.empty());
    std::set<std::string> seen;
    for (const auto& r : runs) {
      EXPECT_TRUE(validate_run(r, spec, Ping(2)).valid());
      seen.insert(run_to_json(Ping(2), r).dump());
    }
    EXPECT_EQ(seen.size(), runs.size()) << to_string(spec);
  }
}

TEST(EnumerateRuns, MatchesBruteForceOnOnePattern) {
  const auto f = FailurePattern::from_crash_times(2, 2, {1, std::nullopt});
  const History h = canonical_history(FDSpec::perfect(), f);
  EnumerationBounds b = small(2, 2, 3);
  b.patterns = {f};
  std::set<std::string> enumerated;
  enumerate_runs(Ping(2), FDSpec::perfect(), b, [&](const RunViewOf<Ping>& v) {
    enumerated.insert(run_to_json(Ping(2), v.to_run()).dump());
  });
  std::set<std::string> brute;
  for (const auto& r : testing::brute_force_runs(Ping(2), FDSpec::perfect(), f, h, {0, 0}, {0, 1}, 3)) {
    brute.insert(run_to_json(Ping(2), r).dump());
  }
  EXPECT_EQ(enumerated, brute);
}

TEST(EnumerateRuns, Deterministic) {
  EnumerationBounds b;
  b.n = 2;
  b.horizon = 2;
  b.max_steps = 3;
  b.history_budget = 1;
  EXPECT_EQ(collect_runs(Ping(2), FDSpec::marabout(), b), collect_runs(Ping(2), FDSpec::marabout(), b));
}

TEST(EnumerateRuns, VisitorCanStop) {
  std::size_t calls = 0;
  const auto n = enumerate_runs(Ping(2), FDSpec::perfect(), small(2, 3, 3), [&](const auto&) { return ++calls < 5; });
  EXPECT_EQ(calls, 5U);
  EXPECT_EQ(n, 5U);
}

TEST(EnumerateRuns, StrictModeYieldsStrictRuns) {
  EnumerationBounds b = small(2, 3, 4);
  b.mode = PrefixMode::kStrictFairness;
  const ValidityOptions strict{PrefixMode::kStrictFairness, std::nullopt};
  const auto runs = collect_runs(Ping(2), FDSpec::perfect(), b);
  ASSERT_FALSE(runs.empty());
  for (const auto& r : runs) EXPECT_TRUE(validate_run(r, FDSpec::perfect(), Ping(2), strict).valid());
}

TEST(EnumerateRuns, CanonicalTimeIsASubset) {
  EnumerationBounds b = small(2, 3, 3);
  std::set<std::string> all;
  for (const auto& r : collect_runs(Ping(2), FDSpec::perfect(), b)) all.insert(run_to_json(Ping(2), r).dump());
  b.time_mode = TimeMode::kCanonical;
  const auto canonical = collect_runs(Ping(2), FDSpec::perfect(), b);
  EXPECT_LT(canonical.size(), all.size());
  for (const auto& r : canonical) EXPECT_TRUE(all.count(run_to_json(Ping(2), r).dump()));
}

TEST(EnumerateRuns, BudgetAndRangeErrors) {
  EnumerationBounds b;
  b.n = 2;
  b.horizon = 2;
  b.max_steps = 2;
  b.run_cap = 3;
  try {
    enumerate_runs(Ping(2), FDSpec::perfect(), b, [](const auto&) {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
  b.run_cap.reset();
  EXPECT_THROW(enumerate_runs(Ping(2), FDSpec::pk(3), b, [](const auto&) {}), Error);
  b.n = 3;
  EXPECT_THROW(enumerate_runs(Ping(2), FDSpec::perfect(), b, [](const auto&) {}), Error);
}

TEST(IsQuiescent, IdleIsAlwaysQuiescentPingIsNotAtFirst) {
  bool idle_ok = true;
  enumerate_runs(Idle(2), FDSpec::perfect(), small(2, 2, 1), [&](const RunViewOf<Idle>& v) {
    idle_ok = idle_ok && is_quiescent(Idle(2), FDSpec::perfect(), v);
  });
  EXPECT_TRUE(idle_ok);
  bool first = true;
  enumerate_runs(Ping(2), FDSpec::perfect(), small(2, 2, 0), [&](const RunViewOf<Ping>& v) {
    first = is_quiescent(Ping(2), FDSpec::perfect(), v);
  });
  EXPECT_FALSE(first);
}

}  // namespace
}  // namespace fdlab
