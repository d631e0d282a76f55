#include <gtest/gtest.h>

#include "fdlab/fdlab.hpp"
#include "support.hpp"

namespace fdlab {
namespace {

using testing::Ping;
using testing::pid;
using testing::set_of;

TEST(ProcessSet, SetAlgebra) {
  const ProcessSet a = set_of({0, 2});
  const ProcessSet b = set_of({2, 3});
  EXPECT_EQ(a | b, set_of({0, 2, 3}));
  EXPECT_EQ(a & b, set_of({2}));
  EXPECT_EQ(a - b, set_of({0}));
  EXPECT_TRUE(set_of({2}).subset_of(a));
  EXPECT_FALSE(b.subset_of(a));
  EXPECT_EQ(a.min(), pid(0));
  EXPECT_EQ(a.size(), 2U);
  EXPECT_EQ(ProcessSet::all(3), set_of({0, 1, 2}));
}

TEST(FailurePattern, CrashTimesAndDerivedSets) {
  const auto f = FailurePattern::from_crash_times(3, 4, {std::nullopt, 2, 0});
  EXPECT_EQ(f.crashed(0), set_of({2}));
  EXPECT_EQ(f.crashed(1), set_of({2}));
  EXPECT_EQ(f.crashed(2), set_of({1, 2}));
  EXPECT_EQ(f.faulty(), set_of({1, 2}));
  EXPECT_EQ(f.correct(), set_of({0}));
  EXPECT_EQ(f.crash_time(pid(1)), 2U);
  EXPECT_FALSE(f.crash_time(pid(0)).has_value());
  EXPECT_FALSE(f.is_live(pid(1), 3));
}

TEST(FailurePattern, RejectsNonMonotoneSets) {
  EXPECT_THROW(FailurePattern(2, std::vector<ProcessSet>{set_of({0}), ProcessSet{}}), Error);
  EXPECT_THROW(FailurePattern(2, std::vector<ProcessSet>{set_of({3})}), Error);
}

TEST(FailurePattern, EnumerationCountsMonotonePatterns) {
  // each process independently: never, or first crashed at one of T+1 times
  EXPECT_EQ(all_failure_patterns(2, 3).size(), 25U);
  EXPECT_EQ(all_failure_patterns(3, 1).size(), 27U);
  const auto patterns = all_failure_patterns(2, 2);
  EXPECT_TRUE(patterns.front().faulty().empty());
  std::set<std::vector<ProcessSet>> distinct;
  for (const auto& f : patterns) distinct.insert(f.sets());
  EXPECT_EQ(distinct.size(), patterns.size());
}

TEST(History, OutOfDomainAccessThrows) {
  History h(2, 3);
  EXPECT_THROW(h.at(pid(2), 0), Error);
  EXPECT_THROW(h.set(pid(0), 4, {}), Error);
}

using PingRun = RunOf<Ping>;
using PingStep = StepOf<Ping>;

PingRun ping_run() {
  // p0 pings p1 at t=0, p1 pings p0 and p1 then receives at t=1, t=2.
  const Ping alg(2);
  PingRun run{FailurePattern(2, 3), canonical_history(FDSpec::perfect(), FailurePattern(2, 3)), {0, 0}, {}, {}};
  run.schedule.push_back({pid(0), 0, std::nullopt, {}, 1, Outgoing<int>{pid(1), 7}});
  run.schedule.push_back({pid(1), 0, Received<int>{pid(0), 7, 0}, {}, 1, Outgoing<int>{pid(0), 7}});
  run.schedule.push_back({pid(0), 1, Received<int>{pid(1), 7, 1}, {}, 1, std::nullopt});
  run.times = {0, 1, 2};
  EXPECT_TRUE(validate_run(run, FDSpec::perfect(), alg).valid());
  return run;
}

TEST(ApplyStep, TagsMessagesWithTheSendingIndex) {
  const PingRun run = ping_run();
  const auto configs = config_sequence<int, int>(run.init, run.schedule);
  ASSERT_EQ(configs.size(), 4U);
  ASSERT_EQ(configs[1].in_transit.size(), 1U);
  EXPECT_EQ(configs[1].in_transit[0].tag, 0U);
  EXPECT_EQ(configs[2].link(pid(1), pid(0)).size(), 1U);
  EXPECT_TRUE(configs[3].in_transit.empty());
}

TEST(ApplyStep, ReplayedReceiveIsRejected) {
  const PingRun run = ping_run();
  auto config = apply_step(apply_step(Configuration<int, int>::initial(run.init), run.schedule[0]), run.schedule[1]);
  PingStep again = run.schedule[1];
  again.pre = 1;
  try {
    apply_step(config, again);
    FAIL() << "expected NoSuchInTransitMessage";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoSuchInTransitMessage);
  }
}

TEST(ApplyStep, MismatchedPreState) {
  const PingRun run = ping_run();
  PingStep wrong = run.schedule[0];
  wrong.pre = 1;
  try {
    apply_step(Configuration<int, int>::initial(run.init), wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatchedPreState);
  }
}

TEST(LocalStates, FreezesAfterLastStep) {
  const PingRun run = ping_run();
  const auto l1 = local_states<int, int>(run.init, run.schedule, pid(1));
  EXPECT_EQ(l1, (std::vector<int>{0, 1}));
  EXPECT_EQ(state_after(l1, 5), 1);
  EXPECT_EQ((project<int, int>(run.schedule, pid(0)).size()), 2U);
  EXPECT_EQ((project_times<int, int>(run.schedule, run.times, pid(0))), (std::vector<Time>{0, 2}));
}

TEST(ValidateRun, ReportsEachBrokenCondition) {
  const Ping alg(2);
  const PingRun good = ping_run();

  PingRun dead = good;
  dead.pattern = FailurePattern::from_crash_times(2, 3, {2, std::nullopt});
  dead.history = canonical_history(FDSpec::perfect(), dead.pattern);
  EXPECT_TRUE(validate_run(dead, FDSpec::perfect(), alg).has(ViolationKind::kDeadActor));

  PingRun fd = good;
  fd.schedule[0].fd = set_of({1});
  EXPECT_TRUE(validate_run(fd, FDSpec::perfect(), alg).has(ViolationKind::kFdMismatch));

  PingRun twice = good;
  twice.schedule.push_back(twice.schedule[1]);
  twice.schedule.back().pre = 1;
  twice.times.push_back(3);
  EXPECT_TRUE(validate_run(twice, FDSpec::perfect(), alg).has(ViolationKind::kReliableTransmission));

  PingRun spurious = good;
  spurious.schedule[2].received->tag = 0;
  EXPECT_TRUE(validate_run(spurious, FDSpec::perfect(), alg).has(ViolationKind::kSpuriousMessage));

  PingRun jump = good;
  jump.schedule[2].pre = 0;
  EXPECT_TRUE(validate_run(jump, FDSpec::perfect(), alg).has(ViolationKind::kStateContinuity));

  PingRun times = good;
  times.times = {0, 0, 1};
  EXPECT_TRUE(validate_run(times, FDSpec::perfect(), alg).has(ViolationKind::kStructure));

  PingRun bad_init = good;
  bad_init.init = {1, 0};
  EXPECT_TRUE(validate_run(bad_init, FDSpec::perfect(), alg).has(ViolationKind::kInitialConfiguration));

  PingRun history = good;
  history.history.set(pid(0), 0, set_of({1}));
  history.schedule[0].fd = set_of({1});
  EXPECT_TRUE(validate_run(history, FDSpec::perfect(), alg).has(ViolationKind::kHistoryMembership));
}

TEST(ValidateRun, StrictFairnessNeedsDeliveryAndSteps) {
  const Ping alg(2);
  const PingRun good = ping_run();
  ValidityOptions strict{PrefixMode::kStrictFairness, std::nullopt};
  EXPECT_TRUE(validate_run(good, FDSpec::perfect(), alg, strict).valid());

  PingRun undelivered = good;
  undelivered.schedule.pop_back();
  undelivered.times.pop_back();
  EXPECT_TRUE(validate_run(undelivered, FDSpec::perfect(), alg).valid());
  EXPECT_TRUE(validate_run(undelivered, FDSpec::perfect(), alg, strict).has(ViolationKind::kDelivery));

  ValidityOptions window{PrefixMode::kStrictFairness, Time{2}};
  // p1 steps only at t=1; [2,3] has no step of p1
  EXPECT_TRUE(validate_run(good, FDSpec::perfect(), alg, window).has(ViolationKind::kFairness));
}

}  // namespace
}  // namespace fdlab
