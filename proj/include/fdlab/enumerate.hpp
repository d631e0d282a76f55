#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "fdlab/failure_detectors.hpp"
#include "fdlab/model.hpp"
#include "fdlab/validate.hpp"

namespace fdlab {

inline constexpr std::size_t kDefaultRunCap = 10'000'000;

/// Exhaustive: every strictly increasing time assignment. Canonical: for each
/// actor and each FD output it could read next, only the earliest time at
/// which it reads that output.
enum class TimeMode { kExhaustive, kCanonical };

/// Expanded: one enumeration per history of perturbed_histories. ReadCells:
/// the history starts canonical and each FD read may instead return an
/// admissible deviation while the budget lasts; unread cells stay canonical.
enum class HistoryMode { kExpanded, kReadCells };

struct EnumerationBounds {
  std::size_t n = 2;
  Time horizon = 3;
  std::size_t max_steps = 3;
  std::size_t history_budget = 0;
  /// Empty means every monotone pattern.
  std::vector<FailurePattern> patterns;
  PrefixMode mode = PrefixMode::kPrefixConsistent;
  std::optional<Time> fairness_window;
  TimeMode time_mode = TimeMode::kExhaustive;
  HistoryMode history_mode = HistoryMode::kExpanded;
  /// Unset: FDLAB_RUN_CAP if set, else kDefaultRunCap.
  std::optional<std::size_t> run_cap;
};

inline std::size_t effective_run_cap(const EnumerationBounds& bounds) {
  if (bounds.run_cap) return *bounds.run_cap;
  if (const char* env = std::getenv("FDLAB_RUN_CAP")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::size_t>(value);
  }
  return kDefaultRunCap;
}

inline std::vector<FailurePattern> bound_patterns(const EnumerationBounds& bounds) {
  return bounds.patterns.empty() ? all_failure_patterns(bounds.n, bounds.horizon) : bounds.patterns;
}

/// A run under construction, valid for the duration of one visitor call.
template <class State, class Payload>
struct RunView {
  const FailurePattern& pattern;
  const History& history;
  const std::vector<State>& init;
  const std::vector<Step<State, Payload>>& schedule;
  const std::vector<Time>& times;
  const Configuration<State, Payload>& config;

  Run<State, Payload> to_run() const { return {pattern, history, init, schedule, times}; }
};

template <Algorithm A>
using RunViewOf = RunView<typename A::state_type, typename A::payload_type>;

/// Every initial configuration, p0 varying slowest.
template <Algorithm A>
std::vector<std::vector<typename A::state_type>> all_initial_configurations(const A& alg) {
  std::vector<std::vector<typename A::state_type>> out{{}};
  for (std::size_t i = 0; i < alg.process_count(); ++i) {
    const auto choices = alg.initial_states(ProcessId(static_cast<std::uint32_t>(i)));
    std::vector<std::vector<typename A::state_type>> next;
    for (const auto& prefix : out) {
      for (const auto& s : choices) {
        next.push_back(prefix);
        next.back().push_back(s);
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Number of (pattern, history, initial configuration) combinations the
/// enumeration starts from. Each is explored by an independent DFS.
template <Algorithm A>
std::size_t estimate_combinations(const A& alg, const FDSpec& spec, const EnumerationBounds& bounds) {
  std::size_t histories = 0;
  const auto patterns = bound_patterns(bounds);
  for (const auto& f : patterns) {
    histories += bounds.history_mode == HistoryMode::kExpanded
                     ? perturbed_histories(spec, f, bounds.history_budget).size()
                     : 1;
  }
  return histories * all_initial_configurations(alg).size();
}

namespace detail {

template <Algorithm A, class Visitor>
class Enumerator {
 public:
  using S = typename A::state_type;
  using P = typename A::payload_type;

  Enumerator(const A& alg, const FDSpec& spec, const EnumerationBounds& bounds, Visitor& visitor)
      : alg_(alg), spec_(spec), bounds_(bounds), visitor_(visitor), cap_(effective_run_cap(bounds)) {}

  /// Returns false once the visitor asked to stop.
  bool run(const FailurePattern& f, const History& h, const std::vector<S>& init) {
    pattern_ = &f;
    history_ = h;
    canonical_ = h;
    init_ = &init;
    config_ = Configuration<S, P>::initial(init);
    schedule_.clear();
    times_.clear();
    deviations_ = 0;
    dfs();
    return !stopped_;
  }

  std::size_t yielded() const { return yielded_; }

 private:
  struct TimeChoice {
    Time t;
    ProcessSet d;
    bool deviates;
  };

  bool strict_ok() const {
    const FailurePattern& f = *pattern_;
    const ProcessSet correct = f.correct();
    for (const auto& m : config_.in_transit) {
      if (correct.contains(m.to)) return false;
    }
    if (!history_in(spec_, history_, f).horizon_complete) return false;
    const Time window = bounds_.fairness_window.value_or(f.horizon() + 1);
    if (window == 0) return false;
    if (window > f.horizon() + 1) return true;
    for (ProcessId p : correct.members()) {
      Time covered = 0;  // first time not yet covered by a step of p
      bool ok = true;
      for (std::size_t l = 0; l < schedule_.size() && ok; ++l) {
        if (schedule_[l].actor != p) continue;
        if (times_[l] >= covered + window) ok = false;
        covered = times_[l] + 1;
      }
      if (!ok || f.horizon() + 1 >= covered + window) return false;
    }
    return true;
  }

  void yield() {
    if (bounds_.mode == PrefixMode::kStrictFairness && !strict_ok()) return;
    if (++yielded_ > cap_) {
      throw Error(ErrorCode::kBudgetExceeded, "run cap of " + std::to_string(cap_) + " exceeded");
    }
    RunView<S, P> view{*pattern_, history_, *init_, schedule_, times_, config_};
    if constexpr (std::is_same_v<std::invoke_result_t<Visitor&, const RunView<S, P>&>, bool>) {
      if (!visitor_(view)) stopped_ = true;
    } else {
      visitor_(view);
    }
  }

  void time_choices(ProcessId p, Time t_min, std::vector<TimeChoice>& out) const {
    out.clear();
    const FailurePattern& f = *pattern_;
    const bool read_cells = bounds_.history_mode == HistoryMode::kReadCells;
    const bool may_deviate = read_cells && deviations_ < bounds_.history_budget;
    auto seen = [&](ProcessSet d, bool deviates) {
      for (const auto& c : out) {
        if (c.d == d && (c.deviates == deviates || !c.deviates)) return true;
      }
      return false;
    };
    for (Time t = t_min; t <= f.horizon(); ++t) {
      if (!f.is_live(p, t)) break;
      const ProcessSet d = history_.at(p, t);
      if (bounds_.time_mode == TimeMode::kExhaustive || !seen(d, false)) out.push_back({t, d, false});
      if (!may_deviate) continue;
      for (ProcessSet alt : cell_deviations(spec_, f, p, t)) {
        if (bounds_.time_mode == TimeMode::kExhaustive || !seen(alt, true)) out.push_back({t, alt, true});
      }
    }
  }

  void dfs() {
    yield();
    if (stopped_ || schedule_.size() >= bounds_.max_steps) return;
    const Time t_min = times_.empty() ? 0 : times_.back() + 1;
    if (t_min > pattern_->horizon()) return;
    std::vector<TimeChoice> choices;
    for (std::size_t i = 0; i < bounds_.n && !stopped_; ++i) {
      const ProcessId p(static_cast<std::uint32_t>(i));
      time_choices(p, t_min, choices);
      for (const auto& c : choices) {
        if (stopped_) return;
        if (c.deviates) {
          history_.set(p, c.t, c.d);
          ++deviations_;
        }
        explore_messages(p, c.t, c.d);
        if (c.deviates) {
          history_.set(p, c.t, canonical_.at(p, c.t));
          --deviations_;
        }
      }
    }
  }

  void explore_messages(ProcessId p, Time t, ProcessSet d) {
    const S pre = config_.states[p.value];
    step(p, t, d, pre, std::nullopt);
    if (stopped_ || !alg_.accepts_messages(p, pre)) return;
    for (std::size_t m = 0; m < config_.in_transit.size() && !stopped_; ++m) {
      if (config_.in_transit[m].to != p) continue;
      step(p, t, d, pre, m);
    }
  }

  void step(ProcessId p, Time t, ProcessSet d, const S& pre, std::optional<std::size_t> msg_index) {
    std::optional<Received<P>> received;
    std::optional<Message<P>> removed;
    if (msg_index) {
      removed = config_.in_transit[*msg_index];
      received = Received<P>{removed->from, removed->payload, removed->tag};
    }
    auto tr = alg_.transition(p, pre, received, d);
    if (removed) config_.in_transit.erase(config_.in_transit.begin() + static_cast<std::ptrdiff_t>(*msg_index));
    const std::size_t index = config_.steps_applied;
    if (tr.send) config_.in_transit.push_back(Message<P>{p, tr.send->to, tr.send->payload, index});
    config_.states[p.value] = tr.next;
    ++config_.steps_applied;
    schedule_.push_back(Step<S, P>{p, pre, received, d, std::move(tr.next), tr.send});
    times_.push_back(t);

    dfs();

    times_.pop_back();
    const bool sent = schedule_.back().sent.has_value();
    schedule_.pop_back();
    --config_.steps_applied;
    config_.states[p.value] = pre;
    if (sent) config_.in_transit.pop_back();
    if (removed) config_.in_transit.insert(config_.in_transit.begin() + static_cast<std::ptrdiff_t>(*msg_index), *removed);
  }

  const A& alg_;
  const FDSpec& spec_;
  const EnumerationBounds& bounds_;
  Visitor& visitor_;
  std::size_t cap_;

  const FailurePattern* pattern_ = nullptr;
  History history_;
  History canonical_;
  const std::vector<S>* init_ = nullptr;
  Configuration<S, P> config_;
  std::vector<Step<S, P>> schedule_;
  std::vector<Time> times_;
  std::size_t deviations_ = 0;
  std::size_t yielded_ = 0;
  bool stopped_ = false;
};

}  // namespace detail

/// Calls `visitor` on every run of `alg` under `spec` within `bounds`,
/// including every prefix, in a deterministic order: patterns, then
/// histories, then initial configurations, then a DFS over actor, time,
/// delivered message (⊥ first, then by tag). A visitor returning false stops
/// the enumeration. Returns the number of runs visited.
///
/// Every visited run passes validate_run in the bounds' mode. Throws
/// kBudgetExceeded once the run cap is exceeded.
template <Algorithm A, class Visitor>
std::size_t enumerate_runs(const A& alg, const FDSpec& spec, const EnumerationBounds& bounds,
                           const std::vector<std::vector<typename A::state_type>>& inits, Visitor&& visitor) {
  if (bounds.n != alg.process_count()) {
    throw Error(ErrorCode::kInvalidArgument, "bounds.n differs from the algorithm's process count");
  }
  if (spec.kind == FDSpec::Kind::kPk && spec.k > bounds.horizon) {
    throw Error(ErrorCode::kKOutOfRange, "k=" + std::to_string(spec.k) + " exceeds horizon");
  }
  const std::size_t cap = effective_run_cap(bounds);
  std::vector<std::pair<FailurePattern, std::vector<History>>> space;
  std::size_t combos = 0;
  for (auto& f : bound_patterns(bounds)) {
    if (f.process_count() != bounds.n || f.horizon() != bounds.horizon) {
      throw Error(ErrorCode::kDomainMismatch, "pattern does not match bounds");
    }
    std::vector<History> histories;
    if (bounds.history_mode == HistoryMode::kExpanded) {
      histories = perturbed_histories(spec, f, bounds.history_budget);
    } else {
      histories.push_back(canonical_history(spec, f));
    }
    combos += histories.size() * inits.size();
    space.emplace_back(std::move(f), std::move(histories));
  }
  if (combos > cap) {
    throw Error(ErrorCode::kBudgetExceeded, "estimated at least " + std::to_string(combos) +
                                                " runs (one per pattern, history and initial configuration), cap " +
                                                std::to_string(cap));
  }
  detail::Enumerator<A, std::remove_reference_t<Visitor>> e(alg, spec, bounds, visitor);
  for (const auto& [f, histories] : space) {
    for (const auto& h : histories) {
      for (const auto& init : inits) {
        if (!e.run(f, h, init)) return e.yielded();
      }
    }
  }
  return e.yielded();
}

template <Algorithm A, class Visitor>
std::size_t enumerate_runs(const A& alg, const FDSpec& spec, const EnumerationBounds& bounds, Visitor&& visitor) {
  return enumerate_runs(alg, spec, bounds, all_initial_configurations(alg), std::forward<Visitor>(visitor));
}

template <Algorithm A>
std::vector<RunOf<A>> collect_runs(const A& alg, const FDSpec& spec, const EnumerationBounds& bounds) {
  std::vector<RunOf<A>> out;
  enumerate_runs(alg, spec, bounds, [&](const RunViewOf<A>& view) { out.push_back(view.to_run()); });
  return out;
}

/// The history is horizon complete, no message is in transit to a correct
/// process and every correct process would stay put, sending nothing, on a
/// step with no message and its FD output at the horizon.
template <Algorithm A>
bool is_quiescent(const A& alg, const FDSpec& spec, const RunViewOf<A>& view) {
  if (!history_in(spec, view.history, view.pattern).horizon_complete) return false;
  const ProcessSet correct = view.pattern.correct();
  for (const auto& m : view.config.in_transit) {
    if (correct.contains(m.to)) return false;
  }
  for (ProcessId p : correct.members()) {
    const auto& s = view.config.states[p.value];
    const auto t = alg.transition(p, s, std::nullopt, view.history.at(p, view.pattern.horizon()));
    if (t.send || !(t.next == s)) return false;
  }
  return true;
}

}  // namespace fdlab
