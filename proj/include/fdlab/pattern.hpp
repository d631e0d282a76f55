#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdlab/basics.hpp"

namespace fdlab {

/// Failure pattern F restricted to [0, horizon]. F(t) is the set of processes
/// crashed by time t; crashed sets never shrink.
///
/// With a finite horizon, correct(F) is Π \ F(horizon): a process that has not
/// crashed by the horizon is treated as correct.
class FailurePattern {
 public:
  FailurePattern() = default;

  /// Crash-free pattern.
  FailurePattern(std::size_t n, Time horizon)
      : n_(n), crashed_(static_cast<std::size_t>(horizon) + 1) {
    check_size(n);
  }

  /// Builds F from explicit crashed sets, one per time point. Throws
  /// kInvalidArgument if the sets are not monotone or mention processes >= n.
  FailurePattern(std::size_t n, std::vector<ProcessSet> crashed)
      : n_(n), crashed_(std::move(crashed)) {
    check_size(n);
    if (crashed_.empty()) throw Error(ErrorCode::kInvalidArgument, "failure pattern needs at least one time point");
    const ProcessSet universe = ProcessSet::all(n_);
    for (std::size_t t = 0; t < crashed_.size(); ++t) {
      if (!crashed_[t].subset_of(universe)) {
        throw Error(ErrorCode::kInvalidArgument, "crashed set at t=" + std::to_string(t) + " names a process outside Π");
      }
      if (t > 0 && !crashed_[t - 1].subset_of(crashed_[t])) {
        throw Error(ErrorCode::kInvalidArgument, "failure pattern not monotone at t=" + std::to_string(t));
      }
    }
  }

  /// crash_times[i] is the first time p_i is crashed, or nullopt if it never
  /// crashes within the horizon.
  static FailurePattern from_crash_times(std::size_t n, Time horizon,
                                         const std::vector<std::optional<Time>>& crash_times) {
    if (crash_times.size() != n) throw Error(ErrorCode::kInvalidArgument, "crash time vector has wrong length");
    std::vector<ProcessSet> sets(static_cast<std::size_t>(horizon) + 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (!crash_times[i]) continue;
      if (*crash_times[i] > horizon) throw Error(ErrorCode::kInvalidArgument, "crash time beyond horizon");
      for (Time t = *crash_times[i]; t <= horizon; ++t) sets[t].insert(ProcessId(static_cast<std::uint32_t>(i)));
    }
    return FailurePattern(n, std::move(sets));
  }

  std::size_t process_count() const { return n_; }
  Time horizon() const { return static_cast<Time>(crashed_.size() - 1); }

  ProcessSet crashed(Time t) const { return crashed_.at(t); }
  ProcessSet live(Time t) const { return ProcessSet::all(n_) - crashed(t); }
  bool is_live(ProcessId p, Time t) const { return !crashed(t).contains(p); }
  ProcessSet faulty() const { return crashed_.back(); }
  ProcessSet correct() const { return ProcessSet::all(n_) - faulty(); }

  std::optional<Time> crash_time(ProcessId p) const {
    for (std::size_t t = 0; t < crashed_.size(); ++t) {
      if (crashed_[t].contains(p)) return static_cast<Time>(t);
    }
    return std::nullopt;
  }

  const std::vector<ProcessSet>& sets() const { return crashed_; }

  bool operator==(const FailurePattern&) const = default;

 private:
  static void check_size(std::size_t n) {
    if (n == 0 || n > kMaxProcesses) throw Error(ErrorCode::kInvalidArgument, "process count must be in [1, 32]");
  }

  std::size_t n_ = 0;
  std::vector<ProcessSet> crashed_;
};

/// Every monotone failure pattern over n processes and [0, horizon], in a
/// fixed order: crash-time vectors in lexicographic order where "never"
/// sorts first and then 0, 1, ..., horizon.
inline std::vector<FailurePattern> all_failure_patterns(std::size_t n, Time horizon) {
  const std::size_t choices = static_cast<std::size_t>(horizon) + 2;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= choices;
  std::vector<FailurePattern> out;
  out.reserve(total);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<std::optional<Time>> crash(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (digit[i] != 0) crash[i] = static_cast<Time>(digit[i] - 1);
    }
    out.push_back(FailurePattern::from_crash_times(n, horizon, crash));
    for (std::size_t i = n; i-- > 0;) {
      if (++digit[i] < choices) break;
      digit[i] = 0;
    }
  }
  return out;
}

/// Failure detector history H : Π × [0, horizon] → 2^Π.
class History {
 public:
  History() = default;
  History(std::size_t n, Time horizon)
      : n_(n), horizon_(horizon), cells_(n * (static_cast<std::size_t>(horizon) + 1)) {}

  std::size_t process_count() const { return n_; }
  Time horizon() const { return horizon_; }

  ProcessSet at(ProcessId p, Time t) const { return cells_.at(index(p, t)); }
  void set(ProcessId p, Time t, ProcessSet value) { cells_.at(index(p, t)) = value; }

  bool operator==(const History&) const = default;
  auto operator<=>(const History& o) const {
    if (auto c = n_ <=> o.n_; c != 0) return c;
    if (auto c = horizon_ <=> o.horizon_; c != 0) return c;
    return cells_ <=> o.cells_;
  }

 private:
  std::size_t index(ProcessId p, Time t) const {
    if (p.value >= n_ || t > horizon_) throw Error(ErrorCode::kDomainMismatch, "history cell outside Π × [0, horizon]");
    return static_cast<std::size_t>(p.value) * (static_cast<std::size_t>(horizon_) + 1) + t;
  }

  std::size_t n_ = 0;
  Time horizon_ = 0;
  std::vector<ProcessSet> cells_;
};

}  // namespace fdlab
