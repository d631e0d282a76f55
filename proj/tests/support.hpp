#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdlab/fdlab.hpp"

namespace fdlab::testing {

/// Two states. From 0 a process sends "ping" to its successor and moves to
/// 1; in 1 it absorbs whatever it receives.
class Ping {
 public:
  using state_type = int;
  using payload_type = int;

  explicit Ping(std::size_t n) : n_(n) {}

  std::string name() const { return "ping"; }
  std::size_t process_count() const { return n_; }
  std::vector<int> initial_states(ProcessId) const { return {0}; }
  bool is_state(ProcessId, int s) const { return s == 0 || s == 1; }
  bool accepts_messages(ProcessId, int) const { return true; }

  Transition<int, int> transition(ProcessId p, int s, const std::optional<Received<int>>&, ProcessSet) const {
    if (s == 0 && n_ > 1) {
      return {1, Outgoing<int>{ProcessId(static_cast<std::uint32_t>((p.value + 1) % n_)), 7}};
    }
    return {1, std::nullopt};
  }

  std::vector<int> payload_alphabet() const { return {7}; }
  std::string format_state(int s) const { return std::to_string(s); }
  std::optional<int> parse_state(const std::string& t) const {
    if (t == "0") return 0;
    if (t == "1") return 1;
    return std::nullopt;
  }
  std::string format_payload(int m) const { return std::to_string(m); }
  std::optional<int> parse_payload(const std::string& t) const {
    if (t == "7") return 7;
    return std::nullopt;
  }

 private:
  std::size_t n_;
};

/// One state, never sends, never receives.
class Idle {
 public:
  using state_type = int;
  using payload_type = int;

  explicit Idle(std::size_t n) : n_(n) {}

  std::string name() const { return "idle"; }
  std::size_t process_count() const { return n_; }
  std::vector<int> initial_states(ProcessId) const { return {0}; }
  bool is_state(ProcessId, int s) const { return s == 0; }
  bool accepts_messages(ProcessId, int) const { return false; }
  Transition<int, int> transition(ProcessId, int, const std::optional<Received<int>>&, ProcessSet) const {
    return {0, std::nullopt};
  }
  std::vector<int> payload_alphabet() const { return {}; }
  std::string format_state(int s) const { return std::to_string(s); }
  std::optional<int> parse_state(const std::string& t) const {
    if (t == "0") return 0;
    return std::nullopt;
  }
  std::string format_payload(int m) const { return std::to_string(m); }
  std::optional<int> parse_payload(const std::string&) const { return std::nullopt; }

 private:
  std::size_t n_;
};

static_assert(Algorithm<Ping>);
static_assert(Algorithm<Idle>);

inline ProcessId pid(std::uint32_t i) { return ProcessId(i); }

inline ProcessSet set_of(std::initializer_list<std::uint32_t> ids) {
  ProcessSet s;
  for (auto i : ids) s.insert(ProcessId(i));
  return s;
}

/// Every step choice an adversary could write down for a run prefix: any
/// actor, pre-state, FD output, time and earlier tag (or none), with the
/// algorithm's own post-state and send. Extensions are kept only while
/// validate_run accepts the prefix; validity is prefix closed.
template <Algorithm A>
std::vector<RunOf<A>> brute_force_runs(const A& alg, const FDSpec& spec, const FailurePattern& f, const History& h,
                                       const std::vector<typename A::state_type>& init,
                                       const std::vector<typename A::state_type>& states, std::size_t max_steps) {
  std::vector<RunOf<A>> accepted;
  RunOf<A> run{f, h, init, {}, {}};
  const std::size_t n = alg.process_count();
  auto extend = [&](auto&& self) -> void {
    if (!validate_run(run, spec, alg).valid()) return;
    accepted.push_back(run);
    if (run.schedule.size() == max_steps) return;
    const std::size_t l = run.schedule.size();
    for (std::uint32_t a = 0; a < n; ++a) {
      for (const auto& pre : states) {
        for (std::uint32_t bits = 0; bits <= ProcessSet::all(n).bits(); ++bits) {
          for (Time t = 0; t <= f.horizon(); ++t) {
            std::vector<std::optional<Received<typename A::payload_type>>> inputs{std::nullopt};
            for (std::size_t tag = 0; tag < l; ++tag) {
              const auto& src = run.schedule[tag];
              for (const auto& m : alg.payload_alphabet()) {
                inputs.push_back(Received<typename A::payload_type>{src.actor, m, tag});
              }
            }
            for (const auto& in : inputs) {
              if (in && !alg.accepts_messages(ProcessId(a), pre)) continue;
              const auto tr = alg.transition(ProcessId(a), pre, in, ProcessSet(bits));
              run.schedule.push_back({ProcessId(a), pre, in, ProcessSet(bits), tr.next, tr.send});
              run.times.push_back(t);
              self(self);
              run.schedule.pop_back();
              run.times.pop_back();
            }
          }
        }
      }
    }
  };
  extend(extend);
  return accepted;
}

}  // namespace fdlab::testing
