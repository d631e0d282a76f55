#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "fdlab/failure_detectors.hpp"
#include "fdlab/model.hpp"
#include "fdlab/problems.hpp"

namespace fdlab {

namespace detail {

inline std::optional<std::string> unwrap_tag(const std::string& text, const std::string& tag) {
  const std::string open = tag + "(";
  if (text.size() < open.size() + 1 || !text.starts_with(open) || text.back() != ')') return std::nullopt;
  return text.substr(open.size(), text.size() - open.size() - 1);
}

/// Initial states of every process, looked up on each step by the wrappers.
template <Algorithm A>
std::vector<std::vector<typename A::state_type>> initial_table(const A& alg) {
  std::vector<std::vector<typename A::state_type>> out;
  for (std::size_t i = 0; i < alg.process_count(); ++i) {
    auto init = alg.initial_states(ProcessId(static_cast<std::uint32_t>(i)));
    std::sort(init.begin(), init.end());
    out.push_back(std::move(init));
  }
  return out;
}

}  // namespace detail

/// Stall-on-Suspect. A process whose first step sees itself suspected moves
/// to stall(q) without sending and stays there; stall states never receive.
/// stall(q) is a tagged copy of the initial state q.
template <Algorithm A>
class StallOnSuspect {
 public:
  using base_type = A;
  using base_state = typename A::state_type;
  using payload_type = typename A::payload_type;

  struct state_type {
    bool stalled = false;
    base_state base{};

    auto operator<=>(const state_type&) const = default;
    bool operator==(const state_type&) const = default;
  };

  explicit StallOnSuspect(A base) : base_(std::move(base)), initial_(detail::initial_table(base_)) {}

  const A& base() const { return base_; }

  std::string name() const { return "sos(" + std::string(base_.name()) + ")"; }
  std::size_t process_count() const { return base_.process_count(); }

  static state_type wrap(const base_state& s) { return {false, s}; }
  static state_type stall(const base_state& q) { return {true, q}; }

  bool is_base_initial(ProcessId p, const base_state& s) const {
    const auto& init = initial_.at(p.value);
    return std::binary_search(init.begin(), init.end(), s);
  }

  std::vector<state_type> initial_states(ProcessId p) const {
    std::vector<state_type> out;
    for (const auto& q : initial_.at(p.value)) out.push_back(wrap(q));
    return out;
  }

  bool is_state(ProcessId p, const state_type& s) const {
    return s.stalled ? is_base_initial(p, s.base) : base_.is_state(p, s.base);
  }

  bool accepts_messages(ProcessId p, const state_type& s) const {
    return !s.stalled && base_.accepts_messages(p, s.base);
  }

  Transition<state_type, payload_type> transition(ProcessId p, const state_type& s,
                                                  const std::optional<Received<payload_type>>& received,
                                                  ProcessSet fd) const {
    if (s.stalled) return {s, std::nullopt};
    if (fd.contains(p) && is_base_initial(p, s.base)) return {stall(s.base), std::nullopt};
    auto t = base_.transition(p, s.base, received, fd);
    return {wrap(t.next), t.send};
  }

  std::vector<payload_type> payload_alphabet() const { return base_.payload_alphabet(); }

  std::string format_state(const state_type& s) const {
    const std::string inner = base_.format_state(s.base);
    return s.stalled ? "stall(" + inner + ")" : inner;
  }

  std::optional<state_type> parse_state(const std::string& text) const {
    if (auto inner = detail::unwrap_tag(text, "stall")) {
      if (auto q = base_.parse_state(*inner)) return stall(*q);
    }
    if (auto q = base_.parse_state(text)) return wrap(*q);
    return std::nullopt;
  }

  std::string format_payload(const payload_type& m) const { return base_.format_payload(m); }
  std::optional<payload_type> parse_payload(const std::string& text) const { return base_.parse_payload(text); }

 private:
  A base_;
  std::vector<std::vector<base_state>> initial_;
};

/// Delay-a-Step. The initial states are delay(q) for each base initial q;
/// the first step goes to q without receiving or sending.
template <Algorithm A>
class DelayAStep {
 public:
  using base_type = A;
  using base_state = typename A::state_type;
  using payload_type = typename A::payload_type;

  struct state_type {
    bool delayed = false;
    base_state base{};

    auto operator<=>(const state_type&) const = default;
    bool operator==(const state_type&) const = default;
  };

  explicit DelayAStep(A base) : base_(std::move(base)), initial_(detail::initial_table(base_)) {}

  const A& base() const { return base_; }

  std::string name() const { return "das(" + std::string(base_.name()) + ")"; }
  std::size_t process_count() const { return base_.process_count(); }

  static state_type wrap(const base_state& s) { return {false, s}; }
  static state_type delay(const base_state& q) { return {true, q}; }

  std::vector<state_type> initial_states(ProcessId p) const {
    std::vector<state_type> out;
    for (const auto& q : initial_.at(p.value)) out.push_back(delay(q));
    return out;
  }

  bool is_state(ProcessId p, const state_type& s) const {
    if (!s.delayed) return base_.is_state(p, s.base);
    const auto& init = initial_.at(p.value);
    return std::binary_search(init.begin(), init.end(), s.base);
  }

  bool accepts_messages(ProcessId p, const state_type& s) const {
    return !s.delayed && base_.accepts_messages(p, s.base);
  }

  Transition<state_type, payload_type> transition(ProcessId p, const state_type& s,
                                                  const std::optional<Received<payload_type>>& received,
                                                  ProcessSet fd) const {
    if (s.delayed) return {wrap(s.base), std::nullopt};
    auto t = base_.transition(p, s.base, received, fd);
    return {wrap(t.next), t.send};
  }

  std::vector<payload_type> payload_alphabet() const { return base_.payload_alphabet(); }

  std::string format_state(const state_type& s) const {
    const std::string inner = base_.format_state(s.base);
    return s.delayed ? "delay(" + inner + ")" : inner;
  }

  std::optional<state_type> parse_state(const std::string& text) const {
    if (auto inner = detail::unwrap_tag(text, "delay")) {
      if (auto q = base_.parse_state(*inner)) return delay(*q);
    }
    if (auto q = base_.parse_state(text)) return wrap(*q);
    return std::nullopt;
  }

  std::string format_payload(const payload_type& m) const { return base_.format_payload(m); }
  std::optional<payload_type> parse_payload(const std::string& text) const { return base_.parse_payload(text); }

 private:
  A base_;
  std::vector<std::vector<base_state>> initial_;
};

template <Algorithm A>
StallOnSuspect<A> stall_on_suspect(A alg) {
  return StallOnSuspect<A>(std::move(alg));
}

template <Algorithm A>
DelayAStep<A> delay_a_step(A alg) {
  return DelayAStep<A>(std::move(alg));
}

/// Ṽ(stall(q)) = V(q); Ṽ = V on base states.
template <Algorithm A>
Interpretation<typename StallOnSuspect<A>::state_type> derive_interpretation_sos(
    Interpretation<typename A::state_type> v, const StallOnSuspect<A>&) {
  using S = typename StallOnSuspect<A>::state_type;
  return Interpretation<S>([v = std::move(v)](ProcessId p, const S& s) { return v.try_map(p, s.base); });
}

/// Ṽ(delay(q)) = V(q); Ṽ = V on base states.
template <Algorithm A>
Interpretation<typename DelayAStep<A>::state_type> derive_interpretation_das(
    Interpretation<typename A::state_type> v, const DelayAStep<A>&) {
  using S = typename DelayAStep<A>::state_type;
  return Interpretation<S>([v = std::move(v)](ProcessId p, const S& s) { return v.try_map(p, s.base); });
}

namespace detail {

/// Keeps the steps selected by `keep`, converting states with `convert` and
/// renumbering message tags to the new schedule indices.
template <class S1, class S2, class Payload, class Keep, class Convert>
std::pair<std::vector<Step<S2, Payload>>, std::vector<Time>> filter_schedule(const Run<S1, Payload>& run, Keep keep,
                                                                              Convert convert) {
  std::vector<std::optional<std::size_t>> new_index(run.schedule.size());
  std::vector<Step<S2, Payload>> schedule;
  std::vector<Time> times;
  for (std::size_t l = 0; l < run.schedule.size(); ++l) {
    const auto& s = run.schedule[l];
    if (!keep(l, s)) continue;
    new_index[l] = schedule.size();
    std::optional<Received<Payload>> received;
    if (s.received) {
      received = *s.received;
      if (s.received->tag >= new_index.size() || !new_index[s.received->tag]) {
        throw Error(ErrorCode::kInvalidArgument, "step " + std::to_string(l) + " receives a message from a removed step");
      }
      received->tag = *new_index[s.received->tag];
    }
    schedule.push_back({s.actor, convert(s.actor, s.pre), received, s.fd, convert(s.actor, s.post), s.sent});
    times.push_back(run.times.at(l));
  }
  return {std::move(schedule), std::move(times)};
}

}  // namespace detail

/// Removes the steps of faulty(F) from a run of 𝔉_SoS(A) and unwraps the
/// states. Throws kNotSoSRun if a faulty process sent a message or a
/// remaining step involves a stall state.
template <Algorithm A>
RunOf<A> strip_faulty_steps(const RunOf<StallOnSuspect<A>>& run, const FailurePattern& f) {
  using S = typename StallOnSuspect<A>::state_type;
  const ProcessSet faulty = f.faulty();
  for (std::size_t l = 0; l < run.schedule.size(); ++l) {
    const auto& s = run.schedule[l];
    if (faulty.contains(s.actor) && s.sent) {
      throw Error(ErrorCode::kNotSoSRun, "faulty p" + std::to_string(s.actor.value) + " sends at step " + std::to_string(l));
    }
  }
  auto convert = [](ProcessId p, const S& s) {
    if (s.stalled) throw Error(ErrorCode::kNotSoSRun, "p" + std::to_string(p.value) + " is stalled but correct");
    return s.base;
  };
  auto [schedule, times] = detail::filter_schedule<S, typename A::state_type>(
      run, [&](std::size_t, const auto& s) { return !faulty.contains(s.actor); }, convert);
  RunOf<A> out{run.pattern, run.history, {}, std::move(schedule), std::move(times)};
  for (const auto& s : run.init) out.init.push_back(s.base);
  return out;
}

/// Replaces F by F⁰. Throws kFaultyStepPresent if a faulty process steps.
template <class State, class Payload>
Run<State, Payload> to_initial_crash_run(const Run<State, Payload>& run) {
  const ProcessSet faulty = run.pattern.faulty();
  for (std::size_t l = 0; l < run.schedule.size(); ++l) {
    if (faulty.contains(run.schedule[l].actor)) {
      throw Error(ErrorCode::kFaultyStepPresent,
                  "faulty p" + std::to_string(run.schedule[l].actor.value) + " steps at " + std::to_string(l));
    }
  }
  Run<State, Payload> out = run;
  out.pattern = initial_crash_scenario(run.pattern);
  return out;
}

struct DasMappingOptions {
  /// Negative control: keep F̃, H̃ and T′ instead of shifting them.
  bool skip_time_shift = false;
};

/// Maps a run of 𝔉_DaS(A) to a run of A: drops each process's first (no-op)
/// step, moves every crash and time one unit earlier.
template <Algorithm A>
RunOf<A> das_run_mapping(const RunOf<DelayAStep<A>>& run, const DasMappingOptions& options = {}) {
  using S = typename DelayAStep<A>::state_type;
  std::vector<bool> seen(run.init.size(), false);
  std::vector<bool> drop(run.schedule.size(), false);
  for (std::size_t l = 0; l < run.schedule.size(); ++l) {
    const auto& s = run.schedule[l];
    if (s.actor.value >= seen.size()) throw Error(ErrorCode::kInvalidArgument, "actor outside Π");
    if (seen[s.actor.value]) continue;
    seen[s.actor.value] = true;
    if (!s.pre.delayed || s.post.delayed || s.received || s.sent || !(s.post.base == s.pre.base)) {
      throw Error(ErrorCode::kMissingNoOpPrefix,
                  "first step of p" + std::to_string(s.actor.value) + " (index " + std::to_string(l) + ") is not a no-op");
    }
    drop[l] = true;
  }
  auto convert = [](ProcessId p, const S& s) {
    if (s.delayed) {
      throw Error(ErrorCode::kMissingNoOpPrefix, "p" + std::to_string(p.value) + " is still delayed after its first step");
    }
    return s.base;
  };
  auto [schedule, times] = detail::filter_schedule<S, typename A::state_type>(
      run, [&](std::size_t l, const auto&) { return !drop[l]; }, convert);
  RunOf<A> out{run.pattern, run.history, {}, std::move(schedule), std::move(times)};
  for (const auto& s : run.init) out.init.push_back(s.base);
  if (!options.skip_time_shift) {
    for (std::size_t l = 0; l < out.times.size(); ++l) {
      if (out.times[l] == 0) throw Error(ErrorCode::kNonPositiveTime, "step " + std::to_string(l) + " at time 0");
      --out.times[l];
    }
    out.pattern = shift_pattern(run.pattern);
    out.history = shift_history(run.history);
  }
  return out;
}

}  // namespace fdlab
