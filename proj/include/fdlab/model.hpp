#pragma once

#include <algorithm>
#include <concepts>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdlab/basics.hpp"
#include "fdlab/pattern.hpp"

namespace fdlab {

/// A message delivered to the actor of a step: who sent it, what it carries
/// and the schedule index of the step that sent it.
template <class Payload>
struct Received {
  ProcessId from;
  Payload payload;
  std::size_t tag = 0;

  bool operator==(const Received&) const = default;
};

/// A message emitted by a step, addressed to `to`.
template <class Payload>
struct Outgoing {
  ProcessId to;
  Payload payload;

  bool operator==(const Outgoing&) const = default;
};

/// An in-transit message on link (from, to).
template <class Payload>
struct Message {
  ProcessId from;
  ProcessId to;
  Payload payload;
  std::size_t tag = 0;

  bool operator==(const Message&) const = default;
};

/// Output of one application of δ_i.
template <class State, class Payload>
struct Transition {
  State next;
  std::optional<Outgoing<Payload>> send;

  bool operator==(const Transition&) const = default;
};

/// A deterministic per-process state machine collection A = (A_i).
///
/// `initial_states(p)` is Q̂_i; `is_state(p, s)` decides membership in Q_i;
/// `transition` is δ_i. `accepts_messages(p, s)` is false for states whose
/// step never consumes a message (the scheduler must then deliver ⊥).
template <class A>
concept Algorithm =
    std::regular<typename A::state_type> && std::totally_ordered<typename A::state_type> &&
    std::regular<typename A::payload_type> && std::totally_ordered<typename A::payload_type> &&
    requires(const A& a, ProcessId p, const typename A::state_type& s, const typename A::payload_type& m,
             const std::optional<Received<typename A::payload_type>>& received, ProcessSet d,
             const std::string& text) {
      { a.name() } -> std::convertible_to<std::string>;
      { a.process_count() } -> std::convertible_to<std::size_t>;
      { a.initial_states(p) } -> std::convertible_to<std::vector<typename A::state_type>>;
      { a.is_state(p, s) } -> std::convertible_to<bool>;
      { a.accepts_messages(p, s) } -> std::convertible_to<bool>;
      { a.transition(p, s, received, d) }
          -> std::same_as<Transition<typename A::state_type, typename A::payload_type>>;
      { a.payload_alphabet() } -> std::convertible_to<std::vector<typename A::payload_type>>;
      { a.format_state(s) } -> std::convertible_to<std::string>;
      { a.parse_state(text) } -> std::same_as<std::optional<typename A::state_type>>;
      { a.format_payload(m) } -> std::convertible_to<std::string>;
      { a.parse_payload(text) } -> std::same_as<std::optional<typename A::payload_type>>;
    };

template <Algorithm A>
bool is_initial_state(const A& alg, ProcessId p, const typename A::state_type& s) {
  const auto init = alg.initial_states(p);
  return std::find(init.begin(), init.end(), s) != init.end();
}

/// The step tuple (p_i, s, m, d, s', m').
template <class State, class Payload>
struct Step {
  ProcessId actor;
  State pre;
  std::optional<Received<Payload>> received;
  ProcessSet fd;
  State post;
  std::optional<Outgoing<Payload>> sent;

  bool operator==(const Step&) const = default;
};

/// System configuration: one state per process plus the in-transit messages
/// of every link. Messages are kept sorted by tag; `link(i, j)` filters them.
template <class State, class Payload>
struct Configuration {
  std::vector<State> states;
  std::vector<Message<Payload>> in_transit;
  /// Number of steps applied so far; the tag given to the next sent message.
  std::size_t steps_applied = 0;

  static Configuration initial(std::vector<State> states) { return Configuration{std::move(states), {}, 0}; }

  std::vector<Message<Payload>> link(ProcessId from, ProcessId to) const {
    std::vector<Message<Payload>> out;
    for (const auto& m : in_transit) {
      if (m.from == from && m.to == to) out.push_back(m);
    }
    return out;
  }

  bool operator==(const Configuration&) const = default;
};

template <class State, class Payload>
struct Run {
  FailurePattern pattern;
  History history;
  std::vector<State> init;
  std::vector<Step<State, Payload>> schedule;
  std::vector<Time> times;

  bool operator==(const Run&) const = default;
};

template <Algorithm A>
using RunOf = Run<typename A::state_type, typename A::payload_type>;
template <Algorithm A>
using StepOf = Step<typename A::state_type, typename A::payload_type>;
template <Algorithm A>
using ConfigurationOf = Configuration<typename A::state_type, typename A::payload_type>;

/// Applies one step in place. Throws kMismatchedPreState or
/// kNoSuchInTransitMessage when the step does not fit the configuration.
template <class State, class Payload>
void apply_step_in_place(Configuration<State, Payload>& config, const Step<State, Payload>& step) {
  const std::size_t actor = step.actor.value;
  if (actor >= config.states.size()) throw Error(ErrorCode::kInvalidArgument, "actor outside Π");
  if (!(config.states[actor] == step.pre)) {
    throw Error(ErrorCode::kMismatchedPreState, "pre-state of p" + std::to_string(actor) + " differs from configuration");
  }
  if (step.received) {
    const auto& r = *step.received;
    auto it = std::find_if(config.in_transit.begin(), config.in_transit.end(), [&](const Message<Payload>& m) {
      return m.tag == r.tag && m.from == r.from && m.to == step.actor && m.payload == r.payload;
    });
    if (it == config.in_transit.end()) {
      throw Error(ErrorCode::kNoSuchInTransitMessage,
                  "no message with tag " + std::to_string(r.tag) + " in transit on (p" + std::to_string(r.from.value) +
                      ", p" + std::to_string(actor) + ")");
    }
    config.in_transit.erase(it);
  }
  config.states[actor] = step.post;
  if (step.sent) {
    config.in_transit.push_back(Message<Payload>{step.actor, step.sent->to, step.sent->payload, config.steps_applied});
  }
  ++config.steps_applied;
}

template <class State, class Payload>
Configuration<State, Payload> apply_step(Configuration<State, Payload> config, const Step<State, Payload>& step) {
  apply_step_in_place(config, step);
  return config;
}

/// γ(I, Φ, 0..|Φ|). Element k is the configuration after k steps. Errors
/// from apply_step are rethrown with the failing schedule index.
template <class State, class Payload>
std::vector<Configuration<State, Payload>> config_sequence(const std::vector<State>& init,
                                                           std::span<const Step<State, Payload>> schedule) {
  std::vector<Configuration<State, Payload>> out;
  out.reserve(schedule.size() + 1);
  out.push_back(Configuration<State, Payload>::initial(init));
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    Configuration<State, Payload> next = out.back();
    try {
      apply_step_in_place(next, schedule[k]);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(k) + ": " + e.what());
    }
    out.push_back(std::move(next));
  }
  return out;
}

/// Local state sequence of p: its initial state followed by the post-state
/// of each of its steps. γ_i(I, Φ, k) is element min(k, size-1): a process
/// that stops stepping keeps its last state.
template <class State, class Payload>
std::vector<State> local_states(const std::vector<State>& init, std::span<const Step<State, Payload>> schedule,
                                ProcessId p) {
  std::vector<State> out{init.at(p.value)};
  for (const auto& s : schedule) {
    if (s.actor == p) out.push_back(s.post);
  }
  return out;
}

template <class State>
const State& state_after(const std::vector<State>& local, std::size_t k) {
  return local[std::min(k, local.size() - 1)];
}

/// Φ|_p: the steps of p, in schedule order.
template <class State, class Payload>
std::vector<Step<State, Payload>> project(std::span<const Step<State, Payload>> schedule, ProcessId p) {
  std::vector<Step<State, Payload>> out;
  for (const auto& s : schedule) {
    if (s.actor == p) out.push_back(s);
  }
  return out;
}

/// T|_p: the times at which p steps.
template <class State, class Payload>
std::vector<Time> project_times(std::span<const Step<State, Payload>> schedule, std::span<const Time> times,
                                ProcessId p) {
  std::vector<Time> out;
  for (std::size_t k = 0; k < schedule.size() && k < times.size(); ++k) {
    if (schedule[k].actor == p) out.push_back(times[k]);
  }
  return out;
}

}  // namespace fdlab
