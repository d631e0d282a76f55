#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdlab/failure_detectors.hpp"
#include "fdlab/model.hpp"

namespace fdlab {

/// PrefixConsistent checks the safety conditions of a run prefix only.
/// StrictFairness also requires bounded fairness for correct processes,
/// delivery of every message addressed to a correct process by the horizon,
/// and a horizon-complete history.
enum class PrefixMode { kPrefixConsistent, kStrictFairness };

struct ValidityOptions {
  PrefixMode mode = PrefixMode::kPrefixConsistent;
  /// Window length for StrictFairness; unset means horizon + 1 (every
  /// correct process steps at least once).
  std::optional<Time> fairness_window;
};

enum class ViolationKind {
  kStructure,
  kInitialConfiguration,
  kHistoryMembership,
  kDeadActor,
  kFdMismatch,
  kSpuriousMessage,
  kReliableTransmission,
  kInitialState,
  kStateContinuity,
  kTransition,
  kFairness,
  kDelivery,
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kStructure: return "structure";
    case ViolationKind::kInitialConfiguration: return "initial configuration";
    case ViolationKind::kHistoryMembership: return "history membership";
    case ViolationKind::kDeadActor: return "dead actor";
    case ViolationKind::kFdMismatch: return "FD output mismatch";
    case ViolationKind::kSpuriousMessage: return "spurious message";
    case ViolationKind::kReliableTransmission: return "reliable transmission";
    case ViolationKind::kInitialState: return "first-step state";
    case ViolationKind::kStateContinuity: return "state continuity";
    case ViolationKind::kTransition: return "transition";
    case ViolationKind::kFairness: return "fairness";
    case ViolationKind::kDelivery: return "delivery";
  }
  return "?";
}

struct RunViolation {
  ViolationKind kind;
  /// Offending schedule index, when the violation is tied to one step.
  std::optional<std::size_t> index;
  std::string detail;
};

struct ValidityReport {
  std::vector<RunViolation> violations;

  bool valid() const { return violations.empty(); }
  bool has(ViolationKind kind) const {
    for (const auto& v : violations) {
      if (v.kind == kind) return true;
    }
    return false;
  }
};

inline std::string describe(const RunViolation& v) {
  std::string out = to_string(v.kind);
  if (v.index) out += " at " + std::to_string(*v.index);
  if (!v.detail.empty()) out += ": " + v.detail;
  return out;
}

/// Checks a run against the validity conditions of the model. Violations are
/// reported, never thrown.
template <Algorithm A>
ValidityReport validate_run(const RunOf<A>& run, const FDSpec& fd, const A& alg, const ValidityOptions& options = {}) {
  ValidityReport report;
  auto add = [&](ViolationKind kind, std::optional<std::size_t> index, std::string detail) {
    report.violations.push_back({kind, index, std::move(detail)});
  };
  auto p_str = [](ProcessId p) { return "p" + std::to_string(p.value); };

  const std::size_t n = alg.process_count();
  const FailurePattern& f = run.pattern;
  if (f.process_count() != n) add(ViolationKind::kStructure, std::nullopt, "pattern has wrong process count");
  if (run.history.process_count() != f.process_count() || run.history.horizon() != f.horizon()) {
    add(ViolationKind::kStructure, std::nullopt, "history domain differs from pattern");
  }
  if (run.init.size() != n) add(ViolationKind::kStructure, std::nullopt, "initial configuration has wrong size");
  if (run.schedule.size() != run.times.size()) {
    add(ViolationKind::kStructure, std::nullopt, "schedule and time-sequence lengths differ");
  }
  const ProcessSet universe = ProcessSet::all(n);
  for (std::size_t l = 0; l < run.schedule.size() && l < run.times.size(); ++l) {
    const auto& s = run.schedule[l];
    if (run.times[l] > f.horizon()) add(ViolationKind::kStructure, l, "time beyond horizon");
    if (l > 0 && run.times[l] <= run.times[l - 1]) add(ViolationKind::kStructure, l, "times not strictly increasing");
    if (s.actor.value >= n) add(ViolationKind::kStructure, l, "actor outside Π");
    if (!s.fd.subset_of(universe)) add(ViolationKind::kStructure, l, "FD output outside Π");
    if (s.received && s.received->from.value >= n) add(ViolationKind::kStructure, l, "sender outside Π");
    if (s.sent && s.sent->to.value >= n) add(ViolationKind::kStructure, l, "receiver outside Π");
  }
  if (!report.valid()) return report;

  for (std::size_t i = 0; i < n; ++i) {
    const ProcessId p(static_cast<std::uint32_t>(i));
    if (!is_initial_state(alg, p, run.init[i])) {
      add(ViolationKind::kInitialConfiguration, std::nullopt, p_str(p) + " does not start in an initial state");
    }
  }

  const MembershipVerdict membership = history_in(fd, run.history, f);
  const bool strict = options.mode == PrefixMode::kStrictFairness;
  if (!membership.prefix_consistent || (strict && !membership.horizon_complete)) {
    std::string detail = "history not in " + to_string(fd) + "(F)";
    if (!membership.violations.empty()) {
      const auto& v = membership.violations.front();
      detail += " (" + v.condition + ": " + p_str(v.subject) + " at " + p_str(v.observer) + ", t=" +
                std::to_string(v.time) + ")";
    }
    add(ViolationKind::kHistoryMembership, std::nullopt, detail);
  }

  std::vector<std::optional<std::size_t>> last_step(n);
  std::vector<bool> received_tag(run.schedule.size(), false);
  for (std::size_t l = 0; l < run.schedule.size(); ++l) {
    const auto& s = run.schedule[l];
    const Time t = run.times[l];
    const std::size_t i = s.actor.value;

    if (!f.is_live(s.actor, t)) add(ViolationKind::kDeadActor, l, p_str(s.actor) + " crashed by t=" + std::to_string(t));
    if (s.fd != run.history.at(s.actor, t)) add(ViolationKind::kFdMismatch, l, "d differs from H(p, T[l])");

    if (!last_step[i]) {
      if (!(s.pre == run.init[i])) add(ViolationKind::kInitialState, l, "first step of " + p_str(s.actor) + " not from I|_i");
    } else if (!(s.pre == run.schedule[*last_step[i]].post)) {
      add(ViolationKind::kStateContinuity, l, "pre-state differs from post-state of step " + std::to_string(*last_step[i]));
    }
    last_step[i] = l;

    if (s.received) {
      const auto& r = *s.received;
      const bool matches = r.tag < l && run.schedule[r.tag].actor == r.from && run.schedule[r.tag].sent &&
                           run.schedule[r.tag].sent->to == s.actor && run.schedule[r.tag].sent->payload == r.payload;
      if (!matches) {
        add(ViolationKind::kSpuriousMessage, l, "no earlier step of " + p_str(r.from) + " sent this message");
      } else if (received_tag[r.tag]) {
        add(ViolationKind::kReliableTransmission, l, "message of step " + std::to_string(r.tag) + " received twice");
      } else {
        received_tag[r.tag] = true;
      }
    }

    if (!alg.is_state(s.actor, s.pre)) {
      add(ViolationKind::kTransition, l, "pre-state outside Q_i");
    } else if (s.received && !alg.accepts_messages(s.actor, s.pre)) {
      add(ViolationKind::kTransition, l, "state does not receive messages");
    } else {
      const auto expected = alg.transition(s.actor, s.pre, s.received, s.fd);
      if (!(expected.next == s.post) || !(expected.send == s.sent)) {
        add(ViolationKind::kTransition, l, "step is not a transition of " + std::string(alg.name()));
      }
    }
  }

  if (strict) {
    const ProcessSet correct = f.correct();
    for (std::size_t l = 0; l < run.schedule.size(); ++l) {
      const auto& s = run.schedule[l];
      if (s.sent && correct.contains(s.sent->to) && !received_tag[l]) {
        add(ViolationKind::kDelivery, l, "message to correct " + p_str(s.sent->to) + " not received by the horizon");
      }
    }
    const Time window = options.fairness_window.value_or(f.horizon() + 1);
    if (window == 0) {
      add(ViolationKind::kFairness, std::nullopt, "fairness window must be positive");
    } else if (window <= f.horizon() + 1) {
      for (ProcessId p : correct.members()) {
        const auto times = project_times<typename A::state_type, typename A::payload_type>(run.schedule, run.times, p);
        for (Time start = 0; start + window <= f.horizon() + 1; ++start) {
          const bool stepped = std::any_of(times.begin(), times.end(),
                                           [&](Time t) { return t >= start && t < start + window; });
          if (!stepped) {
            add(ViolationKind::kFairness, std::nullopt,
                p_str(p) + " takes no step in [" + std::to_string(start) + ", " +
                    std::to_string(start + window - 1) + "]");
            break;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace fdlab
