#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fdlab/model.hpp"
#include "fdlab/pattern.hpp"
#include "fdlab/stutter.hpp"

namespace fdlab {

/// Declared problem alphabet: σ and its initial subset σ̂.
struct ProblemAlphabet {
  std::vector<ProblemState> sigma;
  std::vector<ProblemState> sigma_init;

  bool operator==(const ProblemAlphabet&) const = default;
};

/// A time-free problem over (problem-configuration sequence, failure pattern).
///
/// `evaluate` is the full predicate. `evaluate_prefix` is its safety part,
/// used on bounded runs that stop before the algorithm reached quiescence;
/// when unset the full predicate is used for both.
struct ProblemPredicate {
  using Fn = std::function<bool(const ProblemSeq&, const FailurePattern&)>;

  std::string name;
  ProblemAlphabet alphabet;
  Fn evaluate;
  Fn evaluate_prefix;

  bool holds(const ProblemSeq& w, const FailurePattern& f) const { return evaluate(w, f); }
  bool holds_on_prefix(const ProblemSeq& w, const FailurePattern& f) const {
    return evaluate_prefix ? evaluate_prefix(w, f) : evaluate(w, f);
  }
};

/// V_Π: per-process map from algorithm states to problem states. A state
/// outside the covered alphabet maps to nullopt.
template <class State>
class Interpretation {
 public:
  using Fn = std::function<std::optional<ProblemState>(ProcessId, const State&)>;

  Interpretation() = default;
  explicit Interpretation(Fn fn) : fn_(std::move(fn)) {}

  std::optional<ProblemState> try_map(ProcessId p, const State& s) const { return fn_(p, s); }

  ProblemState operator()(ProcessId p, const State& s) const {
    auto out = fn_(p, s);
    if (!out) throw Error(ErrorCode::kUncoveredState, "interpretation does not cover a state of p" + std::to_string(p.value));
    return *out;
  }

 private:
  Fn fn_;
};

/// Interpretation given as explicit per-process tables (problem.v1).
template <class State>
Interpretation<State> table_interpretation(std::vector<std::map<State, ProblemState>> tables) {
  return Interpretation<State>([tables = std::move(tables)](ProcessId p, const State& s) -> std::optional<ProblemState> {
    if (p.value >= tables.size()) return std::nullopt;
    auto it = tables[p.value].find(s);
    if (it == tables[p.value].end()) return std::nullopt;
    return it->second;
  });
}

/// ir: V_Π applied to γ(I, Φ, 0..|Φ|). Only process states matter, so the
/// sequence is computed from local updates without replaying links.
template <class State, class Payload>
ProblemSeq interpret_schedule(const std::vector<State>& init, std::span<const Step<State, Payload>> schedule,
                              const Interpretation<State>& v) {
  ProblemSeq out;
  out.reserve(schedule.size() + 1);
  ProblemConfig current(init.size());
  for (std::size_t i = 0; i < init.size(); ++i) current[i] = v(ProcessId(static_cast<std::uint32_t>(i)), init[i]);
  out.push_back(current);
  for (const auto& s : schedule) {
    current[s.actor.value] = v(s.actor, s.post);
    out.push_back(current);
  }
  return out;
}

/// ir(R, V_Π). The run's schedule must apply cleanly from its initial
/// configuration.
template <class State, class Payload>
ProblemSeq interpret_run(const Run<State, Payload>& run, const Interpretation<State>& v) {
  const auto configs = config_sequence<State, Payload>(run.init, run.schedule);
  ProblemSeq out;
  out.reserve(configs.size());
  for (const auto& c : configs) {
    ProblemConfig pc(c.states.size());
    for (std::size_t i = 0; i < c.states.size(); ++i) pc[i] = v(ProcessId(static_cast<std::uint32_t>(i)), c.states[i]);
    out.push_back(std::move(pc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Consensus encoding: σ = {(p, d) : p ∈ {0,1}, d ∈ {⊥, 0, 1}}, rendered as
// "(p,d)" with "_" for ⊥.

struct ConsensusCell {
  int proposal = 0;
  int decision = -1;  // -1 is ⊥
};

inline ProblemState consensus_state(int proposal, int decision) {
  ProblemState s = "(0,_)";
  s[1] = static_cast<char>('0' + proposal);
  s[3] = decision < 0 ? '_' : static_cast<char>('0' + decision);
  return s;
}

inline ConsensusCell decode_consensus(const ProblemState& s) {
  if (s.size() != 5 || s[0] != '(' || s[2] != ',' || s[4] != ')' || (s[1] != '0' && s[1] != '1') ||
      (s[3] != '0' && s[3] != '1' && s[3] != '_')) {
    throw Error(ErrorCode::kAlphabetMismatch, "'" + s + "' is not a consensus problem state");
  }
  return {s[1] - '0', s[3] == '_' ? -1 : s[3] - '0'};
}

inline ProblemAlphabet consensus_alphabet() {
  ProblemAlphabet a;
  for (int p = 0; p <= 1; ++p) {
    for (int d = -1; d <= 1; ++d) a.sigma.push_back(consensus_state(p, d));
    a.sigma_init.push_back(consensus_state(p, -1));
  }
  return a;
}

namespace detail {

struct ConsensusScan {
  bool safe = true;
  int value = -1;                   // the common decision, if any
  std::uint32_t proposed_bits = 0;  // bit v set if some process proposed v
  std::vector<int> proposals;
  std::vector<int> final_decisions;
};

/// Validity (decided values were proposed), uniform agreement and decision
/// stability over the whole sequence.
inline ConsensusScan scan_consensus(const ProblemSeq& w) {
  ConsensusScan scan;
  if (w.empty()) return scan;
  const std::size_t n = w.front().size();
  scan.proposals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ConsensusCell c = decode_consensus(w.front()[i]);
    scan.proposals[i] = c.proposal;
    scan.proposed_bits |= 1U << c.proposal;
  }
  std::vector<int> decided(n, -1);
  for (const auto& config : w) {
    if (config.size() != n) throw Error(ErrorCode::kAlphabetMismatch, "ragged problem configuration sequence");
    for (std::size_t i = 0; i < n; ++i) {
      const ConsensusCell c = decode_consensus(config[i]);
      if (decided[i] >= 0 && c.decision != decided[i]) scan.safe = false;
      if (c.decision < 0) continue;
      decided[i] = c.decision;
      if ((scan.proposed_bits & (1U << c.decision)) == 0) scan.safe = false;
      if (scan.value >= 0 && scan.value != c.decision) scan.safe = false;
      scan.value = c.decision;
    }
  }
  scan.final_decisions.resize(n);
  for (std::size_t i = 0; i < n; ++i) scan.final_decisions[i] = decode_consensus(w.back()[i]).decision;
  return scan;
}

inline bool correct_all_decided(const ConsensusScan& scan, const FailurePattern& f) {
  for (ProcessId p : f.correct().members()) {
    if (p.value >= scan.final_decisions.size() || scan.final_decisions[p.value] < 0) return false;
  }
  return true;
}

inline bool decision_from_correct(const ConsensusScan& scan, const FailurePattern& f) {
  if (scan.value < 0) return true;
  for (ProcessId p : f.correct().members()) {
    if (p.value < scan.proposals.size() && scan.proposals[p.value] == scan.value) return true;
  }
  return false;
}

}  // namespace detail

/// Safety part of consensus: validity, agreement, stability.
inline bool consensus_safety(const ProblemSeq& w, const FailurePattern&) { return detail::scan_consensus(w).safe; }

/// Consensus with horizon termination: every correct process has decided in
/// the final configuration.
inline bool eval_consensus(const ProblemSeq& w, const FailurePattern& f) {
  const auto scan = detail::scan_consensus(w);
  return scan.safe && detail::correct_all_decided(scan, f);
}

inline bool strong_consensus_safety(const ProblemSeq& w, const FailurePattern& f) {
  const auto scan = detail::scan_consensus(w);
  if (f.correct().empty()) return true;
  return scan.safe && detail::decision_from_correct(scan, f);
}

/// Consensus whose decision is the proposal of a correct process. Anything
/// goes when no process is correct.
inline bool eval_strong_consensus(const ProblemSeq& w, const FailurePattern& f) {
  const auto scan = detail::scan_consensus(w);
  if (f.correct().empty()) return true;
  return scan.safe && detail::decision_from_correct(scan, f) && detail::correct_all_decided(scan, f);
}

inline ProblemPredicate consensus_problem() {
  return {"consensus", consensus_alphabet(), eval_consensus, consensus_safety};
}

inline ProblemPredicate strong_consensus_problem() {
  return {"strong-consensus", consensus_alphabet(), eval_strong_consensus, strong_consensus_safety};
}

inline ProblemPredicate true_problem(ProblemAlphabet alphabet = consensus_alphabet()) {
  auto yes = [](const ProblemSeq&, const FailurePattern&) { return true; };
  return {"true", std::move(alphabet), yes, yes};
}

inline ProblemPredicate problem_by_name(const std::string& name) {
  if (name == "consensus") return consensus_problem();
  if (name == "strong-consensus") return strong_consensus_problem();
  if (name == "true") return true_problem();
  throw Error(ErrorCode::kUnknownName, "unknown problem '" + name + "'");
}

// ---------------------------------------------------------------------------
// Well-formedness checks for time-free problems.

struct ProblemCheckBounds {
  std::size_t n = 2;
  Time horizon = 3;
  /// Longest sequence considered.
  std::size_t max_length = 4;
};

struct ProblemCounterexample {
  ProblemSeq w;
  ProblemSeq w2;  // for stuttering; equals w for crash time independence
  FailurePattern f;
  FailurePattern f2;
  std::string detail;
};

struct ProblemVerdict {
  bool holds = true;
  std::size_t checked = 0;
  std::optional<ProblemCounterexample> counterexample;
};

namespace detail {

inline std::vector<ProblemConfig> all_configs(const std::vector<ProblemState>& states, std::size_t n) {
  std::vector<ProblemConfig> out{ProblemConfig{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ProblemConfig> next;
    for (const auto& prefix : out) {
      for (const auto& s : states) {
        auto c = prefix;
        c.push_back(s);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Calls fn on every sequence in W(Σ̂*, Σ*) of length 1..max_length.
template <class Fn>
void for_each_sequence(const ProblemAlphabet& alphabet, std::size_t n, std::size_t max_length, Fn&& fn) {
  const auto init = all_configs(alphabet.sigma_init, n);
  const auto configs = all_configs(alphabet.sigma, n);
  ProblemSeq w;
  auto extend = [&](auto&& self) -> void {
    fn(static_cast<const ProblemSeq&>(w));
    if (w.size() >= max_length) return;
    for (const auto& c : configs) {
      w.push_back(c);
      self(self);
      w.pop_back();
    }
  };
  for (const auto& c : init) {
    w.assign(1, c);
    extend(extend);
  }
}

/// Every 1-stutter of w.
inline std::vector<ProblemSeq> one_stutters(const ProblemSeq& w) {
  std::vector<ProblemSeq> out;
  for (std::size_t gap = 0; gap + 1 < w.size(); ++gap) {
    const ProblemConfig& a = w[gap];
    const ProblemConfig& b = w[gap + 1];
    std::vector<std::size_t> differ;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) differ.push_back(i);
    }
    for (std::uint32_t choice = 0; choice < (1U << differ.size()); ++choice) {
      ProblemConfig mid = a;
      for (std::size_t d = 0; d < differ.size(); ++d) {
        if (choice & (1U << d)) mid[differ[d]] = b[differ[d]];
      }
      ProblemSeq w2 = w;
      w2.insert(w2.begin() + static_cast<std::ptrdiff_t>(gap) + 1, std::move(mid));
      out.push_back(std::move(w2));
    }
  }
  return out;
}

}  // namespace detail

/// correct(F) = correct(F′) ⇒ P(w, F) = P(w, F′), over every sequence up to
/// the length bound and every monotone pattern. Both the full predicate and
/// its prefix part are checked.
inline ProblemVerdict check_crash_time_independence(const ProblemPredicate& p, const ProblemCheckBounds& bounds) {
  const auto patterns = all_failure_patterns(bounds.n, bounds.horizon);
  std::map<std::uint32_t, std::vector<const FailurePattern*>> by_correct;
  for (const auto& f : patterns) by_correct[f.correct().bits()].push_back(&f);

  ProblemVerdict verdict;
  detail::for_each_sequence(p.alphabet, bounds.n, bounds.max_length, [&](const ProblemSeq& w) {
    if (verdict.counterexample) return;
    for (const auto& [bits, group] : by_correct) {
      const FailurePattern& first = *group.front();
      const bool full = p.holds(w, first);
      const bool prefix = p.holds_on_prefix(w, first);
      for (std::size_t g = 1; g < group.size(); ++g) {
        ++verdict.checked;
        if (p.holds(w, *group[g]) != full || p.holds_on_prefix(w, *group[g]) != prefix) {
          verdict.holds = false;
          verdict.counterexample = ProblemCounterexample{w, w, first, *group[g], "verdict depends on crash times"};
          return;
        }
      }
    }
  });
  return verdict;
}

/// w ⊑ w′ ⇒ P(w, F) = P(w′, F). ⊑ is the reflexive-transitive closure of
/// 1-stutters, so checking every 1-stutter pair whose longer side fits the
/// length bound covers every ⊑ pair within the bound.
inline ProblemVerdict check_finite_stuttering(const ProblemPredicate& p, const ProblemCheckBounds& bounds) {
  const auto patterns = all_failure_patterns(bounds.n, bounds.horizon);
  ProblemVerdict verdict;
  if (bounds.max_length < 2) return verdict;
  detail::for_each_sequence(p.alphabet, bounds.n, bounds.max_length - 1, [&](const ProblemSeq& w) {
    if (verdict.counterexample) return;
    const auto stutters = detail::one_stutters(w);
    for (const auto& f : patterns) {
      const bool full = p.holds(w, f);
      const bool prefix = p.holds_on_prefix(w, f);
      for (const auto& w2 : stutters) {
        ++verdict.checked;
        if (p.holds(w2, f) != full || p.holds_on_prefix(w2, f) != prefix) {
          verdict.holds = false;
          verdict.counterexample = ProblemCounterexample{w, w2, f, f, "verdict changes under a 1-stutter"};
          return;
        }
      }
    }
  });
  return verdict;
}

}  // namespace fdlab
