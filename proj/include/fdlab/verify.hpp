#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "fdlab/enumerate.hpp"
#include "fdlab/json_io.hpp"
#include "fdlab/problems.hpp"
#include "fdlab/stutter.hpp"
#include "fdlab/transformations.hpp"
#include "fdlab/validate.hpp"

namespace fdlab {

struct TheoremFailure {
  std::string clause;
  std::string detail;
  Json run;  // run.v1 of the offending run, null for per-pattern checks
};

/// Outcome of a bounded check. pass() iff failure_count == 0; only the first
/// `kKeptFailures` failures are stored.
struct TheoremReport {
  static constexpr std::size_t kKeptFailures = 16;

  std::string theorem;
  std::string algorithm;
  std::string fd;
  std::string problem;
  Json bounds;
  std::size_t checked_runs = 0;
  std::size_t truncated_runs = 0;
  std::size_t premise_violations = 0;
  std::size_t failure_count = 0;
  std::vector<TheoremFailure> failures;
  std::vector<std::string> notes;
  double elapsed_seconds = 0;

  bool pass() const { return failure_count == 0; }

  void add_failure(std::string clause, std::string detail, Json run = nullptr) {
    ++failure_count;
    if (failures.size() < kKeptFailures) failures.push_back({std::move(clause), std::move(detail), std::move(run)});
  }

  /// Combines counts and failure lists; `other` is taken to come later in
  /// enumeration order.
  void merge(const TheoremReport& other) {
    checked_runs += other.checked_runs;
    truncated_runs += other.truncated_runs;
    premise_violations += other.premise_violations;
    failure_count += other.failure_count;
    for (const auto& f : other.failures) {
      if (failures.size() < kKeptFailures) failures.push_back(f);
    }
    elapsed_seconds += other.elapsed_seconds;
  }
};

inline const char* to_string(TimeMode m) { return m == TimeMode::kExhaustive ? "exhaustive" : "canonical"; }
inline const char* to_string(HistoryMode m) { return m == HistoryMode::kExpanded ? "expanded" : "read-cells"; }

inline Json bounds_to_json(const EnumerationBounds& b, bool require_quiescence) {
  Json j;
  j["n"] = b.n;
  j["horizon"] = b.horizon;
  j["max_steps"] = b.max_steps;
  j["history_budget"] = b.history_budget;
  j["patterns"] = b.patterns.empty() ? Json("all") : Json(b.patterns.size());
  j["mode"] = b.mode == PrefixMode::kPrefixConsistent ? "prefix-consistent" : "strict-fairness";
  j["fairness_window"] = b.fairness_window ? Json(*b.fairness_window) : Json(nullptr);
  j["time_mode"] = to_string(b.time_mode);
  j["history_mode"] = to_string(b.history_mode);
  j["run_cap"] = effective_run_cap(b);
  j["require_quiescence"] = require_quiescence;
  return j;
}

/// report.v1. Elapsed time is left out so that reports are reproducible.
inline Json report_to_json(const TheoremReport& r) {
  Json j;
  j["schema"] = "report.v1";
  j["theorem"] = r.theorem;
  j["algorithm"] = r.algorithm;
  j["fd"] = r.fd;
  j["problem"] = r.problem;
  j["bounds"] = r.bounds;
  j["counts"] = {{"checked_runs", r.checked_runs},
                 {"truncated_runs", r.truncated_runs},
                 {"premise_violations", r.premise_violations},
                 {"failure_count", r.failure_count}};
  j["failures"] = Json::array();
  for (const auto& f : r.failures) j["failures"].push_back({{"clause", f.clause}, {"detail", f.detail}, {"run", f.run}});
  j["notes"] = r.notes;
  j["pass"] = r.pass();
  return j;
}

inline std::string summarize(const TheoremReport& r) {
  std::string out = r.theorem + " " + r.algorithm + " [" + r.fd + ", " + r.problem + "]: " +
                    (r.pass() ? "PASS" : "FAIL") + "\n";
  out += "  checked runs: " + std::to_string(r.checked_runs) + " (truncated " + std::to_string(r.truncated_runs) +
         ", premise violations " + std::to_string(r.premise_violations) + ")\n";
  out += "  failures: " + std::to_string(r.failure_count) + "\n";
  for (const auto& f : r.failures) out += "    [" + f.clause + "] " + f.detail + "\n";
  for (const auto& n : r.notes) out += "  note: " + n + "\n";
  char elapsed[32];
  std::snprintf(elapsed, sizeof elapsed, "%.2f", r.elapsed_seconds);
  out += "  elapsed: " + std::string(elapsed) + "s\n";
  return out;
}

/// Harness options on top of the enumeration bounds.
struct CheckOptions {
  /// A run that reached max_steps without quiescing counts as a failure.
  bool require_quiescence = false;
};

/// Bounds used by the verifiers unless the caller overrides the modes.
inline EnumerationBounds harness_bounds(EnumerationBounds b) {
  b.time_mode = TimeMode::kCanonical;
  b.history_mode = HistoryMode::kReadCells;
  return b;
}

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::vector<std::string> coverage_notes(const EnumerationBounds& b) {
  std::vector<std::string> notes;
  notes.push_back("runs bounded to " + std::to_string(b.max_steps) + " steps within horizon " +
                  std::to_string(b.horizon) + "; histories limited to " + std::to_string(b.history_budget) +
                  " deviation(s) from the canonical history");
  if (b.time_mode == TimeMode::kCanonical) {
    notes.push_back("time assignments canonicalized: each step at the earliest time giving its FD output");
  }
  if (b.history_mode == HistoryMode::kReadCells) {
    notes.push_back("history deviations explored at read cells only; unread cells checked per pattern");
  }
  notes.push_back("non-quiescent runs are judged by the safety part of the problem");
  return notes;
}

struct Verdict {
  bool ok = true;
  bool truncated = false;
};

/// Full predicate on quiescent runs, safety part otherwise.
inline Verdict judge(const ProblemPredicate& p, const ProblemSeq& w, const FailurePattern& f, bool quiescent) {
  if (quiescent) return {p.holds(w, f), false};
  return {p.holds_on_prefix(w, f), true};
}

/// w·last(w): the finite prefix read as a run that stays in its final
/// configuration.
inline ProblemSeq with_tail(ProblemSeq w) {
  if (!w.empty()) w.push_back(w.back());
  return w;
}

template <class State, class Payload>
std::optional<ProblemSeq> try_interpret(const std::vector<State>& init, const std::vector<Step<State, Payload>>& schedule,
                                        const Interpretation<State>& v, std::string& error) {
  try {
    return interpret_schedule<State, Payload>(init, schedule, v);
  } catch (const Error& e) {
    error = e.what();
    return std::nullopt;
  }
}

}  // namespace detail

/// Bounded check that `alg` solves `p` with `fd` under interpretation `v`.
template <Algorithm A>
TheoremReport check_solves(const A& alg, const FDSpec& fd, const ProblemPredicate& p,
                           const Interpretation<typename A::state_type>& v, const EnumerationBounds& bounds,
                           const CheckOptions& options = {}) {
  detail::Stopwatch clock;
  TheoremReport report{"solves", alg.name(), to_string(fd), p.name, bounds_to_json(bounds, options.require_quiescence)};
  report.notes = detail::coverage_notes(bounds);
  enumerate_runs(alg, fd, bounds, [&](const RunViewOf<A>& view) {
    ++report.checked_runs;
    std::string error;
    auto w = detail::try_interpret(view.init, view.schedule, v, error);
    if (!w) {
      report.add_failure("interpretation", error, run_to_json(alg, view.to_run()));
      return;
    }
    const bool quiescent = is_quiescent(alg, fd, view);
    const auto verdict = detail::judge(p, *w, view.pattern, quiescent);
    if (verdict.truncated) ++report.truncated_runs;
    if (!verdict.ok) {
      report.add_failure("problem", p.name + " violated by " + format_sequence(*w), run_to_json(alg, view.to_run()));
    } else if (options.require_quiescence && !quiescent && view.schedule.size() == bounds.max_steps) {
      report.add_failure("quiescence", "run not quiescent after max_steps", run_to_json(alg, view.to_run()));
    }
  });
  report.elapsed_seconds = clock.seconds();
  return report;
}

/// First run within bounds whose interpreted run violates p, in enumeration
/// order. Absence proves nothing beyond the bounds.
template <Algorithm A>
std::optional<RunOf<A>> counterexample_probe(const A& alg, const FDSpec& fd, const ProblemPredicate& p,
                                             const Interpretation<typename A::state_type>& v,
                                             const EnumerationBounds& bounds) {
  std::optional<RunOf<A>> found;
  enumerate_runs(alg, fd, bounds, [&](const RunViewOf<A>& view) {
    std::string error;
    auto w = detail::try_interpret(view.init, view.schedule, v, error);
    if (!w) throw Error(ErrorCode::kUncoveredState, error);
    if (detail::judge(p, *w, view.pattern, is_quiescent(alg, fd, view)).ok) return true;
    found = view.to_run();
    return false;
  });
  return found;
}

template <Algorithm A>
struct SosOptions {
  /// Replaces the derived Ṽ; used for negative controls.
  std::optional<Interpretation<typename StallOnSuspect<A>::state_type>> tilde_override;
  bool marabout_strict_live = true;
};

/// Checks, for every enumerated run R̃ of 𝔉_SoS(alg) under M:
///  (a) R⁰ = F⁰ applied to R̃ minus faulty steps is a valid run of alg under P;
///  (b) Ṽ_i(γ_i(R̃, ℓ)) = V_i(γ_i(R⁰, ℓ)) for every process and index;
///  (c) ir(R⁰, V) ⊑ ir(R̃, Ṽ);
///  (d) p holds on ir(R̃, Ṽ) whenever it holds on ir(R⁰, V).
template <Algorithm A>
TheoremReport verify_sos(const A& alg, const Interpretation<typename A::state_type>& v, const ProblemPredicate& p,
                         const EnumerationBounds& bounds, const CheckOptions& options = {},
                         const SosOptions<A>& sos = {}) {
  using T = StallOnSuspect<A>;
  detail::Stopwatch clock;
  const T tilde_alg(alg);
  const auto tilde_v = sos.tilde_override ? *sos.tilde_override : derive_interpretation_sos(v, tilde_alg);
  const FDSpec m = FDSpec::marabout(sos.marabout_strict_live);
  TheoremReport report{"sos", alg.name(), to_string(m) + " -> P", p.name, bounds_to_json(bounds, options.require_quiescence)};
  report.notes = detail::coverage_notes(bounds);

  for (const auto& f : bound_patterns(bounds)) {
    const FailurePattern f0 = initial_crash_scenario(f);
    for (const auto& h : perturbed_histories(m, f, bounds.history_budget)) {
      if (!history_in_P(h, f0).prefix_consistent) {
        report.add_failure("a", "M history not in P(F0) for pattern " + pattern_to_json(f).dump());
        break;
      }
    }
  }

  enumerate_runs(tilde_alg, m, bounds, [&](const RunViewOf<T>& view) {
    ++report.checked_runs;
    auto fail = [&](const char* clause, const std::string& detail) {
      report.add_failure(clause, detail, run_to_json(tilde_alg, view.to_run()));
    };
    const RunOf<T> tilde = view.to_run();
    std::optional<RunOf<A>> r0;
    try {
      r0 = to_initial_crash_run(strip_faulty_steps<A>(tilde, view.pattern));
    } catch (const Error& e) {
      fail("a", e.what());
      return;
    }
    const ValidityReport validity = validate_run(*r0, FDSpec::perfect(), alg);
    if (!validity.valid()) {
      fail("a", describe(validity.violations.front()));
      return;
    }

    for (std::uint32_t i = 0; i < alg.process_count(); ++i) {
      const ProcessId pid(i);
      const auto lt = local_states<typename T::state_type, typename T::payload_type>(tilde.init, tilde.schedule, pid);
      const auto l0 = local_states<typename A::state_type, typename A::payload_type>(r0->init, r0->schedule, pid);
      const std::size_t len = std::max(lt.size(), l0.size());
      for (std::size_t l = 0; l < len; ++l) {
        const auto a = tilde_v.try_map(pid, state_after(lt, l));
        const auto b = v.try_map(pid, state_after(l0, l));
        if (!a || !b || *a != *b) {
          fail("b", "p" + std::to_string(i) + " index " + std::to_string(l) + ": " + a.value_or("?") +
                        " vs " + b.value_or("?"));
          return;
        }
      }
    }

    std::string error;
    const auto w_tilde = detail::try_interpret(tilde.init, tilde.schedule, tilde_v, error);
    const auto w0 = w_tilde ? detail::try_interpret(r0->init, r0->schedule, v, error) : std::nullopt;
    if (!w_tilde || !w0) {
      fail("c", error);
      return;
    }
    if (!is_stutter(detail::with_tail(*w0), detail::with_tail(*w_tilde))) {
      fail("c", format_sequence(*w0) + " not stuttered by " + format_sequence(*w_tilde));
      return;
    }

    const bool quiescent = is_quiescent(tilde_alg, m, view);
    const auto transformed = detail::judge(p, *w_tilde, tilde.pattern, quiescent);
    if (transformed.truncated) ++report.truncated_runs;
    if (!transformed.ok) {
      if (detail::judge(p, *w0, r0->pattern, quiescent).ok) {
        fail("d", p.name + " violated by " + format_sequence(*w_tilde));
      } else {
        ++report.premise_violations;
      }
    } else if (options.require_quiescence && !quiescent && view.schedule.size() == bounds.max_steps) {
      fail("d", "run not quiescent after max_steps");
    }
  });
  if (report.premise_violations > 0) {
    report.notes.push_back("base runs violating the problem were found; the transformed runs mirror them");
  }
  report.elapsed_seconds = clock.seconds();
  return report;
}

struct DasOptions {
  /// Negative control: map runs without moving crashes and times earlier.
  bool skip_time_shift = false;
};

/// Checks, for every enumerated run R̃ of 𝔉_DaS(alg) under P_{k+1}, with R
/// its das_run_mapping:
///  (a) R is a valid run of alg under P_k (history aside);
///  (b) H ∈ P_k(F);
///  (c) ir(R, Ṽ) ⊑ ir(R̃, Ṽ);
///  (d) p holds on ir(R̃, Ṽ) for F̃ whenever it holds on ir(R, Ṽ) for F.
template <Algorithm A>
TheoremReport verify_das(const A& alg, const Interpretation<typename A::state_type>& v, const ProblemPredicate& p,
                         Time k, const EnumerationBounds& bounds, const CheckOptions& options = {},
                         const DasOptions& das = {}) {
  using T = DelayAStep<A>;
  detail::Stopwatch clock;
  if (k + 1 > bounds.horizon) throw Error(ErrorCode::kKOutOfRange, "k+1 exceeds horizon");
  const T tilde_alg(alg);
  const auto tilde_v = derive_interpretation_das(v, tilde_alg);
  const FDSpec source = FDSpec::pk(k + 1);
  const FDSpec target = FDSpec::pk(k);
  TheoremReport report{"das", alg.name(), to_string(source) + " -> " + to_string(target), p.name,
                       bounds_to_json(bounds, options.require_quiescence)};
  report.bounds["k"] = k;
  report.notes = detail::coverage_notes(bounds);
  if (das.skip_time_shift) report.notes.push_back("negative control: time shift skipped");

  auto map_history = [&](const History& h) { return das.skip_time_shift ? h : shift_history(h); };
  auto map_pattern = [&](const FailurePattern& f) { return das.skip_time_shift ? f : shift_pattern(f); };
  auto needs_complete = [&](const FailurePattern& f, const History& h) {
    if (!history_in(source, h, f).horizon_complete) return false;
    for (std::uint32_t i = 0; i < f.process_count(); ++i) {
      const auto c = f.crash_time(ProcessId(i));
      if (c && *c + 2 > f.horizon()) return false;
    }
    return true;
  };

  for (const auto& f : bound_patterns(bounds)) {
    for (const auto& h : perturbed_histories(source, f, bounds.history_budget)) {
      const auto verdict = history_in(target, map_history(h), map_pattern(f));
      if (!verdict.prefix_consistent || (needs_complete(f, h) && !verdict.horizon_complete)) {
        report.add_failure("b", "shifted history not in " + to_string(target) + "(F) for pattern " +
                                    pattern_to_json(f).dump() + ", history " + history_to_json(h).dump());
        break;
      }
    }
  }

  enumerate_runs(tilde_alg, source, bounds, [&](const RunViewOf<T>& view) {
    ++report.checked_runs;
    auto fail = [&](const char* clause, const std::string& detail) {
      report.add_failure(clause, detail, run_to_json(tilde_alg, view.to_run()));
    };
    const RunOf<T> tilde = view.to_run();
    std::optional<RunOf<A>> r;
    try {
      r = das_run_mapping<A>(tilde, {das.skip_time_shift});
    } catch (const Error& e) {
      fail("a", e.what());
      return;
    }
    const ValidityReport validity = validate_run(*r, target, alg);
    for (const auto& violation : validity.violations) {
      if (violation.kind != ViolationKind::kHistoryMembership) {
        fail("a", describe(violation));
        return;
      }
    }
    const auto membership = history_in(target, r->history, r->pattern);
    if (!membership.prefix_consistent ||
        (needs_complete(tilde.pattern, tilde.history) && !membership.horizon_complete)) {
      const auto& first = membership.violations.front();
      fail("b", first.condition + ": p" + std::to_string(first.subject.value) + " at p" +
                    std::to_string(first.observer.value) + ", t=" + std::to_string(first.time));
      return;
    }

    std::string error;
    const auto w_tilde = detail::try_interpret(tilde.init, tilde.schedule, tilde_v, error);
    const auto w = w_tilde ? detail::try_interpret(r->init, r->schedule, v, error) : std::nullopt;
    if (!w_tilde || !w) {
      fail("c", error);
      return;
    }
    if (!is_stutter(detail::with_tail(*w), detail::with_tail(*w_tilde))) {
      fail("c", format_sequence(*w) + " not stuttered by " + format_sequence(*w_tilde));
      return;
    }

    const bool quiescent = is_quiescent(tilde_alg, source, view);
    const auto transformed = detail::judge(p, *w_tilde, tilde.pattern, quiescent);
    if (transformed.truncated) ++report.truncated_runs;
    if (!transformed.ok) {
      if (detail::judge(p, *w, r->pattern, quiescent).ok) {
        fail("d", p.name + " violated by " + format_sequence(*w_tilde));
      } else {
        ++report.premise_violations;
      }
    } else if (options.require_quiescence && !quiescent && view.schedule.size() == bounds.max_steps) {
      fail("d", "run not quiescent after max_steps");
    }
  });
  if (report.premise_violations > 0) {
    report.notes.push_back("base runs violating the problem were found; the transformed runs mirror them");
  }
  report.elapsed_seconds = clock.seconds();
  return report;
}

}  // namespace fdlab
