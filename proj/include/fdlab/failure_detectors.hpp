#pragma once

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fdlab/basics.hpp"
#include "fdlab/pattern.hpp"

namespace fdlab {

/// One of the failure detector classes P, M (Marabout) and P_k.
struct FDSpec {
  enum class Kind { kPerfect, kMarabout, kPk };

  Kind kind = Kind::kPerfect;
  Time k = 0;
  /// M constrains the output of every live process (true) or only of
  /// correct processes (false).
  bool marabout_strict_live = true;

  static FDSpec perfect() { return {Kind::kPerfect, 0, true}; }
  static FDSpec marabout(bool strict_live = true) { return {Kind::kMarabout, 0, strict_live}; }
  static FDSpec pk(Time k) { return {Kind::kPk, k, true}; }

  bool operator==(const FDSpec&) const = default;
};

/// "P", "M" or "Pk:<k>".
inline std::string to_string(const FDSpec& spec) {
  switch (spec.kind) {
    case FDSpec::Kind::kPerfect: return "P";
    case FDSpec::Kind::kMarabout: return "M";
    case FDSpec::Kind::kPk: return "Pk:" + std::to_string(spec.k);
  }
  return "?";
}

inline FDSpec parse_fd_spec(std::string_view text) {
  if (text == "P") return FDSpec::perfect();
  if (text == "M") return FDSpec::marabout();
  if (text.starts_with("Pk:")) {
    auto digits = text.substr(3);
    Time k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) return FDSpec::pk(k);
  }
  throw Error(ErrorCode::kParse, "unknown failure detector '" + std::string(text) + "' (expected P, M or Pk:<k>)");
}

struct MembershipViolation {
  std::string condition;
  ProcessId observer;
  ProcessId subject;
  Time time = 0;

  bool operator==(const MembershipViolation&) const = default;
};

/// Finite-horizon membership of H in D(F). `prefix_consistent` covers the
/// safety clauses (the prefix extends to a member of D(F)); `horizon_complete`
/// additionally requires eventual clauses to be discharged: the required
/// suspicion holds at the horizon.
struct MembershipVerdict {
  bool prefix_consistent = true;
  bool horizon_complete = true;
  std::vector<MembershipViolation> violations;
};

namespace detail {

inline void check_domain(const History& h, const FailurePattern& f) {
  if (h.process_count() != f.process_count() || h.horizon() != f.horizon()) {
    throw Error(ErrorCode::kDomainMismatch, "history and failure pattern cover different Π or horizons");
  }
}

inline ProcessId pid(std::size_t i) { return ProcessId(static_cast<std::uint32_t>(i)); }

inline void add_safety(MembershipVerdict& v, std::string condition, std::size_t i, std::size_t j, Time t) {
  v.prefix_consistent = false;
  v.horizon_complete = false;
  v.violations.push_back({std::move(condition), pid(i), pid(j), t});
}

inline void add_eventual(MembershipVerdict& v, std::string condition, std::size_t i, std::size_t j, Time t) {
  v.horizon_complete = false;
  v.violations.push_back({std::move(condition), pid(i), pid(j), t});
}

}  // namespace detail

/// Strong accuracy on every prefix; strong completeness by the horizon.
inline MembershipVerdict history_in_P(const History& h, const FailurePattern& f) {
  detail::check_domain(h, f);
  MembershipVerdict v;
  const std::size_t n = f.process_count();
  for (Time t = 0; t <= f.horizon(); ++t) {
    const ProcessSet live = f.live(t);
    for (ProcessId i : live.members()) {
      const ProcessSet bad = h.at(i, t) & live;
      for (ProcessId j : bad.members()) detail::add_safety(v, "strong accuracy", i.value, j.value, t);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!f.correct().contains(detail::pid(i))) continue;
    const ProcessSet missing = f.faulty() - h.at(detail::pid(i), f.horizon());
    for (ProcessId j : missing.members()) detail::add_eventual(v, "strong completeness", i, j.value, f.horizon());
  }
  return v;
}

/// H(p_i, t) = faulty(F) for every live p_i (or every correct p_i when
/// strict_live is false). Outputs at crashed processes are unconstrained.
inline MembershipVerdict history_in_M(const History& h, const FailurePattern& f, bool strict_live = true) {
  detail::check_domain(h, f);
  MembershipVerdict v;
  const ProcessSet faulty = f.faulty();
  for (Time t = 0; t <= f.horizon(); ++t) {
    const ProcessSet observers = strict_live ? f.live(t) : f.correct();
    for (ProcessId i : observers.members()) {
      if (h.at(i, t) == faulty) continue;
      const ProcessSet diff = (h.at(i, t) - faulty) | (faulty - h.at(i, t));
      for (ProcessId j : diff.members()) detail::add_safety(v, "marabout output", i.value, j.value, t);
    }
  }
  return v;
}

/// k-Accuracy pointwise; k-Completeness by the horizon. Processes in F(k)
/// are unconstrained, as are the outputs of crashed observers.
inline MembershipVerdict history_in_Pk(const History& h, const FailurePattern& f, Time k) {
  detail::check_domain(h, f);
  if (k > f.horizon()) throw Error(ErrorCode::kKOutOfRange, "k=" + std::to_string(k) + " exceeds horizon");
  MembershipVerdict v;
  const ProcessSet live_at_k = f.live(k);
  for (Time t = 0; t <= f.horizon(); ++t) {
    const ProcessSet protected_now = live_at_k - f.crashed(t);
    for (ProcessId i : f.live(t).members()) {
      const ProcessSet bad = h.at(i, t) & protected_now;
      for (ProcessId j : bad.members()) detail::add_safety(v, "k-accuracy", i.value, j.value, t);
    }
  }
  const ProcessSet must_detect = live_at_k & f.faulty();
  for (ProcessId i : f.correct().members()) {
    const ProcessSet missing = must_detect - h.at(i, f.horizon());
    for (ProcessId j : missing.members()) detail::add_eventual(v, "k-completeness", i.value, j.value, f.horizon());
  }
  return v;
}

inline MembershipVerdict history_in(const FDSpec& spec, const History& h, const FailurePattern& f) {
  switch (spec.kind) {
    case FDSpec::Kind::kPerfect: return history_in_P(h, f);
    case FDSpec::Kind::kMarabout: return history_in_M(h, f, spec.marabout_strict_live);
    case FDSpec::Kind::kPk: return history_in_Pk(h, f, spec.k);
  }
  return {};
}

/// Per-cell prefix-consistency constraint: an admissible output d at
/// (observer, t) contains every process of `required` and none of `forbidden`.
struct CellConstraint {
  ProcessSet required;
  ProcessSet forbidden;

  bool admits(ProcessSet d) const { return required.subset_of(d) && (d & forbidden).empty(); }
};

inline CellConstraint cell_constraint(const FDSpec& spec, const FailurePattern& f, ProcessId observer, Time t) {
  const bool live = f.is_live(observer, t);
  switch (spec.kind) {
    case FDSpec::Kind::kPerfect:
      if (!live) return {};
      return {ProcessSet{}, f.live(t)};
    case FDSpec::Kind::kMarabout: {
      const bool constrained = spec.marabout_strict_live ? live : f.correct().contains(observer);
      if (!constrained) return {};
      return {f.faulty(), f.correct()};
    }
    case FDSpec::Kind::kPk:
      if (!live) return {};
      return {ProcessSet{}, f.live(spec.k) - f.crashed(t)};
  }
  return {};
}

/// Output of the canonical history at one cell.
inline ProcessSet canonical_output(const FDSpec& spec, const FailurePattern& f, Time t) {
  switch (spec.kind) {
    case FDSpec::Kind::kPerfect: return f.crashed(t);
    case FDSpec::Kind::kMarabout: return f.faulty();
    case FDSpec::Kind::kPk: return f.crashed(t) | f.crashed(spec.k);
  }
  return {};
}

/// One witness of D(F): P → F(t); M → faulty(F); P_k → F(t) ∪ F(k).
inline History canonical_history(const FDSpec& spec, const FailurePattern& f) {
  if (spec.kind == FDSpec::Kind::kPk && spec.k > f.horizon()) {
    throw Error(ErrorCode::kKOutOfRange, "k=" + std::to_string(spec.k) + " exceeds horizon");
  }
  History h(f.process_count(), f.horizon());
  for (Time t = 0; t <= f.horizon(); ++t) {
    const ProcessSet out = canonical_output(spec, f, t);
    for (std::size_t i = 0; i < f.process_count(); ++i) h.set(detail::pid(i), t, out);
  }
  return h;
}

/// Admissible alternatives to the canonical output at one cell, ascending by
/// bitmask. The canonical value itself is excluded.
inline std::vector<ProcessSet> cell_deviations(const FDSpec& spec, const FailurePattern& f, ProcessId observer,
                                               Time t) {
  const CellConstraint c = cell_constraint(spec, f, observer, t);
  const ProcessSet canonical = canonical_output(spec, f, t);
  std::vector<ProcessSet> out;
  const std::uint32_t limit = ProcessSet::all(f.process_count()).bits();
  for (std::uint32_t bits = 0;; ++bits) {
    const ProcessSet d(bits);
    if (d != canonical && c.admits(d)) out.push_back(d);
    if (bits == limit) break;
  }
  return out;
}

/// Canonical history plus every history that differs from it in at most
/// `budget` cells, each changed cell holding an admissible output. Every
/// result is prefix consistent. Canonical first, the rest in ascending order.
inline std::vector<History> perturbed_histories(const FDSpec& spec, const FailurePattern& f, std::size_t budget) {
  const History canonical = canonical_history(spec, f);
  struct Cell {
    ProcessId p;
    Time t;
    std::vector<ProcessSet> values;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < f.process_count(); ++i) {
    for (Time t = 0; t <= f.horizon(); ++t) {
      auto values = cell_deviations(spec, f, detail::pid(i), t);
      if (!values.empty()) cells.push_back({detail::pid(i), t, std::move(values)});
    }
  }
  std::set<History> found;
  History current = canonical;
  auto recurse = [&](auto&& self, std::size_t from, std::size_t left) -> void {
    found.insert(current);
    if (left == 0) return;
    for (std::size_t c = from; c < cells.size(); ++c) {
      const ProcessSet saved = current.at(cells[c].p, cells[c].t);
      for (ProcessSet value : cells[c].values) {
        current.set(cells[c].p, cells[c].t, value);
        self(self, c + 1, left - 1);
      }
      current.set(cells[c].p, cells[c].t, saved);
    }
  };
  recurse(recurse, 0, budget);
  found.erase(canonical);
  std::vector<History> out{canonical};
  out.insert(out.end(), found.begin(), found.end());
  return out;
}

/// F⁰: every faulty process of F is crashed from time 0.
inline FailurePattern initial_crash_scenario(const FailurePattern& f) {
  return FailurePattern(f.process_count(), std::vector<ProcessSet>(f.sets().size(), f.faulty()));
}

/// Each crash moves one time unit earlier: result(t) = F(t+1), clamped at
/// the horizon.
inline FailurePattern shift_pattern(const FailurePattern& f) {
  std::vector<ProcessSet> sets(f.sets().size());
  for (Time t = 0; t <= f.horizon(); ++t) sets[t] = f.crashed(std::min<Time>(t + 1, f.horizon()));
  return FailurePattern(f.process_count(), std::move(sets));
}

/// H(p, t) = H̃(p, t+1), clamped at the horizon.
inline History shift_history(const History& h) {
  History out(h.process_count(), h.horizon());
  for (std::size_t i = 0; i < h.process_count(); ++i) {
    for (Time t = 0; t <= h.horizon(); ++t) {
      out.set(detail::pid(i), t, h.at(detail::pid(i), std::min<Time>(t + 1, h.horizon())));
    }
  }
  return out;
}

}  // namespace fdlab
