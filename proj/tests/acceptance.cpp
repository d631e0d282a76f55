// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "fdlab/fdlab.hpp"
#include "support.hpp"

using namespace fdlab;
using fdlab::testing::Ping;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

EnumerationBounds bounds(std::size_t n, Time horizon, std::size_t max_steps, std::size_t budget) {
  EnumerationBounds b;
  b.n = n;
  b.horizon = horizon;
  b.max_steps = max_steps;
  b.history_budget = budget;
  return harness_bounds(b);
}

std::string counts(const TheoremReport& r) {
  return std::to_string(r.checked_runs) + " runs, " + std::to_string(r.failure_count) + " failures";
}

// 1. SoS theorem for flood-consensus-p.
Outcome sos_theorem() {
  FloodConsensus alg(3);
  const auto r = verify_sos(alg, consensus_interpretation(alg), consensus_problem(), bounds(3, 6, 6, 1));
  Outcome out{r.pass() && r.checked_runs > 0, counts(r)};
  if (!r.pass()) out.detail += "; first: [" + r.failures.front().clause + "] " + r.failures.front().detail;
  return out;
}

// 2. DaS theorem for both built-ins at k = 0, 1.
Outcome das_theorem() {
  Outcome out;
  for (Time k : {0U, 1U}) {
    FloodConsensus flood(2);
    StrongConsensusM strong(2);
    const auto a = verify_das(flood, consensus_interpretation(flood), consensus_problem(), k, bounds(2, 5, 6, 1));
    const auto b =
        verify_das(strong, consensus_interpretation(strong), strong_consensus_problem(), k, bounds(2, 5, 6, 1));
    for (const auto* r : {&a, &b}) {
      out.pass = out.pass && r->pass() && r->checked_runs > 0;
      out.detail += r->algorithm + " k=" + std::to_string(k) + ": " + counts(*r) + "; ";
    }
  }
  return out;
}

// 3. Negative controls.
Outcome negative_controls() {
  FloodConsensus alg(2);
  const auto v = consensus_interpretation(alg);
  SosOptions<FloodConsensus> sabotage;
  sabotage.tilde_override = Interpretation<StallOnSuspect<FloodConsensus>::state_type>(
      [&v](ProcessId p, const StallOnSuspect<FloodConsensus>::state_type& s) -> std::optional<ProblemState> {
        if (s.stalled) return consensus_state(0, 0);
        return v.try_map(p, s.base);
      });
  const auto sos = verify_sos(alg, v, consensus_problem(), bounds(2, 4, 4, 0), {}, sabotage);
  std::size_t sos_b = 0;
  for (const auto& f : sos.failures) sos_b += f.clause == "b";

  DasOptions skip;
  skip.skip_time_shift = true;
  const auto das = verify_das(alg, v, consensus_problem(), 1, bounds(2, 5, 6, 1), {}, skip);
  std::size_t das_b = 0;
  for (const auto& f : das.failures) das_b += f.clause == "b";

  return {sos_b >= 1 && das_b >= 1, "sabotaged V: " + std::to_string(sos_b) + " clause-b failures listed (" +
                                        std::to_string(sos.failure_count) + " total); no time shift: " +
                                        std::to_string(das_b) + " clause-b failures listed (" +
                                        std::to_string(das.failure_count) + " total)"};
}

// 4. Stutter DP against the closure of 1-stutters.
std::vector<ProblemSeq> all_sequences(const std::vector<ProblemConfig>& configs, std::size_t max_len) {
  std::vector<ProblemSeq> out{{}};
  std::vector<ProblemSeq> layer{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<ProblemSeq> next;
    for (const auto& w : layer) {
      for (const auto& c : configs) {
        next.push_back(w);
        next.back().push_back(c);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

/// Every sequence reachable from w by chains of 1-stutters, up to max_len.
std::set<ProblemSeq> stutter_closure(const ProblemSeq& w, std::size_t max_len) {
  std::set<ProblemSeq> seen{w};
  std::vector<ProblemSeq> frontier{w};
  while (!frontier.empty()) {
    const ProblemSeq cur = frontier.back();
    frontier.pop_back();
    if (cur.size() >= max_len) continue;
    for (std::size_t gap = 0; gap + 1 < cur.size(); ++gap) {
      // configurations mixing cur[gap] and cur[gap+1] componentwise
      std::vector<ProblemConfig> mids{ProblemConfig{}};
      for (std::size_t i = 0; i < cur[gap].size(); ++i) {
        std::vector<ProblemConfig> next;
        for (const auto& m : mids) {
          for (const auto& s : {cur[gap][i], cur[gap + 1][i]}) {
            next.push_back(m);
            next.back().push_back(s);
          }
        }
        mids = std::move(next);
      }
      for (const auto& mid : mids) {
        ProblemSeq grown = cur;
        grown.insert(grown.begin() + static_cast<std::ptrdiff_t>(gap) + 1, mid);
        if (seen.insert(grown).second) frontier.push_back(grown);
      }
    }
  }
  return seen;
}

Outcome stutter_oracle() {
  std::size_t pairs = 0;
  std::size_t mismatches = 0;
  std::string first;
  const std::vector<std::pair<std::size_t, std::size_t>> cases{{1, 3}, {2, 2}, {2, 3}};
  for (const auto& [n, sigma] : cases) {
    std::vector<ProblemState> states;
    for (std::size_t s = 0; s < sigma; ++s) states.push_back(std::string(1, static_cast<char>('a' + s)));
    std::vector<ProblemConfig> configs{ProblemConfig{}};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<ProblemConfig> next;
      for (const auto& c : configs) {
        for (const auto& s : states) {
          next.push_back(c);
          next.back().push_back(s);
        }
      }
      configs = std::move(next);
    }
    const auto ws = all_sequences(configs, 3);
    const auto w2s = all_sequences(configs, 5);
    for (const auto& w : ws) {
      const auto closure = stutter_closure(w, 5);
      for (const auto& w2 : w2s) {
        ++pairs;
        if (is_stutter(w, w2) != (closure.count(w2) > 0)) {
          if (mismatches++ == 0) first = format_sequence(w) + " vs " + format_sequence(w2);
        }
      }
    }
  }
  Outcome out{mismatches == 0, std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " disagreements"};
  if (mismatches > 0) out.detail += "; first: " + first;
  return out;
}

// 5. Problem well-formedness.
Outcome problem_checks() {
  const ProblemCheckBounds b{2, 3, 4};
  Outcome out;
  for (const auto& p : {consensus_problem(), strong_consensus_problem()}) {
    const auto cti = check_crash_time_independence(p, b);
    const auto fs = check_finite_stuttering(p, b);
    out.pass = out.pass && cti.holds && fs.holds;
    out.detail += p.name + ": " + std::to_string(cti.checked) + "+" + std::to_string(fs.checked) + " checks " +
                  (cti.holds && fs.holds ? "ok" : "REJECTED") + "; ";
  }
  ProblemPredicate time_dependent{"early-crash", consensus_alphabet(),
                                  [](const ProblemSeq&, const FailurePattern& f) { return f.crashed(1).empty(); }, {}};
  ProblemPredicate length_sensitive{"even-length", consensus_alphabet(),
                                    [](const ProblemSeq& w, const FailurePattern&) { return w.size() % 2 == 0; }, {}};
  const auto bad1 = check_crash_time_independence(time_dependent, b);
  const auto bad2 = check_finite_stuttering(length_sensitive, b);
  const bool rejected = !bad1.holds && bad1.counterexample && !bad2.holds && bad2.counterexample;
  out.pass = out.pass && rejected;
  if (bad1.counterexample) {
    out.detail += "time-dependent rejected: " + pattern_to_json(bad1.counterexample->f).dump() + " vs " +
                  pattern_to_json(bad1.counterexample->f2).dump() + "; ";
  }
  if (bad2.counterexample) {
    out.detail += "length-sensitive rejected: " + format_sequence(bad2.counterexample->w) + " vs " +
                  format_sequence(bad2.counterexample->w2);
  }
  return out;
}

// 6. FD lattice.
std::vector<History> arbitrary_perturbations(const History& base, std::size_t budget) {
  const std::size_t n = base.process_count();
  std::vector<std::pair<ProcessId, Time>> cells;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (Time t = 0; t <= base.horizon(); ++t) cells.emplace_back(ProcessId(i), t);
  }
  std::set<History> out;
  History cur = base;
  auto rec = [&](auto&& self, std::size_t from, std::size_t left) -> void {
    out.insert(cur);
    if (left == 0) return;
    for (std::size_t c = from; c < cells.size(); ++c) {
      const ProcessSet saved = cur.at(cells[c].first, cells[c].second);
      for (std::uint32_t bits = 0; bits <= ProcessSet::all(n).bits(); ++bits) {
        if (ProcessSet(bits) == saved) continue;
        cur.set(cells[c].first, cells[c].second, ProcessSet(bits));
        self(self, c + 1, left - 1);
      }
      cur.set(cells[c].first, cells[c].second, saved);
    }
  };
  rec(rec, 0, budget);
  return {out.begin(), out.end()};
}

bool member(const MembershipVerdict& v) { return v.prefix_consistent && v.horizon_complete; }

Outcome fd_lattice() {
  const std::size_t n = 2;
  const Time horizon = 3;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first;
  for (const auto& f : all_failure_patterns(n, horizon)) {
    std::set<History> histories;
    std::vector<FDSpec> bases{FDSpec::perfect(), FDSpec::marabout()};
    for (Time k = 0; k <= horizon; ++k) bases.push_back(FDSpec::pk(k));
    for (const auto& spec : bases) {
      for (auto& h : arbitrary_perturbations(canonical_history(spec, f), 2)) histories.insert(std::move(h));
    }
    for (const auto& h : histories) {
      ++checked;
      const bool in_p = member(history_in_P(h, f));
      for (Time k = 0; k <= horizon; ++k) {
        const bool in_k = member(history_in_Pk(h, f, k));
        bool bad = in_p && !in_k;
        if (k < horizon) bad = bad || (in_k && !member(history_in_Pk(h, f, k + 1)));
        if (bad && violations++ == 0) {
          first = "pattern " + pattern_to_json(f).dump() + " history " + history_to_json(h).dump() + " k=" +
                  std::to_string(k);
        }
      }
    }
    const FailurePattern f0 = initial_crash_scenario(f);
    ++checked;
    if (!member(history_in_P(canonical_history(FDSpec::marabout(), f0), f0)) && violations++ == 0) {
      first = "canonical M history rejected by P for F0 of " + pattern_to_json(f).dump();
    }
  }
  Outcome out{violations == 0, std::to_string(checked) + " (pattern, history) pairs, " + std::to_string(violations) +
                                   " lattice violations"};
  if (violations > 0) out.detail += "; first: " + first;
  return out;
}

// 7. Solvability probes at n = 3.
Outcome solvability() {
  const auto b = bounds(3, 5, 5, 1);
  StrongConsensusM strong(3);
  FloodConsensus flood(3);
  const auto s = check_solves(strong, FDSpec::marabout(), strong_consensus_problem(), consensus_interpretation(strong), b);
  const auto f = check_solves(flood, FDSpec::perfect(), consensus_problem(), consensus_interpretation(flood), b);
  const auto cex =
      counterexample_probe(flood, FDSpec::perfect(), strong_consensus_problem(), consensus_interpretation(flood), b);
  bool revalidates = false;
  if (cex) {
    const Json trace = Json::parse(run_to_json(flood, *cex).dump());
    const auto reparsed = run_from_json(flood, trace);
    revalidates = reparsed == *cex && validate_run(reparsed, FDSpec::perfect(), flood).valid();
  }
  Outcome out{s.pass() && f.pass() && cex && revalidates,
              "strong-consensus-m/M: " + counts(s) + "; flood-consensus-p/P: " + counts(f) + "; probe: " +
                  (cex ? "counterexample with " + std::to_string(cex->schedule.size()) + " steps" +
                             (revalidates ? ", trace re-validates" : ", trace does NOT re-validate")
                       : std::string("none found"))};
  return out;
}

// 8. Enumerator against brute force, and determinism.
template <Algorithm A>
std::set<std::string> serialized(const A& alg, const std::vector<RunOf<A>>& runs) {
  std::set<std::string> out;
  for (const auto& r : runs) out.insert(run_to_json(alg, r).dump());
  return out;
}

Outcome enumerator_oracle() {
  std::size_t compared = 0;
  std::size_t mismatched_spaces = 0;
  std::string first;
  for (std::size_t n : {1U, 2U}) {
    Ping alg(n);
    const Time horizon = 2;
    for (const auto& spec : {FDSpec::perfect(), FDSpec::marabout(), FDSpec::pk(1)}) {
      for (std::size_t budget : {0U, 1U}) {
        for (std::size_t max_steps = 0; max_steps <= 3; ++max_steps) {
          for (const auto& f : all_failure_patterns(n, horizon)) {
            EnumerationBounds b;
            b.n = n;
            b.horizon = horizon;
            b.max_steps = max_steps;
            b.history_budget = budget;
            b.patterns = {f};
            const auto yielded = collect_runs(alg, spec, b);
            std::vector<RunOf<Ping>> oracle;
            for (const auto& h : perturbed_histories(spec, f, budget)) {
              auto part = fdlab::testing::brute_force_runs(alg, spec, f, h, {std::vector<int>(n, 0)}, {0, 1}, max_steps);
              oracle.insert(oracle.end(), part.begin(), part.end());
            }
            ++compared;
            const auto ys = serialized(alg, yielded);
            const auto os = serialized(alg, oracle);
            if (ys != os || ys.size() != yielded.size()) {
              if (mismatched_spaces++ == 0) {
                first = "n=" + std::to_string(n) + " " + to_string(spec) + " budget " + std::to_string(budget) +
                        " max_steps " + std::to_string(max_steps) + ": " + std::to_string(yielded.size()) +
                        " yielded vs " + std::to_string(os.size()) + " accepted";
              }
            }
          }
        }
      }
    }
  }
  // Byte determinism: two independent enumerations and reports.
  FloodConsensus flood(2);
  auto dump_all = [&] {
    std::string out;
    EnumerationBounds b = bounds(2, 3, 4, 1);
    enumerate_runs(flood, FDSpec::perfect(), b,
                   [&](const RunViewOf<FloodConsensus>& v) { out += run_to_json(flood, v.to_run()).dump() + "\n"; });
    out += report_to_json(verify_sos(flood, consensus_interpretation(flood), consensus_problem(), b)).dump();
    return out;
  };
  const std::string first_pass = dump_all();
  const bool deterministic = first_pass == dump_all();
  Outcome out{mismatched_spaces == 0 && deterministic,
              std::to_string(compared) + " run spaces compared, " + std::to_string(mismatched_spaces) +
                  " mismatched; byte-identical repeat: " + (deterministic ? "yes" : "no") + " (" +
                  std::to_string(first_pass.size()) + " bytes)"};
  if (mismatched_spaces > 0) out.detail += "; first: " + first;
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 SoS theorem (flood-consensus-p, n=3, horizon 6, max-steps 6, budget 1)", sos_theorem},
      {"AC2 DaS theorem (both built-ins, k=0,1, n=2, horizon 5)", das_theorem},
      {"AC3 negative controls", negative_controls},
      {"AC4 stutter DP vs 1-stutter chain oracle", stutter_oracle},
      {"AC5 problem well-formedness", problem_checks},
      {"AC6 FD lattice P <= P_k <= P_k+1, M(F0) in P", fd_lattice},
      {"AC7 solvability probes at n=3", solvability},
      {"AC8 enumerator/validator equivalence and determinism", enumerator_oracle},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char elapsed[32];
    std::snprintf(elapsed, sizeof elapsed, "%.1fs", secs);
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " -- " << o.detail << " [" << elapsed << "]" << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
