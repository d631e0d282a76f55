// fdlab command-line front end: validate, transform, verify, probe, problem.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdlab/fdlab.hpp"

namespace {

using namespace fdlab;

constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct BoundsFlags {
  std::size_t n = 2;
  Time horizon = 5;
  std::size_t max_steps = 6;
  std::size_t history_budget = 1;
  bool require_quiescence = false;
  std::optional<Time> fairness_window;
  bool marabout_strict_live = true;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n", n, "process count")->capture_default_str();
    cmd->add_option("--horizon", horizon, "last time point T_max")->capture_default_str();
    cmd->add_option("--max-steps", max_steps, "schedule length cap")->capture_default_str();
    cmd->add_option("--history-budget", history_budget, "FD output deviations from the canonical history")
        ->capture_default_str();
    cmd->add_flag("--require-quiescence", require_quiescence, "runs cut off at max-steps count as failures");
    cmd->add_option("--fairness-window", fairness_window, "enumerate strictly fair runs with this window");
    cmd->add_option("--marabout-strict-live", marabout_strict_live, "M constrains every live process (default true)")
        ->capture_default_str();
  }

  EnumerationBounds bounds() const {
    EnumerationBounds b;
    b.n = n;
    b.horizon = horizon;
    b.max_steps = max_steps;
    b.history_budget = history_budget;
    if (fairness_window) {
      b.mode = PrefixMode::kStrictFairness;
      b.fairness_window = fairness_window;
    }
    return harness_bounds(b);
  }
};

/// Calls f(alg, interpretation) for a built-in algorithm.
template <class F>
auto with_builtin(const std::string& name, std::size_t n, F&& f) {
  if (name == "flood-consensus-p") {
    FloodConsensus alg(n);
    return f(alg, consensus_interpretation(alg));
  }
  if (name == "strong-consensus-m") {
    StrongConsensusM alg(n);
    return f(alg, consensus_interpretation(alg));
  }
  throw Error(ErrorCode::kUnknownName, "unknown algorithm '" + name + "' (flood-consensus-p, strong-consensus-m)");
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + out_path);
  out << j.dump(2) << "\n";
}

// --- validate ---------------------------------------------------------------

struct ValidateArgs {
  std::string trace;
  std::string alg;
  std::string fd = "P";
  std::string mode = "prefix";
  std::string transform;
  std::optional<Time> fairness_window;
  bool marabout_strict_live = true;
  bool json = false;
};

template <Algorithm A>
int validate_with(const A& alg, const Json& doc, const ValidateArgs& args) {
  const RunOf<A> run = run_from_json(alg, doc);
  FDSpec spec = parse_fd_spec(args.fd);
  if (spec.kind == FDSpec::Kind::kMarabout) spec.marabout_strict_live = args.marabout_strict_live;
  ValidityOptions options;
  options.mode = args.mode == "strict" ? PrefixMode::kStrictFairness : PrefixMode::kPrefixConsistent;
  options.fairness_window = args.fairness_window;
  const ValidityReport report = validate_run(run, spec, alg, options);
  if (args.json) {
    Json j;
    j["valid"] = report.valid();
    j["violations"] = Json::array();
    for (const auto& v : report.violations) {
      j["violations"].push_back({{"kind", to_string(v.kind)},
                                 {"index", v.index ? Json(*v.index) : Json(nullptr)},
                                 {"detail", v.detail}});
    }
    std::cout << j.dump(2) << "\n";
  } else if (report.valid()) {
    std::cout << "valid run of " << alg.name() << " under " << to_string(spec) << " (" << run.schedule.size()
              << " steps)\n";
  } else {
    std::cout << "invalid run of " << alg.name() << " under " << to_string(spec) << "\n";
    for (const auto& v : report.violations) std::cout << "  " << describe(v) << "\n";
  }
  return report.valid() ? 0 : 1;
}

int cmd_validate(const ValidateArgs& args) {
  Json doc;
  std::size_t n = 0;
  try {
    doc = read_json(args.trace);
    n = doc.at("n").get<std::size_t>();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << args.trace << ": " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return with_builtin(args.alg, n, [&](const auto& alg, const auto&) {
      if (args.transform == "sos") return validate_with(stall_on_suspect(alg), doc, args);
      if (args.transform == "das") return validate_with(delay_a_step(alg), doc, args);
      if (!args.transform.empty()) throw Error(ErrorCode::kUnknownName, "unknown transformation '" + args.transform + "'");
      return validate_with(alg, doc, args);
    });
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// --- transform --------------------------------------------------------------

int cmd_transform(const std::string& alg_name, const std::vector<std::string>& which, std::size_t n,
                  const std::string& out) {
  TableAlgorithm table = with_builtin(alg_name, n, [](const auto& alg, const auto&) { return tabulate(alg); });
  for (const auto& w : which) {
    if (w == "sos") {
      table = tabulate(stall_on_suspect(table));
    } else if (w == "das") {
      table = tabulate(delay_a_step(table));
    } else {
      throw Error(ErrorCode::kUnknownName, "unknown transformation '" + w + "' (sos, das)");
    }
  }
  emit(algorithm_to_json(table), out);
  return 0;
}

// --- verify -----------------------------------------------------------------

int report_exit(const TheoremReport& report, bool json) {
  if (json) {
    std::cout << report_to_json(report).dump(2) << "\n";
  } else {
    std::cout << summarize(report);
  }
  return report.pass() ? 0 : 1;
}

int cmd_verify(const std::string& theorem, const std::string& alg_name, Time k, const BoundsFlags& flags,
               const std::string& negative_control, bool json) {
  const EnumerationBounds bounds = flags.bounds();
  const CheckOptions options{flags.require_quiescence};
  return with_builtin(alg_name, flags.n, [&](const auto& alg, const auto& v) {
    using A = std::decay_t<decltype(alg)>;
    const ProblemPredicate p = alg_name == "strong-consensus-m" ? strong_consensus_problem() : consensus_problem();
    if (theorem == "sos") {
      SosOptions<A> sos;
      sos.marabout_strict_live = flags.marabout_strict_live;
      if (negative_control == "sabotage-v") {
        sos.tilde_override = Interpretation<typename StallOnSuspect<A>::state_type>(
            [&v](ProcessId pid, const typename StallOnSuspect<A>::state_type& s) -> std::optional<ProblemState> {
              if (s.stalled) return consensus_state(0, 0);
              return v.try_map(pid, s.base);
            });
      } else if (!negative_control.empty()) {
        throw Error(ErrorCode::kUnknownName, "unknown negative control '" + negative_control + "' for sos");
      }
      return report_exit(verify_sos(alg, v, p, bounds, options, sos), json);
    }
    if (theorem == "das") {
      DasOptions das;
      if (negative_control == "skip-time-shift") {
        das.skip_time_shift = true;
      } else if (!negative_control.empty()) {
        throw Error(ErrorCode::kUnknownName, "unknown negative control '" + negative_control + "' for das");
      }
      return report_exit(verify_das(alg, v, p, k, bounds, options, das), json);
    }
    throw Error(ErrorCode::kUnknownName, "unknown theorem '" + theorem + "' (sos, das)");
  });
}

// --- probe ------------------------------------------------------------------

int cmd_probe(const std::string& alg_name, const std::string& fd_text, const std::string& problem_name,
              const BoundsFlags& flags, const std::string& out) {
  FDSpec spec = parse_fd_spec(fd_text);
  if (spec.kind == FDSpec::Kind::kMarabout) spec.marabout_strict_live = flags.marabout_strict_live;
  const ProblemPredicate p = problem_by_name(problem_name);
  return with_builtin(alg_name, flags.n, [&](const auto& alg, const auto& v) {
    const auto found = counterexample_probe(alg, spec, p, v, flags.bounds());
    if (!found) {
      std::cout << "no counterexample at these bounds\n";
      return 0;
    }
    std::cerr << p.name << " violated by " << alg.name() << " under " << to_string(spec) << " ("
              << found->schedule.size() << " steps)\n";
    emit(run_to_json(alg, *found), out);
    return 1;
  });
}

// --- problem ----------------------------------------------------------------

int cmd_problem(const std::string& problem_name, const std::string& alg_name, std::size_t n, const std::string& out) {
  const ProblemPredicate p = problem_by_name(problem_name);
  ProblemDocument doc{p.name, p.alphabet, {}};
  with_builtin(alg_name, n, [&](const auto& alg, const auto& v) {
    const TableAlgorithm table = tabulate(alg);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::map<std::string, ProblemState> row;
      for (const auto& text : table.processes()[i].states) {
        row.emplace(text, v(ProcessId(i), *alg.parse_state(text)));
      }
      doc.tables.push_back(std::move(row));
    }
    return 0;
  });
  emit(problem_to_json(doc), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fdlab: failure-detector model checker"};
  app.require_subcommand(1);

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "check a run.v1 trace against the model");
  v->add_option("trace", validate.trace, "run.v1 file")->required();
  v->add_option("--alg", validate.alg, "built-in algorithm")->required();
  v->add_option("--fd", validate.fd, "P, M or Pk:<k>")->capture_default_str();
  v->add_option("--mode", validate.mode, "prefix or strict")
      ->check(CLI::IsMember({"prefix", "strict"}))
      ->capture_default_str();
  v->add_option("--transform", validate.transform, "sos or das: validate against the transformed algorithm");
  v->add_option("--fairness-window", validate.fairness_window, "window for strict mode");
  v->add_option("--marabout-strict-live", validate.marabout_strict_live, "M constrains every live process")
      ->capture_default_str();
  v->add_flag("--json", validate.json, "machine-readable report");

  std::string t_alg;
  std::vector<std::string> t_which;
  std::size_t t_n = 2;
  std::string t_out;
  auto* t = app.add_subcommand("transform", "tabulate a transformed built-in as algorithm.v1");
  t->add_option("alg", t_alg, "built-in algorithm")->required();
  t->add_option("which", t_which, "sos and/or das, applied left to right")->required();
  t->add_option("--n", t_n, "process count")->capture_default_str();
  t->add_option("--out", t_out, "output file (default stdout)");

  std::string vf_theorem, vf_alg, vf_control;
  Time vf_k = 0;
  bool vf_json = false;
  BoundsFlags vf_flags;
  auto* vf = app.add_subcommand("verify", "check a transformation theorem over all bounded runs");
  vf->add_option("theorem", vf_theorem, "sos or das")->required()->check(CLI::IsMember({"sos", "das"}));
  vf->add_option("alg", vf_alg, "built-in algorithm")->required();
  vf->add_option("--k", vf_k, "k for das (P_{k+1} -> P_k)")->capture_default_str();
  vf->add_option("--negative-control", vf_control, "sabotage-v (sos) or skip-time-shift (das)");
  vf->add_flag("--json", vf_json, "print report.v1");
  vf_flags.attach(vf);

  std::string p_alg, p_fd = "P", p_problem, p_out;
  BoundsFlags p_flags;
  p_flags.n = 3;
  auto* pr = app.add_subcommand("probe", "search bounded runs for a problem violation");
  pr->add_option("alg", p_alg, "built-in algorithm")->required();
  pr->add_option("--fd", p_fd, "P, M or Pk:<k>")->capture_default_str();
  pr->add_option("--problem", p_problem, "consensus, strong-consensus or true")->required();
  pr->add_option("--out", p_out, "write the counterexample here (default stdout)");
  p_flags.attach(pr);

  std::string q_problem, q_alg, q_out;
  std::size_t q_n = 2;
  auto* q = app.add_subcommand("problem", "emit problem.v1 with a built-in's interpretation table");
  q->add_option("problem", q_problem, "consensus, strong-consensus or true")->required();
  q->add_option("--alg", q_alg, "built-in algorithm")->required();
  q->add_option("--n", q_n, "process count")->capture_default_str();
  q->add_option("--out", q_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*v) return cmd_validate(validate);
    if (*t) return cmd_transform(t_alg, t_which, t_n, t_out);
    if (*vf) return cmd_verify(vf_theorem, vf_alg, vf_k, vf_flags, vf_control, vf_json);
    if (*pr) return cmd_probe(p_alg, p_fd, p_problem, p_flags, p_out);
    if (*q) return cmd_problem(q_problem, q_alg, q_n, q_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kBudgetExceeded ? kExitBudget : kExitUsage;
  }
  return kExitUsage;
}
