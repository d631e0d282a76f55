#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fdlab/failure_detectors.hpp"
#include "fdlab/model.hpp"
#include "fdlab/problems.hpp"

namespace fdlab {

using Json = nlohmann::json;

inline Json to_json(ProcessSet s) {
  Json out = Json::array();
  for (ProcessId p : s.members()) out.push_back(p.value);
  return out;
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorCode::kParse, what); }

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::uint64_t uint_of(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    parse_fail(std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline std::string string_of(const Json& j, const char* what) {
  if (!j.is_string()) parse_fail(std::string(what) + " must be a string");
  return j.get<std::string>();
}

inline ProcessSet set_of(const Json& j, std::size_t n) {
  if (!j.is_array()) parse_fail("process set must be an array");
  ProcessSet out;
  for (const auto& e : j) {
    const auto id = uint_of(e, "process id");
    if (id >= n) parse_fail("process id " + std::to_string(id) + " outside Π");
    out.insert(ProcessId(static_cast<std::uint32_t>(id)));
  }
  return out;
}

inline void check_schema(const Json& j, const std::string& schema) {
  if (j.is_object() && j.contains("schema") && j.at("schema") != schema) {
    parse_fail("expected schema " + schema + ", got " + j.at("schema").dump());
  }
}

}  // namespace detail

inline Json pattern_to_json(const FailurePattern& f) {
  Json out = Json::array();
  for (Time t = 0; t <= f.horizon(); ++t) out.push_back(Json::array({t, to_json(f.crashed(t))}));
  return out;
}

inline Json history_to_json(const History& h) {
  Json out = Json::array();
  for (std::uint32_t i = 0; i < h.process_count(); ++i) {
    for (Time t = 0; t <= h.horizon(); ++t) out.push_back(Json::array({i, t, to_json(h.at(ProcessId(i), t))}));
  }
  return out;
}

/// run.v1
template <Algorithm A>
Json run_to_json(const A& alg, const RunOf<A>& run) {
  Json j;
  j["schema"] = "run.v1";
  j["algorithm"] = alg.name();
  j["n"] = run.pattern.process_count();
  j["horizon"] = run.pattern.horizon();
  j["pattern"] = pattern_to_json(run.pattern);
  j["history"] = history_to_json(run.history);
  j["init"] = Json::array();
  for (const auto& s : run.init) j["init"].push_back(alg.format_state(s));
  j["schedule"] = Json::array();
  for (const auto& s : run.schedule) {
    Json step;
    step["actor"] = s.actor.value;
    step["pre"] = alg.format_state(s.pre);
    step["fd"] = to_json(s.fd);
    step["post"] = alg.format_state(s.post);
    step["recv"] = s.received ? Json{{"from", s.received->from.value},
                                     {"payload", alg.format_payload(s.received->payload)},
                                     {"tag", s.received->tag}}
                              : Json(nullptr);
    step["send"] = s.sent ? Json{{"to", s.sent->to.value}, {"payload", alg.format_payload(s.sent->payload)}}
                          : Json(nullptr);
    j["schedule"].push_back(std::move(step));
  }
  j["times"] = run.times;
  return j;
}

/// Parses run.v1. Throws kParse on malformed documents; structural validity
/// (monotone pattern aside) is left to validate_run.
template <Algorithm A>
RunOf<A> run_from_json(const A& alg, const Json& j) {
  using detail::field;
  using detail::uint_of;
  detail::check_schema(j, "run.v1");
  const std::size_t n = uint_of(field(j, "n"), "n");
  const auto horizon = static_cast<Time>(uint_of(field(j, "horizon"), "horizon"));
  if (n != alg.process_count()) {
    detail::parse_fail("run has " + std::to_string(n) + " processes, algorithm has " + std::to_string(alg.process_count()));
  }
  if (n == 0 || n > kMaxProcesses) detail::parse_fail("n out of range");

  const Json& pj = field(j, "pattern");
  if (!pj.is_array() || pj.size() != static_cast<std::size_t>(horizon) + 1) {
    detail::parse_fail("pattern must list every time point 0..horizon");
  }
  std::vector<ProcessSet> sets(pj.size());
  for (const auto& e : pj) {
    if (!e.is_array() || e.size() != 2) detail::parse_fail("pattern entry must be [t, [ids]]");
    const auto t = uint_of(e[0], "pattern time");
    if (t > horizon) detail::parse_fail("pattern time beyond horizon");
    sets[t] = detail::set_of(e[1], n);
  }
  FailurePattern pattern = [&] {
    try {
      return FailurePattern(n, sets);
    } catch (const Error& e) {
      detail::parse_fail(e.what());
    }
  }();

  History history(n, horizon);
  const Json& hj = field(j, "history");
  if (!hj.is_array()) detail::parse_fail("history must be an array");
  std::set<std::pair<std::uint64_t, std::uint64_t>> cells;
  for (const auto& e : hj) {
    if (!e.is_array() || e.size() != 3) detail::parse_fail("history entry must be [pid, t, [ids]]");
    const auto i = uint_of(e[0], "history pid");
    const auto t = uint_of(e[1], "history time");
    if (i >= n || t > horizon) detail::parse_fail("history cell outside Π × [0, horizon]");
    if (!cells.emplace(i, t).second) detail::parse_fail("duplicate history cell");
    history.set(ProcessId(static_cast<std::uint32_t>(i)), static_cast<Time>(t), detail::set_of(e[2], n));
  }
  if (cells.size() != n * (static_cast<std::size_t>(horizon) + 1)) detail::parse_fail("history must cover every cell");

  auto state = [&](const Json& s) {
    auto parsed = alg.parse_state(detail::string_of(s, "state"));
    if (!parsed) detail::parse_fail("unparsable state '" + s.get<std::string>() + "'");
    return *parsed;
  };
  auto payload = [&](const Json& m) {
    auto parsed = alg.parse_payload(detail::string_of(m, "payload"));
    if (!parsed) detail::parse_fail("unparsable payload '" + m.get<std::string>() + "'");
    return *parsed;
  };

  RunOf<A> run{pattern, history, {}, {}, {}};
  const Json& ij = field(j, "init");
  if (!ij.is_array()) detail::parse_fail("init must be an array");
  for (const auto& s : ij) run.init.push_back(state(s));

  const Json& sj = field(j, "schedule");
  if (!sj.is_array()) detail::parse_fail("schedule must be an array");
  for (const auto& e : sj) {
    StepOf<A> step{ProcessId(static_cast<std::uint32_t>(uint_of(field(e, "actor"), "actor"))),
                   state(field(e, "pre")),
                   std::nullopt,
                   detail::set_of(field(e, "fd"), n),
                   state(field(e, "post")),
                   std::nullopt};
    const Json& r = field(e, "recv");
    if (!r.is_null()) {
      step.received = Received<typename A::payload_type>{
          ProcessId(static_cast<std::uint32_t>(uint_of(field(r, "from"), "recv.from"))), payload(field(r, "payload")),
          static_cast<std::size_t>(uint_of(field(r, "tag"), "recv.tag"))};
    }
    const Json& m = field(e, "send");
    if (!m.is_null()) {
      step.sent = Outgoing<typename A::payload_type>{
          ProcessId(static_cast<std::uint32_t>(uint_of(field(m, "to"), "send.to"))), payload(field(m, "payload"))};
    }
    run.schedule.push_back(std::move(step));
  }
  const Json& tj = field(j, "times");
  if (!tj.is_array()) detail::parse_fail("times must be an array");
  for (const auto& t : tj) run.times.push_back(static_cast<Time>(uint_of(t, "time")));
  return run;
}

/// problem.v1: alphabet plus an explicit interpretation table per process.
struct ProblemDocument {
  std::string name;
  ProblemAlphabet alphabet;
  std::vector<std::map<std::string, ProblemState>> tables;
};

inline Json problem_to_json(const ProblemDocument& doc) {
  Json j;
  j["schema"] = "problem.v1";
  j["name"] = doc.name;
  j["sigma"] = doc.alphabet.sigma;
  j["sigma_init"] = doc.alphabet.sigma_init;
  j["V"] = doc.tables;
  return j;
}

inline ProblemDocument problem_from_json(const Json& j) {
  detail::check_schema(j, "problem.v1");
  ProblemDocument doc;
  try {
    doc.name = j.value("name", std::string());
    doc.alphabet.sigma = detail::field(j, "sigma").get<std::vector<std::string>>();
    doc.alphabet.sigma_init = detail::field(j, "sigma_init").get<std::vector<std::string>>();
    doc.tables = detail::field(j, "V").get<std::vector<std::map<std::string, std::string>>>();
  } catch (const Json::exception& e) {
    detail::parse_fail(e.what());
  }
  const std::set<std::string> sigma(doc.alphabet.sigma.begin(), doc.alphabet.sigma.end());
  for (const auto& s : doc.alphabet.sigma_init) {
    if (!sigma.count(s)) detail::parse_fail("sigma_init element '" + s + "' not in sigma");
  }
  for (const auto& table : doc.tables) {
    for (const auto& [state, ps] : table) {
      if (!sigma.count(ps)) detail::parse_fail("V maps '" + state + "' outside sigma");
    }
  }
  return doc;
}

/// Interpretation over formatted algorithm states, from a problem.v1 table.
template <Algorithm A>
Interpretation<typename A::state_type> interpretation_from_document(const A& alg, const ProblemDocument& doc) {
  return Interpretation<typename A::state_type>(
      [&alg, tables = doc.tables](ProcessId p, const typename A::state_type& s) -> std::optional<ProblemState> {
        if (p.value >= tables.size()) return std::nullopt;
        auto it = tables[p.value].find(alg.format_state(s));
        if (it == tables[p.value].end()) return std::nullopt;
        return it->second;
      });
}

// ---------------------------------------------------------------------------
// algorithm.v1: reachable state alphabet and transition table.

/// Algorithm given by an explicit transition table over formatted states and
/// payloads. Transitions missing from the table are rejected.
class TableAlgorithm {
 public:
  using state_type = std::string;
  using payload_type = std::string;

  struct Key {
    std::string pre;
    std::optional<std::pair<std::uint32_t, std::string>> recv;  // (from, payload)
    std::uint32_t fd = 0;

    auto operator<=>(const Key&) const = default;
  };

  struct Process {
    std::vector<std::string> initial;
    std::set<std::string> states;
    std::set<std::string> receiving;  // states whose steps may consume a message
    std::map<Key, Transition<std::string, std::string>> transitions;
  };

  TableAlgorithm() = default;
  TableAlgorithm(std::string name, std::vector<std::string> payloads, std::vector<Process> processes)
      : name_(std::move(name)), payloads_(std::move(payloads)), processes_(std::move(processes)) {}

  std::string name() const { return name_; }
  std::size_t process_count() const { return processes_.size(); }
  const std::vector<Process>& processes() const { return processes_; }

  std::vector<state_type> initial_states(ProcessId p) const { return processes_.at(p.value).initial; }
  bool is_state(ProcessId p, const state_type& s) const { return processes_.at(p.value).states.count(s) > 0; }
  bool accepts_messages(ProcessId p, const state_type& s) const { return processes_.at(p.value).receiving.count(s) > 0; }

  Transition<state_type, payload_type> transition(ProcessId p, const state_type& s,
                                                  const std::optional<Received<payload_type>>& received,
                                                  ProcessSet fd) const {
    Key key{s, std::nullopt, fd.bits()};
    if (received) key.recv = std::make_pair(received->from.value, received->payload);
    const auto& table = processes_.at(p.value).transitions;
    auto it = table.find(key);
    if (it == table.end()) {
      throw Error(ErrorCode::kInvalidArgument, "no transition for p" + std::to_string(p.value) + " in state '" + s + "'");
    }
    return it->second;
  }

  std::vector<payload_type> payload_alphabet() const { return payloads_; }
  std::string format_state(const state_type& s) const { return s; }
  std::optional<state_type> parse_state(const std::string& text) const { return text; }
  std::string format_payload(const payload_type& m) const { return m; }
  std::optional<payload_type> parse_payload(const std::string& text) const { return text; }

 private:
  std::string name_;
  std::vector<std::string> payloads_;
  std::vector<Process> processes_;
};

static_assert(Algorithm<TableAlgorithm>);

/// Explores every state reachable from the initial states under any FD
/// output and any delivered payload, and tabulates the transitions.
/// Throws kBudgetExceeded beyond `max_states` states per process.
template <Algorithm A>
TableAlgorithm tabulate(const A& alg, std::size_t max_states = 100000) {
  const std::size_t n = alg.process_count();
  std::vector<std::string> payloads;
  for (const auto& m : alg.payload_alphabet()) payloads.push_back(alg.format_payload(m));
  std::vector<TableAlgorithm::Process> processes(n);
  const std::uint32_t subsets = ProcessSet::all(n).bits();
  for (std::uint32_t i = 0; i < n; ++i) {
    const ProcessId p(i);
    auto& out = processes[i];
    std::set<typename A::state_type> seen;
    std::vector<typename A::state_type> frontier;
    for (const auto& q : alg.initial_states(p)) {
      out.initial.push_back(alg.format_state(q));
      if (seen.insert(q).second) frontier.push_back(q);
    }
    while (!frontier.empty()) {
      const auto s = frontier.back();
      frontier.pop_back();
      const std::string pre = alg.format_state(s);
      out.states.insert(pre);
      const bool receiving = alg.accepts_messages(p, s);
      if (receiving) out.receiving.insert(pre);
      std::vector<std::optional<Received<typename A::payload_type>>> inputs{std::nullopt};
      if (receiving) {
        for (std::uint32_t j = 0; j < n; ++j) {
          if (j == i) continue;
          for (const auto& m : alg.payload_alphabet()) inputs.push_back(Received<typename A::payload_type>{ProcessId(j), m, 0});
        }
      }
      for (const auto& input : inputs) {
        for (std::uint32_t bits = 0; bits <= subsets; ++bits) {
          const auto t = alg.transition(p, s, input, ProcessSet(bits));
          TableAlgorithm::Key key{pre, std::nullopt, bits};
          if (input) key.recv = std::make_pair(input->from.value, alg.format_payload(input->payload));
          std::optional<Outgoing<std::string>> send;
          if (t.send) send = Outgoing<std::string>{t.send->to, alg.format_payload(t.send->payload)};
          out.transitions.emplace(std::move(key), Transition<std::string, std::string>{alg.format_state(t.next), send});
          if (seen.insert(t.next).second) {
            if (seen.size() > max_states) throw Error(ErrorCode::kBudgetExceeded, "reachable state space too large");
            frontier.push_back(t.next);
          }
        }
      }
    }
  }
  return TableAlgorithm(alg.name(), std::move(payloads), std::move(processes));
}

inline Json algorithm_to_json(const TableAlgorithm& alg) {
  Json j;
  j["schema"] = "algorithm.v1";
  j["name"] = alg.name();
  j["n"] = alg.process_count();
  j["payloads"] = alg.payload_alphabet();
  j["processes"] = Json::array();
  for (const auto& proc : alg.processes()) {
    Json pj;
    pj["initial"] = proc.initial;
    pj["states"] = proc.states;
    pj["receiving"] = proc.receiving;
    pj["transitions"] = Json::array();
    for (const auto& [key, t] : proc.transitions) {
      pj["transitions"].push_back(Json{
          {"pre", key.pre},
          {"recv", key.recv ? Json{{"from", key.recv->first}, {"payload", key.recv->second}} : Json(nullptr)},
          {"fd", to_json(ProcessSet(key.fd))},
          {"post", t.next},
          {"send", t.send ? Json{{"to", t.send->to.value}, {"payload", t.send->payload}} : Json(nullptr)},
      });
    }
    j["processes"].push_back(std::move(pj));
  }
  return j;
}

inline TableAlgorithm algorithm_from_json(const Json& j) {
  using detail::field;
  detail::check_schema(j, "algorithm.v1");
  try {
    const std::size_t n = detail::uint_of(field(j, "n"), "n");
    std::vector<TableAlgorithm::Process> processes;
    for (const auto& pj : field(j, "processes")) {
      TableAlgorithm::Process proc;
      proc.initial = field(pj, "initial").get<std::vector<std::string>>();
      proc.states = field(pj, "states").get<std::set<std::string>>();
      proc.receiving = field(pj, "receiving").get<std::set<std::string>>();
      for (const auto& tj : field(pj, "transitions")) {
        TableAlgorithm::Key key{detail::string_of(field(tj, "pre"), "pre"), std::nullopt,
                                detail::set_of(field(tj, "fd"), n).bits()};
        const Json& r = field(tj, "recv");
        if (!r.is_null()) {
          key.recv = std::make_pair(static_cast<std::uint32_t>(detail::uint_of(field(r, "from"), "recv.from")),
                                    detail::string_of(field(r, "payload"), "recv.payload"));
        }
        std::optional<Outgoing<std::string>> send;
        const Json& m = field(tj, "send");
        if (!m.is_null()) {
          send = Outgoing<std::string>{ProcessId(static_cast<std::uint32_t>(detail::uint_of(field(m, "to"), "send.to"))),
                                       detail::string_of(field(m, "payload"), "send.payload")};
        }
        proc.transitions.emplace(std::move(key), Transition<std::string, std::string>{
                                                     detail::string_of(field(tj, "post"), "post"), send});
      }
      processes.push_back(std::move(proc));
    }
    if (processes.size() != n) detail::parse_fail("process count differs from n");
    return TableAlgorithm(detail::string_of(field(j, "name"), "name"),
                          field(j, "payloads").get<std::vector<std::string>>(), std::move(processes));
  } catch (const Json::exception& e) {
    detail::parse_fail(e.what());
  }
}

}  // namespace fdlab
