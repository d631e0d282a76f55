#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdlab/model.hpp"
#include "fdlab/problems.hpp"

namespace fdlab {

namespace detail {

/// Minimal cursor for the dotted state encodings below.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  bool literal(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<std::uint32_t> number() {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) return std::nullopt;
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  /// Decision digit or '_' for undecided.
  std::optional<std::int8_t> decision() {
    if (literal('_')) return std::int8_t{-1};
    if (literal('0')) return std::int8_t{0};
    if (literal('1')) return std::int8_t{1};
    return std::nullopt;
  }

  bool done() const { return pos_ == text_.size(); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline char decision_char(std::int8_t d) { return d < 0 ? '_' : static_cast<char>('0' + d); }

inline void check_builtin_size(std::size_t n, std::size_t max) {
  if (n == 0 || n > max) {
    throw Error(ErrorCode::kInvalidArgument, "built-in algorithms support 1.." + std::to_string(max) + " processes");
  }
}

}  // namespace detail

/// Flooding uniform consensus for P.
///
/// n rounds. In round r a process sends (r, W) to every process it does not
/// suspect, one message per step, where W is the set of values it had at the
/// end of round r-1. It collects round-r sets and leaves round r once its
/// outbox is empty and it holds a round-r message from every unsuspected
/// process. After round n it decides min(W). Messages for rounds already
/// left are dropped; a decided process only drains its outbox.
class FloodConsensus {
 public:
  static constexpr std::size_t kMaxN = 6;

  struct state_type {
    std::uint8_t proposal = 0;
    std::uint8_t round = 1;
    std::uint8_t outbox = 0;   // destinations still owed the current round's message
    std::int8_t decision = -1;
    std::array<std::uint8_t, kMaxN + 1> received{};  // received[r]: senders heard in round r
    std::array<std::uint8_t, kMaxN + 1> values{};    // values[r]: bit v set if v known in round r

    auto operator<=>(const state_type&) const = default;
  };

  struct payload_type {
    std::uint8_t round = 1;
    std::uint8_t values = 0;

    auto operator<=>(const payload_type&) const = default;
  };

  explicit FloodConsensus(std::size_t n) : n_(n) { detail::check_builtin_size(n, kMaxN); }

  std::string name() const { return "flood-consensus-p"; }
  std::size_t process_count() const { return n_; }
  std::size_t rounds() const { return n_; }

  state_type initial(ProcessId p, int proposal) const {
    state_type s;
    s.proposal = static_cast<std::uint8_t>(proposal);
    s.round = 1;
    s.values[0] = static_cast<std::uint8_t>(1U << proposal);
    s.values[1] = s.values[0];
    s.received[1] = static_cast<std::uint8_t>(ProcessSet::single(p).bits());
    s.outbox = static_cast<std::uint8_t>((ProcessSet::all(n_) - ProcessSet::single(p)).bits());
    return s;
  }

  std::vector<state_type> initial_states(ProcessId p) const { return {initial(p, 0), initial(p, 1)}; }

  bool is_state(ProcessId, const state_type& s) const {
    const std::uint32_t universe = ProcessSet::all(n_).bits();
    if (s.proposal > 1 || s.round < 1 || s.round > rounds() || s.decision < -1 || s.decision > 1) return false;
    if ((s.outbox & ~universe) != 0) return false;
    for (std::size_t r = 0; r <= kMaxN; ++r) {
      if ((s.received[r] & ~universe) != 0 || s.values[r] > 3) return false;
      if (r > rounds() && (s.received[r] != 0 || s.values[r] != 0)) return false;
    }
    return true;
  }

  bool accepts_messages(ProcessId, const state_type&) const { return true; }

  Transition<state_type, payload_type> transition(ProcessId p, const state_type& pre,
                                                  const std::optional<Received<payload_type>>& received,
                                                  ProcessSet fd) const {
    state_type s = pre;
    if (received && s.decision < 0 && received->payload.round >= s.round && received->payload.round <= rounds()) {
      s.received[received->payload.round] |= static_cast<std::uint8_t>(ProcessSet::single(received->from).bits());
      s.values[received->payload.round] |= received->payload.values;
    }
    const ProcessSet unsuspected = ProcessSet::all(n_) - fd;
    s.outbox = static_cast<std::uint8_t>((ProcessSet(s.outbox) - fd).bits());
    while (s.decision < 0 && s.outbox == 0 && unsuspected.subset_of(ProcessSet(s.received[s.round]))) {
      if (s.round == rounds()) {
        s.decision = (s.values[s.round] & 1U) ? 0 : 1;
        break;
      }
      ++s.round;
      s.values[s.round] |= s.values[s.round - 1];
      s.received[s.round] |= static_cast<std::uint8_t>(ProcessSet::single(p).bits());
      s.outbox = static_cast<std::uint8_t>((ProcessSet::all(n_) - ProcessSet::single(p) - fd).bits());
    }
    std::optional<Outgoing<payload_type>> send;
    if (s.outbox != 0) {
      const ProcessId to = ProcessSet(s.outbox).min();
      s.outbox = static_cast<std::uint8_t>((ProcessSet(s.outbox) - ProcessSet::single(to)).bits());
      send = Outgoing<payload_type>{to, payload_type{s.round, s.values[s.round - 1]}};
    }
    return {s, send};
  }

  std::vector<payload_type> payload_alphabet() const {
    std::vector<payload_type> out;
    for (std::uint8_t r = 1; r <= rounds(); ++r) {
      for (std::uint8_t v = 1; v <= 3; ++v) out.push_back({r, v});
    }
    return out;
  }

  /// "p<proposal>.r<round>.o<outbox>.d<decision>.f<received[1..n]>.v<values[0..n]>"
  std::string format_state(const state_type& s) const {
    std::string out = "p" + std::to_string(s.proposal) + ".r" + std::to_string(s.round) + ".o" +
                      std::to_string(s.outbox) + ".d" + detail::decision_char(s.decision) + ".f";
    for (std::size_t r = 1; r <= rounds(); ++r) {
      if (r > 1) out += ',';
      out += std::to_string(s.received[r]);
    }
    out += ".v";
    for (std::size_t r = 0; r <= rounds(); ++r) {
      if (r > 0) out += ',';
      out += std::to_string(s.values[r]);
    }
    return out;
  }

  std::optional<state_type> parse_state(const std::string& text) const {
    detail::Reader in(text);
    state_type s;
    auto byte = [&](std::uint8_t& field) {
      auto v = in.number();
      if (!v || *v > 255) return false;
      field = static_cast<std::uint8_t>(*v);
      return true;
    };
    if (!in.literal('p') || !byte(s.proposal) || !in.literal('.') || !in.literal('r') || !byte(s.round) ||
        !in.literal('.') || !in.literal('o') || !byte(s.outbox) || !in.literal('.') || !in.literal('d')) {
      return std::nullopt;
    }
    auto d = in.decision();
    if (!d) return std::nullopt;
    s.decision = *d;
    if (!in.literal('.') || !in.literal('f')) return std::nullopt;
    for (std::size_t r = 1; r <= rounds(); ++r) {
      if ((r > 1 && !in.literal(',')) || !byte(s.received[r])) return std::nullopt;
    }
    if (!in.literal('.') || !in.literal('v')) return std::nullopt;
    for (std::size_t r = 0; r <= rounds(); ++r) {
      if ((r > 0 && !in.literal(',')) || !byte(s.values[r])) return std::nullopt;
    }
    if (!in.done()) return std::nullopt;
    return s;
  }

  std::string format_payload(const payload_type& m) const {
    return "r" + std::to_string(m.round) + ":" + std::to_string(m.values);
  }

  std::optional<payload_type> parse_payload(const std::string& text) const {
    detail::Reader in(text);
    auto r = in.literal('r') ? in.number() : std::nullopt;
    if (!r || !in.literal(':')) return std::nullopt;
    auto v = in.number();
    if (!v || !in.done() || *r == 0 || *r > rounds() || *v == 0 || *v > 3) return std::nullopt;
    return payload_type{static_cast<std::uint8_t>(*r), static_cast<std::uint8_t>(*v)};
  }

 private:
  std::size_t n_;
};

/// Strong consensus for M: send the input to every unsuspected process, wait
/// for the inputs of all unsuspected processes, decide the input of the
/// unsuspected process with the smallest id. With M the unsuspected
/// processes are exactly the correct ones.
class StrongConsensusM {
 public:
  static constexpr std::size_t kMaxN = 8;

  struct state_type {
    std::uint8_t input = 0;
    std::uint8_t known = 0;   // processes whose input is known
    std::uint8_t ones = 0;    // bit j set if p_j's input is 1
    std::uint8_t outbox = 0;
    std::int8_t decision = -1;

    auto operator<=>(const state_type&) const = default;
  };

  using payload_type = std::uint8_t;

  explicit StrongConsensusM(std::size_t n) : n_(n) { detail::check_builtin_size(n, kMaxN); }

  std::string name() const { return "strong-consensus-m"; }
  std::size_t process_count() const { return n_; }

  state_type initial(ProcessId p, int input) const {
    state_type s;
    s.input = static_cast<std::uint8_t>(input);
    s.known = static_cast<std::uint8_t>(ProcessSet::single(p).bits());
    s.ones = input == 1 ? s.known : 0;
    s.outbox = static_cast<std::uint8_t>((ProcessSet::all(n_) - ProcessSet::single(p)).bits());
    return s;
  }

  std::vector<state_type> initial_states(ProcessId p) const { return {initial(p, 0), initial(p, 1)}; }

  bool is_state(ProcessId, const state_type& s) const {
    const std::uint32_t universe = ProcessSet::all(n_).bits();
    return s.input <= 1 && (s.known & ~universe) == 0 && (s.ones & ~s.known) == 0 && (s.outbox & ~universe) == 0 &&
           s.decision >= -1 && s.decision <= 1;
  }

  bool accepts_messages(ProcessId, const state_type&) const { return true; }

  Transition<state_type, payload_type> transition(ProcessId, const state_type& pre,
                                                  const std::optional<Received<payload_type>>& received,
                                                  ProcessSet fd) const {
    state_type s = pre;
    if (received && s.decision < 0) {
      const auto bit = static_cast<std::uint8_t>(ProcessSet::single(received->from).bits());
      s.known |= bit;
      if (received->payload == 1) s.ones |= bit;
    }
    const ProcessSet unsuspected = ProcessSet::all(n_) - fd;
    if (s.decision < 0 && unsuspected.subset_of(ProcessSet(s.known))) {
      if (unsuspected.empty()) {
        s.decision = static_cast<std::int8_t>(s.input);
      } else {
        s.decision = ProcessSet(s.ones).contains(unsuspected.min()) ? 1 : 0;
      }
    }
    s.outbox = static_cast<std::uint8_t>((ProcessSet(s.outbox) - fd).bits());
    std::optional<Outgoing<payload_type>> send;
    if (s.outbox != 0) {
      const ProcessId to = ProcessSet(s.outbox).min();
      s.outbox = static_cast<std::uint8_t>((ProcessSet(s.outbox) - ProcessSet::single(to)).bits());
      send = Outgoing<payload_type>{to, s.input};
    }
    return {s, send};
  }

  std::vector<payload_type> payload_alphabet() const { return {0, 1}; }

  /// "x<input>.k<known>.v<ones>.o<outbox>.d<decision>"
  std::string format_state(const state_type& s) const {
    return "x" + std::to_string(s.input) + ".k" + std::to_string(s.known) + ".v" + std::to_string(s.ones) + ".o" +
           std::to_string(s.outbox) + ".d" + detail::decision_char(s.decision);
  }

  std::optional<state_type> parse_state(const std::string& text) const {
    detail::Reader in(text);
    state_type s;
    auto byte = [&](std::uint8_t& field) {
      auto v = in.number();
      if (!v || *v > 255) return false;
      field = static_cast<std::uint8_t>(*v);
      return true;
    };
    if (!in.literal('x') || !byte(s.input) || !in.literal('.') || !in.literal('k') || !byte(s.known) ||
        !in.literal('.') || !in.literal('v') || !byte(s.ones) || !in.literal('.') || !in.literal('o') ||
        !byte(s.outbox) || !in.literal('.') || !in.literal('d')) {
      return std::nullopt;
    }
    auto d = in.decision();
    if (!d || !in.done()) return std::nullopt;
    s.decision = *d;
    return s;
  }

  std::string format_payload(const payload_type& m) const { return std::to_string(m); }

  std::optional<payload_type> parse_payload(const std::string& text) const {
    if (text == "0") return payload_type{0};
    if (text == "1") return payload_type{1};
    return std::nullopt;
  }

 private:
  std::size_t n_;
};

/// (proposal, decision) view shared by both built-ins.
inline Interpretation<FloodConsensus::state_type> consensus_interpretation(const FloodConsensus&) {
  return Interpretation<FloodConsensus::state_type>(
      [](ProcessId, const FloodConsensus::state_type& s) -> std::optional<ProblemState> {
        return consensus_state(s.proposal, s.decision);
      });
}

inline Interpretation<StrongConsensusM::state_type> consensus_interpretation(const StrongConsensusM&) {
  return Interpretation<StrongConsensusM::state_type>(
      [](ProcessId, const StrongConsensusM::state_type& s) -> std::optional<ProblemState> {
        return consensus_state(s.input, s.decision);
      });
}

static_assert(Algorithm<FloodConsensus>);
static_assert(Algorithm<StrongConsensusM>);

}  // namespace fdlab
