#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <compare>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdlab {

/// Discrete global time. Runs live on the closed interval [0, horizon].
using Time = std::uint32_t;

/// Index of a process in Π = {p_0, ..., p_{n-1}}.
struct ProcessId {
  std::uint32_t value = 0;

  constexpr ProcessId() = default;
  constexpr explicit ProcessId(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const ProcessId&) const = default;
};

inline constexpr std::size_t kMaxProcesses = 32;

/// A subset of Π stored as a bitmask. Used for crashed sets, failure
/// detector outputs and correct/faulty sets.
class ProcessSet {
 public:
  constexpr ProcessSet() = default;
  constexpr explicit ProcessSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr ProcessSet all(std::size_t n) {
    return ProcessSet(n >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1));
  }
  static constexpr ProcessSet single(ProcessId p) {
    return ProcessSet(std::uint32_t{1} << p.value);
  }

  constexpr bool contains(ProcessId p) const { return (bits_ >> p.value) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr std::uint32_t bits() const { return bits_; }

  constexpr void insert(ProcessId p) { bits_ |= std::uint32_t{1} << p.value; }
  constexpr void erase(ProcessId p) { bits_ &= ~(std::uint32_t{1} << p.value); }

  constexpr bool subset_of(ProcessSet other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr ProcessSet operator|(ProcessSet o) const { return ProcessSet(bits_ | o.bits_); }
  constexpr ProcessSet operator&(ProcessSet o) const { return ProcessSet(bits_ & o.bits_); }
  /// Set difference.
  constexpr ProcessSet operator-(ProcessSet o) const { return ProcessSet(bits_ & ~o.bits_); }

  constexpr auto operator<=>(const ProcessSet&) const = default;

  /// Smallest member; id 32 when empty, so callers check empty() first.
  constexpr ProcessId min() const { return ProcessId(static_cast<std::uint32_t>(std::countr_zero(bits_))); }

  std::vector<ProcessId> members() const {
    std::vector<ProcessId> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) {
      out.emplace_back(static_cast<std::uint32_t>(std::countr_zero(b)));
    }
    return out;
  }

 private:
  std::uint32_t bits_ = 0;
};

enum class ErrorCode {
  kInvalidArgument,
  kDomainMismatch,
  kKOutOfRange,
  kMismatchedPreState,
  kNoSuchInTransitMessage,
  kScheduleApplication,
  kUncoveredState,
  kAlphabetMismatch,
  kStutterDepthExceeded,
  kBudgetExceeded,
  kNotSoSRun,
  kFaultyStepPresent,
  kMissingNoOpPrefix,
  kNonPositiveTime,
  kParse,
  kUnknownName,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDomainMismatch: return "DomainMismatch";
    case ErrorCode::kKOutOfRange: return "KOutOfRange";
    case ErrorCode::kMismatchedPreState: return "MismatchedPreState";
    case ErrorCode::kNoSuchInTransitMessage: return "NoSuchInTransitMessage";
    case ErrorCode::kScheduleApplication: return "ScheduleApplication";
    case ErrorCode::kUncoveredState: return "UncoveredState";
    case ErrorCode::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::kStutterDepthExceeded: return "StutterDepthExceeded";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kNotSoSRun: return "NotSoSRun";
    case ErrorCode::kFaultyStepPresent: return "FaultyStepPresent";
    case ErrorCode::kMissingNoOpPrefix: return "MissingNoOpPrefix";
    case ErrorCode::kNonPositiveTime: return "NonPositiveTime";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kUnknownName: return "UnknownName";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fdlab

template <>
struct std::hash<fdlab::ProcessId> {
  std::size_t operator()(fdlab::ProcessId p) const noexcept { return p.value; }
};
