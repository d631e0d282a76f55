#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fdlab/basics.hpp"

namespace fdlab {

/// Problem state: an element of the declared problem alphabet σ.
using ProblemState = std::string;
/// Σ: one problem state per process.
using ProblemConfig = std::vector<ProblemState>;
/// A finite problem-configuration sequence.
using ProblemSeq = std::vector<ProblemConfig>;

/// w2 is w with one configuration inserted between some adjacent pair
/// (Σ, Σ′), whose every component is taken from Σ or Σ′.
inline bool is_one_stutter(const ProblemSeq& w, const ProblemSeq& w2) {
  if (w.size() < 2 || w2.size() != w.size() + 1) return false;
  for (std::size_t gap = 0; gap + 1 < w.size(); ++gap) {
    if (!std::equal(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(gap) + 1, w2.begin())) break;
    if (!std::equal(w.begin() + static_cast<std::ptrdiff_t>(gap) + 1, w.end(),
                    w2.begin() + static_cast<std::ptrdiff_t>(gap) + 2)) {
      continue;
    }
    const ProblemConfig& a = w[gap];
    const ProblemConfig& b = w[gap + 1];
    const ProblemConfig& mid = w2[gap + 1];
    if (mid.size() != a.size() || b.size() != a.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) ok = mid[i] == a[i] || mid[i] == b[i];
    if (ok) return true;
  }
  return false;
}

/// Decides w ⊑ w2 (w2 = w or w2 is an n-stutter of w).
///
/// Repeated 1-stutters fill the gap between adjacent w[j], w[j+1] with a block
/// of configurations in which every component starts at w[j]|_i and switches
/// to w[j+1]|_i at most once; a component that switched cannot switch back.
/// The matcher tracks (j, switched-components) over w2 as an NFA.
///
/// `max_insertions` bounds |w2| - |w|; exceeding it throws
/// kStutterDepthExceeded.
inline bool is_stutter(const ProblemSeq& w, const ProblemSeq& w2, std::optional<std::size_t> max_insertions = {}) {
  if (w2.size() > w.size() && w2.size() - w.size() > max_insertions.value_or(w2.size())) {
    throw Error(ErrorCode::kStutterDepthExceeded, "insertion bound exceeded");
  }
  if (w.empty() || w2.empty()) return w == w2;
  if (w2.size() < w.size() || !(w2.front() == w.front())) return false;
  const std::size_t width = w.front().size();
  if (width > 32) throw Error(ErrorCode::kInvalidArgument, "problem configurations wider than 32 processes");

  using Node = std::pair<std::size_t, std::uint32_t>;  // (matched index in w, switched components)
  std::vector<Node> current{{0, 0}};
  std::vector<Node> next;
  for (std::size_t pos = 1; pos < w2.size(); ++pos) {
    const ProblemConfig& x = w2[pos];
    if (x.size() != width) return false;
    next.clear();
    for (const auto& [j, mask] : current) {
      if (j + 1 >= w.size()) continue;
      const ProblemConfig& a = w[j];
      const ProblemConfig& b = w[j + 1];
      if (x == b) next.emplace_back(j + 1, 0);
      std::uint32_t m = mask;
      bool ok = true;
      for (std::size_t i = 0; i < width && ok; ++i) {
        const std::uint32_t bit = std::uint32_t{1} << i;
        if (a[i] == b[i]) {
          ok = x[i] == a[i];
        } else if (x[i] == a[i]) {
          ok = (mask & bit) == 0;
        } else if (x[i] == b[i]) {
          m |= bit;
        } else {
          ok = false;
        }
      }
      if (ok) next.emplace_back(j, m);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) return false;
    std::swap(current, next);
  }
  return std::any_of(current.begin(), current.end(), [&](const Node& node) { return node.first + 1 == w.size(); });
}

inline std::string format_config(const ProblemConfig& c) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) out += ' ';
    out += c[i];
  }
  return out + "]";
}

inline std::string format_sequence(const ProblemSeq& w) {
  std::string out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k > 0) out += " -> ";
    out += format_config(w[k]);
  }
  return out;
}

}  // namespace fdlab
