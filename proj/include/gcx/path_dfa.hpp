#pragma once

// Deterministic automata over root-to-node label paths for child/descendant
// step sequences, with a default (`%`) transition per state.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gcx/error.hpp"
#include "gcx/xpath.hpp"

namespace gcx {

/// Default bound on the number of automaton states built from a query.
inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 16;

struct PathDfa {
  struct State {
    std::map<std::string, std::uint32_t> exceptions;  // label -> target
    std::uint32_t fallback = 0;                      // the `%` transition
    bool final = false;
  };
  std::vector<State> states;
  std::uint32_t initial = 0;

  std::uint32_t next(std::uint32_t q, std::string_view label) const {
    const auto& s = states[q];
    auto it = s.exceptions.find(std::string(label));
    return it == s.exceptions.end() ? s.fallback : it->second;
  }

  /// Runs the automaton on a label sequence; true iff it ends in a final state.
  template <class Range>
  bool accepts(const Range& labels) const {
    std::uint32_t q = initial;
    for (const auto& w : labels) q = next(q, w);
    return states[q].final;
  }
};

namespace detail {

/// Coarsest partition refining `block` such that equivalent states have
/// equal signatures; `signature(s, blocks, out)` appends the block-level
/// signature of state s. Returns the final block of each state, numbered
/// densely in order of first appearance.
template <class Signature>
std::vector<std::uint32_t> refine_partition(std::vector<std::uint32_t> block, Signature signature) {
  const auto n = block.size();
  for (;;) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
    std::vector<std::uint32_t> next(n);
    std::vector<std::uint32_t> sig;
    for (std::size_t s = 0; s < n; ++s) {
      sig.assign(1, block[s]);
      signature(s, block, sig);
      next[s] = ids.emplace(sig, static_cast<std::uint32_t>(ids.size())).first->second;
    }
    std::size_t before = 0;
    {
      std::vector<std::uint32_t> seen = block;
      std::sort(seen.begin(), seen.end());
      before = static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
    }
    if (ids.size() == before) return next;
    block = std::move(next);
  }
}

/// Distinct names of a step sequence in order of first use; the `%` class
/// (any other label) is implicit.
inline std::vector<std::string> query_alphabet(const std::vector<Step>& steps) {
  std::vector<std::string> out;
  for (const auto& s : steps)
    if (!s.wildcard() && std::find(out.begin(), out.end(), s.name) == out.end())
      out.push_back(s.name);
  return out;
}

}  // namespace detail

/// Minimal total DFA accepting exactly the label paths (root first) of the
/// nodes selected by a child/descendant step sequence. The dead sink, if
/// reachable, is kept. States are numbered breadth-first from the initial
/// state, following transitions in query-name order and then `%`.
inline PathDfa segment_to_dfa(const std::vector<Step>& steps, std::size_t cap = kDefaultStateCap) {
  for (const auto& s : steps)
    if (s.axis == Axis::FollowingSibling)
      throw Error("segment_to_dfa: following-sibling step in a child/descendant segment");
  const auto n = static_cast<std::uint32_t>(steps.size());
  const auto names = detail::query_alphabet(steps);
  const std::size_t classes = names.size() + 1;  // last class is `%`

  // Position p means steps 1..p are matched, the last one at the current node.
  auto step_on = [&](const std::vector<std::uint32_t>& set, std::size_t c) {
    std::vector<std::uint32_t> out;
    for (auto p : set) {
      if (p == n) continue;
      const Step& s = steps[p];
      if (s.axis == Axis::Descendant) out.push_back(p);
      if (s.wildcard() || (c < names.size() && s.name == names[c])) out.push_back(p + 1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::map<std::vector<std::uint32_t>, std::uint32_t> index;
  std::vector<std::vector<std::uint32_t>> subsets;
  std::vector<std::vector<std::uint32_t>> delta;
  auto intern = [&](std::vector<std::uint32_t> set) {
    auto [it, inserted] = index.emplace(set, static_cast<std::uint32_t>(subsets.size()));
    if (inserted) {
      if (subsets.size() >= cap)
        throw LimitExceeded("query automaton exceeds the cap of " + std::to_string(cap) + " states");
      subsets.push_back(std::move(set));
    }
    return it->second;
  };
  intern({0});
  for (std::uint32_t s = 0; s < subsets.size(); ++s) {
    std::vector<std::uint32_t> row(classes);
    for (std::size_t c = 0; c < classes; ++c) row[c] = intern(step_on(subsets[s], c));
    delta.push_back(std::move(row));
  }

  std::vector<std::uint32_t> block(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s)
    block[s] = std::binary_search(subsets[s].begin(), subsets[s].end(), n) ? 1 : 0;
  block = detail::refine_partition(std::move(block), [&](std::size_t s, const auto& b, auto& sig) {
    for (auto t : delta[s]) sig.push_back(b[t]);
  });

  // Breadth-first renumbering of the quotient.
  std::vector<std::uint32_t> rep_of_block(subsets.size(), UINT32_MAX);
  for (std::uint32_t s = 0; s < subsets.size(); ++s)
    if (rep_of_block[block[s]] == UINT32_MAX) rep_of_block[block[s]] = s;
  std::vector<std::uint32_t> number(subsets.size(), UINT32_MAX);
  std::vector<std::uint32_t> order;
  std::queue<std::uint32_t> queue;
  number[block[0]] = 0;
  order.push_back(block[0]);
  queue.push(block[0]);
  while (!queue.empty()) {
    const auto b = queue.front();
    queue.pop();
    for (auto t : delta[rep_of_block[b]]) {
      if (number[block[t]] == UINT32_MAX) {
        number[block[t]] = static_cast<std::uint32_t>(order.size());
        order.push_back(block[t]);
        queue.push(block[t]);
      }
    }
  }

  PathDfa dfa;
  dfa.states.resize(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    const auto rep = rep_of_block[order[i]];
    auto& st = dfa.states[i];
    st.final = std::binary_search(subsets[rep].begin(), subsets[rep].end(), n);
    st.fallback = number[block[delta[rep][names.size()]]];
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto t = number[block[delta[rep][c]]];
      if (t != st.fallback) st.exceptions.emplace(names[c], t);
    }
  }
  return dfa;
}

/// A renaming-invariant description of the reachable part of a DFA:
/// states are renumbered breadth-first from the initial state, following
/// exceptions in label order and then the default.
inline std::string canonical_form(const PathDfa& d) {
  std::vector<std::uint32_t> number(d.states.size(), UINT32_MAX);
  std::vector<std::uint32_t> order{d.initial};
  number[d.initial] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& st = d.states[order[i]];
    auto visit = [&](std::uint32_t t) {
      if (number[t] == UINT32_MAX) {
        number[t] = static_cast<std::uint32_t>(order.size());
        order.push_back(t);
      }
    };
    for (const auto& [label, t] : st.exceptions)
      if (t != st.fallback) visit(t);
    visit(st.fallback);
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& st = d.states[order[i]];
    os << i << (st.final ? "*" : "") << ':';
    for (const auto& [label, t] : st.exceptions)
      if (t != st.fallback) os << ' ' << label << "->" << number[t];
    os << " %->" << number[st.fallback] << '\n';
  }
  return os.str();
}

}  // namespace gcx
