#pragma once

// Translation of fragment queries into DST automata.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "gcx/dst.hpp"
#include "gcx/error.hpp"
#include "gcx/path_dfa.hpp"
#include "gcx/xpath.hpp"

namespace gcx {

/// Lifts a path DFA to a DST automaton: a transition q -a-> q' becomes
/// (q,a) -> (q',q), selecting when q' is final.
inline DstAutomaton dfa_to_dst(const PathDfa& d) {
  DstAutomaton a;
  for (std::size_t i = 0; i < d.states.size(); ++i) a.add_state("q" + std::to_string(i));
  a.set_initial(d.initial);
  for (StateId q = 0; q < d.states.size(); ++q) {
    const auto& st = d.states[q];
    for (const auto& [label, t] : st.exceptions) a.add_rule(q, label, t, q, d.states[t].final);
    a.add_rule(q, std::string(kDefaultLabel), st.fallback, q, d.states[st.fallback].final);
  }
  return a;
}

/// A DST automaton selecting exactly the nodes the query selects, when run
/// from the document root.
///
/// Construction: an NFA state i (1..n) waits for a node matching step i;
/// reading a node, it survives to the first child and/or the next sibling
/// according to the step's axis, and a match moves step i+1 to the first
/// child (child/descendant) or the next sibling (following-sibling).
/// Subset construction gives a deterministic automaton, states from which
/// no selection is reachable collapse into `dead`, and the result is
/// minimized. A marker for "the parent was selected" keeps the final
/// states of the corresponding path DFA distinct.
inline DstAutomaton query_to_dst(const XPathQuery& q, std::size_t cap = kDefaultStateCap) {
  const auto& steps = q.steps;
  if (steps.empty()) throw Error("query has no steps");
  if (steps.front().axis == Axis::FollowingSibling)
    throw Error("a query cannot start with the following-sibling axis");
  const auto n = static_cast<std::uint32_t>(steps.size());
  const std::uint32_t acc = n + 1;
  const auto names = detail::query_alphabet(steps);
  const std::size_t classes = names.size() + 1;  // last class is `%`

  struct Move {
    std::uint32_t left;
    std::uint32_t right;
    bool selecting;
  };
  using Set = std::vector<std::uint32_t>;

  std::map<Set, std::uint32_t> index;
  std::vector<Set> sets;
  std::vector<std::vector<Move>> moves;
  auto intern = [&](Set s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    auto [it, inserted] = index.emplace(s, static_cast<std::uint32_t>(sets.size()));
    if (inserted) {
      if (sets.size() >= cap)
        throw LimitExceeded("query automaton exceeds the cap of " + std::to_string(cap) + " states");
      sets.push_back(std::move(s));
    }
    return it->second;
  };
  intern({1});
  for (std::uint32_t s = 0; s < sets.size(); ++s) {
    std::vector<Move> row;
    for (std::size_t c = 0; c < classes; ++c) {
      Set left, right;
      bool selecting = false;
      for (auto i : sets[s]) {
        if (i == acc) {
          right.push_back(acc);
          continue;
        }
        const Step& st = steps[i - 1];
        right.push_back(i);
        if (st.axis == Axis::Descendant) left.push_back(i);
        if (!(st.wildcard() || (c < names.size() && st.name == names[c]))) continue;
        if (i == n) {
          selecting = true;
          left.push_back(acc);
        } else if (steps[i].axis == Axis::FollowingSibling) {
          right.push_back(i + 1);
        } else {
          left.push_back(i + 1);
        }
      }
      const auto l = intern(std::move(left));
      const auto r = intern(std::move(right));
      row.push_back({l, r, selecting});
    }
    moves.push_back(std::move(row));
  }
  const auto m = sets.size();

  // Live states can still reach a selecting move.
  std::vector<bool> live(m, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < m; ++s) {
      if (live[s]) continue;
      for (const auto& mv : moves[s]) {
        if (mv.selecting || live[mv.left] || live[mv.right]) {
          live[s] = true;
          changed = true;
          break;
        }
      }
    }
  }

  // Blocks: 0 = dead, 1 = live without marker, 2 = live with marker.
  std::vector<std::uint32_t> block(m);
  for (std::size_t s = 0; s < m; ++s) {
    const bool marker = std::binary_search(sets[s].begin(), sets[s].end(), acc);
    block[s] = !live[s] ? 0 : marker ? 2 : 1;
  }
  block = detail::refine_partition(std::move(block), [&](std::size_t s, const auto& b, auto& sig) {
    if (!live[s]) return;
    for (const auto& mv : moves[s]) {
      sig.push_back(mv.selecting ? 1 : 0);
      sig.push_back(live[mv.left] ? b[mv.left] + 1 : 0);
      sig.push_back(live[mv.right] ? b[mv.right] + 1 : 0);
    }
  });
  const std::uint32_t dead_block = UINT32_MAX;
  auto block_of = [&](std::uint32_t s) { return live[s] ? block[s] : dead_block; };

  // Breadth-first numbering; all dead states share one block.
  std::map<std::uint32_t, std::uint32_t> rep;
  for (std::uint32_t s = 0; s < m; ++s) rep.emplace(block_of(s), s);
  std::map<std::uint32_t, StateId> number;
  std::vector<std::uint32_t> order;
  std::queue<std::uint32_t> queue;
  auto visit = [&](std::uint32_t b) {
    if (number.count(b) != 0) return;
    number.emplace(b, static_cast<StateId>(order.size()));
    order.push_back(b);
    if (b != dead_block) queue.push(b);
  };
  visit(block_of(0));
  while (!queue.empty()) {
    const auto b = queue.front();
    queue.pop();
    for (const auto& mv : moves[rep[b]]) {
      visit(block_of(mv.left));
      visit(block_of(mv.right));
    }
  }

  DstAutomaton a;
  std::uint32_t counter = 0;
  for (auto b : order) a.add_state(b == dead_block ? "dead" : "q" + std::to_string(counter++));
  a.set_initial(0);
  for (auto b : order) {
    const StateId q = number[b];
    if (b == dead_block) {
      a.add_rule(q, std::string(kDefaultLabel), q, q, false);
      continue;
    }
    const auto& row = moves[rep[b]];
    auto target = [&](const Move& mv) {
      return std::make_tuple(number[block_of(mv.left)], number[block_of(mv.right)], mv.selecting);
    };
    const auto dflt = target(row[names.size()]);
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto t = target(row[c]);
      if (t != dflt) a.add_rule(q, names[c], std::get<0>(t), std::get<1>(t), std::get<2>(t));
    }
    a.add_rule(q, std::string(kDefaultLabel), std::get<0>(dflt), std::get<1>(dflt),
               std::get<2>(dflt));
  }
  return a;
}

inline DstAutomaton query_to_dst(std::string_view query, std::size_t cap = kDefaultStateCap) {
  return query_to_dst(parse_xpath(query), cap);
}

}  // namespace gcx
