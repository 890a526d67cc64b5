#pragma once

// SLPs for tag serializations of SLT grammars and of selected subtrees.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "gcx/bigint.hpp"
#include "gcx/dag.hpp"
#include "gcx/engine.hpp"
#include "gcx/error.hpp"
#include "gcx/grammar.hpp"
#include "gcx/slp.hpp"

namespace gcx {

namespace detail {

/// Adds one SLP rule `A:c` per non-empty chunk c of every nonterminal A of
/// g and returns the rule ids (nullopt for empty chunks).
inline std::vector<std::vector<std::optional<Slp::Id>>> emit_chunk_rules(
    const SltGrammar& g, Slp& out, std::unordered_set<std::string>& taken) {
  std::vector<std::vector<std::optional<Slp::Id>>> ids(g.nonterminal_count());
  for (auto x : topo_order(g)) {
    std::vector<std::vector<SlpSymbol>> chunks(g.rank(x) + 1);
    std::size_t c = 0;
    struct V {
      std::vector<std::vector<SlpSymbol>>& chunks;
      std::size_t& c;
      const std::vector<std::vector<std::optional<Slp::Id>>>& ids;
      void open(RhsTree::NodeId, const RhsNode& n) {
        chunks[c].push_back(SlpSymbol::open_tag(n.label, n.marked));
      }
      void close(RhsTree::NodeId, const RhsNode& n) {
        chunks[c].push_back(SlpSymbol::close_tag(n.label, n.marked));
      }
      void parameter(std::uint32_t i) { c = i + 1; }
      void chunk(NonterminalId b, std::uint32_t j) {
        if (ids[b][j]) chunks[c].push_back(SlpSymbol::reference(*ids[b][j]));
      }
    } v{chunks, c, ids};
    walk_rhs(g.rhs(x), v);
    ids[x].resize(chunks.size());
    for (std::size_t j = 0; j < chunks.size(); ++j) {
      if (chunks[j].empty()) continue;
      ids[x][j] = out.add(fresh_name(g.name(x) + ":" + std::to_string(j), taken), std::move(chunks[j]));
    }
  }
  return ids;
}

inline std::vector<BigInt> sorted_result_set(std::vector<BigInt> r) {
  std::sort(r.begin(), r.end());
  if (std::adjacent_find(r.begin(), r.end()) != r.end())
    throw Error("result set contains a duplicate pre-order number");
  return r;
}

}  // namespace detail

/// An SLP generating the tag sequence of val(g) in pre-order: one rule per
/// non-empty chunk of every nonterminal.
inline Slp slt_to_slp(const SltGrammar& g) {
  check_valid(g);
  Slp out;
  std::unordered_set<std::string> taken;
  const auto ids = detail::emit_chunk_rules(g, out, taken);
  if (const auto s = ids[g.start()][0]) {
    out.set_start(*s);
  } else {
    out.set_start(out.add(fresh_name("S", taken), {}));
  }
  return remove_unreachable(out);
}

/// An SLP generating the concatenation of the serializations of the
/// subtrees rooted at the given pre-order numbers, in ascending order.
inline Slp subtrees_slp(const SltGrammar& g, std::vector<BigInt> r) {
  check_valid(g);
  r = detail::sorted_result_set(std::move(r));
  const auto lengths = chunk_lengths(g);
  SltGrammar h = g;
  std::unordered_set<std::string> names;
  for (const auto& nt : g.rules()) names.insert(nt.name);
  for (const auto& l : labels_of(g)) names.insert(l);
  std::vector<NonterminalId> roots;
  for (const auto& u : r)
    roots.push_back(h.add(fresh_name("S" + u.str(), names), 0, locate_subtree(g, lengths, u)));

  Slp out;
  std::unordered_set<std::string> taken;
  const auto ids = detail::emit_chunk_rules(h, out, taken);
  std::vector<SlpSymbol> start;
  for (auto x : roots) start.push_back(SlpSymbol::reference(*ids[x][0]));
  out.set_start(out.add(fresh_name("S", taken), std::move(start)));
  return remove_unreachable(out);
}

/// Same output as subtrees_slp for a rank-0 grammar, built on its node
/// normal form so that every result subtree is a single nonterminal.
inline Slp dag_subtrees_slp(const SltGrammar& g, std::vector<BigInt> r) {
  if (grammar_rank(g) != 0) throw Error("dag_subtrees_slp requires a rank-0 grammar");
  r = detail::sorted_result_set(std::move(r));
  const SltGrammar h = node_normal_form(g);
  const auto lengths = chunk_lengths(h);
  const BigInt& total = lengths[h.start()][0];

  Slp out;
  std::unordered_set<std::string> taken;
  const auto ids = detail::emit_chunk_rules(h, out, taken);
  std::vector<SlpSymbol> start;
  for (const auto& u : r) {
    if (u < 1 || u > total) throw Error("pre-order number " + u.str() + " is out of range");
    NonterminalId x = h.start();
    BigInt p = u;
    for (;;) {
      const RhsTree& t = h.rhs(x);
      const RhsNode& root = t.node(t.root());
      if (p == 1) break;
      p -= 1;
      const RhsNode& left = t.node(root.children[0]);
      if (left.kind == SymbolKind::Nonterminal) {
        if (p <= lengths[left.index][0]) {
          x = left.index;
          continue;
        }
        p -= lengths[left.index][0];
      }
      const RhsNode& right = t.node(root.children[1]);
      if (right.kind != SymbolKind::Nonterminal) throw Error("inconsistent chunk lengths");
      x = right.index;
    }
    const RhsTree& t = h.rhs(x);
    const RhsNode& root = t.node(t.root());
    start.push_back(SlpSymbol::open_tag(root.label, root.marked));
    const RhsNode& left = t.node(root.children[0]);
    if (left.kind == SymbolKind::Nonterminal) start.push_back(SlpSymbol::reference(*ids[left.index][0]));
    start.push_back(SlpSymbol::close_tag(root.label, root.marked));
  }
  out.set_start(out.add(fresh_name("S", taken), std::move(start)));
  return remove_unreachable(out);
}

}  // namespace gcx
