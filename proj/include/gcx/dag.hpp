#pragma once

// Minimal-DAG compression of binary trees (as 0-SLT grammars) and the node
// normal form of 0-SLT grammars.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gcx/error.hpp"
#include "gcx/grammar.hpp"
#include "gcx/tree.hpp"

namespace gcx {

namespace detail {

struct SubtreeKey {
  std::string_view label;
  bool marked;
  std::uint32_t left;
  std::uint32_t right;
  bool operator==(const SubtreeKey&) const = default;
};

struct SubtreeKeyHash {
  std::size_t operator()(const SubtreeKey& k) const noexcept {
    std::size_t h = std::hash<std::string_view>{}(k.label);
    h ^= (static_cast<std::size_t>(k.left) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    h ^= (static_cast<std::size_t>(k.right) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return h ^ static_cast<std::size_t>(k.marked);
  }
};

}  // namespace detail

/// 0-SLT grammar sharing every complete subtree that occurs at least twice.
/// The start rule is named `S` (or a fresh variant) and comes first.
inline SltGrammar build_dag(const BinTree& b) {
  SltGrammar g;
  std::unordered_set<std::string> taken;
  for (auto id : b.preorder()) taken.insert(std::string(b.label(id)));

  if (b.is_underscore()) {
    RhsTree rhs;
    rhs.set_root(rhs.add_underscore());
    g.add(fresh_name("S", taken), 0, std::move(rhs));
    return g;
  }

  // Hash-cons every subtree; class 0 stands for `_`.
  constexpr std::uint32_t kLeaf = 0;
  const auto order = b.preorder();
  std::vector<std::uint32_t> cls(b.node_count(), kLeaf);
  std::unordered_map<detail::SubtreeKey, std::uint32_t, detail::SubtreeKeyHash> classes;
  std::vector<BinTree::NodeId> representative{BinTree::kUnderscore};
  std::vector<std::size_t> occurrences{0};
  auto class_of = [&](BinTree::NodeId x) { return x == BinTree::kUnderscore ? kLeaf : cls[x]; };
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto x = *it;
    const detail::SubtreeKey key{b.label(x), b.marked(x), class_of(b.left(x)), class_of(b.right(x))};
    auto [pos, inserted] = classes.emplace(key, static_cast<std::uint32_t>(representative.size()));
    if (inserted) {
      representative.push_back(x);
      occurrences.push_back(0);
    }
    cls[x] = pos->second;
    ++occurrences[pos->second];
  }

  // Rules: start first, then shared classes bottom-up.
  const std::uint32_t root_class = cls[b.root()];
  std::vector<NonterminalId> nt_of(representative.size(), 0);
  std::vector<bool> shared(representative.size(), false);
  const auto start = g.declare(fresh_name("S", taken), 0);
  for (std::uint32_t c = 1; c < representative.size(); ++c) {
    if (occurrences[c] >= 2 && c != root_class) {
      shared[c] = true;
      nt_of[c] = g.declare(fresh_name("N" + std::to_string(c), taken), 0);
    }
  }

  auto build_rule = [&](BinTree::NodeId top) {
    RhsTree rhs;
    struct Item {
      BinTree::NodeId node;
      RhsTree::NodeId parent;
    };
    constexpr auto kNoParent = std::numeric_limits<RhsTree::NodeId>::max();
    std::vector<Item> stack{{top, kNoParent}};
    bool first = true;
    while (!stack.empty()) {
      const Item it = stack.back();
      stack.pop_back();
      RhsTree::NodeId id;
      bool expand_here = false;
      if (it.node == BinTree::kUnderscore) {
        id = rhs.add_underscore();
      } else if (!first && shared[cls[it.node]]) {
        id = rhs.add_nonterminal(nt_of[cls[it.node]]);
      } else {
        id = rhs.add_terminal(std::string(b.label(it.node)), b.marked(it.node));
        expand_here = true;
      }
      first = false;
      if (it.parent == kNoParent) rhs.set_root(id);
      else rhs.add_child(it.parent, id);
      if (expand_here) {
        stack.push_back({b.right(it.node), id});
        stack.push_back({b.left(it.node), id});
      }
    }
    return rhs;
  };

  g.set_rhs(start, build_rule(b.root()));
  for (std::uint32_t c = 1; c < representative.size(); ++c)
    if (shared[c]) g.set_rhs(nt_of[c], build_rule(representative[c]));
  g.set_start(start);
  return g;
}

/// Rewrites a rank-0 grammar so that every right-hand side is a single
/// labeled node whose children are nonterminals or `_`. Chain rules
/// (A -> B, A -> _) are inlined. The expansion and size are unchanged.
inline SltGrammar node_normal_form(const SltGrammar& g) {
  if (grammar_rank(g) != 0) throw Error("node normal form requires a rank-0 grammar");
  check_valid(g);

  // Where a reference to A ends up: a terminal-rooted rule, or `_`.
  constexpr NonterminalId kLeaf = std::numeric_limits<NonterminalId>::max();
  std::vector<NonterminalId> target(g.nonterminal_count(), kLeaf);
  for (auto a : topo_order(g)) {
    const auto& rhs = g.rhs(a);
    const auto& root = rhs.node(rhs.root());
    switch (root.kind) {
      case SymbolKind::Terminal: target[a] = a; break;
      case SymbolKind::Nonterminal: target[a] = target[root.index]; break;
      default: target[a] = kLeaf; break;
    }
  }
  if (target[g.start()] == kLeaf) throw Error("grammar generates no labeled node");

  std::unordered_set<std::string> taken = labels_of(g);
  for (const auto& nt : g.rules()) taken.insert(nt.name);

  SltGrammar out;
  std::vector<NonterminalId> new_id(g.nonterminal_count(), kLeaf);
  // Start first so that it stays the first rule.
  std::vector<NonterminalId> kept{target[g.start()]};
  for (NonterminalId a = 0; a < g.nonterminal_count(); ++a)
    if (target[a] == a && a != target[g.start()]) kept.push_back(a);
  for (auto a : kept) new_id[a] = out.declare(g.name(a), 0);

  struct Pending {
    NonterminalId owner;        // new nonterminal whose rule is being built
    const RhsTree* src;
    RhsTree::NodeId node;       // a terminal node of src
  };
  std::vector<Pending> work;
  for (auto a : kept) work.push_back({new_id[a], &g.rhs(a), g.rhs(a).root()});
  while (!work.empty()) {
    const Pending p = work.back();
    work.pop_back();
    const RhsNode& n = p.src->node(p.node);
    RhsTree rhs;
    const auto root = rhs.add_terminal(n.label, n.marked);
    rhs.set_root(root);
    for (auto child : n.children) {
      const RhsNode& c = p.src->node(child);
      RhsTree::NodeId id;
      if (c.kind == SymbolKind::Terminal) {
        const auto fresh = out.declare(fresh_name(out.name(p.owner) + "." + std::to_string(child), taken), 0);
        work.push_back({fresh, p.src, child});
        id = rhs.add_nonterminal(fresh);
      } else if (c.kind == SymbolKind::Nonterminal && target[c.index] != kLeaf) {
        id = rhs.add_nonterminal(new_id[target[c.index]]);
      } else {
        id = rhs.add_underscore();
      }
      rhs.add_child(root, id);
    }
    out.set_rhs(p.owner, std::move(rhs));
  }
  out.set_start(new_id[target[g.start()]]);
  return remove_unreachable(out);
}

}  // namespace gcx
