#pragma once

// Straight-line linear tree (SLT) grammars.
//
// A grammar maps each nonterminal A of rank k to a right-hand side tree
// whose nodes are labels (two children), `_` leaves, parameter leaves
// y1..yk (each exactly once, in pre-order) or nonterminal occurrences with
// as many children as the referenced nonterminal's rank.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gcx/bigint.hpp"
#include "gcx/error.hpp"

namespace gcx {

using NonterminalId = std::uint32_t;

enum class SymbolKind : std::uint8_t { Terminal, Underscore, Parameter, Nonterminal };

struct RhsNode {
  SymbolKind kind = SymbolKind::Underscore;
  std::string label;          // Terminal only
  bool marked = false;        // Terminal only
  std::uint32_t index = 0;    // Parameter: 0-based i of y_{i+1}; Nonterminal: id
  std::vector<std::uint32_t> children;
};

/// A right-hand side tree stored as an arena; node 0 is not necessarily the
/// root, use root().
class RhsTree {
 public:
  using NodeId = std::uint32_t;

  NodeId add_terminal(std::string label, bool marked = false) {
    RhsNode n;
    n.kind = SymbolKind::Terminal;
    n.label = std::move(label);
    n.marked = marked;
    return push(std::move(n));
  }
  NodeId add_underscore() { return push(RhsNode{}); }
  NodeId add_parameter(std::uint32_t i) {
    RhsNode n;
    n.kind = SymbolKind::Parameter;
    n.index = i;
    return push(std::move(n));
  }
  NodeId add_nonterminal(NonterminalId id) {
    RhsNode n;
    n.kind = SymbolKind::Nonterminal;
    n.index = id;
    return push(std::move(n));
  }
  void add_child(NodeId parent, NodeId child) { nodes_[parent].children.push_back(child); }
  void set_root(NodeId id) { root_ = id; }

  /// Copies the subtree at `x` of `other` into this arena; returns the copy's root.
  NodeId copy_from(const RhsTree& other, NodeId x) {
    std::vector<std::pair<NodeId, NodeId>> stack;  // (source node, parent copy)
    NodeId result = 0;
    constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();
    stack.emplace_back(x, kNoParent);
    while (!stack.empty()) {
      auto [src, parent] = stack.back();
      stack.pop_back();
      RhsNode copy = other.nodes_[src];
      copy.children.clear();
      const NodeId id = push(std::move(copy));
      if (parent == kNoParent) result = id;
      else nodes_[parent].children.push_back(id);
      const auto& ch = other.nodes_[src].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, id);
    }
    return result;
  }

  NodeId root() const noexcept { return root_; }
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const RhsNode& node(NodeId id) const { return nodes_[id]; }
  RhsNode& node(NodeId id) { return nodes_[id]; }
  const std::vector<RhsNode>& nodes() const noexcept { return nodes_; }

  /// Node ids reachable from the root, in pre-order.
  std::vector<NodeId> preorder() const {
    std::vector<NodeId> order;
    if (nodes_.empty()) return order;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      order.push_back(id);
      const auto& ch = nodes_[id].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return order;
  }

  /// Number of edges of the tree reachable from the root.
  std::size_t edge_count() const {
    const auto n = preorder().size();
    return n == 0 ? 0 : n - 1;
  }

 private:
  NodeId push(RhsNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  std::vector<RhsNode> nodes_;
  NodeId root_ = 0;
};

struct Nonterminal {
  std::string name;
  std::size_t rank = 0;
  RhsTree rhs;
};

/// Rules are kept by value; invariants are checked by validate(), not on
/// construction, so intermediate (e.g. disconnected) grammars are representable.
class SltGrammar {
 public:
  NonterminalId declare(std::string name, std::size_t rank) {
    if (index_.count(name) != 0) throw Error("duplicate nonterminal '" + name + "'");
    const auto id = static_cast<NonterminalId>(rules_.size());
    index_.emplace(name, id);
    rules_.push_back(Nonterminal{std::move(name), rank, {}});
    return id;
  }

  NonterminalId add(std::string name, std::size_t rank, RhsTree rhs) {
    const auto id = declare(std::move(name), rank);
    rules_[id].rhs = std::move(rhs);
    return id;
  }

  void set_rhs(NonterminalId id, RhsTree rhs) { rules_[id].rhs = std::move(rhs); }
  void set_start(NonterminalId id) { start_ = id; }

  NonterminalId start() const noexcept { return start_; }
  std::size_t nonterminal_count() const noexcept { return rules_.size(); }
  const Nonterminal& nonterminal(NonterminalId id) const { return rules_[id]; }
  const RhsTree& rhs(NonterminalId id) const { return rules_[id].rhs; }
  const std::string& name(NonterminalId id) const { return rules_[id].name; }
  std::size_t rank(NonterminalId id) const { return rules_[id].rank; }
  const std::vector<Nonterminal>& rules() const noexcept { return rules_; }

  std::optional<NonterminalId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<Nonterminal> rules_;
  std::unordered_map<std::string, NonterminalId> index_;
  NonterminalId start_ = 0;
};

//===----------------------------------------------------------------------===//
// Size, rank, hierarchical order
//===----------------------------------------------------------------------===//

/// Sum of the edge counts of all right-hand sides.
inline std::size_t grammar_size(const SltGrammar& g) {
  std::size_t total = 0;
  for (const auto& nt : g.rules()) total += nt.rhs.edge_count();
  return total;
}

/// Maximum rank over all nonterminals.
inline std::size_t grammar_rank(const SltGrammar& g) {
  std::size_t r = 0;
  for (const auto& nt : g.rules()) r = std::max(r, nt.rank);
  return r;
}

/// Nonterminals referenced in P(a), without duplicates, in pre-order of first use.
inline std::vector<NonterminalId> referenced(const SltGrammar& g, NonterminalId a) {
  std::vector<NonterminalId> out;
  const auto& rhs = g.rhs(a);
  for (auto id : rhs.preorder()) {
    const auto& n = rhs.node(id);
    if (n.kind == SymbolKind::Nonterminal &&
        std::find(out.begin(), out.end(), n.index) == out.end())
      out.push_back(n.index);
  }
  return out;
}

namespace detail {

// Post-order over H_G from the given roots. Returns nullopt if a cycle is
// reachable from them.
inline std::optional<std::vector<NonterminalId>> postorder_from(
    const SltGrammar& g, const std::vector<NonterminalId>& roots) {
  enum : std::uint8_t { kNew, kActive, kDone };
  std::vector<std::uint8_t> state(g.nonterminal_count(), kNew);
  std::vector<std::vector<NonterminalId>> succ(g.nonterminal_count());
  for (NonterminalId a = 0; a < g.nonterminal_count(); ++a) {
    for (auto b : referenced(g, a))
      if (b < g.nonterminal_count()) succ[a].push_back(b);
  }
  std::vector<NonterminalId> order;
  std::vector<std::pair<NonterminalId, std::size_t>> stack;
  for (auto r : roots) {
    if (state[r] != kNew) continue;
    stack.emplace_back(r, 0);
    state[r] = kActive;
    while (!stack.empty()) {
      auto& [a, next] = stack.back();
      if (next < succ[a].size()) {
        const auto b = succ[a][next++];
        if (state[b] == kActive) return std::nullopt;
        if (state[b] == kNew) {
          state[b] = kActive;
          stack.emplace_back(b, 0);
        }
      } else {
        state[a] = kDone;
        order.push_back(a);
        stack.pop_back();
      }
    }
  }
  return order;
}

}  // namespace detail

/// Nonterminals ordered so that every B occurring in P(A) precedes A.
/// Covers all nonterminals, reachable or not. Throws on a cyclic hierarchy.
inline std::vector<NonterminalId> topo_order(const SltGrammar& g) {
  std::vector<NonterminalId> roots;
  if (g.nonterminal_count() > 0) roots.push_back(g.start());
  for (NonterminalId a = 0; a < g.nonterminal_count(); ++a) roots.push_back(a);
  auto order = detail::postorder_from(g, roots);
  if (!order) throw Error("hierarchical order is cyclic");
  return *order;
}

/// Restriction of g to the nonterminals reachable from its start symbol.
/// Relative rule order is preserved.
inline SltGrammar remove_unreachable(const SltGrammar& g) {
  const auto n = g.nonterminal_count();
  std::vector<bool> reach(n, false);
  std::vector<NonterminalId> stack{g.start()};
  reach[g.start()] = true;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (auto b : referenced(g, a)) {
      if (b < n && !reach[b]) {
        reach[b] = true;
        stack.push_back(b);
      }
    }
  }
  std::vector<NonterminalId> remap(n, 0);
  SltGrammar out;
  for (NonterminalId a = 0; a < n; ++a)
    if (reach[a]) remap[a] = out.declare(g.name(a), g.rank(a));
  for (NonterminalId a = 0; a < n; ++a) {
    if (!reach[a]) continue;
    RhsTree rhs = g.rhs(a);
    for (std::uint32_t i = 0; i < rhs.node_count(); ++i) {
      auto& node = rhs.node(i);
      if (node.kind == SymbolKind::Nonterminal && node.index < n) node.index = remap[node.index];
    }
    out.set_rhs(remap[a], std::move(rhs));
  }
  out.set_start(remap[g.start()]);
  return out;
}

//===----------------------------------------------------------------------===//
// Validation
//===----------------------------------------------------------------------===//

/// All invariant violations of g; empty means valid.
inline std::vector<std::string> validate(const SltGrammar& g) {
  std::vector<std::string> out;
  const auto n = g.nonterminal_count();
  if (n == 0) {
    out.push_back("grammar has no rules");
    return out;
  }
  if (g.start() >= n) {
    out.push_back("start symbol is undefined");
    return out;
  }
  if (g.rank(g.start()) != 0)
    out.push_back(g.name(g.start()) + ": start nonterminal must have rank 0");

  bool refs_ok = true;
  for (NonterminalId a = 0; a < n; ++a) {
    const auto& nt = g.nonterminal(a);
    const auto& rhs = nt.rhs;
    if (rhs.empty()) {
      out.push_back(nt.name + ": empty right-hand side");
      continue;
    }
    // Pre-order walk carrying the child-index path for diagnostics.
    std::vector<std::pair<RhsTree::NodeId, std::string>> stack{{rhs.root(), "root"}};
    std::vector<std::uint32_t> seen_params;
    while (!stack.empty()) {
      auto [id, path] = stack.back();
      stack.pop_back();
      const auto& node = rhs.node(id);
      const auto where = nt.name + " at " + path + ": ";
      std::size_t expected = 0;
      switch (node.kind) {
        case SymbolKind::Terminal:
          expected = 2;
          if (node.label.empty()) out.push_back(where + "empty label");
          break;
        case SymbolKind::Underscore:
          break;
        case SymbolKind::Parameter:
          if (node.index >= nt.rank)
            out.push_back(where + "parameter y" + std::to_string(node.index + 1) +
                          " exceeds rank " + std::to_string(nt.rank));
          seen_params.push_back(node.index);
          break;
        case SymbolKind::Nonterminal:
          if (node.index >= n) {
            out.push_back(where + "reference to undefined nonterminal #" +
                          std::to_string(node.index));
            refs_ok = false;
            expected = node.children.size();
          } else {
            expected = g.rank(node.index);
          }
          break;
      }
      if (node.children.size() != expected)
        out.push_back(where + "has " + std::to_string(node.children.size()) +
                      " children, expected " + std::to_string(expected));
      for (std::size_t i = node.children.size(); i-- > 0;)
        stack.emplace_back(node.children[i],
                           path == "root" ? std::to_string(i) : path + "." + std::to_string(i));
    }
    std::vector<std::uint32_t> sorted = seen_params;
    std::sort(sorted.begin(), sorted.end());
    bool exact = sorted.size() == nt.rank;
    for (std::size_t i = 0; exact && i < sorted.size(); ++i) exact = sorted[i] == i;
    if (!exact) {
      out.push_back(nt.name + ": each of y1..y" + std::to_string(nt.rank) +
                    " must occur exactly once");
    } else if (seen_params != sorted) {
      out.push_back(nt.name + ": parameters do not appear in pre-order y1, y2, ...");
    }
  }
  if (!refs_ok) return out;

  std::vector<NonterminalId> all;
  for (NonterminalId a = 0; a < n; ++a) all.push_back(a);
  if (!detail::postorder_from(g, all)) {
    out.push_back("hierarchical order is cyclic");
    return out;
  }
  const auto reachable = detail::postorder_from(g, {g.start()});
  if (reachable && reachable->size() != n) {
    std::vector<bool> r(n, false);
    for (auto a : *reachable) r[a] = true;
    for (NonterminalId a = 0; a < n; ++a)
      if (!r[a]) out.push_back(g.name(a) + ": not reachable from the start symbol");
  }
  return out;
}

inline void check_valid(const SltGrammar& g) {
  auto v = validate(g);
  if (!v.empty()) throw ValidationError(std::move(v));
}

//===----------------------------------------------------------------------===//
// Pre-order walks over right-hand sides
//===----------------------------------------------------------------------===//

/// Walks a right-hand side in the pre-order of its expansion and reports:
///   open(node) / close(node) for a terminal, close coming after its left
///     (first-child) subtree and before its right (next-sibling) subtree;
///   parameter(i) at y_{i+1};
///   chunk(B, j) where chunk j of a nested nonterminal B sits in the
///     traversal (chunk 0 first, then child 1, chunk 1, ..., chunk m).
template <class Visitor>
void walk_rhs(const RhsTree& t, Visitor&& v) {
  if (t.empty()) return;
  struct Item {
    enum Kind : std::uint8_t { Visit, Close, Chunk } kind;
    RhsTree::NodeId node;
    std::uint32_t chunk;
  };
  std::vector<Item> stack{{Item::Visit, t.root(), 0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const RhsNode& n = t.node(it.node);
    if (it.kind == Item::Close) {
      v.close(it.node, n);
      continue;
    }
    if (it.kind == Item::Chunk) {
      v.chunk(n.index, it.chunk);
      continue;
    }
    switch (n.kind) {
      case SymbolKind::Terminal:
        v.open(it.node, n);
        stack.push_back({Item::Visit, n.children[1], 0});
        stack.push_back({Item::Close, it.node, 0});
        stack.push_back({Item::Visit, n.children[0], 0});
        break;
      case SymbolKind::Underscore:
        break;
      case SymbolKind::Parameter:
        v.parameter(n.index);
        break;
      case SymbolKind::Nonterminal: {
        const auto m = static_cast<std::uint32_t>(n.children.size());
        for (std::uint32_t j = m; j > 0; --j) {
          stack.push_back({Item::Chunk, it.node, j});
          stack.push_back({Item::Visit, n.children[j - 1], 0});
        }
        v.chunk(n.index, 0);
        break;
      }
    }
  }
}

/// Number of labeled nodes in each chunk of each nonterminal: entry [A][c]
/// counts the terminals of val(A) lying between y_c and y_{c+1}.
inline std::vector<std::vector<BigInt>> chunk_lengths(const SltGrammar& g) {
  std::vector<std::vector<BigInt>> len(g.nonterminal_count());
  for (auto a : topo_order(g)) {
    std::vector<BigInt> cur(g.rank(a) + 1);
    std::size_t c = 0;
    struct V {
      std::vector<BigInt>& cur;
      std::size_t& c;
      const std::vector<std::vector<BigInt>>& len;
      void open(RhsTree::NodeId, const RhsNode&) { cur[c] += 1; }
      void close(RhsTree::NodeId, const RhsNode&) {}
      void parameter(std::uint32_t i) { c = i + 1; }
      void chunk(NonterminalId b, std::uint32_t j) { cur[c] += len[b][j]; }
    } v{cur, c, len};
    walk_rhs(g.rhs(a), v);
    len[a] = std::move(cur);
  }
  return len;
}

/// Number of labeled nodes of val(g).
inline BigInt expansion_size(const SltGrammar& g) {
  return chunk_lengths(g)[g.start()][0];
}

/// A name not in `taken`, derived from `base`; the result is added to `taken`.
inline std::string fresh_name(std::string base, std::unordered_set<std::string>& taken) {
  std::string name = base;
  for (std::size_t i = 1; taken.count(name) != 0; ++i) name = base + "'" + std::to_string(i);
  taken.insert(name);
  return name;
}

/// All terminal labels used anywhere in g.
inline std::unordered_set<std::string> labels_of(const SltGrammar& g) {
  std::unordered_set<std::string> out;
  for (const auto& nt : g.rules())
    for (const auto& n : nt.rhs.nodes())
      if (n.kind == SymbolKind::Terminal) out.insert(n.label);
  return out;
}

}  // namespace gcx
