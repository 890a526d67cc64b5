#pragma once

// Running a DST automaton over an SLT grammar without expanding it:
// counting, relabeling, materialization of result pre-order numbers and
// serialization of result subtrees.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gcx/bigint.hpp"
#include "gcx/dst.hpp"
#include "gcx/error.hpp"
#include "gcx/expand.hpp"
#include "gcx/grammar.hpp"
#include "gcx/tree.hpp"

namespace gcx {

namespace detail {

/// The automaton's rules indexed by (state, grammar label), so that the
/// bottom-up passes do no string hashing.
class BoundAutomaton {
 public:
  BoundAutomaton(const SltGrammar& g, const DstAutomaton& a) : a_(a) {
    check_valid(a);
    std::unordered_map<std::string, std::uint32_t> column;
    column_of_.resize(g.nonterminal_count());
    for (NonterminalId x = 0; x < g.nonterminal_count(); ++x) {
      const auto& nodes = g.rhs(x).nodes();
      column_of_[x].resize(nodes.size(), 0);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].kind != SymbolKind::Terminal) continue;
        auto [it, inserted] =
            column.emplace(nodes[i].label, static_cast<std::uint32_t>(column.size()));
        column_of_[x][i] = it->second;
      }
    }
    columns_ = column.size();
    rules_.resize(a.state_count() * columns_);
    for (StateId q = 0; q < a.state_count(); ++q)
      for (const auto& [label, col] : column) rules_[q * columns_ + col] = &a.lookup(q, label);
  }

  const DstRule& rule(StateId q, NonterminalId x, RhsTree::NodeId node) const {
    return *rules_[q * columns_ + column_of_[x][node]];
  }

  const DstAutomaton& automaton() const noexcept { return a_; }

 private:
  const DstAutomaton& a_;
  std::size_t columns_ = 0;
  std::vector<std::vector<std::uint32_t>> column_of_;
  std::vector<const DstRule*> rules_;
};

}  // namespace detail

/// phi(A,q): states reaching the parameters y1..yk, and the number of
/// selections inside the right-hand side's expansion.
struct Behavior {
  std::vector<StateId> exits;
  BigInt count;
};

struct BehaviorTable {
  std::vector<std::vector<Behavior>> phi;  // [nonterminal][state]
  /// Right-hand-side edges traversed while building the table.
  std::uint64_t node_visits = 0;

  const Behavior& at(NonterminalId a, StateId q) const { return phi[a][q]; }
};

namespace detail {

/// Runs the automaton over P(x) entered in state q, consulting phi for the
/// nonterminals below. `on_node(node, state)` sees every non-`_` node with
/// the state in which it is entered.
template <class OnNode>
void simulate_rule(const SltGrammar& g, const BoundAutomaton& ba,
                   const std::vector<std::vector<Behavior>>& phi, NonterminalId x, StateId q,
                   std::uint64_t& visits, OnNode&& on_node) {
  const RhsTree& t = g.rhs(x);
  std::vector<std::pair<RhsTree::NodeId, StateId>> stack{{t.root(), q}};
  while (!stack.empty()) {
    const auto [id, s] = stack.back();
    stack.pop_back();
    const RhsNode& n = t.node(id);
    switch (n.kind) {
      case SymbolKind::Terminal: {
        const DstRule& r = ba.rule(s, x, id);
        on_node(id, s);
        stack.emplace_back(n.children[1], r.right);
        stack.emplace_back(n.children[0], r.left);
        visits += 2;
        break;
      }
      case SymbolKind::Nonterminal: {
        on_node(id, s);
        const Behavior& b = phi[n.index][s];
        for (std::size_t i = n.children.size(); i-- > 0;) stack.emplace_back(n.children[i], b.exits[i]);
        visits += n.children.size();
        break;
      }
      case SymbolKind::Parameter:
        on_node(id, s);
        break;
      case SymbolKind::Underscore:
        break;
    }
  }
}

}  // namespace detail

/// phi for every (nonterminal, state) pair, bottom-up over the hierarchy.
inline BehaviorTable build_behavior(const SltGrammar& g, const DstAutomaton& a) {
  check_valid(g);
  const detail::BoundAutomaton ba(g, a);
  BehaviorTable table;
  table.phi.resize(g.nonterminal_count());
  for (auto x : topo_order(g)) {
    const RhsTree& t = g.rhs(x);
    auto& row = table.phi[x];
    row.resize(a.state_count());
    for (StateId q = 0; q < a.state_count(); ++q) {
      Behavior out;
      out.exits.assign(g.rank(x), 0);
      detail::simulate_rule(g, ba, table.phi, x, q, table.node_visits,
                            [&](RhsTree::NodeId id, StateId s) {
                              const RhsNode& n = t.node(id);
                              switch (n.kind) {
                                case SymbolKind::Terminal:
                                  if (ba.rule(s, x, id).selecting) out.count += 1;
                                  break;
                                case SymbolKind::Nonterminal:
                                  out.count += table.phi[n.index][s].count;
                                  break;
                                case SymbolKind::Parameter:
                                  out.exits[n.index] = s;
                                  break;
                                default:
                                  break;
                              }
                            });
      row[q] = std::move(out);
    }
  }
  return table;
}

/// Number of nodes of val(g) selected by a.
inline BigInt count(const SltGrammar& g, const DstAutomaton& a) {
  return build_behavior(g, a).at(g.start(), a.initial()).count;
}

/// Name of the relabeling nonterminal for (q, A, exits).
inline std::string relabel_name(const SltGrammar& g, const DstAutomaton& a, NonterminalId x,
                                StateId q, const std::vector<StateId>& exits) {
  std::string name = a.name(q) + "." + g.name(x);
  for (auto e : exits) name += "." + a.name(e);
  return name;
}

/// A grammar for val(g) in which exactly the nodes selected by a are marked.
/// Its nonterminals are the reachable (q, A, q1..qk) tuples.
inline SltGrammar relabel(const SltGrammar& g, const DstAutomaton& a, const BehaviorTable& table) {
  const detail::BoundAutomaton ba(g, a);
  std::unordered_set<std::string> taken = labels_of(g);
  const auto n = g.nonterminal_count();
  const auto states = a.state_count();
  constexpr NonterminalId kNone = std::numeric_limits<NonterminalId>::max();
  std::vector<NonterminalId> id(n * states, kNone);
  SltGrammar out;
  auto declare = [&](NonterminalId x, StateId q) {
    id[x * states + q] =
        out.declare(fresh_name(relabel_name(g, a, x, q, table.at(x, q).exits), taken), g.rank(x));
  };
  declare(g.start(), a.initial());
  for (NonterminalId x = 0; x < n; ++x)
    for (StateId q = 0; q < states; ++q)
      if (id[x * states + q] == kNone) declare(x, q);

  std::uint64_t visits = 0;
  for (NonterminalId x = 0; x < n; ++x) {
    for (StateId q = 0; q < states; ++q) {
      RhsTree body = g.rhs(x);
      detail::simulate_rule(g, ba, table.phi, x, q, visits, [&](RhsTree::NodeId node, StateId s) {
        RhsNode& rn = body.node(node);
        if (rn.kind == SymbolKind::Terminal) rn.marked = ba.rule(s, x, node).selecting;
        else if (rn.kind == SymbolKind::Nonterminal) rn.index = id[rn.index * states + s];
      });
      out.set_rhs(id[x * states + q], std::move(body));
    }
  }
  out.set_start(id[g.start() * states + a.initial()]);
  return remove_unreachable(out);
}

inline SltGrammar relabel(const SltGrammar& g, const DstAutomaton& a) {
  return relabel(g, a, build_behavior(g, a));
}

//===----------------------------------------------------------------------===//
// Offset lists
//===----------------------------------------------------------------------===//

/// Arena of shared offset-list expressions. An expression denotes a
/// strictly increasing sequence of integers.
class OffsetArena {
 public:
  using Id = std::uint32_t;
  static constexpr Id kEmpty = std::numeric_limits<Id>::max();

  Id single(const BigInt& v) { return push({Kind::Single, v, kEmpty, kEmpty}); }

  Id concat(Id x, Id y) {
    if (x == kEmpty) return y;
    if (y == kEmpty) return x;
    return push({Kind::Concat, BigInt(0), x, y});
  }

  Id shift(const BigInt& delta, Id x) {
    if (x == kEmpty || delta == 0) return x;
    if (nodes_[x].kind == Kind::Shift)
      return push({Kind::Shift, delta + nodes_[x].value, nodes_[x].a, kEmpty});
    return push({Kind::Shift, delta, x, kEmpty});
  }

  std::size_t size() const noexcept { return nodes_.size(); }

  /// The denoted sequence, computed with an explicit stack.
  std::vector<BigInt> flatten(Id root) const {
    std::vector<BigInt> out;
    if (root == kEmpty) return out;
    std::vector<std::pair<Id, BigInt>> stack{{root, BigInt(0)}};
    while (!stack.empty()) {
      auto [x, base] = std::move(stack.back());
      stack.pop_back();
      const Node& n = nodes_[x];
      switch (n.kind) {
        case Kind::Single:
          out.push_back(base + n.value);
          break;
        case Kind::Concat:
          stack.emplace_back(n.b, base);
          stack.emplace_back(n.a, std::move(base));
          break;
        case Kind::Shift:
          stack.emplace_back(n.a, base + n.value);
          break;
      }
    }
    return out;
  }

 private:
  enum class Kind : std::uint8_t { Single, Concat, Shift };
  struct Node {
    Kind kind;
    BigInt value;
    Id a;
    Id b;
  };

  Id push(Node n) {
    if (nodes_.size() >= kEmpty) throw LimitExceeded("offset arena exhausted");
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
};

/// Per nonterminal and chunk: the number of labeled nodes and the 1-based
/// positions of marked nodes within the chunk.
struct ChunkTable {
  std::vector<std::vector<BigInt>> length;            // [A][c]
  std::vector<std::vector<OffsetArena::Id>> marks;    // [A][c]
  OffsetArena arena;

  std::vector<BigInt> offsets(NonterminalId a, std::size_t c) const {
    return arena.flatten(marks[a][c]);
  }
};

/// Chunk lengths and mark offsets of a (relabeled) grammar, bottom-up.
inline ChunkTable build_chunks(const SltGrammar& g) {
  ChunkTable t;
  t.length.resize(g.nonterminal_count());
  t.marks.resize(g.nonterminal_count());
  for (auto x : topo_order(g)) {
    std::vector<BigInt> len(g.rank(x) + 1);
    std::vector<OffsetArena::Id> marks(g.rank(x) + 1, OffsetArena::kEmpty);
    std::size_t c = 0;
    struct V {
      ChunkTable& t;
      std::vector<BigInt>& len;
      std::vector<OffsetArena::Id>& marks;
      std::size_t& c;
      void open(RhsTree::NodeId, const RhsNode& n) {
        len[c] += 1;
        if (n.marked) marks[c] = t.arena.concat(marks[c], t.arena.single(len[c]));
      }
      void close(RhsTree::NodeId, const RhsNode&) {}
      void parameter(std::uint32_t i) { c = i + 1; }
      void chunk(NonterminalId b, std::uint32_t j) {
        const auto inner = t.marks[b][j];
        if (inner != OffsetArena::kEmpty)
          marks[c] = t.arena.concat(marks[c], t.arena.shift(len[c], inner));
        len[c] += t.length[b][j];
      }
    } v{t, len, marks, c};
    walk_rhs(g.rhs(x), v);
    t.length[x] = std::move(len);
    t.marks[x] = std::move(marks);
  }
  return t;
}

/// Result of materialization, with the instrumentation used by the bounds checks.
struct Materialized {
  std::vector<BigInt> ids;
  std::size_t offset_nodes = 0;
  std::size_t relabeled_size = 0;
};

inline Materialized materialize_detailed(const SltGrammar& g, const DstAutomaton& a) {
  const SltGrammar gp = relabel(g, a);
  const ChunkTable chunks = build_chunks(gp);
  return {chunks.offsets(gp.start(), 0), chunks.arena.size(), grammar_size(gp)};
}

/// Ascending pre-order numbers of the nodes of val(g) selected by a.
inline std::vector<BigInt> materialize(const SltGrammar& g, const DstAutomaton& a) {
  return materialize_detailed(g, a).ids;
}

//===----------------------------------------------------------------------===//
// Locating nodes and serializing their subtrees
//===----------------------------------------------------------------------===//

/// A sentential term over g's nonterminals whose root is the labeled node
/// with pre-order number u (1-based) and whose expansion is that node's
/// unranked subtree: its next-sibling part is replaced by `_`.
/// `lengths` is chunk_lengths(g).
inline RhsTree locate_subtree(const SltGrammar& g, const std::vector<std::vector<BigInt>>& lengths,
                              const BigInt& u) {
  if (u < 1 || u > lengths[g.start()][0])
    throw Error("pre-order number " + u.str() + " is out of range");

  // Descend, remembering for every level the rule and the occurrence that
  // binds its parameters.
  struct Level {
    NonterminalId rule;
    RhsTree::NodeId occurrence;  // in the previous level's rule
  };
  std::vector<Level> path{{g.start(), 0}};
  BigInt p = u;
  RhsTree::NodeId found = 0;
  for (bool done = false; !done;) {
    const NonterminalId x = path.back().rule;
    const RhsTree& t = g.rhs(x);
    struct Item {
      bool chunk;
      RhsTree::NodeId node;
      std::uint32_t j;
    };
    std::vector<Item> stack{{false, t.root(), 0}};
    bool descended = false;
    while (!stack.empty() && !descended && !done) {
      const Item it = stack.back();
      stack.pop_back();
      const RhsNode& n = t.node(it.node);
      if (it.chunk) {
        const BigInt& len = lengths[n.index][it.j];
        if (p <= len) {
          BigInt local = p;
          for (std::uint32_t i = 0; i < it.j; ++i) local += lengths[n.index][i];
          p = std::move(local);
          path.push_back({n.index, it.node});
          descended = true;
        } else {
          p -= len;
        }
        continue;
      }
      switch (n.kind) {
        case SymbolKind::Terminal:
          if (p == 1) {
            found = it.node;
            done = true;
          } else {
            p -= 1;
            stack.push_back({false, n.children[1], 0});
            stack.push_back({false, n.children[0], 0});
          }
          break;
        case SymbolKind::Nonterminal:
          for (std::uint32_t j = static_cast<std::uint32_t>(n.children.size()); j > 0; --j) {
            stack.push_back({true, it.node, j});
            stack.push_back({false, n.children[j - 1], 0});
          }
          stack.push_back({true, it.node, 0});
          break;
        default:
          break;
      }
    }
    if (!descended && !done) throw Error("inconsistent chunk lengths");
  }

  // Copy the left subtree of the found node, resolving parameters through
  // the enclosing occurrences.
  RhsTree out;
  const RhsNode& top = g.rhs(path.back().rule).node(found);
  const auto root = out.add_terminal(top.label, top.marked);
  out.set_root(root);
  struct Copy {
    std::size_t level;
    RhsTree::NodeId node;
    RhsTree::NodeId parent;
  };
  std::vector<Copy> stack{{path.size() - 1, top.children[0], root}};
  while (!stack.empty()) {
    Copy c = stack.back();
    stack.pop_back();
    const RhsNode* n = &g.rhs(path[c.level].rule).node(c.node);
    while (n->kind == SymbolKind::Parameter) {
      const auto occurrence = path[c.level].occurrence;
      --c.level;
      c.node = g.rhs(path[c.level].rule).node(occurrence).children[n->index];
      n = &g.rhs(path[c.level].rule).node(c.node);
    }
    RhsTree::NodeId id;
    switch (n->kind) {
      case SymbolKind::Terminal: id = out.add_terminal(n->label, n->marked); break;
      case SymbolKind::Nonterminal: id = out.add_nonterminal(n->index); break;
      default: id = out.add_underscore(); break;
    }
    out.add_child(c.parent, id);
    for (std::size_t i = n->children.size(); i-- > 0;)
      stack.push_back({c.level, n->children[i], id});
  }
  out.add_child(root, out.add_underscore());
  return out;
}

/// Writes the serialization of every result subtree, in pre-order of the
/// result roots. Nested results are written again in full.
inline void serialize(std::ostream& os, const SltGrammar& g, const DstAutomaton& a,
                      const TagStyle& style = {}) {
  const auto ids = materialize(g, a);
  if (ids.empty()) return;
  const auto lengths = chunk_lengths(g);
  for (const auto& u : ids) write_term_tags(os, g, locate_subtree(g, lengths, u), style);
}

inline std::string serialize(const SltGrammar& g, const DstAutomaton& a, const TagStyle& style = {}) {
  std::ostringstream os;
  serialize(os, g, a, style);
  return os.str();
}

}  // namespace gcx
