#pragma once

// Expansion of SLT grammars: val(G), val(A), and streaming tag output of
// rank-0 sentential terms.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gcx/error.hpp"
#include "gcx/grammar.hpp"
#include "gcx/tree.hpp"

namespace gcx {

/// Default bound on the number of labeled nodes an expansion may produce.
inline constexpr std::size_t kDefaultExpansionLimit = 100'000'000;

namespace detail {

/// A position in a derivation: a node of some right-hand side together with
/// the chain of nonterminal occurrences that bind its parameters.
class Derivation {
 public:
  struct Frame {
    const RhsTree* rule;
    std::shared_ptr<const Frame> parent;  // frame holding the occurrence
    RhsTree::NodeId occurrence;            // nonterminal node in parent->rule
  };
  using FramePtr = std::shared_ptr<const Frame>;

  struct Cursor {
    FramePtr frame;
    RhsTree::NodeId node;
  };

  explicit Derivation(const SltGrammar& g) : g_(g) {}

  static Cursor root(const RhsTree& rule) {
    return {std::make_shared<const Frame>(Frame{&rule, nullptr, 0}), rule.root()};
  }

  /// Follows parameters and nonterminals until a terminal, a `_`, or a
  /// parameter of the outermost frame is reached.
  Cursor resolve(Cursor c) const {
    for (;;) {
      const RhsNode& n = c.frame->rule->node(c.node);
      if (n.kind == SymbolKind::Parameter) {
        if (!c.frame->parent) return c;
        const auto& occ = c.frame->parent->rule->node(c.frame->occurrence);
        c = {c.frame->parent, occ.children[n.index]};
      } else if (n.kind == SymbolKind::Nonterminal) {
        const RhsTree& body = g_.rhs(n.index);
        c = {std::make_shared<const Frame>(Frame{&body, c.frame, c.node}), body.root()};
      } else {
        return c;
      }
    }
  }

  static const RhsNode& node(const Cursor& c) { return c.frame->rule->node(c.node); }

  static Cursor child(const Cursor& c, std::size_t i) {
    return {c.frame, node(c).children[i]};
  }

 private:
  const SltGrammar& g_;
};

}  // namespace detail

/// val(G) as an explicit binary tree, nodes stored in pre-order.
inline BinTree expand(const SltGrammar& g, std::size_t limit = kDefaultExpansionLimit) {
  detail::Derivation d(g);
  BinTree out;
  struct Item {
    detail::Derivation::Cursor cursor;
    BinTree::NodeId parent;
    bool as_left;
  };
  std::vector<Item> stack{{detail::Derivation::root(g.rhs(g.start())), BinTree::kUnderscore, true}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    const auto c = d.resolve(std::move(it.cursor));
    const RhsNode& n = detail::Derivation::node(c);
    if (n.kind == SymbolKind::Parameter) throw Error("start rule contains a parameter");
    if (n.kind == SymbolKind::Underscore) continue;
    if (out.node_count() >= limit)
      throw LimitExceeded("expansion exceeds the limit of " + std::to_string(limit) + " nodes");
    const auto id = out.add(n.label, BinTree::kUnderscore, BinTree::kUnderscore, n.marked);
    if (it.parent != BinTree::kUnderscore) {
      if (it.as_left) out.set_left(it.parent, id);
      else out.set_right(it.parent, id);
    }
    stack.push_back({detail::Derivation::child(c, 1), id, false});
    stack.push_back({detail::Derivation::child(c, 0), id, true});
  }
  if (out.node_count() > 0) out.set_root(0);
  return out;
}

/// val(A): the expansion of A(y1,...,yk), parameters left as leaves.
inline RhsTree expand_nonterminal(const SltGrammar& g, NonterminalId a,
                                  std::size_t limit = kDefaultExpansionLimit) {
  detail::Derivation d(g);
  RhsTree out;
  constexpr auto kNoParent = std::numeric_limits<RhsTree::NodeId>::max();
  struct Item {
    detail::Derivation::Cursor cursor;
    RhsTree::NodeId parent;
  };
  std::vector<Item> stack{{detail::Derivation::root(g.rhs(a)), kNoParent}};
  std::size_t labeled = 0;
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    const auto c = d.resolve(std::move(it.cursor));
    const RhsNode& n = detail::Derivation::node(c);
    RhsTree::NodeId id;
    switch (n.kind) {
      case SymbolKind::Terminal:
        if (++labeled > limit)
          throw LimitExceeded("expansion exceeds the limit of " + std::to_string(limit) +
                              " nodes");
        id = out.add_terminal(n.label, n.marked);
        break;
      case SymbolKind::Parameter:
        id = out.add_parameter(n.index);
        break;
      default:
        id = out.add_underscore();
        break;
    }
    if (it.parent == kNoParent) out.set_root(id);
    else out.add_child(it.parent, id);
    if (n.kind == SymbolKind::Terminal) {
      stack.push_back({detail::Derivation::child(c, 1), id});
      stack.push_back({detail::Derivation::child(c, 0), id});
    }
  }
  return out;
}

/// Streams the tags of a rank-0 sentential term over g's nonterminals: the
/// binary-tree serialization (node, first-child subtree, then right subtree).
/// Memory is proportional to the derivation depth, not the output length.
inline void write_term_tags(std::ostream& os, const SltGrammar& g, const RhsTree& term,
                            const TagStyle& style = {}) {
  detail::Derivation d(g);
  struct Item {
    detail::Derivation::Cursor cursor;
    bool close;
  };
  std::vector<Item> stack{{detail::Derivation::root(term), false}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (it.close) {
      const RhsNode& n = detail::Derivation::node(it.cursor);
      write_close_tag(os, n.label, n.marked, style);
      continue;
    }
    auto c = d.resolve(std::move(it.cursor));
    const RhsNode& n = detail::Derivation::node(c);
    if (n.kind == SymbolKind::Parameter) throw Error("term contains an unbound parameter");
    if (n.kind == SymbolKind::Underscore) continue;
    write_open_tag(os, n.label, n.marked, style);
    stack.push_back({detail::Derivation::child(c, 1), false});
    stack.push_back({c, true});
    stack.push_back({detail::Derivation::child(c, 0), false});
  }
}

}  // namespace gcx
