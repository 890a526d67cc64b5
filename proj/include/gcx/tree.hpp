#pragma once

// Element-only XML trees: the unranked form, its first-child/next-sibling
// binary encoding, pre-order numbering and tag serialization.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gcx/error.hpp"

namespace gcx {

/// True iff `s` is usable as an element label: non-empty and free of markup,
/// whitespace and the characters reserved by the grammar and automaton formats.
inline bool is_valid_label(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    switch (c) {
      case '<': case '>': case '/': case '(': case ')': case ',':
      case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
        return false;
      default:
        break;
    }
  }
  return s != "_" && s != "%" && s.front() != '^';
}

/// How open/close tags are rendered.
struct TagStyle {
  /// Prefix written in front of marked (selected) labels.
  std::string mark_prefix = "^";
};

inline void write_open_tag(std::ostream& os, std::string_view label, bool marked,
                           const TagStyle& style = {}) {
  os << '<';
  if (marked) os << style.mark_prefix;
  os << label << '>';
}

inline void write_close_tag(std::ostream& os, std::string_view label, bool marked,
                            const TagStyle& style = {}) {
  os << "</";
  if (marked) os << style.mark_prefix;
  os << label << '>';
}

//===----------------------------------------------------------------------===//
// Unranked trees
//===----------------------------------------------------------------------===//

class UnrankedTree {
 public:
  using NodeId = std::size_t;
  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

  struct Node {
    std::string label;
    NodeId parent = kNone;
    std::vector<NodeId> children;
  };

  UnrankedTree() = default;
  explicit UnrankedTree(std::string root_label) { add_root(std::move(root_label)); }

  NodeId add_root(std::string label) {
    if (!nodes_.empty()) throw Error("unranked tree already has a root");
    nodes_.push_back(Node{std::move(label), kNone, {}});
    return 0;
  }

  NodeId add_child(NodeId parent, std::string label) {
    const NodeId id = nodes_.size();
    nodes_.push_back(Node{std::move(label), parent, {}});
    nodes_[parent].children.push_back(id);
    return id;
  }

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  NodeId root() const noexcept { return 0; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const std::string& label(NodeId id) const { return nodes_[id].label; }
  const std::vector<NodeId>& children(NodeId id) const { return nodes_[id].children; }
  NodeId parent(NodeId id) const { return nodes_[id].parent; }

  /// Node ids in document order (pre-order, children left to right).
  std::vector<NodeId> document_order() const {
    std::vector<NodeId> order;
    if (empty()) return order;
    order.reserve(size());
    std::vector<NodeId> stack{root()};
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      order.push_back(id);
      const auto& ch = nodes_[id].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return order;
  }

  /// Structural equality (labels and child order), independent of node ids.
  friend bool operator==(const UnrankedTree& a, const UnrankedTree& b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      const Node& nx = a.nodes_[x];
      const Node& ny = b.nodes_[y];
      if (nx.label != ny.label || nx.children.size() != ny.children.size()) return false;
      for (std::size_t i = 0; i < nx.children.size(); ++i)
        stack.emplace_back(nx.children[i], ny.children[i]);
    }
    return true;
  }

 private:
  std::vector<Node> nodes_;
};

//===----------------------------------------------------------------------===//
// Binary trees
//===----------------------------------------------------------------------===//

/// Binary tree whose internal nodes carry labels (optionally marked) and whose
/// leaves are all `_`. Leaves are not materialized: a child slot holding
/// `kUnderscore` is a `_` leaf.
class BinTree {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kUnderscore = std::numeric_limits<NodeId>::max();

  struct Node {
    std::uint32_t symbol;
    bool marked;
    NodeId left;
    NodeId right;
  };

  /// Adds an internal node; children default to `_` and may be set later.
  NodeId add(std::string_view label, NodeId left = kUnderscore, NodeId right = kUnderscore,
             bool marked = false) {
    if (nodes_.size() >= kUnderscore) throw LimitExceeded("binary tree node capacity exhausted");
    const NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{intern(label), marked, left, right});
    if (nodes_.size() == 1) root_ = id;
    return id;
  }

  void set_left(NodeId parent, NodeId child) { nodes_[parent].left = child; }
  void set_right(NodeId parent, NodeId child) { nodes_[parent].right = child; }
  void set_root(NodeId id) { root_ = id; }
  void set_marked(NodeId id, bool marked) { nodes_[id].marked = marked; }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  NodeId root() const noexcept { return root_; }
  bool is_underscore() const noexcept { return root_ == kUnderscore; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  /// Number of edges (each internal node has exactly two children).
  std::size_t edge_count() const noexcept { return 2 * nodes_.size(); }
  std::size_t underscore_count() const noexcept { return nodes_.size() + 1; }

  std::string_view label(NodeId id) const { return symbols_[nodes_[id].symbol]; }
  bool marked(NodeId id) const { return nodes_[id].marked; }
  NodeId left(NodeId id) const { return nodes_[id].left; }
  NodeId right(NodeId id) const { return nodes_[id].right; }

  /// Internal nodes in pre-order (left before right, `_` skipped).
  std::vector<NodeId> preorder() const {
    std::vector<NodeId> order;
    order.reserve(nodes_.size());
    std::vector<NodeId> stack;
    if (root_ != kUnderscore) stack.push_back(root_);
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      order.push_back(id);
      if (nodes_[id].right != kUnderscore) stack.push_back(nodes_[id].right);
      if (nodes_[id].left != kUnderscore) stack.push_back(nodes_[id].left);
    }
    return order;
  }

  /// Structural equality including mark flags.
  friend bool operator==(const BinTree& a, const BinTree& b) {
    std::vector<std::pair<NodeId, NodeId>> stack{{a.root_, b.root_}};
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      if ((x == kUnderscore) != (y == kUnderscore)) return false;
      if (x == kUnderscore) continue;
      if (a.label(x) != b.label(y) || a.marked(x) != b.marked(y)) return false;
      stack.emplace_back(a.right(x), b.right(y));
      stack.emplace_back(a.left(x), b.left(y));
    }
    return true;
  }

 private:
  std::uint32_t intern(std::string_view label) {
    auto it = symbol_index_.find(std::string(label));
    if (it != symbol_index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(symbols_.size());
    symbols_.emplace_back(label);
    symbol_index_.emplace(symbols_.back(), id);
    return id;
  }

  std::vector<Node> nodes_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::uint32_t> symbol_index_;
  NodeId root_ = kUnderscore;
};

/// Term notation `a(b(_,_),_)` with `^` for marked labels; handy for diagnostics.
inline std::string format_term(const BinTree& t) {
  std::string out;
  struct Item {
    BinTree::NodeId node;
    int phase;  // 0 = open, 1 = comma, 2 = close
  };
  std::vector<Item> stack{{t.root(), 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.node == BinTree::kUnderscore) {
      out += '_';
      continue;
    }
    if (it.phase == 0) {
      if (t.marked(it.node)) out += '^';
      out += t.label(it.node);
      out += '(';
      stack.push_back({it.node, 2});
      stack.push_back({t.right(it.node), 0});
      stack.push_back({it.node, 1});
      stack.push_back({t.left(it.node), 0});
    } else {
      out += it.phase == 1 ? ',' : ')';
    }
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const BinTree& t) { return os << format_term(t); }

//===----------------------------------------------------------------------===//
// First-child/next-sibling encoding
//===----------------------------------------------------------------------===//

/// Binary encoding: left child = first child, right child = next sibling.
inline BinTree fcns_encode(const UnrankedTree& t) {
  BinTree b;
  if (t.empty()) return b;
  b.reserve(t.size());
  // `index` is the position of `node` among its parent's children.
  struct Pending {
    UnrankedTree::NodeId node;
    std::size_t index;
    BinTree::NodeId parent;
    bool as_left;
  };
  std::vector<Pending> stack{{t.root(), 0, BinTree::kUnderscore, true}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const BinTree::NodeId id = b.add(t.label(p.node));
    if (p.parent != BinTree::kUnderscore) {
      if (p.as_left) b.set_left(p.parent, id);
      else b.set_right(p.parent, id);
    }
    // The next sibling is handled after this node's children (pre-order).
    const auto parent = t.parent(p.node);
    if (parent != UnrankedTree::kNone && p.index + 1 < t.children(parent).size())
      stack.push_back({t.children(parent)[p.index + 1], p.index + 1, id, false});
    const auto& ch = t.children(p.node);
    if (!ch.empty()) stack.push_back({ch.front(), 0, id, true});
  }
  b.set_root(0);
  return b;
}

/// Inverse of fcns_encode; `_` decodes to the empty tree. The root's right
/// child must be `_`.
inline UnrankedTree fcns_decode(const BinTree& b) {
  if (b.is_underscore()) return {};
  if (b.right(b.root()) != BinTree::kUnderscore)
    throw Error("root has a next sibling: the binary tree encodes a forest, not a document");
  UnrankedTree t;
  std::vector<std::pair<BinTree::NodeId, UnrankedTree::NodeId>> stack{
      {b.root(), UnrankedTree::kNone}};
  while (!stack.empty()) {
    auto [x, parent] = stack.back();
    stack.pop_back();
    const auto id = parent == UnrankedTree::kNone ? t.add_root(std::string(b.label(x)))
                                                  : t.add_child(parent, std::string(b.label(x)));
    if (b.right(x) != BinTree::kUnderscore) stack.emplace_back(b.right(x), parent);
    if (b.left(x) != BinTree::kUnderscore) stack.emplace_back(b.left(x), id);
  }
  return t;
}

/// 1-based pre-order numbers of the internal nodes, indexed by NodeId.
inline std::vector<std::uint64_t> preorder_ids(const BinTree& b) {
  std::vector<std::uint64_t> ids(b.node_count(), 0);
  std::uint64_t next = 1;
  for (auto id : b.preorder()) ids[id] = next++;
  return ids;
}

//===----------------------------------------------------------------------===//
// Serialization
//===----------------------------------------------------------------------===//

/// Writes the binary subtree at `x` (the node, its descendants and its
/// following siblings) as XML tags.
inline void write_binary_subtree(std::ostream& os, const BinTree& b, BinTree::NodeId x,
                                 const TagStyle& style = {}) {
  struct Item {
    BinTree::NodeId node;
    bool close;
  };
  std::vector<Item> stack{{x, false}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    if (it.node == BinTree::kUnderscore) continue;
    if (it.close) {
      write_close_tag(os, b.label(it.node), b.marked(it.node), style);
      continue;
    }
    write_open_tag(os, b.label(it.node), b.marked(it.node), style);
    stack.push_back({b.right(it.node), false});
    stack.push_back({it.node, true});
    stack.push_back({b.left(it.node), false});
  }
}

/// Writes the unranked subtree at `u`: the node and its first-child subtree,
/// excluding following siblings.
inline void write_subtree(std::ostream& os, const BinTree& b, BinTree::NodeId u,
                          const TagStyle& style = {}) {
  if (u == BinTree::kUnderscore) throw Error("cannot serialize a `_` leaf");
  write_open_tag(os, b.label(u), b.marked(u), style);
  write_binary_subtree(os, b, b.left(u), style);
  write_close_tag(os, b.label(u), b.marked(u), style);
}

inline std::string serialize_subtree(const BinTree& b, BinTree::NodeId u,
                                     const TagStyle& style = {}) {
  std::ostringstream os;
  write_subtree(os, b, u, style);
  return os.str();
}

}  // namespace gcx
