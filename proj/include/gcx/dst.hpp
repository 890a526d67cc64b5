#pragma once

// Deterministic selecting top-down tree automata over binary trees.
//
// Dump format, one rule per line (`#` starts a comment line):
//
//   q,w -> q1,q2      non-selecting rule
//   q,w => q1,q2      selecting rule
//   q,% -> q1,q2      default rule of q
//
// The state of the first rule is the initial state.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gcx/error.hpp"
#include "gcx/tree.hpp"

namespace gcx {

using StateId = std::uint32_t;

/// Label value of a default rule.
inline constexpr std::string_view kDefaultLabel = "%";

struct DstRule {
  StateId state = 0;
  std::string label;  // kDefaultLabel for the default rule
  StateId left = 0;
  StateId right = 0;
  bool selecting = false;

  bool is_default() const noexcept { return label == kDefaultLabel; }
  bool operator==(const DstRule&) const = default;
};

/// Q, q0 and R. Any rule set can be stored; validate() checks Def.-style
/// well-formedness and lookup() requires it.
class DstAutomaton {
 public:
  StateId add_state(std::string name) {
    if (by_name_.count(name) != 0) throw Error("duplicate state '" + name + "'");
    const auto id = static_cast<StateId>(names_.size());
    by_name_.emplace(name, id);
    names_.push_back(std::move(name));
    index_.emplace_back();
    default_.push_back(kNoRule);
    return id;
  }

  /// The id of the named state, adding it if needed.
  StateId state(const std::string& name) {
    auto it = by_name_.find(name);
    return it != by_name_.end() ? it->second : add_state(name);
  }

  void set_initial(StateId q) { initial_ = q; }

  void add_rule(DstRule r) {
    const auto id = rules_.size();
    if (r.state < names_.size()) {
      if (r.is_default()) {
        if (default_[r.state] == kNoRule) default_[r.state] = id;
      } else {
        index_[r.state].emplace(r.label, id);
      }
    }
    rules_.push_back(std::move(r));
  }

  void add_rule(StateId q, std::string label, StateId left, StateId right, bool selecting = false) {
    add_rule(DstRule{q, std::move(label), left, right, selecting});
  }

  std::size_t state_count() const noexcept { return names_.size(); }
  StateId initial() const noexcept { return initial_; }
  const std::string& name(StateId q) const { return names_[q]; }
  const std::vector<DstRule>& rules() const noexcept { return rules_; }

  std::optional<StateId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  /// The (q,w) rule, or q's default rule.
  const DstRule& lookup(StateId q, std::string_view w) const {
    const auto& m = index_[q];
    if (!m.empty()) {
      auto it = m.find(std::string(w));
      if (it != m.end()) return rules_[it->second];
    }
    if (default_[q] == kNoRule) throw Error("state '" + names_[q] + "' has no default rule");
    return rules_[default_[q]];
  }

  const DstRule& default_rule(StateId q) const {
    if (default_[q] == kNoRule) throw Error("state '" + names_[q] + "' has no default rule");
    return rules_[default_[q]];
  }

  /// Labels with an explicit rule in state q, with their rules.
  const std::unordered_map<std::string, std::size_t>& exceptions(StateId q) const {
    return index_[q];
  }

  /// Every label mentioned by some rule, sorted.
  std::vector<std::string> alphabet() const {
    std::vector<std::string> out;
    for (const auto& r : rules_)
      if (!r.is_default()) out.push_back(r.label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kNoRule = static_cast<std::size_t>(-1);

  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> by_name_;
  std::vector<DstRule> rules_;
  std::vector<std::unordered_map<std::string, std::size_t>> index_;
  std::vector<std::size_t> default_;
  StateId initial_ = 0;
};

/// All violations of the automaton conditions; empty means valid.
inline std::vector<std::string> validate(const DstAutomaton& a) {
  std::vector<std::string> out;
  const auto n = a.state_count();
  if (n == 0) {
    out.push_back("automaton has no states");
    return out;
  }
  if (a.initial() >= n) out.push_back("initial state is not a state");
  std::vector<std::size_t> defaults(n, 0);
  std::map<std::pair<StateId, std::string>, std::size_t> seen;
  for (const auto& r : a.rules()) {
    if (r.state >= n || r.left >= n || r.right >= n) {
      out.push_back("rule refers to an unknown state");
      continue;
    }
    const auto lhs = "(" + a.name(r.state) + "," + r.label + ")";
    if (r.is_default()) {
      ++defaults[r.state];
    } else {
      if (!is_valid_label(r.label)) out.push_back(lhs + ": invalid label");
      if (++seen[{r.state, r.label}] == 2) out.push_back(lhs + ": more than one rule");
    }
  }
  for (StateId q = 0; q < n; ++q) {
    if (defaults[q] == 0) out.push_back("(" + a.name(q) + ",%): missing default rule");
    if (defaults[q] > 1) out.push_back("(" + a.name(q) + ",%): more than one default rule");
  }
  return out;
}

inline void check_valid(const DstAutomaton& a) {
  auto v = validate(a);
  if (!v.empty()) throw ValidationError(std::move(v));
}

/// The nodes selected by the run of `a` on `b`, in pre-order.
inline std::vector<BinTree::NodeId> dst_select(const DstAutomaton& a, const BinTree& b) {
  std::vector<BinTree::NodeId> out;
  if (b.is_underscore()) return out;
  std::vector<std::pair<BinTree::NodeId, StateId>> stack{{b.root(), a.initial()}};
  while (!stack.empty()) {
    const auto [u, q] = stack.back();
    stack.pop_back();
    const DstRule& r = a.lookup(q, b.label(u));
    if (r.selecting) out.push_back(u);
    if (b.right(u) != BinTree::kUnderscore) stack.emplace_back(b.right(u), r.right);
    if (b.left(u) != BinTree::kUnderscore) stack.emplace_back(b.left(u), r.left);
  }
  return out;
}

/// Pre-order numbers (1-based, labeled nodes only) of the selected nodes, ascending.
inline std::vector<std::uint64_t> dst_run(const DstAutomaton& a, const BinTree& b) {
  const auto ids = preorder_ids(b);
  std::vector<std::uint64_t> out;
  for (auto u : dst_select(a, b)) out.push_back(ids[u]);
  return out;
}

/// A copy of b in which exactly the selected nodes are marked.
inline BinTree dst_mark(const DstAutomaton& a, const BinTree& b) {
  BinTree out = b;
  for (auto u : out.preorder()) out.set_marked(u, false);
  for (auto u : dst_select(a, b)) out.set_marked(u, true);
  return out;
}

/// Parses the dump format.
inline DstAutomaton parse_dst(std::string_view text) {
  DstAutomaton a;
  bool first = true;
  std::size_t number = 0;
  std::size_t pos = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++number;
    if (line.empty() || line.front() == '#') continue;
    bool selecting = false;
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      arrow = line.find("=>");
      selecting = true;
    }
    if (arrow == std::string_view::npos) throw ParseError("automaton: expected '->' or '=>'", number, 1);
    const auto lhs = line.substr(0, arrow);
    const auto rhs = line.substr(arrow + 2);
    const auto c1 = lhs.find(',');
    const auto c2 = rhs.find(',');
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
      throw ParseError("automaton: expected 'q,w -> q1,q2'", number, 1);
    const auto q = trim(lhs.substr(0, c1));
    const auto w = trim(lhs.substr(c1 + 1));
    const auto q1 = trim(rhs.substr(0, c2));
    const auto q2 = trim(rhs.substr(c2 + 1));
    for (auto s : {q, q1, q2})
      if (s.empty() || s.find_first_of(" \t,") != std::string_view::npos)
        throw ParseError("automaton: malformed state name", number, 1);
    if (w != kDefaultLabel && !is_valid_label(w))
      throw ParseError("automaton: invalid label '" + std::string(w) + "'", number, arrow);
    const auto qs = a.state(std::string(q));
    if (first) {
      a.set_initial(qs);
      first = false;
    }
    const auto l = a.state(std::string(q1));
    const auto r = a.state(std::string(q2));
    a.add_rule(qs, std::string(w), l, r, selecting);
  }
  if (first) throw ParseError("automaton: no rules", number, 1);
  check_valid(a);
  return a;
}

/// Writes the dump format: the initial state's rules first, defaults last
/// within each state.
inline std::string write_dst(const DstAutomaton& a) {
  std::ostringstream os;
  auto emit_state = [&](StateId q) {
    std::vector<const DstRule*> rs;
    for (const auto& r : a.rules())
      if (r.state == q) rs.push_back(&r);
    std::stable_sort(rs.begin(), rs.end(),
                     [](const DstRule* x, const DstRule* y) { return !x->is_default() && y->is_default(); });
    for (const auto* r : rs)
      os << a.name(r->state) << ',' << r->label << (r->selecting ? " => " : " -> ")
         << a.name(r->left) << ',' << a.name(r->right) << '\n';
  };
  emit_state(a.initial());
  for (StateId q = 0; q < a.state_count(); ++q)
    if (q != a.initial()) emit_state(q);
  return os.str();
}

/// A renaming-invariant description of the reachable part of a valid
/// automaton. States are renumbered breadth-first from the initial state,
/// visiting explicit rules in label order, then the default; each child
/// pair left before right. Exceptions identical to the default are dropped.
inline std::string canonical_form(const DstAutomaton& a) {
  std::vector<std::uint32_t> number(a.state_count(), UINT32_MAX);
  std::vector<StateId> order{a.initial()};
  number[a.initial()] = 0;
  auto same_effect = [](const DstRule& x, const DstRule& y) {
    return x.left == y.left && x.right == y.right && x.selecting == y.selecting;
  };
  auto sorted_rules = [&](StateId q) {
    std::vector<const DstRule*> rs;
    const auto& d = a.default_rule(q);
    std::vector<std::string> labels;
    for (const auto& [label, idx] : a.exceptions(q)) labels.push_back(label);
    std::sort(labels.begin(), labels.end());
    for (const auto& l : labels) {
      const auto& r = a.lookup(q, l);
      if (!same_effect(r, d)) rs.push_back(&r);
    }
    rs.push_back(&d);
    return rs;
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto* r : sorted_rules(order[i])) {
      for (auto t : {r->left, r->right}) {
        if (number[t] == UINT32_MAX) {
          number[t] = static_cast<std::uint32_t>(order.size());
          order.push_back(t);
        }
      }
    }
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto* r : sorted_rules(order[i]))
      os << i << ',' << r->label << (r->selecting ? " => " : " -> ") << number[r->left] << ','
         << number[r->right] << '\n';
  return os.str();
}

}  // namespace gcx
