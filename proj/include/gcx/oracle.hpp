#pragma once

// Brute-force reference evaluation and seeded generators for testing.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gcx/grammar.hpp"
#include "gcx/tree.hpp"
#include "gcx/xpath.hpp"

namespace gcx {

/// The nodes selected by q on t as 1-based document-order numbers,
/// evaluated step by step from a virtual root whose only child is t's root.
inline std::vector<std::uint64_t> naive_eval(const XPathQuery& q, const UnrankedTree& t) {
  if (t.empty()) return {};
  const auto order = t.document_order();
  const auto n = t.size();
  std::vector<char> ctx(n, 0);
  bool at_virtual_root = true;
  for (const auto& step : q.steps) {
    std::vector<char> next(n, 0);
    switch (step.axis) {
      case Axis::Child:
        if (at_virtual_root) {
          next[t.root()] = 1;
        } else {
          for (std::size_t v = 0; v < n; ++v)
            if (ctx[v])
              for (auto c : t.children(v)) next[c] = 1;
        }
        break;
      case Axis::Descendant:
        // In document order every parent precedes its children.
        for (auto v : order) {
          if (at_virtual_root) {
            next[v] = 1;
          } else if (v != t.root()) {
            const auto p = t.parent(v);
            next[v] = ctx[p] || next[p];
          }
        }
        break;
      case Axis::FollowingSibling:
        if (!at_virtual_root) {
          for (std::size_t v = 0; v < n; ++v) {
            bool seen = false;
            for (auto c : t.children(v)) {
              if (seen) next[c] = 1;
              if (ctx[c]) seen = true;
            }
          }
        }
        break;
    }
    for (std::size_t v = 0; v < n; ++v)
      if (next[v] && !step.matches(t.label(v))) next[v] = 0;
    ctx = std::move(next);
    at_virtual_root = false;
  }
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (ctx[order[i]]) out.push_back(i + 1);
  return out;
}

/// Knobs for the generators. `label_skew` is the probability of drawing the
/// first alphabet letter instead of a uniform one, which raises the
/// fraction of nodes a name test matches.
struct GenOptions {
  std::vector<std::string> alphabet{"a", "b", "c", "d"};
  double label_skew = 0.3;
  std::size_t max_rules = 8;
  std::size_t max_rank = 2;
  std::size_t max_body = 10;
  std::size_t max_expansion = 100'000;
  std::size_t max_steps = 4;
  double wildcard_rate = 0.2;
};

namespace detail {

class Generator {
 public:
  Generator(std::uint64_t seed, const GenOptions& opts) : rng_(seed), opts_(opts) {}

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }
  bool chance(double p) { return static_cast<double>(rng_() % 1'000'000) < p * 1'000'000.0; }

  const std::string& label() {
    if (chance(opts_.label_skew)) return opts_.alphabet.front();
    return opts_.alphabet[below(opts_.alphabet.size())];
  }

 private:
  std::mt19937_64 rng_;
  const GenOptions& opts_;
};

}  // namespace detail

/// A uniformly shaped random unranked tree with `nodes` nodes.
inline UnrankedTree random_tree(std::uint64_t seed, std::size_t nodes, const GenOptions& opts = {}) {
  detail::Generator gen(seed, opts);
  UnrankedTree t;
  if (nodes == 0) return t;
  t.add_root(gen.label());
  for (std::size_t i = 1; i < nodes; ++i) {
    // Favor recent nodes so that trees get some depth.
    const std::size_t parent = gen.chance(0.5) ? i - 1 - gen.below(std::min<std::size_t>(i, 3)) : gen.below(i);
    t.add_child(parent, gen.label());
  }
  return t;
}

/// A random valid SLT grammar whose start rule is `w(t, _)` (so it encodes
/// a document) and whose expansion has at most opts.max_expansion labeled
/// nodes. Deterministic in the seed.
inline SltGrammar random_grammar(std::uint64_t seed, const GenOptions& opts = {}) {
  detail::Generator gen(seed, opts);
  for (;;) {
    const std::size_t m = 1 + gen.below(opts.max_rules);
    std::vector<std::size_t> rank(m, 0);
    for (std::size_t i = 1; i < m; ++i) rank[i] = gen.below(opts.max_rank + 1);

    SltGrammar g;
    for (std::size_t i = 0; i < m; ++i) g.declare("N" + std::to_string(i), rank[i]);
    for (std::size_t i = m; i-- > 0;) {
      RhsTree t;
      std::size_t budget = 1 + gen.below(opts.max_body);
      // Builds a term below nonterminal i: labels, `_`, and references to
      // later nonterminals.
      auto term = [&](auto& self, std::size_t depth) -> RhsTree::NodeId {
        const bool leaf = budget == 0 || depth > 6 || gen.chance(0.2);
        if (leaf) return t.add_underscore();
        --budget;
        if (i + 1 < m && gen.chance(0.6)) {
          const auto j = static_cast<NonterminalId>(i + 1 + gen.below(m - i - 1));
          const auto id = t.add_nonterminal(j);
          for (std::size_t c = 0; c < rank[j]; ++c) {
            const auto child = self(self, depth + 1);
            t.add_child(id, child);
          }
          return id;
        }
        const auto id = t.add_terminal(gen.label());
        const auto l = self(self, depth + 1);
        const auto r = self(self, depth + 1);
        t.add_child(id, l);
        t.add_child(id, r);
        return id;
      };
      // The part of the body that may change: all of it, or the left child
      // of the start rule's root.
      RhsTree::NodeId root = 0;
      RhsTree::NodeId top;
      if (i == 0) {
        root = t.add_terminal(gen.label());
        top = term(term, 1);
        t.add_child(root, top);
        t.add_child(root, t.add_underscore());
      } else {
        top = term(term, 0);
      }
      auto replace_top = [&](RhsTree::NodeId x) {
        if (i == 0) t.node(root).children[0] = x;
        top = x;
      };
      // Every rule but the last uses N(i+1), so each nonterminal is reachable.
      if (i + 1 < m) {
        bool uses = false;
        std::vector<RhsTree::NodeId> leaves;
        t.set_root(top);
        for (auto id : t.preorder()) {
          const auto& n = t.node(id);
          if (n.kind == SymbolKind::Nonterminal && n.index == i + 1) uses = true;
          if (n.kind == SymbolKind::Underscore) leaves.push_back(id);
        }
        if (!uses) {
          std::vector<RhsTree::NodeId> args;
          for (std::size_t c = 0; c < rank[i + 1]; ++c) args.push_back(t.add_underscore());
          if (!leaves.empty()) {
            auto& node = t.node(leaves[gen.below(leaves.size())]);
            node.kind = SymbolKind::Nonterminal;
            node.index = static_cast<std::uint32_t>(i + 1);
            node.children = args;
          } else {
            const auto ref = t.add_nonterminal(static_cast<NonterminalId>(i + 1));
            for (auto a : args) t.add_child(ref, a);
            const auto w = t.add_terminal(gen.label());
            t.add_child(w, top);
            t.add_child(w, ref);
            replace_top(w);
          }
        }
      }
      t.set_root(i == 0 ? root : top);
      // Turn rank[i] of the `_` leaves into y1..yk, in pre-order.
      for (;;) {
        std::vector<RhsTree::NodeId> leaves;
        std::vector<std::size_t> pos(t.node_count());
        std::size_t k = 0;
        for (auto id : t.preorder()) {
          pos[id] = k++;
          if (t.node(id).kind == SymbolKind::Underscore) leaves.push_back(id);
        }
        if (leaves.size() >= rank[i]) {
          for (std::size_t k = 0; k < rank[i]; ++k)
            std::swap(leaves[k], leaves[k + gen.below(leaves.size() - k)]);
          std::vector<RhsTree::NodeId> chosen(leaves.begin(), leaves.begin() + rank[i]);
          std::sort(chosen.begin(), chosen.end(), [&](auto x, auto y) { return pos[x] < pos[y]; });
          for (std::uint32_t k = 0; k < chosen.size(); ++k) {
            auto& node = t.node(chosen[k]);
            node.kind = SymbolKind::Parameter;
            node.index = k;
          }
          break;
        }
        if (leaves.empty()) {
          // Only rank-0 nonterminals at the bottom: wrap the body as w(body, _).
          const auto w = t.add_terminal(gen.label());
          const auto u = t.add_underscore();
          t.add_child(w, t.root());
          t.add_child(w, u);
          t.set_root(w);
          continue;
        }
        // Grow a leaf into w(_, _): one more leaf.
        const auto leaf = leaves[gen.below(leaves.size())];
        const auto a = t.add_underscore();
        const auto b = t.add_underscore();
        auto& node = t.node(leaf);
        node.kind = SymbolKind::Terminal;
        node.label = gen.label();
        node.children = {a, b};
      }
      g.set_rhs(static_cast<NonterminalId>(i), std::move(t));
    }
    g.set_start(0);
    g = remove_unreachable(g);
    if (!validate(g).empty()) continue;
    if (expansion_size(g) > opts.max_expansion) continue;
    return g;
  }
}

/// A random query of the fragment with 1..opts.max_steps steps.
inline XPathQuery random_query(std::uint64_t seed, const GenOptions& opts = {}) {
  detail::Generator gen(seed, opts);
  XPathQuery q;
  const std::size_t n = 1 + gen.below(opts.max_steps);
  for (std::size_t i = 0; i < n; ++i) {
    Step s;
    const auto pick = gen.below(i == 0 ? 2 : 3);
    s.axis = pick == 0 ? Axis::Child : pick == 1 ? Axis::Descendant : Axis::FollowingSibling;
    if (!gen.chance(opts.wildcard_rate)) s.name = gen.label();
    q.steps.push_back(std::move(s));
  }
  return q;
}

}  // namespace gcx
