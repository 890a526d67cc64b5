#pragma once

// Text format, one rule per line:
//
//   NT(y1,...,yk) -> term
//   term := label '(' term ',' term ')' | '^' label '(' ... ')' | '_' | 'y'i
//         | NT '(' term {',' term} ')' | NT
//
// The first rule defines the start symbol; lines starting with `#` are
// comments. A name applied to arguments is a nonterminal if some rule
// defines it and a label otherwise.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gcx/error.hpp"
#include "gcx/grammar.hpp"
#include "gcx/tree.hpp"

namespace gcx {

namespace detail {

inline bool is_space_char(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space_char(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space_char(s.back())) s.remove_suffix(1);
  return s;
}

/// `y<digits>` with a positive number; returns the 0-based index.
inline std::optional<std::uint32_t> parameter_index(std::string_view s) {
  if (s.size() < 2 || s[0] != 'y' || s[1] == '0') return std::nullopt;
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0) return std::nullopt;
  return v - 1;
}

inline bool is_valid_nonterminal_name(std::string_view s) {
  if (s.empty() || s == "_" || s.front() == '^' || parameter_index(s)) return false;
  for (char c : s)
    if (c == '(' || c == ')' || c == ',' || is_space_char(c)) return false;
  return true;
}

class TermParser {
 public:
  TermParser(std::string_view text, std::size_t line, std::size_t column_offset,
             const std::unordered_map<std::string, std::pair<NonterminalId, std::size_t>>& nts)
      : text_(text), line_(line), col0_(column_offset), nts_(nts) {}

  RhsTree parse() {
    RhsTree t;
    struct Open {
      RhsTree::NodeId node;
    };
    std::vector<Open> open;
    bool have_root = false;
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      const std::string_view atom = read_atom();
      if (atom.empty()) fail(at, "expected a term");
      skip_space();
      const bool applied = pos_ < text_.size() && text_[pos_] == '(';
      RhsTree::NodeId id;
      if (applied) {
        ++pos_;
        id = make_applied(t, atom, at);
      } else {
        id = make_leaf(t, atom, at);
      }
      if (!have_root) {
        t.set_root(id);
        have_root = true;
      } else {
        t.add_child(open.back().node, id);
      }
      if (applied) {
        open.push_back({id});
        continue;
      }
      // Close finished compound terms; a ',' continues the innermost one.
      for (;;) {
        skip_space();
        if (open.empty()) {
          if (pos_ != text_.size()) fail(pos_, "unexpected trailing input");
          return t;
        }
        if (pos_ >= text_.size()) fail(pos_, "missing ')'");
        if (text_[pos_] == ',') {
          ++pos_;
          break;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          open.pop_back();
          continue;
        }
        fail(pos_, "expected ',' or ')'");
      }
    }
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw ParseError("grammar: " + msg, line_, col0_ + at + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space_char(text_[pos_])) ++pos_;
  }

  std::string_view read_atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || c == ',' || is_space_char(c)) break;
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  RhsTree::NodeId make_applied(RhsTree& t, std::string_view atom, std::size_t at) {
    if (atom.front() != '^') {
      auto it = nts_.find(std::string(atom));
      if (it != nts_.end()) return t.add_nonterminal(it->second.first);
    }
    const bool marked = atom.front() == '^';
    const std::string_view label = marked ? atom.substr(1) : atom;
    if (!is_valid_label(label)) fail(at, "invalid label '" + std::string(atom) + "'");
    return t.add_terminal(std::string(label), marked);
  }

  RhsTree::NodeId make_leaf(RhsTree& t, std::string_view atom, std::size_t at) {
    if (atom == "_") return t.add_underscore();
    if (auto p = parameter_index(atom)) return t.add_parameter(*p);
    auto it = nts_.find(std::string(atom));
    if (it != nts_.end()) return t.add_nonterminal(it->second.first);
    fail(at, "'" + std::string(atom) +
                 "' is neither a defined nonterminal nor a leaf; labels need two children");
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t col0_;
  const std::unordered_map<std::string, std::pair<NonterminalId, std::size_t>>& nts_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses grammar text without checking the grammar invariants.
inline SltGrammar parse_grammar_unchecked(std::string_view text) {
  struct Line {
    std::size_t number;
    std::size_t rhs_column;
    std::string_view rhs;
  };
  std::vector<Line> lines;
  SltGrammar g;
  std::unordered_map<std::string, std::pair<NonterminalId, std::size_t>> nts;

  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto arrow = raw.find("->");
    if (arrow == std::string_view::npos) throw ParseError("grammar: expected '->'", number, 1);
    std::string_view lhs = detail::trim(raw.substr(0, arrow));
    std::size_t rank = 0;
    std::string_view name = lhs;
    if (const auto lp = lhs.find('('); lp != std::string_view::npos) {
      if (lhs.back() != ')') throw ParseError("grammar: malformed parameter list", number, 1);
      name = detail::trim(lhs.substr(0, lp));
      std::string_view params = lhs.substr(lp + 1, lhs.size() - lp - 2);
      std::size_t p = 0;
      while (p <= params.size()) {
        const auto comma = std::min(params.find(',', p), params.size());
        const auto param = detail::trim(params.substr(p, comma - p));
        const auto idx = detail::parameter_index(param);
        if (!idx || *idx != rank)
          throw ParseError("grammar: parameters must be listed as y1,...,yk", number, 1);
        ++rank;
        p = comma + 1;
      }
    }
    if (!detail::is_valid_nonterminal_name(name))
      throw ParseError("grammar: invalid nonterminal name '" + std::string(name) + "'", number, 1);
    if (nts.count(std::string(name)) != 0)
      throw ParseError("grammar: nonterminal '" + std::string(name) + "' defined twice", number, 1);
    const auto id = g.declare(std::string(name), rank);
    nts.emplace(std::string(name), std::make_pair(id, rank));
    lines.push_back({number, arrow + 2, raw.substr(arrow + 2)});
  }
  if (lines.empty()) throw ParseError("grammar: no rules", number, 1);

  for (NonterminalId id = 0; id < lines.size(); ++id) {
    const auto& l = lines[id];
    g.set_rhs(id, detail::TermParser(l.rhs, l.number, l.rhs_column, nts).parse());
  }
  g.set_start(0);
  return g;
}

/// Parses grammar text and checks every grammar invariant.
inline SltGrammar parse_grammar(std::string_view text) {
  SltGrammar g = parse_grammar_unchecked(text);
  check_valid(g);
  return g;
}

/// Writes a single right-hand side term.
inline std::string write_term(const SltGrammar& g, const RhsTree& t) {
  std::string out;
  if (t.empty()) return out;
  struct Item {
    RhsTree::NodeId node;
    std::uint32_t next_child;
  };
  std::vector<Item> stack{{t.root(), 0}};
  while (!stack.empty()) {
    Item& it = stack.back();
    const RhsNode& n = t.node(it.node);
    if (it.next_child == 0) {
      switch (n.kind) {
        case SymbolKind::Terminal:
          if (n.marked) out += '^';
          out += n.label;
          break;
        case SymbolKind::Underscore:
          out += '_';
          break;
        case SymbolKind::Parameter:
          out += 'y';
          out += std::to_string(n.index + 1);
          break;
        case SymbolKind::Nonterminal:
          out += g.name(n.index);
          break;
      }
      if (n.children.empty()) {
        stack.pop_back();
        continue;
      }
      out += '(';
    } else if (it.next_child == n.children.size()) {
      out += ')';
      stack.pop_back();
      continue;
    } else {
      out += ',';
    }
    const auto child = n.children[it.next_child++];
    stack.push_back({child, 0});
  }
  return out;
}

/// Writes g with its start rule first. Throws if a label coincides with a
/// nonterminal name (the text would not parse back to the same grammar).
inline std::string write_grammar(const SltGrammar& g) {
  const auto labels = labels_of(g);
  for (const auto& nt : g.rules()) {
    if (!detail::is_valid_nonterminal_name(nt.name))
      throw Error("cannot write nonterminal name '" + nt.name + "'");
    if (labels.count(nt.name) != 0)
      throw Error("nonterminal name '" + nt.name + "' collides with a label");
  }
  std::ostringstream os;
  auto emit = [&](NonterminalId a) {
    os << g.name(a);
    if (g.rank(a) > 0) {
      os << '(';
      for (std::size_t i = 0; i < g.rank(a); ++i) os << (i ? "," : "") << 'y' << i + 1;
      os << ')';
    }
    os << " -> " << write_term(g, g.rhs(a)) << '\n';
  };
  emit(g.start());
  for (NonterminalId a = 0; a < g.nonterminal_count(); ++a)
    if (a != g.start()) emit(a);
  return os.str();
}

/// A renaming-invariant description of g: nonterminals are numbered in
/// order of first reference, breadth-first from the start rule, and each
/// rule is written with those numbers.
inline std::string canonical_form(const SltGrammar& g) {
  std::vector<std::uint32_t> number(g.nonterminal_count(), UINT32_MAX);
  std::vector<NonterminalId> order{g.start()};
  number[g.start()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto b : referenced(g, order[i]))
      if (number[b] == UINT32_MAX) {
        number[b] = static_cast<std::uint32_t>(order.size());
        order.push_back(b);
      }
  SltGrammar renamed;
  for (auto a : order) renamed.declare("#" + std::to_string(number[a]), g.rank(a));
  std::ostringstream os;
  for (auto a : order) {
    RhsTree rhs = g.rhs(a);
    for (std::uint32_t i = 0; i < rhs.node_count(); ++i)
      if (rhs.node(i).kind == SymbolKind::Nonterminal) rhs.node(i).index = number[rhs.node(i).index];
    os << '#' << number[a] << '/' << g.rank(a) << " -> " << write_term(renamed, rhs) << '\n';
  }
  return os.str();
}

}  // namespace gcx
