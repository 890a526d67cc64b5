#pragma once

// Straight-line string grammars over open/close tag tokens.
//
// File format, one rule per line, the first rule being the start rule:
//
//   NT -> item item ...      item := NT | <label> | </label> | <^label> | </^label>
//
// Lines starting with `#` are comments. A right-hand side may be empty.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gcx/bigint.hpp"
#include "gcx/error.hpp"
#include "gcx/tree.hpp"

namespace gcx {

struct SlpToken {
  bool open = true;
  std::string label;
  bool marked = false;
  bool operator==(const SlpToken&) const = default;
};

struct SlpSymbol {
  enum class Kind : std::uint8_t { Open, Close, Ref };
  Kind kind = Kind::Open;
  std::string label;   // Open/Close
  bool marked = false;  // Open/Close
  std::uint32_t ref = 0;  // Ref

  static SlpSymbol open_tag(std::string label, bool marked = false) {
    return {Kind::Open, std::move(label), marked, 0};
  }
  static SlpSymbol close_tag(std::string label, bool marked = false) {
    return {Kind::Close, std::move(label), marked, 0};
  }
  static SlpSymbol reference(std::uint32_t id) { return {Kind::Ref, {}, false, id}; }

  bool is_ref() const noexcept { return kind == Kind::Ref; }
  SlpToken token() const { return {kind == Kind::Open, label, marked}; }
  bool operator==(const SlpSymbol&) const = default;
};

class Slp {
 public:
  using Id = std::uint32_t;

  Id declare(std::string name) {
    if (index_.count(name) != 0) throw Error("duplicate SLP nonterminal '" + name + "'");
    const auto id = static_cast<Id>(names_.size());
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    rules_.emplace_back();
    return id;
  }

  Id add(std::string name, std::vector<SlpSymbol> rhs) {
    const auto id = declare(std::move(name));
    rules_[id] = std::move(rhs);
    return id;
  }

  void set_rule(Id id, std::vector<SlpSymbol> rhs) { rules_[id] = std::move(rhs); }
  std::vector<SlpSymbol>& rule(Id id) { return rules_[id]; }
  void set_start(Id id) { start_ = id; }

  Id start() const noexcept { return start_; }
  std::size_t nonterminal_count() const noexcept { return names_.size(); }
  const std::string& name(Id id) const { return names_[id]; }
  const std::vector<SlpSymbol>& rule(Id id) const { return rules_[id]; }

  std::optional<Id> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool has_name(const std::string& name) const { return index_.count(name) != 0; }

  /// Equal up to the numbering of nonterminals: same names, same start,
  /// and the same right-hand sides with references compared by name.
  friend bool operator==(const Slp& a, const Slp& b) {
    if (a.names_.size() != b.names_.size() || a.names_.empty() != b.names_.empty()) return false;
    if (!a.names_.empty() && a.names_[a.start_] != b.names_[b.start_]) return false;
    for (Id x = 0; x < a.names_.size(); ++x) {
      const auto y = b.find(a.names_[x]);
      if (!y) return false;
      const auto& ra = a.rules_[x];
      const auto& rb = b.rules_[*y];
      if (ra.size() != rb.size()) return false;
      for (std::size_t i = 0; i < ra.size(); ++i) {
        if (ra[i].kind != rb[i].kind) return false;
        if (ra[i].kind == SlpSymbol::Kind::Ref) {
          if (a.names_[ra[i].ref] != b.names_[rb[i].ref]) return false;
        } else if (ra[i].label != rb[i].label || ra[i].marked != rb[i].marked) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<SlpSymbol>> rules_;
  std::unordered_map<std::string, Id> index_;
  Id start_ = 0;
};

namespace detail {

// Post-order of the reference relation from `roots`; nullopt on a cycle.
inline std::optional<std::vector<Slp::Id>> slp_postorder(const Slp& p, const std::vector<Slp::Id>& roots) {
  enum : std::uint8_t { kNew, kActive, kDone };
  const auto n = p.nonterminal_count();
  std::vector<std::uint8_t> state(n, kNew);
  std::vector<Slp::Id> order;
  std::vector<std::pair<Slp::Id, std::size_t>> stack;
  for (auto r : roots) {
    if (r >= n || state[r] != kNew) continue;
    state[r] = kActive;
    stack.emplace_back(r, 0);
    while (!stack.empty()) {
      auto& [a, next] = stack.back();
      const auto& rhs = p.rule(a);
      while (next < rhs.size() && !(rhs[next].is_ref() && rhs[next].ref < n)) ++next;
      if (next < rhs.size()) {
        const auto b = rhs[next++].ref;
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

/// All violations; empty means valid.
inline std::vector<std::string> validate(const Slp& p) {
  std::vector<std::string> out;
  const auto n = p.nonterminal_count();
  if (n == 0) {
    out.push_back("SLP has no rules");
    return out;
  }
  if (p.start() >= n) {
    out.push_back("start symbol is undefined");
    return out;
  }
  bool refs_ok = true;
  for (Slp::Id a = 0; a < n; ++a) {
    for (const auto& s : p.rule(a)) {
      if (s.is_ref() && s.ref >= n) {
        out.push_back(p.name(a) + ": reference to undefined nonterminal #" + std::to_string(s.ref));
        refs_ok = false;
      } else if (!s.is_ref() && !is_valid_label(s.label)) {
        out.push_back(p.name(a) + ": invalid tag label '" + s.label + "'");
      }
    }
  }
  if (!refs_ok) return out;
  std::vector<Slp::Id> all(n);
  for (Slp::Id a = 0; a < n; ++a) all[a] = a;
  if (!detail::slp_postorder(p, all)) {
    out.push_back("reference relation is cyclic");
    return out;
  }
  const auto reach = detail::slp_postorder(p, {p.start()});
  if (reach->size() != n) {
    std::vector<bool> r(n, false);
    for (auto a : *reach) r[a] = true;
    for (Slp::Id a = 0; a < n; ++a)
      if (!r[a]) out.push_back(p.name(a) + ": not reachable from the start symbol");
  }
  return out;
}

inline void check_valid(const Slp& p) {
  auto v = validate(p);
  if (!v.empty()) throw ValidationError(std::move(v));
}

/// Nonterminals ordered so that referenced ones come first.
inline std::vector<Slp::Id> topo_order(const Slp& p) {
  std::vector<Slp::Id> roots{p.start()};
  for (Slp::Id a = 0; a < p.nonterminal_count(); ++a) roots.push_back(a);
  auto order = detail::slp_postorder(p, roots);
  if (!order) throw Error("SLP reference relation is cyclic");
  return *order;
}

/// Expansion length of every nonterminal.
inline std::vector<BigInt> lengths(const Slp& p) {
  std::vector<BigInt> len(p.nonterminal_count());
  for (auto a : topo_order(p)) {
    BigInt total = 0;
    for (const auto& s : p.rule(a)) total += s.is_ref() ? len[s.ref] : BigInt(1);
    len[a] = std::move(total);
  }
  return len;
}

/// Total number of right-hand-side symbols.
inline std::size_t size(const Slp& p) {
  std::size_t total = 0;
  for (Slp::Id a = 0; a < p.nonterminal_count(); ++a) total += p.rule(a).size();
  return total;
}

/// Calls `emit(token)` for every token of the expansion, in order.
template <class Emit>
void for_each_token(const Slp& p, Emit&& emit) {
  std::vector<std::pair<Slp::Id, std::size_t>> stack{{p.start(), 0}};
  while (!stack.empty()) {
    auto& [a, i] = stack.back();
    const auto& rhs = p.rule(a);
    if (i == rhs.size()) {
      stack.pop_back();
      continue;
    }
    const SlpSymbol& s = rhs[i++];
    if (s.is_ref()) {
      stack.emplace_back(s.ref, 0);
    } else {
      emit(s);
    }
  }
}

/// Default bound on the number of tokens an SLP expansion may produce.
inline constexpr std::size_t kDefaultTokenLimit = 200'000'000;

/// The expanded token sequence. Throws LimitExceeded beyond `limit` tokens.
inline std::vector<SlpToken> expand(const Slp& p, std::size_t limit = kDefaultTokenLimit) {
  check_valid(p);
  const auto len = lengths(p);
  if (len[p.start()] > limit)
    throw LimitExceeded("SLP expansion has " + len[p.start()].str() + " tokens, over the limit of " +
                        std::to_string(limit));
  std::vector<SlpToken> out;
  out.reserve(static_cast<std::size_t>(len[p.start()]));
  for_each_token(p, [&](const SlpSymbol& s) { out.push_back(s.token()); });
  return out;
}

inline void write_token(std::ostream& os, const SlpToken& t, const TagStyle& style = {}) {
  if (t.open) write_open_tag(os, t.label, t.marked, style);
  else write_close_tag(os, t.label, t.marked, style);
}

inline std::string detokenize(const std::vector<SlpToken>& tokens, const TagStyle& style = {}) {
  std::ostringstream os;
  for (const auto& t : tokens) write_token(os, t, style);
  return os.str();
}

/// Streams the detokenized expansion without materializing it.
inline void write_expansion(std::ostream& os, const Slp& p, const TagStyle& style = {}) {
  check_valid(p);
  for_each_token(p, [&](const SlpSymbol& s) { write_token(os, s.token(), style); });
}

/// Restriction to the nonterminals reachable from the start; rule order kept.
inline Slp remove_unreachable(const Slp& p) {
  const auto n = p.nonterminal_count();
  std::vector<bool> reach(n, false);
  std::vector<Slp::Id> stack{p.start()};
  reach[p.start()] = true;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (const auto& s : p.rule(a)) {
      if (s.is_ref() && s.ref < n && !reach[s.ref]) {
        reach[s.ref] = true;
        stack.push_back(s.ref);
      }
    }
  }
  Slp out;
  std::vector<Slp::Id> remap(n, 0);
  for (Slp::Id a = 0; a < n; ++a)
    if (reach[a]) remap[a] = out.declare(p.name(a));
  for (Slp::Id a = 0; a < n; ++a) {
    if (!reach[a]) continue;
    auto rhs = p.rule(a);
    for (auto& s : rhs)
      if (s.is_ref()) s.ref = remap[s.ref];
    out.set_rule(remap[a], std::move(rhs));
  }
  out.set_start(remap[p.start()]);
  return out;
}

namespace detail {

inline bool valid_slp_name(std::string_view s) {
  if (s.empty() || s.front() == '<' || s == "->" || s.front() == '#') return false;
  for (char c : s)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  return true;
}

}  // namespace detail

inline Slp parse_slp(std::string_view text) {
  struct Line {
    std::size_t number;
    std::vector<std::string_view> items;
  };
  std::vector<Line> lines;
  Slp p;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      const auto start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r') ++i;
      if (i > start) words.push_back(raw.substr(start, i - start));
    }
    if (words.empty() || words.front().front() == '#') continue;
    if (words.size() < 2 || words[1] != "->") throw ParseError("SLP: expected 'NT -> ...'", number, 1);
    if (!detail::valid_slp_name(words[0]))
      throw ParseError("SLP: invalid nonterminal name '" + std::string(words[0]) + "'", number, 1);
    if (p.has_name(std::string(words[0])))
      throw ParseError("SLP: nonterminal '" + std::string(words[0]) + "' defined twice", number, 1);
    p.declare(std::string(words[0]));
    lines.push_back({number, std::vector<std::string_view>(words.begin() + 2, words.end())});
  }
  if (lines.empty()) throw ParseError("SLP: no rules", number, 1);
  for (Slp::Id a = 0; a < lines.size(); ++a) {
    std::vector<SlpSymbol> rhs;
    for (auto item : lines[a].items) {
      if (item.front() == '<') {
        if (item.size() < 3 || item.back() != '>')
          throw ParseError("SLP: malformed tag '" + std::string(item) + "'", lines[a].number, 1);
        const bool close = item[1] == '/';
        auto label = item.substr(close ? 2 : 1, item.size() - (close ? 3 : 2));
        const bool marked = !label.empty() && label.front() == '^';
        if (marked) label.remove_prefix(1);
        if (!is_valid_label(label))
          throw ParseError("SLP: invalid tag '" + std::string(item) + "'", lines[a].number, 1);
        rhs.push_back(close ? SlpSymbol::close_tag(std::string(label), marked)
                            : SlpSymbol::open_tag(std::string(label), marked));
      } else {
        auto id = p.find(item);
        if (!id)
          throw ParseError("SLP: undefined nonterminal '" + std::string(item) + "'", lines[a].number, 1);
        rhs.push_back(SlpSymbol::reference(*id));
      }
    }
    p.set_rule(a, std::move(rhs));
  }
  p.set_start(0);
  check_valid(p);
  return p;
}

/// Writes p with its start rule first.
inline std::string write_slp(const Slp& p) {
  std::ostringstream os;
  auto emit = [&](Slp::Id a) {
    if (!detail::valid_slp_name(p.name(a))) throw Error("cannot write SLP name '" + p.name(a) + "'");
    os << p.name(a) << " ->";
    for (const auto& s : p.rule(a)) {
      os << ' ';
      if (s.is_ref()) os << p.name(s.ref);
      else write_token(os, s.token());
    }
    os << '\n';
  };
  emit(p.start());
  for (Slp::Id a = 0; a < p.nonterminal_count(); ++a)
    if (a != p.start()) emit(a);
  return os.str();
}

/// A renaming-invariant description: nonterminals are numbered in order of
/// first reference, breadth-first from the start rule.
inline std::string canonical_form(const Slp& p) {
  std::vector<std::uint32_t> number(p.nonterminal_count(), UINT32_MAX);
  std::vector<Slp::Id> order{p.start()};
  number[p.start()] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& s : p.rule(order[i]))
      if (s.is_ref() && number[s.ref] == UINT32_MAX) {
        number[s.ref] = static_cast<std::uint32_t>(order.size());
        order.push_back(s.ref);
      }
  std::ostringstream os;
  for (std::size_t i = 0; i < order.size(); ++i) {
    os << i << " ->";
    for (const auto& s : p.rule(order[i])) {
      os << ' ';
      if (s.is_ref()) os << '#' << number[s.ref];
      else write_token(os, s.token());
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace gcx
