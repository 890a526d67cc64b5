#pragma once

// Shared fixtures and brute-force helpers for the test binaries.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gcx/gcx.hpp"

namespace gcx::test {

inline std::string read_data(const std::string& name) {
  std::ifstream in(std::string(GCX_DATA_DIR) + "/" + name, std::ios::binary);
  if (!in) throw Error("cannot open data file " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const char* const kLibraryGrammar =
    "S -> lib(B(B(_)),_)\n"
    "B(y1) -> book(T,y1)\n"
    "T -> title(_,author(_,_))\n";

inline const char* const kLibraryXml =
    "<library><book><title/><author/></book><book><title/><author/></book></library>";

/// The binary tree encoding the library document (root label parameterized).
inline std::string library_term(const std::string& root) {
  return root + "(book(title(_,author(_,_)),book(title(_,author(_,_)),_)),_)";
}

inline const char* const kChainGrammar =
    "A0 -> A1(A1(e(_,_)))\n"
    "A1(y1) -> A2(A2(y1))\n"
    "A2(y1) -> A3(A3(y1))\n"
    "A3(y1) -> a(a(y1,_),_)\n";

inline const char* const kEveryThird =
    "q1,% -> q2,dead\n"
    "q2,% -> q3,dead\n"
    "q3,% => q1,dead\n"
    "dead,% -> dead,dead\n";

/// The nine relabeled rules in binary syntax; the reference drawing leaves out the
/// `_` right children.
inline const char* const kChainRelabeled =
    "q1.A0 -> q1.A1.q3(q3.A1.q2(e(_,_)))\n"
    "q1.A1.q3(y1) -> q1.A2.q2(q2.A2.q3(y1))\n"
    "q1.A2.q2(y1) -> q1.A3.q3(q3.A3.q2(y1))\n"
    "q1.A3.q3(y1) -> a(a(y1,_),_)\n"
    "q3.A3.q2(y1) -> ^a(a(y1,_),_)\n"
    "q2.A2.q3(y1) -> q2.A3.q1(q1.A3.q3(y1))\n"
    "q2.A3.q1(y1) -> a(^a(y1,_),_)\n"
    "q3.A1.q2(y1) -> q3.A2.q1(q1.A2.q2(y1))\n"
    "q3.A2.q1(y1) -> q3.A3.q2(q2.A3.q1(y1))\n";

inline const char* const kChainSlp =
    "S -> L113 L312 <e> </e> R312 R113\n"
    "L113 -> L122 L223\n"
    "R113 -> R223 R122\n"
    "L122 -> L133 L332\n"
    "R122 -> R332 R133\n"
    "L223 -> L231 L133\n"
    "R223 -> R133 R231\n"
    "L312 -> L321 L122\n"
    "R312 -> R122 R321\n"
    "L321 -> L332 L231\n"
    "R321 -> R231 R332\n"
    "L133 -> <a> <a>\n"
    "R133 -> </a> </a>\n"
    "L332 -> <^a> <a>\n"
    "R332 -> </a> </^a>\n"
    "L231 -> <a> <^a>\n"
    "R231 -> </^a> </a>\n";

/// The reference rule table for //a/*/b//c/d.
inline const char* const kPathQueryReference =
    "q0,a -> q1,q0\n"
    "q0,% -> q0,q0\n"
    "q1,a -> q2,q1\n"
    "q1,% -> q3,q1\n"
    "q2,a -> q2,q2\n"
    "q2,b -> q4,q2\n"
    "q2,% -> q3,q2\n"
    "q3,a -> q2,q3\n"
    "q3,b -> q4,q3\n"
    "q3,% -> q3,q3\n"
    "q4,c -> q5,q4\n"
    "q4,% -> q4,q4\n"
    "q5,c -> q5,q5\n"
    "q5,d => q6,q5\n"
    "q5,% -> q4,q5\n"
    "q6,c -> q5,q6\n"
    "q6,% -> q4,q6\n";

/// The same table with state 3 recomputed from the query's semantics.
inline const char* const kPathQueryCorrected =
    "q0,a -> q1,q0\n"
    "q0,% -> q0,q0\n"
    "q1,a -> q2,q1\n"
    "q1,% -> q3,q1\n"
    "q2,a -> q2,q2\n"
    "q2,b -> q4,q2\n"
    "q2,% -> q3,q2\n"
    "q3,a -> q1,q3\n"
    "q3,b -> q4,q3\n"
    "q3,% -> q0,q3\n"
    "q4,c -> q5,q4\n"
    "q4,% -> q4,q4\n"
    "q5,c -> q5,q5\n"
    "q5,d => q6,q5\n"
    "q5,% -> q4,q5\n"
    "q6,c -> q5,q6\n"
    "q6,% -> q4,q6\n";

inline const char* const kSiblingReference =
    "0,a -> dead,1\n"
    "0,% -> dead,0\n"
    "1,b -> 2,1\n"
    "1,% -> dead,1\n"
    "2,c => dead,2\n"
    "2,% -> dead,2\n"
    "dead,% -> dead,dead\n";

/// S -> A_n(_), A_i(y1) -> A_{i-1}(A_{i-1}(y1)), A_0(y1) -> a(a(y1,_),_):
/// n+2 rules generating a left spine of 2^(n+1) nodes labeled a.
inline SltGrammar doubling_grammar(std::size_t n) {
  std::ostringstream os;
  os << "S -> A" << n << "(_)\n";
  for (std::size_t i = n; i >= 1; --i)
    os << "A" << i << "(y1) -> A" << i - 1 << "(A" << i - 1 << "(y1))\n";
  os << "A0(y1) -> a(a(y1,_),_)\n";
  return parse_grammar(os.str());
}

inline DstAutomaton select_all() { return parse_dst("q,% => q,q\n"); }

/// Ground truth computed on the decompressed tree.
struct Expected {
  std::vector<BigInt> ids;
  std::string serialization;
};

inline Expected brute_force(const BinTree& t, const DstAutomaton& a, const TagStyle& style = {}) {
  Expected e;
  const auto pre = preorder_ids(t);
  std::ostringstream os;
  for (auto u : dst_select(a, t)) {
    e.ids.emplace_back(pre[u]);
    write_subtree(os, t, u, style);
  }
  e.serialization = os.str();
  return e;
}

inline std::vector<BigInt> to_big(const std::vector<std::uint64_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace gcx::test

namespace gcx::test {

/// Reads back the string automaton behind a lifted rule table: the left
/// target of each rule is the DFA transition.
inline PathDfa dfa_from_table(const std::string& table, const std::vector<std::string>& finals) {
  const auto a = parse_dst(table);
  PathDfa d;
  d.states.resize(a.state_count());
  d.initial = a.initial();
  for (const auto& r : a.rules()) {
    if (r.is_default()) {
      d.states[r.state].fallback = r.left;
    } else {
      d.states[r.state].exceptions[r.label] = r.left;
    }
  }
  for (const auto& f : finals) d.states[*a.find(f)].final = true;
  return d;
}

/// True iff the label path (root first) ends at a node the child/descendant
/// steps select.
inline bool path_matches(const std::vector<Step>& steps, const std::vector<std::string>& path,
                         std::size_t i = 0, std::size_t j = 0) {
  if (i == steps.size()) return j == path.size();
  const Step& s = steps[i];
  if (s.axis == Axis::Child)
    return j < path.size() && s.matches(path[j]) && path_matches(steps, path, i + 1, j + 1);
  for (std::size_t k = j; k < path.size(); ++k)
    if (s.matches(path[k]) && path_matches(steps, path, i + 1, k + 1)) return true;
  return false;
}

}  // namespace gcx::test
