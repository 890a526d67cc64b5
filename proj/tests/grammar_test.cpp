#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace gcx;

namespace {

bool has_violation(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

/// Complete binary tree of a's with d levels of internal nodes.
BinTree full_tree(int d) {
  BinTree b;
  std::vector<BinTree::NodeId> level;
  for (int i = 0; i < (1 << (d - 1)); ++i) level.push_back(BinTree::kUnderscore);
  std::vector<BinTree::NodeId> leaves;
  for (int i = 0; i < (1 << (d - 1)); ++i) leaves.push_back(b.add("a"));
  level = leaves;
  while (level.size() > 1) {
    std::vector<BinTree::NodeId> up;
    for (std::size_t i = 0; i < level.size(); i += 2) up.push_back(b.add("a", level[i], level[i + 1]));
    level = up;
  }
  b.set_root(level[0]);
  return b;
}

}  // namespace

TEST(Grammar, ParsesLibrary) {
  const auto g = parse_grammar(test::kLibraryGrammar);
  EXPECT_TRUE(validate(g).empty());
  EXPECT_EQ(g.nonterminal_count(), 3u);
  EXPECT_EQ(g.name(g.start()), "S");
  EXPECT_EQ(grammar_size(g), 10u);
  EXPECT_EQ(grammar_rank(g), 1u);
  EXPECT_EQ(g.rank(*g.find("B")), 1u);
  EXPECT_EQ(g.rank(*g.find("T")), 0u);
}

TEST(Grammar, ExpandsLibrary) {
  const auto g = parse_grammar(test::kLibraryGrammar);
  const auto b = expand(g);
  EXPECT_EQ(format_term(b), test::library_term("lib"));
  EXPECT_EQ(b.node_count(), 7u);
  EXPECT_EQ(expansion_size(g), 7);
}

TEST(Grammar, ExpandNonterminal) {
  const auto g = parse_grammar(test::kLibraryGrammar);
  EXPECT_EQ(write_term(g, expand_nonterminal(g, *g.find("B"))), "book(title(_,author(_,_)),y1)");
  EXPECT_EQ(write_term(g, expand_nonterminal(g, *g.find("T"))), "title(_,author(_,_))");
  EXPECT_EQ(write_term(g, expand_nonterminal(g, g.start())), format_term(expand(g)));
}

TEST(Grammar, TopoOrderLibrary) {
  const auto g = parse_grammar(test::kLibraryGrammar);
  std::vector<std::string> names;
  for (auto a : topo_order(g)) names.push_back(g.name(a));
  EXPECT_EQ(names, (std::vector<std::string>{"T", "B", "S"}));
}

TEST(Grammar, SingleLabelStart) {
  const auto g = parse_grammar("S -> a(_,_)\n");
  EXPECT_EQ(format_term(expand(g)), "a(_,_)");
  EXPECT_EQ(grammar_size(g), 2u);
}

TEST(Grammar, ChainExpansion) {
  const auto g = parse_grammar(test::kChainGrammar);
  std::string want = "e(_,_)";
  for (int i = 0; i < 16; ++i) want = "a(" + want + ",_)";
  EXPECT_EQ(format_term(expand(g)), want);
  EXPECT_EQ(expansion_size(g), 17);
}

TEST(Grammar, ParsesMarkedLabels) {
  const auto g = parse_grammar(test::kChainRelabeled);
  EXPECT_EQ(g.nonterminal_count(), 9u);
  const auto b = expand(g);
  std::vector<std::uint64_t> hats;
  const auto ids = preorder_ids(b);
  for (auto u : b.preorder())
    if (b.marked(u)) hats.push_back(ids[u]);
  EXPECT_EQ(hats, (std::vector<std::uint64_t>{3, 6, 9, 12, 15}));
}

TEST(Grammar, WriteParseRoundTrip) {
  for (const char* text : {test::kLibraryGrammar, test::kChainGrammar, test::kChainRelabeled}) {
    const auto g = parse_grammar(text);
    const auto again = parse_grammar(write_grammar(g));
    EXPECT_EQ(write_grammar(again), write_grammar(g));
    EXPECT_EQ(format_term(expand(again)), format_term(expand(g)));
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = random_grammar(seed);
    EXPECT_EQ(write_grammar(parse_grammar(write_grammar(g))), write_grammar(g)) << seed;
  }
}

TEST(Grammar, CommentsAndBlankLines) {
  const auto g = parse_grammar("# header\n\nS -> a(T,_)\n  # note\nT -> b(_,_)\n");
  EXPECT_EQ(format_term(expand(g)), "a(b(_,_),_)");
}

TEST(Grammar, CyclicHierarchy) {
  const auto g = parse_grammar_unchecked("S -> A\nA -> B\nB -> A\n");
  EXPECT_TRUE(has_violation(validate(g), "cycl"));
  EXPECT_THROW(parse_grammar("S -> A\nA -> B\nB -> A\n"), ValidationError);
}

TEST(Grammar, ParameterOrder) {
  const auto g = parse_grammar_unchecked("S -> A(_,_)\nA(y1,y2) -> a(y2,y1)\n");
  EXPECT_TRUE(has_violation(validate(g), "pre-order"));
}

TEST(Grammar, ParameterUsedTwiceOrMissing) {
  EXPECT_FALSE(validate(parse_grammar_unchecked("S -> A(_)\nA(y1) -> a(y1,y1)\n")).empty());
  EXPECT_FALSE(validate(parse_grammar_unchecked("S -> A(_)\nA(y1) -> a(_,_)\n")).empty());
}

TEST(Grammar, ArityAndStartRank) {
  EXPECT_FALSE(validate(parse_grammar_unchecked("S -> A(_,_)\nA(y1) -> a(y1,_)\n")).empty());
  EXPECT_FALSE(validate(parse_grammar_unchecked("S(y1) -> a(y1,_)\n")).empty());
}

TEST(Grammar, Unreachable) {
  const auto text = std::string(test::kLibraryGrammar) + "X -> a(_,_)\n";
  const auto g = parse_grammar_unchecked(text);
  EXPECT_TRUE(has_violation(validate(g), "not reachable"));
  const auto h = remove_unreachable(g);
  EXPECT_TRUE(validate(h).empty());
  EXPECT_EQ(write_grammar(h), write_grammar(parse_grammar(test::kLibraryGrammar)));
  const auto g1 = parse_grammar(test::kLibraryGrammar);
  EXPECT_EQ(write_grammar(remove_unreachable(g1)), write_grammar(g1));
}

TEST(Grammar, SyntaxErrorsHavePositions) {
  try {
    parse_grammar("S -> a(_,_)\nT -> b(_,\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_grammar(""), Error);
  EXPECT_THROW(parse_grammar("S a(_,_)\n"), ParseError);
  EXPECT_THROW(parse_grammar("S -> a(_,_)\nS -> b(_,_)\n"), Error);
}

TEST(Grammar, ExpansionLimit) {
  const auto g = test::doubling_grammar(30);
  EXPECT_THROW(expand(g, 1000), LimitExceeded);
  EXPECT_EQ(expansion_size(g), BigInt(1) << 31);
}

TEST(Grammar, ChunkLengths) {
  const auto g = parse_grammar(test::kLibraryGrammar);
  const auto len = chunk_lengths(g);
  EXPECT_EQ(len[*g.find("T")], (std::vector<BigInt>{2}));
  EXPECT_EQ(len[*g.find("B")], (std::vector<BigInt>{3, 0}));
  EXPECT_EQ(len[g.start()], (std::vector<BigInt>{7}));
}

TEST(Grammar, CanonicalFormIgnoresNames) {
  const auto g = parse_grammar(test::kLibraryGrammar);
  const auto h = parse_grammar("Root -> lib(Y(Y(_)),_)\nY(y1) -> book(Z,y1)\nZ -> title(_,author(_,_))\n");
  EXPECT_EQ(canonical_form(g), canonical_form(h));
  const auto k = parse_grammar("Root -> lib(Y(Y(_)),_)\nY(y1) -> book(y1,Z)\nZ -> title(_,author(_,_))\n");
  EXPECT_NE(canonical_form(g), canonical_form(k));
}

TEST(Grammar, ExpandedParametersInPreorder) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = random_grammar(seed);
    for (NonterminalId a = 0; a < g.nonterminal_count(); ++a) {
      const auto t = expand_nonterminal(g, a);
      std::vector<std::uint32_t> seen;
      for (auto id : t.preorder())
        if (t.node(id).kind == SymbolKind::Parameter) seen.push_back(t.node(id).index);
      std::vector<std::uint32_t> want(g.rank(a));
      for (std::uint32_t i = 0; i < want.size(); ++i) want[i] = i;
      ASSERT_EQ(seen, want) << "seed " << seed << " nonterminal " << g.name(a);
    }
  }
}

TEST(Grammar, TopoOrderIsTopological) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = random_grammar(seed);
    const auto order = topo_order(g);
    ASSERT_EQ(order.size(), g.nonterminal_count());
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (NonterminalId a = 0; a < g.nonterminal_count(); ++a)
      for (auto b : referenced(g, a)) ASSERT_LT(pos[b], pos[a]) << seed;
  }
}

TEST(Dag, SharesRepeatedBooks) {
  const auto b = fcns_encode(parse_xml(test::kLibraryXml));
  const auto g = build_dag(b);
  EXPECT_TRUE(validate(g).empty());
  EXPECT_EQ(grammar_rank(g), 0u);
  EXPECT_EQ(format_term(expand(g)), format_term(b));
  EXPECT_LT(g.nonterminal_count(), b.node_count());
  EXPECT_LE(grammar_size(g), b.edge_count());
}

TEST(Dag, DistinctLabelsGiveSingleRule) {
  BinTree b;
  const auto r = b.add("r");
  const auto x = b.add("x");
  const auto y = b.add("y");
  b.set_left(r, x);
  b.set_right(x, y);
  const auto g = build_dag(b);
  EXPECT_EQ(g.nonterminal_count(), 1u);
  EXPECT_EQ(grammar_size(g), b.edge_count());
}

TEST(Dag, FullBinaryTreeIsLogarithmic) {
  for (int d = 1; d <= 12; ++d) {
    const auto b = full_tree(d);
    const auto g = build_dag(b);
    EXPECT_EQ(g.nonterminal_count(), static_cast<std::size_t>(d)) << d;
    EXPECT_EQ(format_term(expand(g)), format_term(b));
  }
}

TEST(Dag, EmptyTree) {
  const auto g = build_dag(BinTree{});
  EXPECT_TRUE(expand(g).is_underscore());
}

TEST(Dag, RandomTreesRoundTripWithoutDuplicates) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    GenOptions opts;
    opts.alphabet = {"a", "b"};
    const auto b = fcns_encode(random_tree(seed, 1 + seed % 80, opts));
    const auto g = build_dag(b);
    ASSERT_TRUE(validate(g).empty());
    ASSERT_EQ(format_term(expand(g)), format_term(b));
    ASSERT_LE(grammar_size(g), b.edge_count());
    std::set<std::string> expansions;
    for (NonterminalId a = 0; a < g.nonterminal_count(); ++a)
      expansions.insert(write_term(g, expand_nonterminal(g, a)));
    ASSERT_EQ(expansions.size(), g.nonterminal_count()) << seed;
  }
}

TEST(NodeNormalForm, SplitsNestedLabels) {
  const auto g = parse_grammar("S -> a(b(_,_),_)\n");
  const auto h = node_normal_form(g);
  EXPECT_EQ(canonical_form(h), canonical_form(parse_grammar("S -> a(B,_)\nB -> b(_,_)\n")));
  EXPECT_EQ(grammar_size(h), grammar_size(g));
}

TEST(NodeNormalForm, Idempotent) {
  const auto g = parse_grammar("S -> a(B,_)\nB -> b(_,_)\n");
  EXPECT_EQ(canonical_form(node_normal_form(g)), canonical_form(g));
}

TEST(NodeNormalForm, RejectsParameters) {
  EXPECT_THROW(node_normal_form(parse_grammar(test::kLibraryGrammar)), Error);
}

namespace {

void check_nnf(const SltGrammar& g) {
  const auto h = node_normal_form(g);
  ASSERT_TRUE(validate(h).empty());
  ASSERT_EQ(format_term(expand(h)), format_term(expand(g)));
  ASSERT_EQ(grammar_size(h), grammar_size(g));
  ASSERT_EQ(canonical_form(node_normal_form(h)), canonical_form(h));
  for (NonterminalId a = 0; a < h.nonterminal_count(); ++a) {
    const auto& t = h.rhs(a);
    ASSERT_EQ(t.node(t.root()).kind, SymbolKind::Terminal);
    for (auto c : t.node(t.root()).children) ASSERT_NE(t.node(c).kind, SymbolKind::Terminal);
  }
}

}  // namespace

TEST(NodeNormalForm, LibraryDag) {
  const auto g = build_dag(fcns_encode(parse_xml(test::kLibraryXml)));
  check_nnf(g);
  const auto h = node_normal_form(g);
  // One nonterminal per distinct binary subtree other than `_`.
  EXPECT_EQ(h.nonterminal_count(), 5u);
}

TEST(NodeNormalForm, RandomDags) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    GenOptions opts;
    opts.alphabet = {"a", "b"};
    check_nnf(build_dag(fcns_encode(random_tree(seed, 1 + seed % 80, opts))));
  }
}

TEST(NodeNormalForm, ChainRules) {
  check_nnf(parse_grammar("S -> A\nA -> B\nB -> a(B1,C)\nB1 -> C\nC -> c(_,_)\n"));
}
