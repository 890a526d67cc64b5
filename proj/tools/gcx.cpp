// gcx: query grammar-compressed XML without decompressing it.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gcx/gcx.hpp"

namespace {

using nlohmann::json;

struct Config {
  std::string input;
  std::string query;
  std::string automaton;
  std::string output;
  std::size_t limit = gcx::kDefaultExpansionLimit;
  std::size_t dfa_cap = gcx::kDefaultStateCap;
  std::string mark = "^";
  bool nnf = false;
  bool dag = false;
  bool strict = false;
  bool as_json = false;
  std::uint64_t seed = 0;
  std::string kind = "grammar";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gcx::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Output sink: the -o file if given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw gcx::Error("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  void finish() {
    os().flush();
    if (!os()) throw gcx::Error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

gcx::TagStyle style(const Config& c) { return gcx::TagStyle{c.mark}; }

gcx::SltGrammar load_grammar(const Config& c) {
  const auto text = read_file(c.input);
  if (ends_with(c.input, ".xml")) return gcx::build_dag(gcx::fcns_encode(gcx::parse_xml(text, {c.strict})));
  return gcx::parse_grammar(text);
}

gcx::DstAutomaton load_automaton(const Config& c) {
  if (!c.automaton.empty()) {
    if (!c.query.empty()) throw gcx::Error("give either a query or --automaton, not both");
    return gcx::parse_dst(read_file(c.automaton));
  }
  if (c.query.empty()) throw gcx::Error("a query or --automaton FILE is required");
  return gcx::query_to_dst(c.query, c.dfa_cap);
}

void print_ids(Sink& out, const Config& c, const std::vector<gcx::BigInt>& ids) {
  if (c.as_json) {
    json j = json::array();
    for (const auto& u : ids) j.push_back(u.str());
    out.os() << json{{"ids", j}}.dump() << '\n';
    return;
  }
  for (const auto& u : ids) out.os() << u << '\n';
}

void cmd_compress(const Config& c) {
  auto g = gcx::build_dag(gcx::fcns_encode(gcx::parse_xml(read_file(c.input), {c.strict})));
  if (c.nnf) g = gcx::node_normal_form(g);
  Sink out(c.output);
  out.os() << gcx::write_grammar(g);
  out.finish();
}

void cmd_decompress(const Config& c) {
  const auto g = load_grammar(c);
  const auto b = gcx::expand(g, c.limit);
  Sink out(c.output);
  if (!b.is_underscore()) {
    if (b.right(b.root()) != gcx::BinTree::kUnderscore)
      throw gcx::Error("grammar does not encode a document: the root has a sibling");
    gcx::write_subtree(out.os(), b, b.root(), style(c));
  }
  out.os() << '\n';
  out.finish();
}

void cmd_count(const Config& c) {
  const auto n = gcx::count(load_grammar(c), load_automaton(c));
  Sink out(c.output);
  if (c.as_json) out.os() << json{{"count", n.str()}}.dump() << '\n';
  else out.os() << n << '\n';
  out.finish();
}

void cmd_materialize(const Config& c) {
  const auto ids = gcx::materialize(load_grammar(c), load_automaton(c));
  Sink out(c.output);
  print_ids(out, c, ids);
  out.finish();
}

void cmd_serialize(const Config& c) {
  const auto g = load_grammar(c);
  const auto a = load_automaton(c);
  Sink out(c.output);
  gcx::serialize(out.os(), g, a, style(c));
  out.os() << '\n';
  out.finish();
}

void cmd_slp(const Config& c) {
  const auto g = load_grammar(c);
  const auto ids = gcx::materialize(g, load_automaton(c));
  const bool dag = c.dag && gcx::grammar_rank(g) == 0;
  if (c.dag && !dag) std::cerr << "gcx: --dag ignored: the grammar has parameters\n";
  const auto p = dag ? gcx::dag_subtrees_slp(g, ids) : gcx::subtrees_slp(g, ids);
  Sink out(c.output);
  out.os() << gcx::write_slp(p);
  out.finish();
}

void cmd_oracle(const Config& c) {
  const auto b = gcx::expand(load_grammar(c), c.limit);
  std::vector<gcx::BigInt> ids;
  if (!c.automaton.empty() || c.query.empty()) {
    for (auto u : gcx::dst_run(load_automaton(c), b)) ids.emplace_back(u);
  } else {
    for (auto u : gcx::naive_eval(gcx::parse_xpath(c.query), gcx::fcns_decode(b))) ids.emplace_back(u);
  }
  Sink out(c.output);
  print_ids(out, c, ids);
  out.finish();
}

json describe(const Config& c) {
  const auto text = read_file(c.input);
  if (ends_with(c.input, ".slp")) {
    const auto p = gcx::parse_slp(text);
    return {{"kind", "slp"},
            {"rules", p.nonterminal_count()},
            {"size", gcx::size(p)},
            {"length", gcx::lengths(p)[p.start()].str()}};
  }
  if (ends_with(c.input, ".dst")) {
    const auto a = gcx::parse_dst(text);
    return {{"kind", "automaton"}, {"states", a.state_count()}, {"rules", a.rules().size()}};
  }
  if (ends_with(c.input, ".xml")) {
    const auto t = gcx::parse_xml(text, {c.strict});
    const auto g = gcx::build_dag(gcx::fcns_encode(t));
    return {{"kind", "xml"},
            {"nodes", t.size()},
            {"dag_rules", g.nonterminal_count()},
            {"dag_size", gcx::grammar_size(g)}};
  }
  const auto g = gcx::parse_grammar(text);
  const auto nodes = gcx::expansion_size(g);
  const auto edges = 2 * nodes;
  const double ratio = static_cast<double>(edges) / static_cast<double>(gcx::grammar_size(g));
  return {{"kind", "grammar"},
          {"rules", g.nonterminal_count()},
          {"size", gcx::grammar_size(g)},
          {"rank", gcx::grammar_rank(g)},
          {"expansion_nodes", nodes.str()},
          {"compression_ratio", ratio}};
}

void cmd_validate(const Config& c) {
  describe(c);
  Sink out(c.output);
  if (c.as_json) out.os() << json{{"valid", true}}.dump() << '\n';
  else out.os() << "ok\n";
  out.finish();
}

void cmd_stats(const Config& c) {
  const auto j = describe(c);
  Sink out(c.output);
  if (c.as_json) {
    out.os() << j.dump() << '\n';
  } else {
    for (const auto& [k, v] : j.items())
      out.os() << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  out.finish();
}

void cmd_generate(const Config& c) {
  Sink out(c.output);
  if (c.kind == "grammar") out.os() << gcx::write_grammar(gcx::random_grammar(c.seed));
  else if (c.kind == "query") out.os() << gcx::to_string(gcx::random_query(c.seed)) << '\n';
  else if (c.kind == "xml") out.os() << gcx::write_xml(gcx::random_tree(c.seed, 50)) << '\n';
  else throw gcx::Error("unknown kind '" + c.kind + "' (grammar, query or xml)");
  out.finish();
}

int report(const Config& c, const std::exception& e, int code) {
  if (c.as_json) std::cout << json{{"error", e.what()}, {"exit", code}}.dump() << '\n';
  std::cerr << "gcx: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Query grammar-compressed XML documents without decompressing them"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", c.output, "Write the result to FILE instead of stdout");
    cmd->add_option("--limit", c.limit, "Expansion node/token limit");
    cmd->add_option("--mark", c.mark, "Prefix for selected labels in XML output");
    cmd->add_flag("--strict", c.strict, "Reject comments, CDATA and DOCTYPE in XML input");
    cmd->add_flag("--json", c.as_json, "Machine-readable output");
  };
  auto query = [&](CLI::App* cmd) {
    common(cmd);
    cmd->add_option("input", c.input, "Grammar (.slt) or document (.xml)")->required();
    cmd->add_option("query", c.query, "XPath query");
    cmd->add_option("--automaton", c.automaton, "Use the DST automaton in FILE instead of a query");
    cmd->add_option("--dfa-cap", c.dfa_cap, "Maximum number of query automaton states");
  };

  std::vector<std::pair<CLI::App*, void (*)(const Config&)>> commands;
  auto add = [&](const char* name, const char* help, void (*fn)(const Config&)) {
    auto* cmd = app.add_subcommand(name, help);
    commands.emplace_back(cmd, fn);
    return cmd;
  };

  auto* compress = add("compress", "DAG-compress an XML document into a grammar", cmd_compress);
  common(compress);
  compress->add_option("input", c.input, "XML document")->required();
  compress->add_flag("--nnf", c.nnf, "Emit the node normal form");

  auto* decompress = add("decompress", "Expand a grammar back into XML", cmd_decompress);
  common(decompress);
  decompress->add_option("input", c.input, "Grammar (.slt)")->required();

  query(add("count", "Count the selected nodes", cmd_count));
  query(add("materialize", "List pre-order numbers of selected nodes", cmd_materialize));
  query(add("serialize", "Write the subtrees of selected nodes as XML", cmd_serialize));
  auto* slp = add("slp", "Write an SLP generating the selected subtrees", cmd_slp);
  query(slp);
  slp->add_flag("--dag", c.dag, "Use the node normal form construction for rank-0 grammars");
  query(add("oracle", "Evaluate on the expanded document (reference)", cmd_oracle));

  auto* validate = add("validate", "Check a grammar, SLP, automaton or document", cmd_validate);
  common(validate);
  validate->add_option("input", c.input, "File (.slt, .slp, .dst or .xml)")->required();

  auto* stats = add("stats", "Sizes, ranks and compression ratio", cmd_stats);
  common(stats);
  stats->add_option("input", c.input, "File (.slt, .slp, .dst or .xml)")->required();

  auto* generate = add("generate", "Emit a seeded random grammar, query or document", cmd_generate);
  common(generate);
  generate->add_option("--seed", c.seed, "Random seed");
  generate->add_option("--kind", c.kind, "grammar, query or xml");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    for (const auto& [cmd, fn] : commands)
      if (cmd->parsed()) fn(c);
  } catch (const gcx::LimitExceeded& e) {
    return report(c, e, 2);
  } catch (const std::exception& e) {
    return report(c, e, 1);
  }
  return 0;
}
