// Copyright 2026 The SyHGT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syhgt/error.hpp"
#include "syhgt/graph.hpp"

using namespace syhgt;
using namespace syhgt::testing;

namespace {

// One subword per lexeme, copying the lexeme offsets.
std::vector<SubwordToken> one_subword_per_lexeme(const std::vector<LexemeToken>& lexemes) {
  std::vector<SubwordToken> out;
  for (const auto& l : lexemes) {
    out.push_back({static_cast<std::uint32_t>(out.size() + 10), l.form, l.char_start,
                   l.char_end, false});
  }
  return out;
}

std::size_t count_edges(const HeteroGraph& g, EdgeCategory c, EdgeDirection d) {
  return static_cast<std::size_t>(std::count_if(g.edges().begin(), g.edges().end(), [&](const Edge& e) {
    return e.kind.category == c && e.kind.direction == d;
  }));
}

std::vector<std::string> forward_dep_labels(const HeteroGraph& g) {
  std::vector<std::string> out;
  for (const auto& e : g.edges()) {
    if (e.kind.category == EdgeCategory::Dependency && e.kind.direction == EdgeDirection::Forward) {
      out.push_back(e.kind.label);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_lines(const std::string& text, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++n;
    ++pos;
  }
  return n;
}

// Structural invariants every built graph satisfies.
void check_invariants(const HeteroGraph& g) {
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const Vertex& x = g.vertices()[v];
    CHECK(x.id == v);
    CHECK(x.seq_pos.has_value() == (x.kind == VertexKind::Token));
  }
  REQUIRE(g.num_edges() % 2 == 0);
  for (std::size_t e = 0; e < g.num_edges(); e += 2) {
    const Edge& f = g.edges()[e];
    const Edge& r = g.edges()[e + 1];
    CHECK(f.kind.direction == EdgeDirection::Forward);
    CHECK(r.kind.direction == EdgeDirection::Reverse);
    CHECK(f.src == r.dst);
    CHECK(f.dst == r.src);
    CHECK(f.kind.category == r.kind.category);
    CHECK(f.kind.label == r.kind.label);
  }
  const auto in = g.in_edges();
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (g.vertices()[v].kind != VertexKind::Lexeme) continue;
    std::size_t morph = 0;
    for (std::size_t e : in[v]) {
      const auto& k = g.edges()[e].kind;
      morph += k.category == EdgeCategory::Morphology && k.direction == EdgeDirection::Forward;
    }
    CHECK(morph >= 2);
  }
}

}  // namespace

TEST_CASE("dependency graph: the tech-oriented economy sentence with unsplit words") {
  const auto parse = read_conllu(read_data("economy.conllu")).at(0);
  const auto subs = one_subword_per_lexeme(parse.lexemes);
  const std::vector<Alignment> al{align_subwords_to_lexemes(subs, parse.lexemes)};
  const std::vector<DependencyParse> parses{parse};
  const HeteroGraph g = build_dependency_graph(subs, al, parses);
  CHECK(g.count(VertexKind::Token) == 7);
  CHECK(g.count(VertexKind::Lexeme) == 0);
  CHECK(count_edges(g, EdgeCategory::Dependency, EdgeDirection::Forward) == 6);
  CHECK(count_edges(g, EdgeCategory::Dependency, EdgeDirection::Reverse) == 6);
  CHECK(forward_dep_labels(g) ==
        std::vector<std::string>{"amod", "amod", "det", "npadvmod", "pcomp", "pobj"});
  CHECK(g.roots() == std::vector<std::size_t>{0});
  check_invariants(g);

  const std::string dot = export_dot(g);
  CHECK(count_lines(dot, "label=\"Dependency(") == 6);
}

TEST_CASE("dependency graph: the tech-oriented economy sentence through the tokenizer") {
  // "-oriented" becomes "-" + "oriented", so one word is virtual
  const auto parse = read_conllu(read_data("economy.conllu")).at(0);
  const auto s = dependency_sentence(parse);
  CHECK(s.subwords.size() == 8);
  CHECK(s.graph.count(VertexKind::Lexeme) == 1);
  CHECK(s.graph.num_vertices() == s.subwords.size() + 1);
  CHECK(count_edges(s.graph, EdgeCategory::Morphology, EdgeDirection::Forward) == 2);
  CHECK(forward_dep_labels(s.graph) ==
        std::vector<std::string>{"amod", "amod", "det", "npadvmod", "pcomp", "pobj"});
  // word vertices: six tokens plus the lexeme
  std::set<std::size_t> words;
  for (const auto& e : s.graph.edges()) {
    if (e.kind.category == EdgeCategory::Dependency) words.insert(e.src);
  }
  CHECK(words.size() == 7);
  check_invariants(s.graph);
}

TEST_CASE("dependency graph: split root-only word") {
  const auto parse = read_conllu("1\tsteamboats\t_\t_\t_\t_\t0\troot\t_\t_\n").at(0);
  const auto s = dependency_sentence(parse);
  CHECK(s.graph.count(VertexKind::Token) == 2);
  CHECK(s.graph.count(VertexKind::Lexeme) == 1);
  CHECK(count_edges(s.graph, EdgeCategory::Morphology, EdgeDirection::Forward) == 2);
  CHECK(count_edges(s.graph, EdgeCategory::Morphology, EdgeDirection::Reverse) == 2);
  CHECK(count_edges(s.graph, EdgeCategory::Dependency, EdgeDirection::Forward) == 0);
  CHECK(s.graph.vertices()[2].label == "steamboats");
  check_invariants(s.graph);
}

TEST_CASE("dependency graph: no parses leaves isolated tokens") {
  std::vector<SubwordToken> seq{fixture_vocab().special(kClsPiece)};
  for (auto& t : tokenize_subwords("ships", fixture_vocab())) seq.push_back(t);
  seq.push_back(fixture_vocab().special(kSepPiece));
  const HeteroGraph g = build_dependency_graph(seq, {}, {});
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 0);
  CHECK(g.count(VertexKind::Token) == 3);
}

TEST_CASE("dependency graph: alignment count mismatch") {
  const auto parse = read_conllu(read_data("economy.conllu")).at(0);
  const auto subs = one_subword_per_lexeme(parse.lexemes);
  const std::vector<DependencyParse> parses{parse};
  CHECK_THROWS_AS(build_dependency_graph(subs, {}, parses), ConstructionError);
  Alignment short_al;
  short_al.groups.resize(3, {0});
  const std::vector<Alignment> al{short_al};
  CHECK_THROWS_AS(build_dependency_graph(subs, al, parses), ConstructionError);
}

TEST_CASE("dependency graph: truncated words are left out with their edges") {
  const auto parse = read_conllu(read_data("economy.conllu")).at(0);
  const auto subs = one_subword_per_lexeme(parse.lexemes);
  Alignment al = align_subwords_to_lexemes(subs, parse.lexemes);
  al.groups[6].clear();  // "economy" truncated
  const std::vector<Alignment> als{al};
  const std::vector<DependencyParse> parses{parse};
  const std::vector<SubwordToken> kept(subs.begin(), subs.begin() + 6);
  const HeteroGraph g = build_dependency_graph(kept, als, parses);
  // det, amod, npadvmod and pobj all touch "economy"
  CHECK(forward_dep_labels(g) == std::vector<std::string>{"amod", "pcomp"});
}

TEST_CASE("constituency graph: two-leaf tree") {
  const auto s = constituency_sentence(read_bracketed("(NP (JJ such) (IN as))").at(0));
  CHECK(s.graph.count(VertexKind::Token) == 2);
  CHECK(s.graph.count(VertexKind::Constituent) == 3);
  std::vector<std::string> labels;
  for (const auto& v : s.graph.vertices()) {
    if (v.kind == VertexKind::Constituent) labels.push_back(v.label);
  }
  CHECK(labels == std::vector<std::string>{"NP", "JJ", "IN"});
  CHECK(count_edges(s.graph, EdgeCategory::PartOfSpeech, EdgeDirection::Forward) == 2);
  CHECK(count_edges(s.graph, EdgeCategory::Constituency, EdgeDirection::Forward) == 2);
  check_invariants(s.graph);
}

TEST_CASE("constituency graph: single leaf") {
  const auto s = constituency_sentence(read_bracketed("(NP (NN economy))").at(0));
  CHECK(s.graph.count(VertexKind::Token) == 1);
  CHECK(s.graph.count(VertexKind::Constituent) == 2);
  CHECK(count_edges(s.graph, EdgeCategory::PartOfSpeech, EdgeDirection::Forward) == 1);
  CHECK(count_edges(s.graph, EdgeCategory::Constituency, EdgeDirection::Forward) == 1);
}

TEST_CASE("constituency graph: coordinated NP has five children") {
  const auto tree = read_bracketed(read_data("vehicles.tree")).at(0);
  const auto s = constituency_sentence(tree);
  const HeteroGraph& g = s.graph;
  const auto in = g.in_edges();
  std::size_t found = 0;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (g.vertices()[v].kind != VertexKind::Constituent || g.vertices()[v].label != "NP") continue;
    std::vector<std::string> child_labels;
    for (std::size_t e : in[v]) {
      const Edge& edge = g.edges()[e];
      if (edge.kind.category == EdgeCategory::Constituency &&
          edge.kind.direction == EdgeDirection::Forward) {
        child_labels.push_back(g.vertices()[edge.src].label);
      }
    }
    if (child_labels.size() == 5) {
      ++found;
      std::sort(child_labels.begin(), child_labels.end());
      CHECK(child_labels == std::vector<std::string>{"CC", "NP", "NP", "NP", "NP"});
    }
  }
  CHECK(found == 1);
  // vertex count = subwords + split words + internal nodes
  std::size_t split = 0;
  for (std::size_t i = 0; i < s.alignment.size(); ++i) split += s.alignment.needs_virtual(i);
  CHECK(split == 1);  // steamboats
  CHECK(g.num_vertices() == s.subwords.size() + split + tree.internal_node_count());
  check_invariants(g);
}

TEST_CASE("constituency graph: constituency edges form a forest") {
  const auto tree = read_bracketed(read_data("vehicles.tree")).at(0);
  const auto g = constituency_sentence(tree).graph;
  std::map<std::size_t, std::size_t> parent;
  for (const auto& e : g.edges()) {
    if (e.kind.category == EdgeCategory::Constituency && e.kind.direction == EdgeDirection::Forward) {
      CHECK(parent.count(e.src) == 0);
      parent[e.src] = e.dst;
    }
  }
  std::size_t roots = 0;
  for (const auto& v : g.vertices()) {
    if (v.kind != VertexKind::Constituent) continue;
    std::size_t x = v.id, steps = 0;
    while (parent.count(x) && steps <= g.num_vertices()) {
      x = parent[x];
      ++steps;
    }
    CHECK(steps <= g.num_vertices());
    roots += parent.count(v.id) == 0;
  }
  CHECK(roots == 1);
}

TEST_CASE("constituency graph: leaf count mismatch") {
  const auto tree = read_bracketed("(NP (JJ such) (IN as))").at(0);
  const auto subs = tokenize_subwords(tree.text, fixture_vocab());
  Alignment al;
  al.groups = {{0}};
  const std::vector<Alignment> als{al};
  const std::vector<ConstituencyParse> trees{tree};
  CHECK_THROWS_AS(build_constituency_graph(subs, als, trees), ConstructionError);
}

TEST_CASE("construction is deterministic") {
  const auto tree = read_bracketed(read_data("vehicles.tree")).at(0);
  CHECK(constituency_sentence(tree).graph == constituency_sentence(tree).graph);
  CHECK(graph_to_json(constituency_sentence(tree).graph) ==
        graph_to_json(constituency_sentence(tree).graph));
}

TEST_CASE("export_dot") {
  CHECK(export_dot(HeteroGraph{}) == "digraph G {\n}\n");
  HeteroGraph g;
  g.add_vertex(VertexKind::Token, "steam", 0);
  g.add_vertex(VertexKind::Lexeme, "steamboats");
  g.add_edge_pair(0, 1, EdgeCategory::Morphology);
  const std::string dot = export_dot(g);
  CHECK(count_lines(dot, " -> ") == 1);
  CHECK(count_lines(dot, "label=\"Morphology\"") == 1);
  CHECK(dot.find("v0 -> v1") != std::string::npos);
}

TEST_CASE("add_edge_pair errors") {
  HeteroGraph g;
  g.add_vertex(VertexKind::Token, "a", 0);
  g.add_vertex(VertexKind::Token, "b", 1);
  CHECK_THROWS_AS(g.add_edge_pair(0, 2, EdgeCategory::PartOfSpeech), ConstructionError);
  g.add_edge_pair(0, 1, EdgeCategory::Dependency, "x");
  CHECK_THROWS_AS(g.add_edge_pair(0, 1, EdgeCategory::Dependency, "x"), ConstructionError);
  CHECK_NOTHROW(g.add_edge_pair(0, 1, EdgeCategory::Dependency, "y"));
}

TEST_CASE("graph JSON round trip") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const HeteroGraph g = random_graph(rng);
    const std::string text = graph_to_json(g);
    const HeteroGraph back = graph_from_json(text);
    CHECK(back == g);
    CHECK(graph_to_json(back) == text);
  }
  const auto tree = constituency_sentence(read_bracketed(read_data("vehicles.tree")).at(0)).graph;
  CHECK(graph_from_json(graph_to_json(tree)) == tree);
}

TEST_CASE("graph JSON field names and rejects") {
  HeteroGraph g;
  g.add_vertex(VertexKind::Token, "a", 0);
  g.add_vertex(VertexKind::Token, "b", 1);
  g.add_edge_pair(0, 1, EdgeCategory::Dependency, "amod");
  const auto j = nlohmann::json::parse(graph_to_json(g));
  CHECK(j["vertices"][0]["kind"] == "Token");
  CHECK(j["vertices"][0]["seq_pos"] == 0);
  CHECK(j["edges"][0]["category"] == "Dependency");
  CHECK(j["edges"][0]["label"] == "amod");
  CHECK(j["edges"][1]["direction"] == "Reverse");
  CHECK_THROWS_AS(graph_from_json("{"), ParseError);
  auto bad = j;
  bad["edges"].erase(1);
  CHECK_THROWS_AS(graph_from_json(bad.dump()), ValidationError);
  bad = j;
  bad["vertices"][1]["id"] = 5;
  CHECK_THROWS_AS(graph_from_json(bad.dump()), ValidationError);
}

TEST_CASE("edge type registry") {
  const auto reg = EdgeTypeRegistry::from_dependency_labels({"pobj", "amod", "amod"});
  // 3 fixed categories x 2 directions, then <unk>, amod, pobj x 2
  CHECK(reg.size() == 6 + 6);
  const auto amod = reg.index_of({EdgeCategory::Dependency, "amod", EdgeDirection::Forward});
  const auto unk = reg.index_of({EdgeCategory::Dependency, "zzz", EdgeDirection::Forward});
  CHECK(amod != unk);
  CHECK(reg.keys()[unk] == "Dependency:<unk>/Forward");
  CHECK(reg.index_of({EdgeCategory::Dependency, "qqq", EdgeDirection::Forward}) == unk);
  CHECK(reg.index_of({EdgeCategory::Dependency, "amod", EdgeDirection::Reverse}) != amod);
  const auto again = EdgeTypeRegistry::from_keys(reg.keys());
  CHECK(again.keys() == reg.keys());
  CHECK_THROWS_AS(EdgeTypeRegistry::from_keys({"Morphology:/Forward", "Morphology:/Forward"}),
                  ValidationError);
}
