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

#include "syhgt/graph.hpp"

#include <algorithm>
#include <functional>

#include "json_convert.hpp"
#include "syhgt/error.hpp"

namespace syhgt {

using nlohmann::json;

std::string_view to_string(VertexKind kind) {
  switch (kind) {
    case VertexKind::Token: return "Token";
    case VertexKind::Lexeme: return "Lexeme";
    case VertexKind::Constituent: return "Constituent";
  }
  return "?";
}

std::string_view to_string(EdgeCategory category) {
  switch (category) {
    case EdgeCategory::Morphology: return "Morphology";
    case EdgeCategory::Dependency: return "Dependency";
    case EdgeCategory::PartOfSpeech: return "PartOfSpeech";
    case EdgeCategory::Constituency: return "Constituency";
  }
  return "?";
}

std::string_view to_string(EdgeDirection direction) {
  return direction == EdgeDirection::Forward ? "Forward" : "Reverse";
}

VertexKind vertex_kind_from_string(std::string_view s) {
  for (VertexKind k : kAllVertexKinds) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown vertex kind '" + std::string(s) + "'");
}

EdgeCategory edge_category_from_string(std::string_view s) {
  for (EdgeCategory c : {EdgeCategory::Morphology, EdgeCategory::Dependency,
                         EdgeCategory::PartOfSpeech,
                         EdgeCategory::Constituency}) {
    if (to_string(c) == s) return c;
  }
  throw ValidationError("unknown edge category '" + std::string(s) + "'");
}

EdgeDirection edge_direction_from_string(std::string_view s) {
  if (s == "Forward") return EdgeDirection::Forward;
  if (s == "Reverse") return EdgeDirection::Reverse;
  throw ValidationError("unknown edge direction '" + std::string(s) + "'");
}

std::string EdgeKind::key() const {
  std::string k(to_string(category));
  if (category == EdgeCategory::Dependency) k += ":" + label;
  k += "/";
  k += to_string(direction);
  return k;
}

std::size_t HeteroGraph::add_vertex(VertexKind kind, std::string label,
                                    std::optional<std::size_t> seq_pos) {
  const std::size_t id = vertices_.size();
  vertices_.push_back(Vertex{id, kind, std::move(label), seq_pos});
  return id;
}

void HeteroGraph::add_edge(std::size_t src, std::size_t dst, EdgeKind kind) {
  if (src >= vertices_.size() || dst >= vertices_.size()) {
    throw ConstructionError("edge endpoint out of range");
  }
  if (!seen_.emplace(src, dst, kind.key()).second) {
    throw ConstructionError("duplicate edge " + std::to_string(src) + "->" +
                            std::to_string(dst) + " " + kind.key());
  }
  edges_.push_back(Edge{src, dst, std::move(kind)});
}

void HeteroGraph::add_edge_pair(std::size_t src, std::size_t dst,
                                EdgeCategory category, std::string label) {
  add_edge(src, dst, EdgeKind{category, label, EdgeDirection::Forward});
  add_edge(dst, src, EdgeKind{category, std::move(label), EdgeDirection::Reverse});
}

std::size_t HeteroGraph::count(VertexKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(vertices_.begin(), vertices_.end(),
                    [kind](const Vertex& v) { return v.kind == kind; }));
}

std::vector<std::vector<std::size_t>> HeteroGraph::in_edges() const {
  std::vector<std::vector<std::size_t>> in(vertices_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) in[edges_[e].dst].push_back(e);
  return in;
}

namespace {

void check_alignment_shape(std::span<const Alignment> alignments,
                           std::size_t sentences) {
  if (alignments.size() != sentences) {
    throw ConstructionError("got " + std::to_string(alignments.size()) +
                            " alignments for " + std::to_string(sentences) +
                            " sentences");
  }
}

// Returns, per lexeme, the vertex standing for the word: its token vertex
// when unsplit, a new Lexeme vertex (wired with Morphology edges) when
// split, or nothing when all of its subwords were truncated away.
std::vector<std::optional<std::size_t>> add_word_vertices(
    HeteroGraph& graph, std::size_t sequence_length,
    std::span<const LexemeToken> lexemes, const Alignment& alignment) {
  std::vector<std::optional<std::size_t>> word(lexemes.size());
  for (std::size_t i = 0; i < lexemes.size(); ++i) {
    const auto& group = alignment.groups[i];
    for (std::size_t pos : group) {
      if (pos >= sequence_length) {
        throw ConstructionError("alignment refers to position " +
                                std::to_string(pos) + " past the sequence");
      }
    }
    if (group.empty()) continue;
    if (group.size() == 1) {
      word[i] = group.front();
      continue;
    }
    const std::size_t lex = graph.add_vertex(VertexKind::Lexeme, lexemes[i].form);
    for (std::size_t pos : group) {
      graph.add_edge_pair(pos, lex, EdgeCategory::Morphology);
    }
    word[i] = lex;
  }
  return word;
}

HeteroGraph token_vertices(std::span<const SubwordToken> sequence) {
  HeteroGraph graph;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    graph.add_vertex(VertexKind::Token, sequence[i].text, i);
  }
  return graph;
}

}  // namespace

HeteroGraph build_dependency_graph(std::span<const SubwordToken> sequence,
                                   std::span<const Alignment> alignments,
                                   std::span<const DependencyParse> parses) {
  check_alignment_shape(alignments, parses.size());
  HeteroGraph graph = token_vertices(sequence);
  for (std::size_t s = 0; s < parses.size(); ++s) {
    const DependencyParse& parse = parses[s];
    if (alignments[s].size() != parse.size()) {
      throw ConstructionError("alignment for " + parse.sent_id + " covers " +
                              std::to_string(alignments[s].size()) + " of " +
                              std::to_string(parse.size()) + " lexemes");
    }
    const auto word =
        add_word_vertices(graph, sequence.size(), parse.lexemes, alignments[s]);
    for (std::size_t i = 0; i < parse.size(); ++i) {
      if (!word[i]) continue;
      if (parse.head[i] == 0) {
        graph.roots().push_back(*word[i]);
        continue;
      }
      const auto& head = word.at(parse.head[i] - 1);
      if (!head) continue;
      graph.add_edge_pair(*word[i], *head, EdgeCategory::Dependency,
                          parse.relation[i]);
    }
  }
  return graph;
}

HeteroGraph build_constituency_graph(std::span<const SubwordToken> sequence,
                                     std::span<const Alignment> alignments,
                                     std::span<const ConstituencyParse> trees) {
  check_alignment_shape(alignments, trees.size());
  HeteroGraph graph = token_vertices(sequence);
  for (std::size_t s = 0; s < trees.size(); ++s) {
    const ConstituencyParse& tree = trees[s];
    if (alignments[s].size() != tree.lexemes.size()) {
      throw ConstructionError("tree " + std::to_string(s) + " has " +
                              std::to_string(tree.lexemes.size()) +
                              " leaves but its sentence has " +
                              std::to_string(alignments[s].size()) +
                              " lexemes");
    }
    const auto word =
        add_word_vertices(graph, sequence.size(), tree.lexemes, alignments[s]);

    // A constituent survives when at least one word below it does.
    std::vector<bool> alive(tree.nodes.size(), false);
    for (std::size_t n = tree.nodes.size(); n-- > 0;) {
      const auto& node = tree.nodes[n];
      if (node.is_leaf()) {
        alive[n] = word[*node.lexeme].has_value();
      } else {
        alive[n] = std::any_of(node.children.begin(), node.children.end(),
                               [&](std::size_t c) { return alive[c]; });
      }
    }
    std::vector<std::optional<std::size_t>> vertex(tree.nodes.size());
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
      if (!tree.nodes[n].is_leaf() && alive[n]) {
        vertex[n] = graph.add_vertex(VertexKind::Constituent, tree.nodes[n].label);
      }
    }
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
      const auto& node = tree.nodes[n];
      if (node.is_leaf() && alive[n]) {
        graph.add_edge_pair(*word[*node.lexeme], *vertex[*node.parent],
                            EdgeCategory::PartOfSpeech);
      }
    }
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
      const auto& node = tree.nodes[n];
      if (!node.is_leaf() && alive[n] && node.parent) {
        graph.add_edge_pair(*vertex[n], *vertex[*node.parent],
                            EdgeCategory::Constituency);
      }
    }
  }
  return graph;
}

std::string export_dot(const HeteroGraph& graph) {
  auto quote = [](std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::string out = "digraph G {\n";
  for (const Vertex& v : graph.vertices()) {
    const char* shape = v.kind == VertexKind::Token    ? "box"
                        : v.kind == VertexKind::Lexeme ? "ellipse"
                                                       : "diamond";
    out += "  v" + std::to_string(v.id) + " [label=" + quote(v.label) +
           ", shape=" + shape;
    if (v.kind != VertexKind::Token) out += ", style=dashed";
    out += "];\n";
  }
  for (const Edge& e : graph.edges()) {
    if (e.kind.direction == EdgeDirection::Reverse) continue;
    std::string label(to_string(e.kind.category));
    if (e.kind.category == EdgeCategory::Dependency) {
      label += "(" + e.kind.label + ")";
    }
    out += "  v" + std::to_string(e.src) + " -> v" + std::to_string(e.dst) +
           " [label=" + quote(label) + "];\n";
  }
  out += "}\n";
  return out;
}

json graph_to_json_value(const HeteroGraph& graph) {
  json vertices = json::array();
  for (const Vertex& v : graph.vertices()) {
    vertices.push_back({{"id", v.id},
                        {"kind", to_string(v.kind)},
                        {"label", v.label},
                        {"seq_pos", v.seq_pos ? json(*v.seq_pos) : json()}});
  }
  json edges = json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back(
        {{"src", e.src},
         {"dst", e.dst},
         {"category", to_string(e.kind.category)},
         {"label", e.kind.category == EdgeCategory::Dependency
                       ? json(e.kind.label)
                       : json()},
         {"direction", to_string(e.kind.direction)}});
  }
  return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

HeteroGraph graph_from_json_value(const json& doc) {
  HeteroGraph graph;
  try {
    for (const auto& v : doc.at("vertices")) {
      const auto id = v.at("id").get<std::size_t>();
      if (id != graph.num_vertices()) {
        throw ValidationError("vertex ids must be dense and ordered");
      }
      std::optional<std::size_t> seq_pos;
      if (!v.at("seq_pos").is_null()) seq_pos = v.at("seq_pos").get<std::size_t>();
      graph.add_vertex(vertex_kind_from_string(v.at("kind").get<std::string>()),
                       v.at("label").get<std::string>(), seq_pos);
    }
    const auto& edges = doc.at("edges");
    if (edges.size() % 2 != 0) {
      throw ValidationError("edge list is not made of Forward/Reverse pairs");
    }
    for (std::size_t i = 0; i < edges.size(); i += 2) {
      const auto& fwd = edges[i];
      const auto& rev = edges[i + 1];
      const auto category =
          edge_category_from_string(fwd.at("category").get<std::string>());
      const std::string label =
          fwd.at("label").is_null() ? "" : fwd.at("label").get<std::string>();
      const bool paired =
          fwd.at("direction") == "Forward" && rev.at("direction") == "Reverse" &&
          rev.at("category") == fwd.at("category") &&
          rev.at("label") == fwd.at("label") && rev.at("src") == fwd.at("dst") &&
          rev.at("dst") == fwd.at("src");
      if (!paired) {
        throw ValidationError("edge " + std::to_string(i) +
                              " has no matching Reverse edge after it");
      }
      graph.add_edge_pair(fwd.at("src").get<std::size_t>(),
                          fwd.at("dst").get<std::size_t>(), category, label);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed graph JSON: ") + e.what());
  }
  return graph;
}

std::string graph_to_json(const HeteroGraph& graph) {
  return graph_to_json_value(graph).dump();
}

HeteroGraph graph_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed graph JSON: ") + e.what(), e.byte,
                     "byte");
  }
  return graph_from_json_value(doc);
}

EdgeTypeRegistry EdgeTypeRegistry::from_dependency_labels(
    std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<EdgeKind> kinds;
  for (EdgeCategory c : {EdgeCategory::Morphology, EdgeCategory::PartOfSpeech,
                         EdgeCategory::Constituency}) {
    kinds.push_back({c, "", EdgeDirection::Forward});
    kinds.push_back({c, "", EdgeDirection::Reverse});
  }
  std::erase(labels, std::string(kUnknownLabel));
  labels.insert(labels.begin(), std::string(kUnknownLabel));
  for (const auto& l : labels) {
    kinds.push_back({EdgeCategory::Dependency, l, EdgeDirection::Forward});
    kinds.push_back({EdgeCategory::Dependency, l, EdgeDirection::Reverse});
  }
  std::vector<std::string> keys;
  for (const auto& k : kinds) keys.push_back(k.key());
  return from_keys(keys);
}

EdgeTypeRegistry EdgeTypeRegistry::from_graphs(
    std::span<const HeteroGraph> graphs) {
  std::vector<std::string> labels;
  for (const auto& g : graphs) {
    for (const auto& e : g.edges()) {
      if (e.kind.category == EdgeCategory::Dependency) {
        labels.push_back(e.kind.label);
      }
    }
  }
  return from_dependency_labels(std::move(labels));
}

EdgeTypeRegistry EdgeTypeRegistry::from_keys(
    const std::vector<std::string>& keys) {
  EdgeTypeRegistry r;
  for (const auto& k : keys) {
    if (!r.index_.emplace(k, r.keys_.size()).second) {
      throw ValidationError("duplicate edge type '" + k + "'");
    }
    r.keys_.push_back(k);
  }
  return r;
}

std::size_t EdgeTypeRegistry::index_of(const EdgeKind& kind) const {
  auto it = index_.find(kind.key());
  if (it != index_.end()) return it->second;
  if (kind.category == EdgeCategory::Dependency) {
    EdgeKind unk{kind.category, std::string(kUnknownLabel), kind.direction};
    it = index_.find(unk.key());
    if (it != index_.end()) return it->second;
  }
  throw ValidationError("edge type '" + kind.key() + "' is not registered");
}

}  // namespace syhgt
