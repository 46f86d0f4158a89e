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

#ifndef SYHGT_GRAPH_HPP_
#define SYHGT_GRAPH_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "syhgt/alignment.hpp"
#include "syhgt/syntax.hpp"
#include "syhgt/wordpiece.hpp"

namespace syhgt {

enum class VertexKind : std::uint8_t { Token = 0, Lexeme = 1, Constituent = 2 };
inline constexpr std::size_t kNumVertexKinds = 3;
inline constexpr std::array<VertexKind, kNumVertexKinds> kAllVertexKinds{
    VertexKind::Token, VertexKind::Lexeme, VertexKind::Constituent};

enum class EdgeCategory : std::uint8_t {
  Morphology,
  Dependency,
  PartOfSpeech,
  Constituency,
};

enum class EdgeDirection : std::uint8_t { Forward, Reverse };

std::string_view to_string(VertexKind kind);
std::string_view to_string(EdgeCategory category);
std::string_view to_string(EdgeDirection direction);
VertexKind vertex_kind_from_string(std::string_view s);
EdgeCategory edge_category_from_string(std::string_view s);
EdgeDirection edge_direction_from_string(std::string_view s);

struct EdgeKind {
  EdgeCategory category = EdgeCategory::Morphology;
  std::string label;  // dependency relation; empty for other categories
  EdgeDirection direction = EdgeDirection::Forward;

  // Stable textual identity, e.g. "Dependency:amod/Forward".
  std::string key() const;
  bool operator==(const EdgeKind&) const = default;
};

struct Vertex {
  std::size_t id = 0;
  VertexKind kind = VertexKind::Token;
  std::string label;
  std::optional<std::size_t> seq_pos;

  bool operator==(const Vertex&) const = default;
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  EdgeKind kind;

  bool operator==(const Edge&) const = default;
};

class HeteroGraph {
 public:
  std::size_t add_vertex(VertexKind kind, std::string label,
                         std::optional<std::size_t> seq_pos = std::nullopt);

  // Adds src->dst as Forward and dst->src as Reverse, adjacent in edges().
  // Throws ConstructionError on out-of-range endpoints or duplicates.
  void add_edge_pair(std::size_t src, std::size_t dst, EdgeCategory category,
                     std::string label = {});

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t count(VertexKind kind) const;

  // For each vertex, the indices of the edges that point at it (N_t).
  std::vector<std::vector<std::size_t>> in_edges() const;

  // Word vertices that headed a root relation, one entry per sentence that
  // had one. Diagnostic only.
  std::vector<std::size_t>& roots() { return roots_; }
  const std::vector<std::size_t>& roots() const { return roots_; }

  bool operator==(const HeteroGraph& other) const {
    return vertices_ == other.vertices_ && edges_ == other.edges_;
  }

 private:
  void add_edge(std::size_t src, std::size_t dst, EdgeKind kind);

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::set<std::tuple<std::size_t, std::size_t, std::string>> seen_;
  std::vector<std::size_t> roots_;
};

// Token vertices get ids 0..n-1 in sequence order, special tokens included.
// `alignments[i]` maps the lexemes of sentence i to sequence positions; an
// empty group marks a word lost to truncation, which is left out of the
// graph together with its edges.
HeteroGraph build_dependency_graph(std::span<const SubwordToken> sequence,
                                   std::span<const Alignment> alignments,
                                   std::span<const DependencyParse> parses);

HeteroGraph build_constituency_graph(std::span<const SubwordToken> sequence,
                                     std::span<const Alignment> alignments,
                                     std::span<const ConstituencyParse> trees);

// Graphviz rendering; Reverse edges are omitted.
std::string export_dot(const HeteroGraph& graph);

std::string graph_to_json(const HeteroGraph& graph);
HeteroGraph graph_from_json(std::string_view json_text);

// The edge-type set R. Fixed categories come first, then one Forward and
// one Reverse type per dependency label (sorted). Labels not seen when the
// registry was built map to a shared "<unk>" dependency type.
class EdgeTypeRegistry {
 public:
  static constexpr std::string_view kUnknownLabel = "<unk>";

  static EdgeTypeRegistry from_dependency_labels(
      std::vector<std::string> labels);
  static EdgeTypeRegistry from_graphs(std::span<const HeteroGraph> graphs);
  static EdgeTypeRegistry from_keys(const std::vector<std::string>& keys);

  std::size_t size() const { return keys_.size(); }
  std::size_t index_of(const EdgeKind& kind) const;
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace syhgt

#endif  // SYHGT_GRAPH_HPP_
