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

// From SQuAD examples and parse files to per-example graphs over the
// [CLS] question [SEP] passage [SEP] sequence.

#ifndef SYHGT_PIPELINE_HPP_
#define SYHGT_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "syhgt/alignment.hpp"
#include "syhgt/embedding.hpp"
#include "syhgt/graph.hpp"
#include "syhgt/span_head.hpp"
#include "syhgt/squad.hpp"
#include "syhgt/syntax.hpp"
#include "syhgt/wordpiece.hpp"

namespace syhgt {

enum class GraphKind { Dependency, Constituency };
// "dep" / "con".
std::string_view to_string(GraphKind kind);
GraphKind graph_kind_from_string(std::string_view s);

inline constexpr std::size_t kMaxSequenceLength = 384;

// Question and passage subwords keep offsets into their own texts. Special
// tokens sit at (0, 0).
struct EncodedPair {
  std::vector<SubwordToken> sequence;
  std::size_t question_begin = 1;
  std::size_t question_end = 1;
  std::size_t passage_begin = 0;
  std::size_t passage_end = 0;
  std::size_t truncated = 0;  // subwords cut from the passage
};

// [CLS] question [SEP] passage [SEP], cutting the passage from the right to
// fit max_len. A question too long to leave room for one passage subword is
// cut as well.
EncodedPair encode_pair(std::span<const SubwordToken> question,
                        std::span<const SubwordToken> passage,
                        const Vocab& vocab, std::size_t max_len);

// Same layout, rebuilt from an exporter record. Ids come from `vocab`.
// Throws ConsistencyError if the record is not [CLS] q [SEP] p [SEP].
EncodedPair encode_from_record(const EmbeddingRecord& record, const Vocab& vocab);

// Assigns parse sentences to texts in order: each unit takes sentences
// while the next one's first form starts at the unit's next non-space
// byte. Lexeme offsets are rewritten to be relative to the unit text.
// Throws ConsistencyError when a unit is left partly uncovered or
// sentences remain at the end.
std::vector<std::vector<std::size_t>> assign_sentences(
    std::span<const TextUnit> units,
    std::span<std::vector<LexemeToken>* const> sentences);

// Aligns one sentence against the subwords of its segment. Group entries
// are sequence positions (segment_offset + index); subwords at index >=
// kept were truncated and are removed.
Alignment align_sentence(std::span<const SubwordToken> segment,
                         std::size_t segment_offset, std::size_t kept,
                         std::span<const LexemeToken> lexemes);

struct LocatedAnswer {
  SpanTargets target;
  bool relocated = false;  // answer boundaries coincide with subword ones
  bool truncated = false;  // answer lies past the kept passage
};

// Finds the passage subwords that exactly cover the first gold answer
// (surrounding whitespace ignored). Impossible examples give (0, 0).
LocatedAnswer locate_answer(const QaExample& example, const EncodedPair& pair);

struct PreparedExample {
  std::string id;
  std::string question;
  std::string passage;
  std::vector<std::string> gold_answers;
  bool is_impossible = false;
  std::vector<SubwordToken> sequence;
  std::size_t passage_begin = 0;
  std::size_t passage_end = 0;
  SpanTargets target;
  // False when the gold answer could not be relocated after tokenization:
  // such examples are skipped in training and forced to "" in evaluation.
  bool trainable = true;
  HeteroGraph graph;
};

struct PreparedDataset {
  GraphKind kind = GraphKind::Dependency;
  std::size_t max_len = kMaxSequenceLength;
  std::vector<PreparedExample> examples;
};

struct BuildOptions {
  std::size_t max_len = kMaxSequenceLength;
  // When set, sequences come from these exporter records instead of the
  // internal tokenizer.
  const FileProvider* offsets = nullptr;
};

PreparedDataset build_dataset(const SquadDataset& squad,
                              std::vector<DependencyParse> parses,
                              const Vocab& vocab, const BuildOptions& options);
PreparedDataset build_dataset(const SquadDataset& squad,
                              std::vector<ConstituencyParse> trees,
                              const Vocab& vocab, const BuildOptions& options);

// <dir>/graphs.json, plus <dir>/dot/<id>.dot when `dot` is set.
void save_dataset(const PreparedDataset& dataset, const std::filesystem::path& dir,
                  bool dot);
PreparedDataset load_dataset(const std::filesystem::path& dir);

}  // namespace syhgt

#endif  // SYHGT_PIPELINE_HPP_
