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

#include "syhgt/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>

#include <json.hpp>

#include "json_convert.hpp"
#include "syhgt/error.hpp"
#include "syhgt/io.hpp"
#include "text_util.hpp"

namespace syhgt {

std::string_view to_string(GraphKind kind) {
  return kind == GraphKind::Dependency ? "dep" : "con";
}

GraphKind graph_kind_from_string(std::string_view s) {
  if (s == "dep") return GraphKind::Dependency;
  if (s == "con") return GraphKind::Constituency;
  throw ConfigError("graph kind must be 'dep' or 'con', got '" + std::string(s) + "'");
}

EncodedPair encode_pair(std::span<const SubwordToken> question,
                        std::span<const SubwordToken> passage,
                        const Vocab& vocab, std::size_t max_len) {
  if (max_len < 4) throw ConfigError("max_len must be at least 4");
  const std::size_t q_keep = std::min(question.size(), max_len - 4);
  if (q_keep < question.size()) {
    spdlog::warn("question cut from {} to {} subwords", question.size(), q_keep);
  }
  const std::size_t p_keep = std::min(passage.size(), max_len - 3 - q_keep);

  EncodedPair out;
  out.sequence.push_back(vocab.special(kClsPiece));
  out.question_begin = 1;
  out.sequence.insert(out.sequence.end(), question.begin(), question.begin() + q_keep);
  out.question_end = out.sequence.size();
  out.sequence.push_back(vocab.special(kSepPiece));
  out.passage_begin = out.sequence.size();
  out.sequence.insert(out.sequence.end(), passage.begin(), passage.begin() + p_keep);
  out.passage_end = out.sequence.size();
  out.sequence.push_back(vocab.special(kSepPiece));
  out.truncated = passage.size() - p_keep;
  return out;
}

EncodedPair encode_from_record(const EmbeddingRecord& record, const Vocab& vocab) {
  const auto& pieces = record.pieces;
  auto is_special = [&](std::size_t i) {
    return (pieces[i] == kClsPiece || pieces[i] == kSepPiece ||
            pieces[i] == kPadPiece) &&
           record.offsets[i].first == 0 && record.offsets[i].second == 0;
  };
  std::vector<std::size_t> seps;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (is_special(i) && pieces[i] == kSepPiece) seps.push_back(i);
  }
  if (pieces.empty() || pieces[0] != kClsPiece || seps.size() != 2 ||
      seps[1] + 1 != pieces.size()) {
    throw ConsistencyError("record " + record.id +
                           " is not laid out as [CLS] q [SEP] p [SEP]");
  }
  EncodedPair out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    SubwordToken t;
    t.text = pieces[i];
    t.id = vocab.id_or_unk(pieces[i]);
    t.is_special = is_special(i);
    if (!t.is_special) {
      t.char_start = record.offsets[i].first;
      t.char_end = record.offsets[i].second;
    }
    out.sequence.push_back(std::move(t));
  }
  out.question_begin = 1;
  out.question_end = seps[0];
  out.passage_begin = seps[0] + 1;
  out.passage_end = seps[1];
  return out;
}

std::vector<std::vector<std::size_t>> assign_sentences(
    std::span<const TextUnit> units,
    std::span<std::vector<LexemeToken>* const> sentences) {
  std::vector<std::vector<std::size_t>> out(units.size());
  std::size_t s = 0;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const std::string& text = units[u].text;
    std::size_t cursor = 0;
    while (s < sentences.size()) {
      const auto end = anchor_lexemes(*sentences[s], text, cursor);
      if (!end) break;
      cursor = *end;
      out[u].push_back(s++);
    }
    if (text_util::skip_space(text, cursor) < text.size()) {
      const std::string which = units[u].kind == TextUnit::Kind::Passage
                                    ? "passage of paragraph " +
                                          std::to_string(units[u].paragraph)
                                    : "question " + units[u].qa_id;
      throw ConsistencyError("parses do not cover the " + which + " past byte " +
                             std::to_string(cursor) +
                             (s < sentences.size()
                                  ? " (next parsed sentence is sentence " +
                                        std::to_string(s + 1) + ")"
                                  : ""));
    }
  }
  if (s != sentences.size()) {
    throw ConsistencyError(std::to_string(sentences.size() - s) +
                           " parsed sentences left over after the last text");
  }
  return out;
}

Alignment align_sentence(std::span<const SubwordToken> segment,
                         std::size_t segment_offset, std::size_t kept,
                         std::span<const LexemeToken> lexemes) {
  Alignment out;
  if (lexemes.empty()) return out;
  const std::size_t begin = lexemes.front().char_start;
  const std::size_t end = lexemes.back().char_end;
  std::size_t first = segment.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < segment.size(); ++i) {
    const auto& t = segment[i];
    if (t.is_special) continue;
    const bool inside = t.char_start >= begin && t.char_end <= end;
    const bool overlaps = t.char_start < end && t.char_end > begin;
    if (overlaps && !inside) {
      throw AlignmentError("subword '" + t.text + "' at [" +
                           std::to_string(t.char_start) + ", " +
                           std::to_string(t.char_end) +
                           ") crosses the sentence boundary [" +
                           std::to_string(begin) + ", " + std::to_string(end) + ")");
    }
    if (inside) {
      first = std::min(first, i);
      last = i + 1;
    }
  }
  if (first >= last) {
    throw AlignmentError("no subword falls inside the sentence at [" +
                         std::to_string(begin) + ", " + std::to_string(end) + ")");
  }
  const Alignment local =
      align_subwords_to_lexemes(segment.subspan(first, last - first), lexemes);
  out.groups.resize(local.groups.size());
  for (std::size_t l = 0; l < local.groups.size(); ++l) {
    for (std::size_t k : local.groups[l]) {
      const std::size_t idx = first + k;
      if (idx < kept) out.groups[l].push_back(segment_offset + idx);
    }
  }
  return out;
}

LocatedAnswer locate_answer(const QaExample& example, const EncodedPair& pair) {
  LocatedAnswer out;
  if (example.is_impossible || example.gold_answers.empty()) {
    out.relocated = true;
    return out;
  }
  const GoldAnswer& gold = example.gold_answers.front();
  const std::string_view text = gold.text;
  std::size_t lead = 0;
  while (lead < text.size() && text_util::is_space(text[lead])) ++lead;
  std::size_t trail = text.size();
  while (trail > lead && text_util::is_space(text[trail - 1])) --trail;
  const std::size_t ans_begin = gold.char_start + lead;
  const std::size_t ans_end = gold.char_start + trail;

  std::optional<std::size_t> start, end;
  std::size_t covered = 0;
  for (std::size_t i = pair.passage_begin; i < pair.passage_end; ++i) {
    const auto& t = pair.sequence[i];
    covered = std::max(covered, t.char_end);
    if (!start && t.char_start == ans_begin) start = i;
    if (start && t.char_end == ans_end) {
      end = i;
      break;
    }
  }
  if (start && end) {
    out.relocated = true;
    out.target = {*start, *end};
    return out;
  }
  if (ans_end > covered && (pair.truncated > 0 || pair.passage_begin == pair.passage_end)) {
    out.relocated = true;
    out.truncated = true;
    return out;
  }
  return out;
}

namespace {

std::vector<LexemeToken>& lexemes_of(DependencyParse& p) { return p.lexemes; }
std::vector<LexemeToken>& lexemes_of(ConstituencyParse& p) { return p.lexemes; }

HeteroGraph build_graph(std::span<const SubwordToken> seq,
                        std::span<const Alignment> al,
                        std::span<const DependencyParse> parses) {
  return build_dependency_graph(seq, al, parses);
}
HeteroGraph build_graph(std::span<const SubwordToken> seq,
                        std::span<const Alignment> al,
                        std::span<const ConstituencyParse> parses) {
  return build_constituency_graph(seq, al, parses);
}

template <class Parse>
PreparedDataset build_dataset_impl(const SquadDataset& squad,
                                   std::vector<Parse> parses, const Vocab& vocab,
                                   const BuildOptions& options, GraphKind kind) {
  std::vector<std::vector<LexemeToken>*> sentences;
  for (auto& p : parses) sentences.push_back(&lexemes_of(p));
  const auto assigned = assign_sentences(squad.units, sentences);

  std::map<std::size_t, std::size_t> passage_unit;
  std::map<std::string, std::size_t> question_unit;
  for (std::size_t u = 0; u < squad.units.size(); ++u) {
    const auto& unit = squad.units[u];
    if (unit.kind == TextUnit::Kind::Passage) {
      passage_unit.emplace(unit.paragraph, u);
    } else {
      question_unit.emplace(unit.qa_id, u);
    }
  }

  PreparedDataset out;
  out.kind = kind;
  out.max_len = options.max_len;
  std::size_t truncated = 0, unrelocated = 0;
  for (const QaExample& ex : squad.examples) {
    EncodedPair pair;
    if (options.offsets) {
      const EmbeddingRecord* rec = options.offsets->find(ex.id);
      if (!rec) throw ConsistencyError("offsets file has no record for " + ex.id);
      pair = encode_from_record(*rec, vocab);
    } else {
      const auto q = tokenize_subwords(ex.question, vocab);
      const auto p = tokenize_subwords(ex.passage, vocab);
      pair = encode_pair(q, p, vocab, options.max_len);
    }
    if (pair.truncated > 0) ++truncated;

    const std::size_t qu = question_unit.at(ex.id);
    const std::size_t pu = passage_unit.at(ex.paragraph);
    std::vector<Parse> example_parses;
    std::vector<Alignment> alignments;
    const std::span<const SubwordToken> seq(pair.sequence);
    const auto q_seg = seq.subspan(pair.question_begin,
                                   pair.question_end - pair.question_begin);
    const auto p_seg =
        seq.subspan(pair.passage_begin, pair.passage_end - pair.passage_begin);
    try {
      for (std::size_t s : assigned[qu]) {
        example_parses.push_back(parses[s]);
        alignments.push_back(
            align_sentence(q_seg, pair.question_begin, q_seg.size(), parses[s].lexemes));
      }
      for (std::size_t s : assigned[pu]) {
        example_parses.push_back(parses[s]);
        alignments.push_back(
            align_sentence(p_seg, pair.passage_begin, p_seg.size(), parses[s].lexemes));
      }
    } catch (const AlignmentError& e) {
      throw AlignmentError("example " + ex.id + ": " + e.what());
    }

    PreparedExample pe;
    pe.id = ex.id;
    pe.question = ex.question;
    pe.passage = ex.passage;
    for (const auto& g : ex.gold_answers) pe.gold_answers.push_back(g.text);
    pe.is_impossible = ex.is_impossible;
    const LocatedAnswer located = locate_answer(ex, pair);
    pe.target = located.target;
    pe.trainable = located.relocated;
    if (!located.relocated) {
      ++unrelocated;
      spdlog::warn("example {}: gold answer does not fall on subword boundaries; "
                   "skipped in training, scored as unanswered",
                   ex.id);
    }
    pe.graph = build_graph(pair.sequence, alignments, example_parses);
    pe.sequence = std::move(pair.sequence);
    pe.passage_begin = pair.passage_begin;
    pe.passage_end = pair.passage_end;
    out.examples.push_back(std::move(pe));
  }
  if (truncated > 0) {
    spdlog::info("{} examples truncated to {} subwords", truncated, options.max_len);
  }
  if (unrelocated > 0) {
    spdlog::warn("{} examples with answers that could not be relocated", unrelocated);
  }
  return out;
}

}  // namespace

PreparedDataset build_dataset(const SquadDataset& squad,
                              std::vector<DependencyParse> parses,
                              const Vocab& vocab, const BuildOptions& options) {
  return build_dataset_impl(squad, std::move(parses), vocab, options,
                            GraphKind::Dependency);
}

PreparedDataset build_dataset(const SquadDataset& squad,
                              std::vector<ConstituencyParse> trees,
                              const Vocab& vocab, const BuildOptions& options) {
  return build_dataset_impl(squad, std::move(trees), vocab, options,
                            GraphKind::Constituency);
}

namespace {

std::string file_safe(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

}  // namespace

void save_dataset(const PreparedDataset& dataset, const std::filesystem::path& dir,
                  bool dot) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json doc;
  doc["graph_kind"] = to_string(dataset.kind);
  doc["max_len"] = dataset.max_len;
  doc["examples"] = nlohmann::json::array();
  for (const auto& ex : dataset.examples) {
    nlohmann::json seq = nlohmann::json::array();
    for (const auto& t : ex.sequence) {
      seq.push_back({{"id", t.id}, {"text", t.text}, {"start", t.char_start},
                     {"end", t.char_end}, {"special", t.is_special}});
    }
    doc["examples"].push_back({{"id", ex.id},
                               {"question", ex.question},
                               {"passage", ex.passage},
                               {"gold_answers", ex.gold_answers},
                               {"is_impossible", ex.is_impossible},
                               {"sequence", std::move(seq)},
                               {"passage_begin", ex.passage_begin},
                               {"passage_end", ex.passage_end},
                               {"target", {ex.target.start, ex.target.end}},
                               {"trainable", ex.trainable},
                               {"graph", graph_to_json_value(ex.graph)}});
  }
  write_file_atomic(dir / "graphs.json", doc.dump() + "\n");

  if (dot) {
    const auto dot_dir = dir / "dot";
    std::filesystem::create_directories(dot_dir, ec);
    if (ec) throw IoError("cannot create " + dot_dir.string() + ": " + ec.message());
    for (const auto& ex : dataset.examples) {
      write_file_atomic(dot_dir / (file_safe(ex.id) + ".dot"), export_dot(ex.graph));
    }
  }
}

PreparedDataset load_dataset(const std::filesystem::path& dir) {
  const std::string text = read_file(dir / "graphs.json");
  PreparedDataset out;
  try {
    const auto doc = nlohmann::json::parse(text);
    out.kind = graph_kind_from_string(doc.at("graph_kind").get<std::string>());
    out.max_len = doc.at("max_len").get<std::size_t>();
    for (const auto& e : doc.at("examples")) {
      PreparedExample ex;
      ex.id = e.at("id").get<std::string>();
      ex.question = e.at("question").get<std::string>();
      ex.passage = e.at("passage").get<std::string>();
      ex.gold_answers = e.at("gold_answers").get<std::vector<std::string>>();
      ex.is_impossible = e.at("is_impossible").get<bool>();
      for (const auto& t : e.at("sequence")) {
        SubwordToken tok;
        tok.id = t.at("id").get<std::uint32_t>();
        tok.text = t.at("text").get<std::string>();
        tok.char_start = t.at("start").get<std::size_t>();
        tok.char_end = t.at("end").get<std::size_t>();
        tok.is_special = t.at("special").get<bool>();
        ex.sequence.push_back(std::move(tok));
      }
      ex.passage_begin = e.at("passage_begin").get<std::size_t>();
      ex.passage_end = e.at("passage_end").get<std::size_t>();
      ex.target = {e.at("target").at(0).get<std::size_t>(),
                   e.at("target").at(1).get<std::size_t>()};
      ex.trainable = e.at("trainable").get<bool>();
      ex.graph = graph_from_json_value(e.at("graph"));
      if (ex.passage_begin > ex.passage_end || ex.passage_end > ex.sequence.size()) {
        throw FormatError("example " + ex.id + ": passage range out of bounds");
      }
      out.examples.push_back(std::move(ex));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graphs.json: ") + e.what(), 0, "byte");
  }
  return out;
}

}  // namespace syhgt
