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

#include "syhgt/squad.hpp"

#include <spdlog/spdlog.h>

#include <json.hpp>

#include "syhgt/error.hpp"
#include "text_util.hpp"

namespace syhgt {

using nlohmann::json;

SquadDataset read_squad(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed SQuAD JSON: ") + e.what(), e.byte,
                     "byte");
  }
  SquadDataset out;
  try {
    for (const auto& article : doc.at("data")) {
      for (const auto& para : article.at("paragraphs")) {
        const std::size_t paragraph = out.paragraphs.size();
        std::string context = para.at("context").get<std::string>();
        out.paragraphs.push_back(context);
        out.units.push_back({TextUnit::Kind::Passage, paragraph, "", context});
        for (const auto& qa : para.at("qas")) {
          QaExample ex;
          ex.id = qa.at("id").get<std::string>();
          ex.question = qa.at("question").get<std::string>();
          ex.passage = context;
          ex.paragraph = paragraph;
          ex.is_impossible = qa.value("is_impossible", false);
          out.units.push_back(
              {TextUnit::Kind::Question, paragraph, ex.id, ex.question});
          bool ok = true;
          if (!ex.is_impossible) {
            for (const auto& ans : qa.at("answers")) {
              GoldAnswer gold;
              gold.text = ans.at("text").get<std::string>();
              const auto cp = ans.at("answer_start").get<std::size_t>();
              gold.char_start = text_util::utf8_byte_offset(context, cp);
              if (gold.char_start == std::string_view::npos ||
                  context.compare(gold.char_start, gold.text.size(),
                                  gold.text) != 0) {
                spdlog::warn("dropping {}: answer '{}' not found at offset {}",
                             ex.id, gold.text, cp);
                ok = false;
                break;
              }
              ex.gold_answers.push_back(std::move(gold));
            }
            if (ok && ex.gold_answers.empty()) {
              spdlog::warn("dropping {}: answerable question without answers",
                           ex.id);
              ok = false;
            }
          }
          if (!ok) {
            ++out.dropped;
            continue;
          }
          out.examples.push_back(std::move(ex));
        }
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("unexpected SQuAD layout: ") + e.what(), 0,
                     "byte");
  }
  if (out.dropped > 0) {
    spdlog::warn("dropped {} of {} examples with misplaced answers",
                 out.dropped, out.dropped + out.examples.size());
  }
  return out;
}

}  // namespace syhgt
