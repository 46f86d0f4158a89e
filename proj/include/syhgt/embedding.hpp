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

// Token embedding providers.
//
// Embedding file (little-endian):
//   "SYHGTEMB"  8 bytes
//   version     u32 (= 1)
//   dim         u32
//   count       u32
//   count records of:
//     id_len u32, id bytes, n_tokens u32, n_tokens * dim f32
// Sidecar "<file>.offsets.json":
//   {"<id>": {"pieces": [...], "offsets": [[start, end], ...]}, ...}
// Offsets of question pieces refer to the question text and offsets of
// passage pieces to the passage text; special pieces sit at [0, 0].

#ifndef SYHGT_EMBEDDING_HPP_
#define SYHGT_EMBEDDING_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "syhgt/tensor.hpp"
#include "syhgt/wordpiece.hpp"

namespace syhgt {

inline constexpr std::string_view kEmbeddingMagic = "SYHGTEMB";
inline constexpr std::uint32_t kEmbeddingVersion = 1;

// Row i is a unit vector drawn from a generator seeded by
// (seed, subword_ids[i], i).
Matrix stub_embed(std::span<const std::uint32_t> subword_ids, std::size_t dim,
                  std::uint64_t seed);

struct EmbeddingRecord {
  std::string id;
  Matrix values;  // n_tokens x dim; stored as f32
  std::vector<std::string> pieces;
  std::vector<std::pair<std::size_t, std::size_t>> offsets;
};

// Path of the offsets sidecar for an embedding file.
std::filesystem::path sidecar_path(const std::filesystem::path& path);

std::string encode_embedding_file(std::span<const EmbeddingRecord> records,
                                  std::uint32_t dim);
std::string encode_sidecar(std::span<const EmbeddingRecord> records);

// Throws FormatError on bad magic/version/dim, truncation or trailing
// bytes, and ConsistencyError when a record disagrees with the sidecar.
std::vector<EmbeddingRecord> decode_embedding_file(std::string_view bytes,
                                                   std::string_view sidecar_json,
                                                   std::uint32_t* dim = nullptr);

// Writes both files atomically. Throws ConfigError for duplicate ids, dim
// 0, or records whose width differs from dim.
void write_embeddings(std::span<const EmbeddingRecord> records,
                      std::uint32_t dim, const std::filesystem::path& path);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  // n x dim for the sequence of example `id`.
  virtual Matrix embed(const std::string& id,
                       std::span<const SubwordToken> sequence) const = 0;
};

class StubProvider : public EmbeddingProvider {
 public:
  StubProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}
  std::size_t dim() const override { return dim_; }
  Matrix embed(const std::string& id,
               std::span<const SubwordToken> sequence) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

class FileProvider : public EmbeddingProvider {
 public:
  FileProvider(std::uint32_t dim, std::vector<EmbeddingRecord> records);
  std::size_t dim() const override { return dim_; }
  // Throws ConsistencyError for an unknown id or a sequence whose pieces
  // differ from the record's.
  Matrix embed(const std::string& id,
               std::span<const SubwordToken> sequence) const override;
  const EmbeddingRecord* find(const std::string& id) const;
  std::size_t size() const { return records_.size(); }

 private:
  std::uint32_t dim_;
  std::map<std::string, EmbeddingRecord> records_;
};

// Reads the file and its sidecar. Nothing is returned unless both parse.
FileProvider load_embeddings(const std::filesystem::path& path);

}  // namespace syhgt

#endif  // SYHGT_EMBEDDING_HPP_
