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

#include "syhgt/embedding.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "binary_io.hpp"
#include "syhgt/error.hpp"
#include "syhgt/io.hpp"

namespace syhgt {

Matrix stub_embed(std::span<const std::uint32_t> subword_ids, std::size_t dim,
                  std::uint64_t seed) {
  Matrix out(subword_ids.size(), dim);
  for (std::size_t i = 0; i < subword_ids.size(); ++i) {
    Rng rng(mix_seed({seed, subword_ids[i], i}));
    auto row = out.row(i);
    double norm2 = 0.0;
    for (double& x : row) {
      x = rng.uniform(-1.0, 1.0);
      norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    for (double& x : row) x /= norm;
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".offsets.json";
  return p;
}

std::string encode_embedding_file(std::span<const EmbeddingRecord> records,
                                  std::uint32_t dim) {
  if (dim == 0) throw ConfigError("embedding dim must be positive");
  std::set<std::string> ids;
  binary::Writer w;
  w.bytes(kEmbeddingMagic);
  w.u32(kEmbeddingVersion);
  w.u32(dim);
  w.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw ConfigError("duplicate embedding id " + r.id);
    if (r.values.cols() != dim && r.values.rows() != 0) {
      throw ConfigError("record " + r.id + " has width " +
                        std::to_string(r.values.cols()) + ", expected " +
                        std::to_string(dim));
    }
    w.u32(static_cast<std::uint32_t>(r.id.size()));
    w.bytes(r.id);
    w.u32(static_cast<std::uint32_t>(r.values.rows()));
    for (double x : r.values.data()) w.f32(static_cast<float>(x));
  }
  return std::move(w.str());
}

std::string encode_sidecar(std::span<const EmbeddingRecord> records) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& r : records) {
    nlohmann::ordered_json offsets = nlohmann::ordered_json::array();
    for (const auto& [s, e] : r.offsets) offsets.push_back({s, e});
    doc[r.id] = {{"pieces", r.pieces}, {"offsets", offsets}};
  }
  return doc.dump() + "\n";
}

std::vector<EmbeddingRecord> decode_embedding_file(std::string_view bytes,
                                                   std::string_view sidecar_json,
                                                   std::uint32_t* dim_out) {
  binary::Reader r(bytes, "embedding file");
  if (r.remaining() < kEmbeddingMagic.size() ||
      r.bytes(kEmbeddingMagic.size()) != kEmbeddingMagic) {
    throw FormatError("not an embedding file: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kEmbeddingVersion) {
    throw FormatError("unsupported embedding file version " +
                      std::to_string(version));
  }
  const std::uint32_t dim = r.u32();
  if (dim == 0) throw FormatError("embedding file declares dim 0");
  const std::uint32_t count = r.u32();

  std::vector<EmbeddingRecord> records;
  std::set<std::string> ids;
  for (std::uint32_t k = 0; k < count; ++k) {
    EmbeddingRecord rec;
    const std::uint32_t id_len = r.u32();
    rec.id = std::string(r.bytes(id_len));
    if (!ids.insert(rec.id).second) {
      throw FormatError("duplicate embedding id " + rec.id);
    }
    const std::uint32_t n = r.u32();
    r.need(static_cast<std::size_t>(n) * dim * 4);
    rec.values = Matrix(n, dim);
    for (double& x : rec.values.data()) x = r.f32();
    records.push_back(std::move(rec));
  }
  if (r.remaining() != 0) {
    throw FormatError("embedding file: " + std::to_string(r.remaining()) +
                      " trailing bytes");
  }

  nlohmann::json side;
  try {
    side = nlohmann::json::parse(sidecar_json);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("embedding sidecar: ") + e.what());
  }
  if (!side.is_object()) throw FormatError("embedding sidecar must be an object");
  if (side.size() != records.size()) {
    throw ConsistencyError("sidecar lists " + std::to_string(side.size()) +
                           " records, file holds " +
                           std::to_string(records.size()));
  }
  for (auto& rec : records) {
    if (!side.contains(rec.id)) {
      throw ConsistencyError("sidecar has no entry for " + rec.id);
    }
    try {
      const auto& entry = side.at(rec.id);
      rec.pieces = entry.at("pieces").get<std::vector<std::string>>();
      for (const auto& o : entry.at("offsets")) {
        rec.offsets.emplace_back(o.at(0).get<std::size_t>(),
                                 o.at(1).get<std::size_t>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("embedding sidecar entry " + rec.id + ": " + e.what());
    }
    if (rec.pieces.size() != rec.values.rows() ||
        rec.offsets.size() != rec.values.rows()) {
      throw ConsistencyError(
          "record " + rec.id + " has " + std::to_string(rec.values.rows()) +
          " tokens but the sidecar lists " + std::to_string(rec.pieces.size()) +
          " pieces and " + std::to_string(rec.offsets.size()) + " offsets");
    }
  }
  if (dim_out) *dim_out = dim;
  return records;
}

void write_embeddings(std::span<const EmbeddingRecord> records,
                      std::uint32_t dim, const std::filesystem::path& path) {
  for (const auto& r : records) {
    if (r.pieces.size() != r.values.rows() || r.offsets.size() != r.values.rows()) {
      throw ConfigError("record " + r.id + " has mismatched pieces/offsets");
    }
  }
  const std::string body = encode_embedding_file(records, dim);
  const std::string side = encode_sidecar(records);
  write_file_atomic(sidecar_path(path), side);
  write_file_atomic(path, body);
}

Matrix StubProvider::embed(const std::string&,
                           std::span<const SubwordToken> sequence) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(sequence.size());
  for (const auto& t : sequence) ids.push_back(t.id);
  return stub_embed(ids, dim_, seed_);
}

FileProvider::FileProvider(std::uint32_t dim, std::vector<EmbeddingRecord> records)
    : dim_(dim) {
  for (auto& r : records) {
    std::string id = r.id;
    records_.emplace(std::move(id), std::move(r));
  }
}

const EmbeddingRecord* FileProvider::find(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

Matrix FileProvider::embed(const std::string& id,
                           std::span<const SubwordToken> sequence) const {
  const EmbeddingRecord* rec = find(id);
  if (!rec) throw ConsistencyError("no embeddings for example " + id);
  if (rec->values.rows() != sequence.size()) {
    throw ConsistencyError("example " + id + ": " +
                           std::to_string(rec->values.rows()) +
                           " embedded tokens for a sequence of " +
                           std::to_string(sequence.size()));
  }
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (rec->pieces[i] != sequence[i].text) {
      throw ConsistencyError("example " + id + ": piece " + std::to_string(i) +
                             " is '" + sequence[i].text + "' but the file has '" +
                             rec->pieces[i] + "'");
    }
  }
  return rec->values;
}

FileProvider load_embeddings(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const std::string side = read_file(sidecar_path(path));
  std::uint32_t dim = 0;
  auto records = decode_embedding_file(bytes, side, &dim);
  return FileProvider(dim, std::move(records));
}

}  // namespace syhgt
