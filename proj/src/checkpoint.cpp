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

#include "syhgt/checkpoint.hpp"

#include "binary_io.hpp"
#include "syhgt/error.hpp"
#include "syhgt/io.hpp"

namespace syhgt {

const Matrix& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, m] : tensors) {
    if (n == name) return m;
  }
  throw FormatError("checkpoint has no tensor '" + name + "'");
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json header;
  header["meta"] = ckpt.meta;
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, m] : ckpt.tensors) {
    header["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  }
  const std::string text = header.dump();

  binary::Writer w;
  w.bytes(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u64(text.size());
  w.bytes(text);
  for (const auto& entry : ckpt.tensors) {
    for (double x : entry.second.data()) w.f64(x);
  }
  return std::move(w.str());
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  binary::Reader r(bytes, "checkpoint");
  if (r.remaining() < kCheckpointMagic.size() ||
      r.bytes(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw FormatError("not a checkpoint: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version));
  }
  const std::uint64_t header_len = r.u64();
  r.need(header_len);
  const std::string_view text = r.bytes(header_len);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.meta = header.at("meta");
    for (const auto& t : header.at("tensors")) {
      const auto rows = t.at("rows").get<std::size_t>();
      const auto cols = t.at("cols").get<std::size_t>();
      if (cols != 0 && rows > r.remaining() / 8 / cols) {
        throw FormatError("checkpoint: truncated in tensor '" +
                          t.at("name").get<std::string>() + "'");
      }
      Matrix m(rows, cols);
      for (double& x : m.data()) x = r.f64();
      ckpt.tensors.emplace_back(t.at("name").get<std::string>(), std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }
  if (r.remaining() != 0) {
    throw FormatError("checkpoint: " + std::to_string(r.remaining()) +
                      " trailing bytes");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace syhgt
