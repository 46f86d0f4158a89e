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

// Parameter checkpoint container.
//
// Layout (little-endian):
//   "SYHGTCKPT"            9 bytes
//   version                u32
//   header length          u64
//   header                 JSON, UTF-8
//   matrices               f64, row-major, in header order
// The header is {"meta": <caller data>, "tensors": [{"name","rows","cols"}]}.

#ifndef SYHGT_CHECKPOINT_HPP_
#define SYHGT_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "syhgt/tensor.hpp"

namespace syhgt {

inline constexpr std::string_view kCheckpointMagic = "SYHGTCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Matrix>> tensors;

  // Throws FormatError if absent.
  const Matrix& tensor(const std::string& name) const;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
// Throws FormatError on bad magic or version, a malformed header, or a byte
// count that does not match the header (truncation, trailing bytes).
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace syhgt

#endif  // SYHGT_CHECKPOINT_HPP_
