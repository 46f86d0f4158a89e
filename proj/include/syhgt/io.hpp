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

#ifndef SYHGT_IO_HPP_
#define SYHGT_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace syhgt {

// Whole-file read; throws IoError.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view bytes);

// Reads SYHGT_LOG (error|info|debug) and sets the global log level.
void init_logging_from_env();

}  // namespace syhgt

#endif  // SYHGT_IO_HPP_
