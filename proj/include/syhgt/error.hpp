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

#ifndef SYHGT_ERROR_HPP_
#define SYHGT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace syhgt {

// Root of every error raised by the library. The CLI maps IoError to exit
// code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input. `position` is a line number or a character
// offset depending on the reader; `unit` says which.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position,
             const char* unit = "line")
      : Error(what + " (" + unit + " " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Binary container (embedding file, checkpoint) is malformed or truncated.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace syhgt

#endif  // SYHGT_ERROR_HPP_
