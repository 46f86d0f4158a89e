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

// JSON-value level conversions shared between translation units.

#ifndef SYHGT_SRC_JSON_CONVERT_HPP_
#define SYHGT_SRC_JSON_CONVERT_HPP_

#include <json.hpp>

#include "syhgt/graph.hpp"

namespace syhgt {

nlohmann::json graph_to_json_value(const HeteroGraph& graph);
HeteroGraph graph_from_json_value(const nlohmann::json& doc);

}  // namespace syhgt

#endif  // SYHGT_SRC_JSON_CONVERT_HPP_
