# Copyright 2026 The SyHGT Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the SyHGT C++ core."""

from ._syhgt import (  # noqa: F401
    AlignmentError,
    ConfigError,
    ConsistencyError,
    ConstructionError,
    ContractError,
    Dataset,
    FormatError,
    IoError,
    Model,
    ParseError,
    ShapeError,
    SyhgtError,
    ValidationError,
    Vocab,
    decode_span,
    em_f1,
    evaluate_predictions,
    gradcheck,
    load_embeddings,
    normalize_answer,
    stub_embed,
    write_embeddings,
)

__version__ = "0.1.0"
