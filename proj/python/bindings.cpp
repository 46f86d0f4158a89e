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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "syhgt/checkpoint.hpp"
#include "syhgt/embedding.hpp"
#include "syhgt/error.hpp"
#include "syhgt/graph.hpp"
#include "syhgt/io.hpp"
#include "syhgt/metrics.hpp"
#include "syhgt/model.hpp"
#include "syhgt/pipeline.hpp"
#include "syhgt/span_head.hpp"
#include "syhgt/squad.hpp"
#include "syhgt/syntax.hpp"
#include "syhgt/train.hpp"
#include "syhgt/wordpiece.hpp"

namespace py = pybind11;
using namespace syhgt;

namespace {

py::object to_py(const nlohmann::ordered_json& j) {
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::null:
      return py::none();
    case nlohmann::ordered_json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::ordered_json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::ordered_json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::ordered_json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::ordered_json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::ordered_json::value_t::array: {
      py::list out;
      for (const auto& x : j) out.append(to_py(x));
      return out;
    }
    case nlohmann::ordered_json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

py::array_t<double> to_numpy(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto buf = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) buf(r, c) = m(r, c);
  }
  return out;
}

Matrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
  Matrix m(a.shape(0), a.shape(1));
  auto buf = a.unchecked<2>();
  for (py::ssize_t r = 0; r < a.shape(0); ++r) {
    for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = buf(r, c);
  }
  return m;
}

py::dict example_dict(const PreparedExample& ex) {
  py::list pieces, offsets;
  for (const auto& t : ex.sequence) {
    pieces.append(t.text);
    offsets.append(py::make_tuple(t.char_start, t.char_end));
  }
  py::dict d;
  d["id"] = ex.id;
  d["question"] = ex.question;
  d["passage"] = ex.passage;
  d["gold_answers"] = ex.gold_answers;
  d["is_impossible"] = ex.is_impossible;
  d["pieces"] = pieces;
  d["offsets"] = offsets;
  d["passage_begin"] = ex.passage_begin;
  d["passage_end"] = ex.passage_end;
  d["target"] = py::make_tuple(ex.target.start, ex.target.end);
  d["trainable"] = ex.trainable;
  d["num_vertices"] = ex.graph.num_vertices();
  d["num_edges"] = ex.graph.num_edges();
  return d;
}

std::unique_ptr<EmbeddingProvider> provider_for(const Model& model) {
  if (model.config.embeddings == "stub") {
    return std::make_unique<StubProvider>(model.config.dim, model.config.embedding_seed);
  }
  return std::make_unique<FileProvider>(load_embeddings(model.config.embeddings));
}

PreparedDataset build_from_files(const std::string& squad_path, const std::string& parses_path,
                                 const std::string& kind, const std::string& vocab_path,
                                 std::size_t max_len) {
  const SquadDataset squad = read_squad(read_file(squad_path));
  const Vocab vocab = Vocab::parse(read_file(vocab_path));
  BuildOptions opts;
  opts.max_len = max_len;
  if (graph_kind_from_string(kind) == GraphKind::Dependency) {
    return build_dataset(squad, read_conllu(read_file(parses_path)), vocab, opts);
  }
  return build_dataset(squad, read_bracketed(read_file(parses_path)), vocab, opts);
}

}  // namespace

PYBIND11_MODULE(_syhgt, m) {
  m.doc() = "SyHGT: syntax-informed heterogeneous graph transformer for extractive QA";

  auto base = py::register_exception<Error>(m, "SyhgtError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<AlignmentError>(m, "AlignmentError", base.ptr());
  py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  // metrics
  m.def("normalize_answer", [](const std::string& s) { return normalize_answer(s); });
  m.def(
      "em_f1",
      [](const std::string& pred, const std::vector<std::string>& golds) {
        const AnswerScore s = em_f1(pred, golds);
        return py::make_tuple(s.em, s.f1);
      },
      py::arg("prediction"), py::arg("gold_answers"));
  m.def(
      "evaluate_predictions",
      [](const std::vector<std::tuple<std::string, std::vector<std::string>, std::string>>& rows) {
        std::vector<EvalItem> items;
        for (const auto& [id, golds, pred] : rows) items.push_back({id, golds, pred});
        return to_py(eval_report_json(evaluate_items(items)));
      },
      py::arg("items"), "items: (id, gold answers, prediction) triples");

  // span head
  m.def(
      "decode_span",
      [](const std::vector<double>& start, const std::vector<double>& end,
         std::size_t passage_begin, std::size_t passage_end, std::size_t max_span_len,
         double null_threshold) {
        const SpanPrediction p =
            decode_span(start, end, passage_begin, passage_end, max_span_len, null_threshold);
        py::dict d;
        d["span"] = p.best_span ? py::object(py::make_tuple(p.best_span->first, p.best_span->second))
                                : py::object(py::none());
        d["best_score"] = p.best_score;
        d["null_score"] = p.null_score;
        return d;
      },
      py::arg("start_probs"), py::arg("end_probs"), py::arg("passage_begin"),
      py::arg("passage_end"), py::arg("max_span_len") = 30, py::arg("null_threshold") = 1.0);

  // tokenizer
  py::class_<Vocab>(m, "Vocab")
      .def_static("from_file", [](const std::filesystem::path& p) { return Vocab::parse(read_file(p)); })
      .def_static("parse", [](const std::string& text) { return Vocab::parse(text); })
      .def("tokenize", [](const Vocab& v, const std::string& text) {
        py::list out;
        for (const auto& t : tokenize_subwords(text, v)) {
          out.append(py::make_tuple(t.text, t.id, t.char_start, t.char_end));
        }
        return out;
      });

  // embeddings
  m.def(
      "stub_embed",
      [](const std::vector<std::uint32_t>& ids, std::size_t dim, std::uint64_t seed) {
        return to_numpy(stub_embed(ids, dim, seed));
      },
      py::arg("subword_ids"), py::arg("dim"), py::arg("seed"));
  m.def(
      "write_embeddings",
      [](const std::filesystem::path& path, const py::list& records, std::uint32_t dim) {
        std::vector<EmbeddingRecord> recs;
        for (const auto& obj : records) {
          const py::dict d = obj.cast<py::dict>();
          EmbeddingRecord r;
          r.id = d["id"].cast<std::string>();
          r.values = from_numpy(
              d["values"].cast<py::array_t<double, py::array::c_style | py::array::forcecast>>());
          r.pieces = d["pieces"].cast<std::vector<std::string>>();
          r.offsets = d["offsets"].cast<std::vector<std::pair<std::size_t, std::size_t>>>();
          recs.push_back(std::move(r));
        }
        write_embeddings(recs, dim, path);
      },
      py::arg("path"), py::arg("records"), py::arg("dim"),
      "records: dicts with id, values (n x dim), pieces, offsets");
  m.def(
      "load_embeddings",
      [](const std::filesystem::path& path) {
        const std::string bytes = read_file(path);
        const std::string side = read_file(sidecar_path(path));
        std::uint32_t dim = 0;
        py::dict out;
        for (const auto& r : decode_embedding_file(bytes, side, &dim)) {
          py::dict d;
          d["values"] = to_numpy(r.values);
          d["pieces"] = r.pieces;
          d["offsets"] = r.offsets;
          out[py::str(r.id)] = d;
        }
        return py::make_tuple(dim, out);
      },
      py::arg("path"), "Returns (dim, {id: record}).");

  // graphs
  py::class_<PreparedDataset>(m, "Dataset")
      .def_static("build", &build_from_files, py::arg("squad"), py::arg("parses"),
                  py::arg("kind"), py::arg("vocab"), py::arg("max_len") = kMaxSequenceLength,
                  "kind is 'dep' (CoNLL-U parses) or 'con' (bracketed trees)")
      .def_static("load", [](const std::filesystem::path& dir) { return load_dataset(dir); })
      .def("save", &save_dataset, py::arg("dir"), py::arg("dot") = false)
      .def_property_readonly("kind", [](const PreparedDataset& d) { return std::string(to_string(d.kind)); })
      .def("__len__", [](const PreparedDataset& d) { return d.examples.size(); })
      .def("example", [](const PreparedDataset& d, std::size_t i) { return example_dict(d.examples.at(i)); })
      .def("graph_json", [](const PreparedDataset& d, std::size_t i) { return graph_to_json(d.examples.at(i).graph); })
      .def("graph_dot", [](const PreparedDataset& d, std::size_t i) { return export_dot(d.examples.at(i).graph); });

  // training
  py::class_<Model>(m, "Model")
      .def_static(
          "train",
          [](const PreparedDataset& data, std::size_t dim, std::size_t layers, std::size_t heads,
             double lr, std::size_t batch, std::size_t epochs, std::uint64_t seed,
             double weight_decay, std::size_t max_span_len, double null_threshold,
             std::optional<std::string> embeddings) {
            RunConfig cfg;
            cfg.model.graph_kind = data.kind;
            cfg.model.layers = layers;
            cfg.model.heads = heads;
            cfg.model.max_span_len = max_span_len;
            cfg.model.null_threshold = null_threshold;
            cfg.model.embedding_seed = seed;
            cfg.batch = batch;
            cfg.epochs = epochs;
            cfg.lr = lr;
            cfg.weight_decay = weight_decay;
            cfg.seed = seed;
            std::unique_ptr<EmbeddingProvider> provider;
            if (embeddings) {
              auto fp = std::make_unique<FileProvider>(load_embeddings(*embeddings));
              cfg.model.dim = fp->dim();
              cfg.model.embeddings = *embeddings;
              provider = std::move(fp);
            } else {
              cfg.model.dim = dim;
              provider = std::make_unique<StubProvider>(dim, seed);
            }
            TrainReport rep;
            Model model;
            {
              py::gil_scoped_release release;
              model = train(data, *provider, cfg, &rep);
            }
            py::dict report;
            report["steps"] = rep.steps;
            report["examples"] = rep.examples_used;
            report["epoch_loss"] = rep.epoch_loss;
            report["step_loss"] = rep.step_loss;
            return py::make_tuple(std::move(model), report);
          },
          py::arg("dataset"), py::arg("dim") = 32, py::arg("layers") = 2, py::arg("heads") = 4,
          py::arg("lr") = 1e-3, py::arg("batch") = 4, py::arg("epochs") = 1, py::arg("seed") = 0,
          py::arg("weight_decay") = 0.01, py::arg("max_span_len") = 30,
          py::arg("null_threshold") = 1.0, py::arg("embeddings") = py::none(),
          "Stub embeddings unless an embedding file path is given. Returns (model, report).")
      .def_static("load", [](const std::filesystem::path& p) {
        return model_from_checkpoint(load_checkpoint(p));
      })
      .def("save", [](const Model& model, const std::filesystem::path& p) {
        save_checkpoint(p, model_to_checkpoint(model));
      })
      .def("evaluate", [](const Model& model, const PreparedDataset& data) {
        const auto provider = provider_for(model);
        const Evaluation ev = evaluate(data, model, *provider);
        py::dict out = to_py(eval_report_json(ev.result)).cast<py::dict>();
        out["predictions"] = to_py(predictions_json(ev)["predictions"]);
        out["mean_loss"] = ev.mean_loss;
        return out;
      })
      .def_property_readonly("config", [](const Model& model) {
        py::dict d;
        d["graph_kind"] = std::string(to_string(model.config.graph_kind));
        d["dim"] = model.config.dim;
        d["heads"] = model.config.heads;
        d["layers"] = model.config.layers;
        d["max_span_len"] = model.config.max_span_len;
        d["null_threshold"] = model.config.null_threshold;
        d["embeddings"] = model.config.embeddings;
        return d;
      })
      .def("parameters", [](const Model& model) {
        py::dict out;
        visit_model(model, [&](const std::string& name, const Matrix& value) {
          out[py::str(name)] = to_numpy(value);
        });
        return out;
      });

  m.def(
      "gradcheck",
      [](std::uint64_t seed, double eps) {
        const GradCheckReport r = pipeline_grad_check(seed, eps);
        py::dict d;
        d["max_relative_error"] = r.max_relative_error;
        d["worst_parameter"] = r.worst_parameter;
        d["per_parameter"] = r.per_parameter;
        d["evaluations"] = r.evaluations;
        return d;
      },
      py::arg("seed") = 0, py::arg("eps") = 1e-6);
}
