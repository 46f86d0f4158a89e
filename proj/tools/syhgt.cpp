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

// syhgt command-line entry point.
//
// Exit codes: 0 success, 1 validation/config/format errors, 2 I/O errors.

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "syhgt/checkpoint.hpp"
#include "syhgt/embedding.hpp"
#include "syhgt/error.hpp"
#include "syhgt/io.hpp"
#include "syhgt/model.hpp"
#include "syhgt/pipeline.hpp"
#include "syhgt/squad.hpp"
#include "syhgt/syntax.hpp"
#include "syhgt/train.hpp"
#include "syhgt/wordpiece.hpp"

namespace {

using namespace syhgt;

struct BuildArgs {
  std::string squad, conllu, trees, vocab, out, offsets;
  std::size_t max_len = kMaxSequenceLength;
  bool dot = false;
};

struct TrainArgs {
  std::string graphs, graph_kind, embeddings, out;
  bool stub = false;
  std::optional<std::size_t> dim;
  std::size_t layers = 2, heads = 4, batch = 32, epochs = 7, max_span_len = 30;
  double lr = 2e-5, weight_decay = 0.01, null_threshold = 1.0;
  std::uint64_t seed = 0;
};

struct EvalArgs {
  std::string graphs, ckpt, out, predictions, embeddings;
  bool stub = false;
  std::optional<double> null_threshold;
};

struct GradArgs {
  std::uint64_t seed = 0;
  double eps = 1e-6;
};

int run_build(const BuildArgs& a) {
  const SquadDataset squad = read_squad(read_file(a.squad));
  if (squad.dropped > 0) {
    spdlog::warn("{} examples dropped: answer text does not match the context",
                 squad.dropped);
  }
  const Vocab vocab = Vocab::parse(read_file(a.vocab));
  std::optional<FileProvider> offsets;
  BuildOptions opts;
  opts.max_len = a.max_len;
  if (!a.offsets.empty()) {
    offsets.emplace(load_embeddings(a.offsets));
    opts.offsets = &*offsets;
  }
  const PreparedDataset data =
      a.conllu.empty()
          ? build_dataset(squad, read_bracketed(read_file(a.trees)), vocab, opts)
          : build_dataset(squad, read_conllu(read_file(a.conllu)), vocab, opts);
  save_dataset(data, a.out, a.dot);
  std::size_t vertices = 0, edges = 0;
  for (const auto& ex : data.examples) {
    vertices += ex.graph.num_vertices();
    edges += ex.graph.num_edges();
  }
  nlohmann::ordered_json summary{{"examples", data.examples.size()},
                                 {"dropped", squad.dropped},
                                 {"graph_kind", to_string(data.kind)},
                                 {"vertices", vertices},
                                 {"edges", edges}};
  std::cout << summary.dump() << "\n";
  return 0;
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& source,
                                                 std::size_t dim,
                                                 std::uint64_t seed) {
  if (source == "stub") return std::make_unique<StubProvider>(dim, seed);
  return std::make_unique<FileProvider>(load_embeddings(source));
}

int run_train(const TrainArgs& a) {
  const PreparedDataset data = load_dataset(a.graphs);
  RunConfig cfg;
  cfg.model.graph_kind = graph_kind_from_string(a.graph_kind);
  cfg.model.heads = a.heads;
  cfg.model.layers = a.layers;
  cfg.model.max_span_len = a.max_span_len;
  cfg.model.null_threshold = a.null_threshold;
  cfg.model.embedding_seed = a.seed;
  cfg.batch = a.batch;
  cfg.epochs = a.epochs;
  cfg.lr = a.lr;
  cfg.weight_decay = a.weight_decay;
  cfg.seed = a.seed;

  std::unique_ptr<EmbeddingProvider> provider;
  if (a.stub) {
    cfg.model.dim = a.dim.value_or(32);
    cfg.model.embeddings = "stub";
    provider = make_provider("stub", cfg.model.dim, a.seed);
  } else {
    provider = make_provider(a.embeddings, 0, a.seed);
    cfg.model.dim = provider->dim();
    if (a.dim && *a.dim != cfg.model.dim) {
      throw ConfigError("--dim " + std::to_string(*a.dim) +
                        " disagrees with the embedding file width " +
                        std::to_string(cfg.model.dim));
    }
    cfg.model.embeddings = a.embeddings;
  }

  TrainReport report;
  const Model model = train(data, *provider, cfg, &report);
  save_checkpoint(a.out, model_to_checkpoint(model));
  nlohmann::ordered_json summary{{"checkpoint", a.out},
                                 {"examples", report.examples_used},
                                 {"steps", report.steps},
                                 {"epoch_loss", report.epoch_loss}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_eval(const EvalArgs& a) {
  const PreparedDataset data = load_dataset(a.graphs);
  Model model = model_from_checkpoint(load_checkpoint(a.ckpt));
  if (a.null_threshold) model.config.null_threshold = *a.null_threshold;
  if (data.kind != model.config.graph_kind) {
    throw ConfigError("checkpoint was trained on " +
                      std::string(to_string(model.config.graph_kind)) +
                      " graphs, dataset holds " + std::string(to_string(data.kind)));
  }
  std::string source = model.config.embeddings;
  if (a.stub) source = "stub";
  if (!a.embeddings.empty()) source = a.embeddings;
  const auto provider =
      make_provider(source, model.config.dim, model.config.embedding_seed);

  const Evaluation ev = evaluate(data, model, *provider);
  write_file_atomic(a.out, eval_report_json(ev.result).dump(2) + "\n");
  if (!a.predictions.empty()) {
    write_file_atomic(a.predictions, predictions_json(ev).dump(2) + "\n");
  }
  std::cout << eval_report_json(ev.result).dump() << "\n";
  return 0;
}

int run_gradcheck(const GradArgs& a) {
  const GradCheckReport r = pipeline_grad_check(a.seed, a.eps);
  const bool ok = r.max_relative_error < 1e-5;
  nlohmann::ordered_json out{{"max_relative_error", r.max_relative_error},
                             {"worst_parameter", r.worst_parameter},
                             {"parameters", r.per_parameter.size()},
                             {"evaluations", r.evaluations},
                             {"pass", ok}};
  std::cout << out.dump() << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  syhgt::init_logging_from_env();

  CLI::App app{"Syntax-informed heterogeneous graph transformer for extractive QA"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build-graph", "Build per-example graphs from SQuAD + parses");
  b->add_option("--squad", build.squad, "SQuAD 2.0 JSON")->required();
  auto* conllu = b->add_option("--conllu", build.conllu, "Dependency parses (CoNLL-U)");
  auto* trees = b->add_option("--trees", build.trees, "Constituency trees (PTB, one per line)");
  conllu->excludes(trees);
  b->add_option("--vocab", build.vocab, "WordPiece vocabulary")->required();
  b->add_option("--out", build.out, "Output directory")->required();
  b->add_flag("--dot", build.dot, "Also write Graphviz files under <out>/dot");
  b->add_option("--offsets", build.offsets,
                "Embedding file whose sidecar supplies the subword sequences");
  b->add_option("--max-len", build.max_len, "Maximum sequence length")
      ->capture_default_str();

  TrainArgs tr;
  auto* t = app.add_subcommand(
      "train",
      "Train a model. Defaults follow the published setup (lr 2e-5, batch 32, 7 "
      "epochs); desk-scale runs on frozen stub embeddings want --lr 1e-3 --batch 4.");
  t->add_option("--graphs", tr.graphs, "Directory written by build-graph")->required();
  t->add_option("--graph-kind", tr.graph_kind, "dep or con")
      ->required()
      ->check(CLI::IsMember({"dep", "con"}));
  auto* emb = t->add_option("--embeddings", tr.embeddings, "Embedding file");
  auto* stub = t->add_flag("--stub", tr.stub, "Deterministic stub embeddings");
  emb->excludes(stub);
  t->add_option("--dim", tr.dim, "Embedding width (stub runs; default 32)");
  t->add_option("--layers", tr.layers, "HGT layers")->capture_default_str();
  t->add_option("--heads", tr.heads, "Attention heads")->capture_default_str();
  t->add_option("--lr", tr.lr, "AdamW learning rate")->capture_default_str();
  t->add_option("--weight-decay", tr.weight_decay, "AdamW weight decay")
      ->capture_default_str();
  t->add_option("--batch", tr.batch, "Examples per step")->capture_default_str();
  t->add_option("--epochs", tr.epochs, "Passes over the data")->capture_default_str();
  t->add_option("--seed", tr.seed, "Seed for init, shuffling and stub embeddings")
      ->capture_default_str();
  t->add_option("--max-span-len", tr.max_span_len, "Longest decoded span in subwords")
      ->capture_default_str();
  t->add_option("--null-threshold", tr.null_threshold, "No-answer decision factor")
      ->capture_default_str();
  t->add_option("--out", tr.out, "Checkpoint path")->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint (EM / F1)");
  e->add_option("--graphs", ev.graphs, "Directory written by build-graph")->required();
  e->add_option("--ckpt", ev.ckpt, "Checkpoint")->required();
  e->add_option("--out", ev.out, "Report JSON")->required();
  e->add_option("--predictions", ev.predictions, "Predictions JSON");
  auto* eemb = e->add_option("--embeddings", ev.embeddings,
                             "Embedding file (default: the one used in training)");
  auto* estub = e->add_flag("--stub", ev.stub, "Force stub embeddings");
  eemb->excludes(estub);
  e->add_option("--null-threshold", ev.null_threshold, "Override the no-answer factor");

  GradArgs gc;
  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of the full loss");
  g->add_option("--seed", gc.seed, "Parameter seed")->capture_default_str();
  g->add_option("--eps", gc.eps, "Central-difference step")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& s) {
    return app.exit(s);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  }

  try {
    if (*b) {
      if (build.conllu.empty() == build.trees.empty()) {
        throw syhgt::ConfigError("build-graph needs exactly one of --conllu, --trees");
      }
      return run_build(build);
    }
    if (*t) {
      if (!tr.stub && tr.embeddings.empty()) {
        throw syhgt::ConfigError("train needs --embeddings FILE or --stub");
      }
      return run_train(tr);
    }
    if (*e) return run_eval(ev);
    if (*g) return run_gradcheck(gc);
  } catch (const syhgt::IoError& err) {
    spdlog::error("{}", err.what());
    return 2;
  } catch (const std::exception& err) {
    spdlog::error("{}", err.what());
    return 1;
  }
  return 1;
}
