// Copyright 2026 The HashProbe Authors.
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

#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "hashprobe/datagen.hpp"
#include "hashprobe/dataio.hpp"
#include "hashprobe/errors.hpp"
#include "hashprobe/eval.hpp"
#include "hashprobe/inverted_index.hpp"
#include "hashprobe/log.hpp"
#include "hashprobe/predictor.hpp"
#include "hashprobe/relevance.hpp"
#include "hashprobe/search.hpp"

namespace fs = std::filesystem;

namespace hashprobe::cli {

namespace {

struct GenOptions {
  SynthConfig synth;
  std::string out;
};

struct IndexOptions {
  std::string manifest;
  std::uint32_t d = 14;
  std::string out;
};

struct TrainOptions {
  std::string manifest;
  std::string index;
  std::string out;
  std::uint32_t epochs = 100;
  std::uint32_t batch = 64;
  double lr = 1e-3;
  std::string optimizer = "adam";
  double momentum = 0.9;
  std::uint64_t seed = 42;
  int threads = 1;
};

struct BudgetOptions {
  std::optional<std::uint64_t> top_entries;
  std::optional<std::uint64_t> candidate_count;
};

struct SearchOptions {
  std::string manifest;
  std::string index;
  std::string model;
  std::string method = "dnn-index";
  std::uint32_t k = 10;
  BudgetOptions budget;
  std::optional<std::uint64_t> query_id;
  std::string query_features;
  std::string query_codes;
  int threads = 1;
};

struct EvalOptions {
  std::string manifest;
  std::string index;
  std::string model;
  std::string map_grid = "10,20,30,40,50";
  BudgetOptions budget;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out;
};

fs::path sibling(const std::string& manifest, const std::string& given, const char* name) {
  if (!given.empty()) return given;
  return fs::path(manifest).parent_path() / name;
}

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

// Top-R sized so a uniformly occupied table yields about 0.3% ARD.
CandidateBudget resolve_budget(const BudgetOptions& opts, std::uint32_t d, std::uint64_t n) {
  if (opts.candidate_count) {
    if (*opts.candidate_count > n) {
      throw InvalidArgument("--candidate-count " + std::to_string(*opts.candidate_count) +
                            " exceeds N = " + std::to_string(n));
    }
    return CandidateBudget::min_candidates(*opts.candidate_count);
  }
  const std::uint64_t entries = std::uint64_t{1} << d;
  if (opts.top_entries) {
    if (*opts.top_entries > entries) {
      throw InvalidArgument("--top-entries " + std::to_string(*opts.top_entries) +
                            " exceeds 2^d = " + std::to_string(entries));
    }
    return CandidateBudget::top_entries(*opts.top_entries);
  }
  const auto r = static_cast<std::uint64_t>(std::llround(0.003 * static_cast<double>(entries)));
  return CandidateBudget::top_entries(std::max<std::uint64_t>(1, r));
}

std::vector<std::uint32_t> parse_grid(const std::string& text) {
  std::vector<std::uint32_t> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != item.size() || value < 1 || value > 1000000) {
      throw InvalidArgument("--map-grid entry \"" + item + "\" is not a positive integer");
    }
    grid.push_back(static_cast<std::uint32_t>(value));
  }
  if (grid.empty()) throw InvalidArgument("--map-grid is empty");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::string format_g(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void cmd_gen(const GenOptions& opts, std::ostream& out) {
  opts.synth.validate();
  const fs::path dir(opts.out);
  fs::create_directories(dir);
  const SyntheticData data = generate(opts.synth);

  DatasetManifest m;
  m.code_bits = opts.synth.code_bits;
  m.query_dim = opts.synth.text_dim;
  m.reference = {"reference.codes", "reference.labels", "reference_image.features",
                 data.reference.size()};
  m.train = {"train.codes", "train.labels", "train_text.features", data.train.size()};
  m.eval = {"eval.codes", "eval.labels", "eval_text.features", data.eval.size()};

  save_codes(data.reference.codes, dir / m.reference.codes);
  save_labels(data.reference.labels, dir / m.reference.labels);
  save_features(data.reference.features, dir / m.reference.features);
  save_codes(data.train.codes, dir / m.train.codes);
  save_labels(data.train.labels, dir / m.train.labels);
  save_features(data.train.features, dir / m.train.features);
  save_codes(data.eval.codes, dir / m.eval.codes);
  save_labels(data.eval.labels, dir / m.eval.labels);
  save_features(data.eval.features, dir / m.eval.features);
  save_manifest(m, dir / "manifest.txt");
  out << "wrote " << (dir / "manifest.txt").string() << " (N=" << data.reference.size()
      << ", train=" << data.train.size() << ", eval=" << data.eval.size()
      << ", c=" << m.code_bits << ", F=" << m.query_dim << ")\n";
}

void cmd_index(const IndexOptions& opts, std::ostream& out) {
  const auto manifest = load_manifest(opts.manifest);
  const CodeSet codes = load_codes(manifest.resolve(manifest.reference.codes));
  if (codes.size() != manifest.reference.count) {
    throw ConsistencyError("reference codes hold " + std::to_string(codes.size()) +
                           " points, manifest expects " +
                           std::to_string(manifest.reference.count));
  }
  const InvertedIndex index = build_index(codes, opts.d);
  const fs::path path = sibling(opts.manifest, opts.out, "index.hpix");
  save_index(index, path);
  const auto stats = occupancy(index);
  out << "wrote " << path.string() << "\n"
      << "entries=" << index.num_entries() << " non_empty=" << stats.non_empty
      << " max_size=" << stats.max_size
      << " mean_non_empty_size=" << format_g(stats.mean_non_empty) << "\n";
}

void cmd_train(const TrainOptions& opts, std::ostream& out) {
  TrainConfig cfg;
  cfg.learning_rate = opts.lr;
  cfg.batch_size = opts.batch;
  cfg.epochs = opts.epochs;
  cfg.optimizer = opts.optimizer == "sgd" ? Optimizer::kSgdMomentum : Optimizer::kAdam;
  cfg.momentum = opts.momentum;
  cfg.seed = opts.seed;
  cfg.validate();
  set_threads(opts.threads);

  const auto data = load_dataset(opts.manifest);
  const InvertedIndex index = load_index(sibling(opts.manifest, opts.index, "index.hpix"));
  if (index.total() != data.reference.size()) {
    throw DimensionMismatch("index covers " + std::to_string(index.total()) +
                            " points, reference set has " +
                            std::to_string(data.reference.size()));
  }

  const auto targets = compute_targets_batch(data.train.labels, index, data.reference.labels);
  std::vector<TrainingSample> samples;
  samples.reserve(targets.size());
  std::size_t skipped = 0;
  for (std::size_t q = 0; q < targets.size(); ++q) {
    try {
      samples.push_back({data.train.features.row_as_double(q), normalize_targets(targets[q])});
    } catch (const DegenerateTarget&) {
      ++skipped;
    }
  }
  if (skipped > 0) {
    spdlog::warn("skipped {} training queries with all-zero relevance targets", skipped);
  }
  if (samples.empty()) throw InvalidArgument("no training query has a relevant reference point");

  auto model = PredictorModel::initialized(data.manifest.query_dim, index.d(), opts.seed);
  const TrainResult result = train(std::move(model), samples, cfg);
  const fs::path path = sibling(opts.manifest, opts.out, "model.hpnn");
  save_model(result.model, path);

  const fs::path trace_path = fs::path(path.string() + ".loss.csv");
  std::ofstream trace(trace_path, std::ios::binary | std::ios::trunc);
  trace << "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
    trace << (e + 1) << ',' << format_g(result.loss_trace[e], 17) << '\n';
  }
  if (!trace) throw Error("write to " + trace_path.string() + " failed");
  out << "wrote " << path.string() << " and " << trace_path.string() << "\n"
      << "samples=" << samples.size() << " skipped=" << skipped
      << " final_loss=" << format_g(result.loss_trace.back()) << "\n";
}

void print_result(std::ostream& out, std::size_t query, const SearchResult& r, std::uint64_t n) {
  out << "# query " << query << ": candidates=" << r.candidates_examined
      << " entries_probed=" << r.entries_probed << " ard_percent="
      << format_g(static_cast<double>(r.candidates_examined) / static_cast<double>(n) * 100.0)
      << "\n";
  for (std::size_t i = 0; i < r.neighbors.size(); ++i) {
    out << query << ',' << (i + 1) << ',' << r.neighbors[i].id << ','
        << r.neighbors[i].distance << '\n';
  }
}

void cmd_search(const SearchOptions& opts, std::ostream& out) {
  const Method method = parse_method(opts.method);
  if (!opts.query_features.empty() && opts.query_id) {
    throw InvalidArgument("--query-id and --query-features are mutually exclusive");
  }
  if (opts.query_features.empty() != opts.query_codes.empty()) {
    throw InvalidArgument("--query-features and --query-codes must be given together");
  }
  set_threads(opts.threads);

  const auto data = load_dataset(opts.manifest);
  std::optional<InvertedIndex> index;
  std::optional<PredictorModel> model;
  if (method != Method::kExhaustive) {
    index = load_index(sibling(opts.manifest, opts.index, "index.hpix"));
  }
  if (method == Method::kDnn) {
    model = load_model(sibling(opts.manifest, opts.model, "model.hpnn"));
    check_compatible(*model, *index);
  }
  const std::uint32_t d = index ? index->d() : 1;
  SearchPlan plan{method, opts.k, resolve_budget(opts.budget, d, data.reference.size())};
  const SearchContext ctx{&data.reference, index ? &*index : nullptr,
                          model ? &*model : nullptr};

  QuerySet queries;
  std::vector<std::size_t> ids;
  if (!opts.query_features.empty()) {
    queries.features = load_features(opts.query_features);
    queries.codes = load_codes(opts.query_codes);
    if (queries.features.rows() != queries.codes.size()) {
      throw ConsistencyError("query feature and code files differ in row count");
    }
    queries.labels.resize(queries.codes.size());
  } else {
    const std::size_t q = opts.query_id.value_or(0);
    if (q >= data.eval.size()) {
      throw InvalidArgument("--query-id " + std::to_string(q) + " outside the " +
                            std::to_string(data.eval.size()) + " evaluation queries");
    }
    queries.features = FeatureMatrix(data.eval.features.dim());
    queries.features.push_back(data.eval.features.row(q));
    queries.codes = CodeSet(data.eval.codes.length());
    queries.codes.push_back(data.eval.codes[q]);
    queries.labels.push_back(data.eval.labels[q]);
    ids.push_back(q);
  }
  const auto results = search_batch(queries, ctx, plan);
  out << "query,rank,id,distance\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    print_result(out, ids.empty() ? i : ids[i], results[i], data.reference.size());
  }
}

void cmd_eval(const EvalOptions& opts, std::ostream& out) {
  const auto grid = parse_grid(opts.map_grid);
  set_threads(opts.threads);
  const auto data = load_dataset(opts.manifest);
  const InvertedIndex index = load_index(sibling(opts.manifest, opts.index, "index.hpix"));
  const PredictorModel model = load_model(sibling(opts.manifest, opts.model, "model.hpnn"));
  check_compatible(model, index);

  ExperimentConfig cfg;
  cfg.budget = resolve_budget(opts.budget, index.d(), data.reference.size());
  cfg.map_grid = grid;
  cfg.seed = opts.seed;
  const EvalReport report = run_experiment(data.reference, data.eval, model, index, cfg);
  const fs::path path = sibling(opts.manifest, opts.out, "report.csv");
  write_report_csv(report, path);

  out << "wrote " << path.string() << " (c=" << report.code_bits << " d=" << report.index_bits
      << " N=" << report.num_reference << " queries=" << report.num_queries
      << " k=" << report.k << " budget="
      << (cfg.budget.mode == CandidateBudget::Mode::kTopEntries ? "top-entries:" : "candidates:")
      << cfg.budget.amount << " seed=" << report.seed << ")\n";
  const std::uint32_t r_max = grid.back();
  for (const auto& m : report.methods) {
    out << method_name(m.method) << ": MAP@" << r_max << "=" << format_g(m.map_at_r.at(r_max))
        << " ARD%=" << format_g(m.ard_percent) << " median_ms=" << format_g(m.median_total_ms)
        << "\n";
  }
  if (report.skipped_queries > 0) {
    out << "skipped " << report.skipped_queries << " queries with no relevant reference point\n";
  }
}

void add_budget_flags(CLI::App* cmd, BudgetOptions& opts) {
  auto* top = cmd->add_option("--top-entries", opts.top_entries,
                              "Probe this many top-ranked entries (default: about 0.3% of 2^d)")
                  ->check(CLI::PositiveNumber);
  auto* count = cmd->add_option("--candidate-count", opts.candidate_count,
                                "Probe whole entries until at least this many candidates")
                    ->check(CLI::PositiveNumber);
  top->excludes(count);
  count->excludes(top);
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned inverted-index search over binary hash codes", "hashprobe"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic cross-modal dataset");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--seed", gen.synth.seed, "Generator seed");
  gen_cmd->add_option("--n", gen.synth.num_reference, "Reference points")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--train-queries", gen.synth.num_train_queries,
                      "Training queries sampled from the reference set");
  gen_cmd->add_option("--queries", gen.synth.num_eval_queries, "Evaluation queries")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--labels", gen.synth.num_labels, "Label count L")->check(CLI::Range(2u, 1u << 20));
  gen_cmd->add_option("--labels-per-point", gen.synth.labels_per_point, "Labels drawn per point");
  gen_cmd->add_option("--code-bits", gen.synth.code_bits, "Code length c")->check(CLI::Range(1u, 512u));
  gen_cmd->add_option("--latent-dim", gen.synth.latent_dim, "Latent dimension");
  gen_cmd->add_option("--image-dim", gen.synth.image_dim, "Reference (image) feature dimension");
  gen_cmd->add_option("--text-dim", gen.synth.text_dim, "Query (text) feature dimension F");
  gen_cmd->add_option("--sigma", gen.synth.sigma, "Latent noise around label centers");
  gen_cmd->add_option("--modality-noise", gen.synth.modality_noise, "Per-modality feature noise");

  IndexOptions idx;
  auto* index_cmd = app.add_subcommand("index", "Build the inverted index over code prefixes");
  index_cmd->add_option("--manifest", idx.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  index_cmd->add_option("--d", idx.d, "Index-code width in bits")->check(CLI::Range(1u, kMaxIndexBits));
  index_cmd->add_option("--out", idx.out, "Index file (default: index.hpix next to the manifest)");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train the entry-relevance predictor");
  train_cmd->add_option("--manifest", tr.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--index", tr.index, "Index file (default: index.hpix next to the manifest)");
  train_cmd->add_option("--out", tr.out, "Model file (default: model.hpnn next to the manifest)");
  train_cmd->add_option("--epochs", tr.epochs, "Training epochs")->check(CLI::Range(1u, 1000000u));
  train_cmd->add_option("--batch", tr.batch, "Mini-batch size")->check(CLI::Range(1u, 1u << 24));
  train_cmd->add_option("--lr", tr.lr, "Learning rate")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--optimizer", tr.optimizer, "adam or sgd (momentum)")
      ->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--momentum", tr.momentum, "SGD momentum")->check(CLI::Range(0.0, 0.999999));
  train_cmd->add_option("--seed", tr.seed, "Initialization and shuffle seed");
  train_cmd->add_option("--threads", tr.threads, "OpenMP threads")->check(CLI::PositiveNumber);

  SearchOptions se;
  auto* search_cmd = app.add_subcommand("search", "Print top-k neighbors for queries");
  search_cmd->add_option("--manifest", se.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--index", se.index, "Index file (default: index.hpix next to the manifest)");
  search_cmd->add_option("--model", se.model, "Model file (default: model.hpnn next to the manifest)");
  search_cmd->add_option("--method", se.method, "dnn-index, naive-index or exhaustive")
      ->check(CLI::IsMember({"dnn-index", "dnn", "naive-index", "naive", "exhaustive"}));
  search_cmd->add_option("--k", se.k, "Neighbors to return")->check(CLI::Range(1u, 1u << 30));
  add_budget_flags(search_cmd, se.budget);
  search_cmd->add_option("--query-id", se.query_id, "Evaluation query id (default 0)");
  search_cmd->add_option("--query-features", se.query_features, "HPFV file of query features")
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--query-codes", se.query_codes, "HPBC file of query codes")
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--threads", se.threads, "OpenMP threads")->check(CLI::PositiveNumber);

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Compare exhaustive, naive-index and dnn-index");
  eval_cmd->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--index", ev.index, "Index file (default: index.hpix next to the manifest)");
  eval_cmd->add_option("--model", ev.model, "Model file (default: model.hpnn next to the manifest)");
  eval_cmd->add_option("--map-grid", ev.map_grid, "Comma-separated R values for MAP@R");
  add_budget_flags(eval_cmd, ev.budget);
  eval_cmd->add_option("--seed", ev.seed, "Seed recorded in the report");
  eval_cmd->add_option("--threads", ev.threads, "OpenMP threads")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", ev.out, "Report CSV (default: report.csv next to the manifest)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*gen_cmd) cmd_gen(gen, out);
    else if (*index_cmd) cmd_index(idx, out);
    else if (*train_cmd) cmd_train(tr, out);
    else if (*search_cmd) cmd_search(se, out);
    else if (*eval_cmd) cmd_eval(ev, out);
  } catch (const DimensionMismatch& e) {
    err << "hashprobe " << stage << ": dimension mismatch: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    err << "hashprobe " << stage << ": format error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "hashprobe " << stage << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hashprobe::cli
