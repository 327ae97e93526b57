//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pepview/container.h"
#include "pepview/core.h"
#include "pepview/downstream.h"
#include "pepview/gradcheck.h"
#include "pepview/graphs.h"
#include "pepview/ingest.h"
#include "pepview/synthetic.h"
#include "pepview/train.h"

namespace pepview {
namespace {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

void write_text(const fs::path &path, const std::string &text) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw DataError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os)
    throw DataError("failed writing " + path.string());
}

std::string error_line(std::string_view kind, std::string_view message) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::vector<double> parse_thresholds(const std::string &text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw ConfigError("invalid threshold \"" + item + "\"");
    out.push_back(v);
  }
  if (out.empty())
    throw ConfigError("no thresholds given");
  return out;
}

struct IngestArgs {
  std::string in, out, source = "experimental";
  std::size_t max_len = 50;
};

struct BucketArgs {
  std::string manifest, thresholds = "90,80", out_dir;
  std::optional<std::size_t> sample;
  std::uint64_t seed = 0;
};

struct GraphArgs {
  std::string manifest, out;
  GraphConfig config;
};

struct PretrainArgs {
  std::string manifest, out, log, loss = "infonce";
  TrainConfig train;
  GraphConfig graph;
  bool sort_batches = false;
};

struct EmbedArgs {
  std::string ckpt, manifest, out;
};

struct EvalArgs {
  std::string task, ckpt, manifest, out;
  HeadConfig head;
};

struct SynthArgs {
  SyntheticConfig config;
  std::string out;
};

struct AblateArgs {
  std::string manifest, eval_strategy = "length_sorted", out;
  TrainConfig train;
  GraphConfig graph;
};

int run_ingest(const IngestArgs &a, std::ostream &out) {
  const Source source = parse_source(a.source);
  if (!fs::is_directory(a.in))
    throw DataError("input directory not found: " + a.in);

  std::vector<fs::path> files;
  for (const auto &entry: fs::directory_iterator(a.in))
    if (entry.is_regular_file())
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<PeptideRecord> records;
  int empty = 0, invalid = 0;
  for (const auto &file: files) {
    ParseResult parsed;
    try {
      parsed = parse_structure_file(read_file(file), source,
                                    file.stem().string());
    } catch (const DataError &e) {
      throw DataError(file.string() + ": " + e.what());
    }
    empty += parsed.skipped_empty_chains;
    invalid += parsed.skipped_invalid_chains;
    for (auto &r: parsed.records)
      records.push_back(std::move(r));
  }
  const std::size_t parsed_count = records.size();
  records = filter_peptides(std::move(records), a.max_len);
  write_manifest(records, a.out);

  ordered_json summary;
  summary["files"] = files.size();
  summary["chains"] = parsed_count;
  summary["peptides"] = records.size();
  summary["skipped_empty_chains"] = empty;
  summary["skipped_invalid_chains"] = invalid;
  summary["max_len"] = a.max_len;
  summary["source"] = to_string(source);
  out << summary.dump() << '\n';
  return kExitOk;
}

int run_bucket(const BucketArgs &a, std::ostream &out) {
  const auto records = read_manifest(a.manifest);
  const auto buckets = bucket_by_confidence(
      records, parse_thresholds(a.thresholds), a.sample, a.seed);

  ordered_json summary;
  summary["thresholds"] = buckets.thresholds;
  if (a.sample)
    summary["sample"] = *a.sample;
  summary["seed"] = a.seed;
  ordered_json counts = ordered_json::object();
  fs::create_directories(a.out_dir);
  for (const auto &[name, ids]: buckets.buckets) {
    std::vector<PeptideRecord> members;
    std::unordered_map<std::string_view, const PeptideRecord *> by_id;
    for (const auto &r: records)
      by_id.emplace(r.id, &r);
    for (const auto &id: ids)
      members.push_back(*by_id.at(id));
    write_manifest(members, fs::path(a.out_dir) / (name + ".jsonl"));
    counts[name] = members.size();
  }
  summary["buckets"] = counts;
  out << summary.dump() << '\n';
  return kExitOk;
}

int run_graphs(const GraphArgs &a, std::ostream &out) {
  a.config.validate();
  const auto records = read_manifest(a.manifest);
  const auto graphs = build_graphs(records, a.config);

  TensorContainer container;
  container.meta["kind"] = "graphs";
  container.meta["version"] = kVersion;
  container.meta["config"] = to_json(a.config);
  ordered_json topology = ordered_json::array();
  std::size_t total_edges = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto &g = graphs[i];
    ordered_json edges = ordered_json::array();
    for (const auto &e: g.edges)
      edges.push_back({ e.src, e.dst, static_cast<int>(e.type) });
    topology.push_back({ { "id", records[i].id },
                         { "num_nodes", g.num_nodes },
                         { "edges", std::move(edges) } });
    container.tensors.emplace_back(records[i].id + "/node_features",
                                   g.node_features);
    container.tensors.emplace_back(records[i].id + "/edge_features",
                                   g.edge_features);
    total_edges += g.edges.size();
  }
  container.meta["topology"] = std::move(topology);
  write_container(container, a.out);

  out << ordered_json { { "graphs", graphs.size() },
                        { "edges", total_edges },
                        { "config", to_json(a.config) } }
             .dump()
      << '\n';
  return kExitOk;
}

int run_pretrain(PretrainArgs a, bool verbose, std::ostream &out) {
  a.train.ssl.loss = parse_loss_kind(a.loss);
  a.train.strategy =
      a.sort_batches ? BatchStrategy::kLengthSorted : BatchStrategy::kRandom;
  a.train.validate();
  a.graph.validate();
  const auto records = read_manifest(a.manifest);

  std::ostringstream log;
  auto on_step = [&](const StepLog &s) {
    log << s.to_json_line() << '\n';
    if (verbose)
      out << s.to_json_line() << '\n';
  };
  PretrainResult result = pretrain(records, a.train, a.graph, on_step);
  save_checkpoint(result.checkpoint, a.out);
  if (!a.log.empty())
    write_text(a.log, log.str());

  ordered_json summary;
  summary["steps"] = result.checkpoint.step;
  summary["final_loss"] =
      result.log.empty() ? 0.0 : result.log.back().loss;
  summary["train"] = to_json(a.train);
  summary["graph"] = to_json(a.graph);
  out << summary.dump() << '\n';
  return kExitOk;
}

int run_embed(const EmbedArgs &a, std::ostream &out) {
  Checkpoint ckpt = load_checkpoint(a.ckpt);
  const auto records = read_manifest(a.manifest);
  write_embeddings(ckpt.model, records, a.out);
  out << ordered_json { { "embedded", records.size() },
                        { "dim", ckpt.model.config().hidden } }
             .dump()
      << '\n';
  return kExitOk;
}

int run_eval(const EvalArgs &a, std::ostream &out) {
  const TaskSpec task = task_spec(a.task);
  Checkpoint ckpt = load_checkpoint(a.ckpt);
  const auto records = read_manifest(a.manifest);
  MetricsReport report = run_task(task, ckpt.model, records, a.head);
  report.config["checkpoint"] = a.ckpt;
  report.config["manifest"] = a.manifest;
  const std::string text = report.to_json().dump(2) + "\n";
  if (!a.out.empty())
    write_text(a.out, text);
  out << text;
  return kExitOk;
}

int run_gradcheck(std::uint64_t seed, int configurations, std::ostream &out) {
  const auto rows = run_gradcheck_suite(seed, configurations);
  out << format_gradcheck_table(rows);
  const bool ok = std::all_of(rows.begin(), rows.end(),
                              [](const GradCheckRow &r) { return r.passed(); });
  if (!ok)
    throw NumericError("gradient check failed");
  return kExitOk;
}

int run_synth(const SynthArgs &a, std::ostream &out) {
  const auto records = generate_synthetic(a.config);
  write_manifest(records, a.out);
  out << ordered_json { { "records", records.size() },
                        { "seed", a.config.seed },
                        { "geometry_seed", a.config.geometry_seed } }
             .dump()
      << '\n';
  return kExitOk;
}

int run_ablate(const AblateArgs &a, std::ostream &out) {
  a.train.validate();
  a.graph.validate();
  const auto records = read_manifest(a.manifest);
  std::vector<PeptideRecord> train, test;
  for (const auto &r: records)
    (r.split == Split::kTrain ? train : test).push_back(r);
  if (train.empty() || test.empty())
    throw DataError("ablation needs both train and held-out records");

  const auto rows = run_ablation(train, test, a.train, a.graph,
                                 parse_batch_strategy(a.eval_strategy));
  const std::string table = format_ablation_table(rows);
  if (!a.out.empty())
    write_text(a.out, table);
  out << table;
  return kExitOk;
}

void add_graph_flags(CLI::App *cmd, GraphConfig &g) {
  cmd->add_option("--radius", g.radius_cutoff, "Radius edge cutoff in angstroms")
      ->capture_default_str();
  cmd->add_option("--knn", g.knn_k, "Neighbours per residue")
      ->capture_default_str();
  cmd->add_flag("--mask-residues", g.mask_residue_identity,
                "Zero residue identity in node and edge features");
}

void add_train_flags(CLI::App *cmd, TrainConfig &t) {
  cmd->add_option("--batch", t.batch_size, "Batch size")->capture_default_str();
  cmd->add_option("--epochs", t.epochs, "Epochs")->capture_default_str();
  cmd->add_option("--lr", t.adam.lr, "Adam learning rate")
      ->capture_default_str();
  cmd->add_option("--temperature", t.ssl.temperature, "InfoNCE temperature")
      ->capture_default_str();
  cmd->add_option("--gen-weight", t.ssl.generative_weight,
                  "Weight of the generative term when both losses are used")
      ->capture_default_str();
  cmd->add_option("--hidden", t.model.hidden, "Embedding width")
      ->capture_default_str();
  cmd->add_option("--layers", t.model.structure_layers,
                  "Relational convolution layers")
      ->capture_default_str();
  cmd->add_option("--blocks", t.model.sequence_blocks, "Transformer blocks")
      ->capture_default_str();
  cmd->add_option("--heads", t.model.heads, "Attention heads")
      ->capture_default_str();
  cmd->add_option("--latent", t.model.vrr.latent, "Variational latent width")
      ->capture_default_str();
  cmd->add_option("--beta", t.model.vrr.beta, "KL weight")
      ->capture_default_str();
  cmd->add_option("--seed", t.seed, "Random seed")->required();
}
}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  CLI::App app { "Two-view self-supervised peptide representation learning",
                 "pepview" };
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Stream per-step logs to stdout");

  IngestArgs ingest;
  auto *c_ingest =
      app.add_subcommand("ingest", "Parse PDB files into a peptide manifest");
  c_ingest->add_option("--in", ingest.in, "Directory of PDB files")
      ->required();
  c_ingest->add_option("--out", ingest.out, "Output manifest")->required();
  c_ingest->add_option("--max-len", ingest.max_len,
                       "Keep chains strictly shorter than this")
      ->capture_default_str();
  c_ingest->add_option("--source", ingest.source,
                       "experimental or predicted")
      ->capture_default_str();

  BucketArgs bucket;
  auto *c_bucket =
      app.add_subcommand("bucket", "Split a manifest by mean pLDDT");
  c_bucket->add_option("--manifest", bucket.manifest)->required();
  c_bucket->add_option("--thresholds", bucket.thresholds,
                       "Comma-separated thresholds")
      ->capture_default_str();
  c_bucket->add_option("--sample", bucket.sample,
                       "Size of the unconditioned af50w sample");
  c_bucket->add_option("--seed", bucket.seed)->required();
  c_bucket->add_option("--out-dir", bucket.out_dir)->required();

  GraphArgs graphs;
  auto *c_graphs =
      app.add_subcommand("graphs", "Build residue graphs for a manifest");
  c_graphs->add_option("--manifest", graphs.manifest)->required();
  c_graphs->add_option("--out", graphs.out)->required();
  add_graph_flags(c_graphs, graphs.config);

  PretrainArgs pre;
  auto *c_pre = app.add_subcommand("pretrain", "Two-view pretraining");
  c_pre->add_option("--manifest", pre.manifest)->required();
  c_pre->add_option("--loss", pre.loss, "infonce, vae or both")
      ->capture_default_str();
  c_pre->add_flag("--sort-batches", pre.sort_batches,
                  "Length-sorted instead of random batches");
  c_pre->add_option("--out", pre.out, "Checkpoint path")->required();
  c_pre->add_option("--log", pre.log, "Per-step JSONL log");
  add_train_flags(c_pre, pre.train);
  add_graph_flags(c_pre, pre.graph);

  EmbedArgs embed;
  auto *c_embed =
      app.add_subcommand("embed", "Write sequence embeddings as JSONL");
  c_embed->add_option("--ckpt", embed.ckpt)->required();
  c_embed->add_option("--manifest", embed.manifest)->required();
  c_embed->add_option("--out", embed.out)->required();

  EvalArgs eval;
  auto *c_eval =
      app.add_subcommand("eval", "Train and score a head on frozen embeddings");
  c_eval->add_option("--task", eval.task, "cpp, solubility, affinity, contact")
      ->required();
  c_eval->add_option("--ckpt", eval.ckpt)->required();
  c_eval->add_option("--manifest", eval.manifest)->required();
  c_eval->add_option("--seed", eval.head.seed)->required();
  c_eval->add_option("--out", eval.out, "metrics.json path");
  c_eval->add_option("--steps", eval.head.steps)->capture_default_str();
  c_eval->add_option("--lr", eval.head.lr)->capture_default_str();

  std::uint64_t gc_seed = 0;
  int gc_configs = 50;
  auto *c_gc =
      app.add_subcommand("gradcheck", "Finite-difference gradient oracle");
  c_gc->add_option("--seed", gc_seed)->required();
  c_gc->add_option("--configs", gc_configs,
                   "Random configurations per check")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto *c_synth =
      app.add_subcommand("synth", "Generate a synthetic paired benchmark");
  c_synth->add_option("--train", synth.config.num_train)
      ->capture_default_str();
  c_synth->add_option("--test", synth.config.num_test)->capture_default_str();
  c_synth->add_option("--min-len", synth.config.min_length)
      ->capture_default_str();
  c_synth->add_option("--max-len", synth.config.max_length)
      ->capture_default_str();
  c_synth->add_option("--geometry-seed", synth.config.geometry_seed)
      ->capture_default_str();
  c_synth->add_option("--seed", synth.config.seed)->required();
  c_synth->add_option("--out", synth.out)->required();

  AblateArgs ablate;
  auto *c_ablate = app.add_subcommand(
      "ablate", "Loss x batching ablation on a train/test manifest");
  c_ablate->add_option("--manifest", ablate.manifest)->required();
  c_ablate->add_option("--eval-batching", ablate.eval_strategy,
                       "random or length_sorted")
      ->capture_default_str();
  c_ablate->add_option("--out", ablate.out, "Table output path");
  add_train_flags(c_ablate, ablate.train);
  add_graph_flags(c_ablate, ablate.graph);

  out << "pepview " << kVersion << '\n';

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion &) {
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << error_line("usage", e.what()) << '\n';
    const CLI::App *sub = nullptr;
    for (const auto *s: app.get_subcommands())
      sub = s;
    err << (sub ? sub->help() : app.help());
    return kExitUsage;
  }

  try {
    if (c_ingest->parsed())
      return run_ingest(ingest, out);
    if (c_bucket->parsed())
      return run_bucket(bucket, out);
    if (c_graphs->parsed())
      return run_graphs(graphs, out);
    if (c_pre->parsed())
      return run_pretrain(pre, verbosity > 0, out);
    if (c_embed->parsed())
      return run_embed(embed, out);
    if (c_eval->parsed())
      return run_eval(eval, out);
    if (c_gc->parsed())
      return run_gradcheck(gc_seed, gc_configs, out);
    if (c_synth->parsed())
      return run_synth(synth, out);
    if (c_ablate->parsed())
      return run_ablate(ablate, out);
  } catch (const ConfigError &e) {
    err << error_line("config", e.what()) << '\n';
    return kExitUsage;
  } catch (const DataError &e) {
    err << error_line("data", e.what()) << '\n';
    return kExitData;
  } catch (const NumericError &e) {
    err << error_line("numeric", e.what()) << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error &e) {
    err << error_line("data", e.what()) << '\n';
    return kExitData;
  }
  err << error_line("usage", "no subcommand") << '\n';
  return kExitUsage;
}

}  // namespace pepview
