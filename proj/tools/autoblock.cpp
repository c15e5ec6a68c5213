// autoblock: train signature models, block, score, and run baselines.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "autoblock/baselines.hpp"
#include "autoblock/blocking.hpp"
#include "autoblock/config.hpp"
#include "autoblock/csv.hpp"
#include "autoblock/hashing.hpp"
#include "autoblock/error.hpp"
#include "autoblock/evaluation.hpp"
#include "autoblock/experiment.hpp"
#include "autoblock/lsh.hpp"
#include "autoblock/model_io.hpp"
#include "autoblock/synth.hpp"
#include "autoblock/training.hpp"

namespace fs = std::filesystem;
using namespace autoblock;

namespace {

// Options every subcommand accepts, plus named shortcuts for common keys.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string*>> shortcuts;
  std::deque<std::string> storage;  // stable addresses for CLI11 bindings

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "INI configuration file");
    app->add_option("--set", sets, "Override, section.key=value (repeatable)");
  }
  void shortcut(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    std::string* slot = &storage.emplace_back();
    app->add_option(flag, *slot, help + " (" + key + ")");
    shortcuts.emplace_back(key, slot);
  }
  RunConfig load(RunConfig base = {}) const {
    std::vector<std::string> overrides = sets;
    for (const auto& [key, slot] : shortcuts)
      if (!slot->empty()) overrides.push_back(key + "=" + *slot);
    RunConfig config = load_config(config_path, overrides, std::move(base));
#ifdef _OPENMP
    if (config.workers > 0) omp_set_num_threads(static_cast<int>(config.workers));
#endif
    return config;
  }
};

void require_file(const std::string& field, const std::string& path) {
  if (path.empty()) throw ConfigError(field + ": no path given");
  if (!fs::exists(path)) throw ConfigError(field + ": file '" + path + "' not found");
}

void require_inputs(const RunConfig& config) {
  require_file("data.input", config.data.input);
  if (config.data.mode == "bipartite") require_file("data.input_b", config.data.input_b);
}

std::ofstream open_out(const std::string& path) {
  if (path.empty()) throw ConfigError("no output path given");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

void log_line(const std::string& line) { std::cerr << line << '\n'; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void print_summary(const CandidateSet& candidates, std::size_t n, double seconds) {
  std::printf("candidates=%zu pe_ratio=%.6f wall_time_s=%.3f\n", candidates.size(),
              n ? pe_ratio(candidates, n) : 0.0, seconds);
}

Dataset load_input(const RunConfig& config, const std::vector<std::string>& fallback_schema = {}) {
  DataConfig data = config.data;
  if (data.schema.empty()) data.schema = fallback_schema;
  return load_dataset(data);
}

int cmd_train(const Common& common, const std::string& model_path) {
  RunConfig config = common.load();
  require_inputs(config);
  require_file("data.labels", config.data.labels);
  const Dataset dataset = load_input(config);
  const LabelSet labels = load_labels(config.data.labels, dataset);
  const auto start = std::chrono::steady_clock::now();
  SignatureModel model = train(dataset, labels, config.model, config.train, log_line);
  model.metadata = config.snapshot();
  model.metadata.emplace_back("realized_signatures", std::to_string(model.signature_count()));
  if (model_path.empty()) throw ConfigError("--model: output path required");
  std::ofstream out = open_out(model_path);
  save_model(model, out);
  std::printf("signatures=%zu tuples=%zu labels=%zu wall_time_s=%.3f\n", model.signature_count(), dataset.size(),
              labels.size(), seconds_since(start));
  return 0;
}

int cmd_block(const Common& common, const std::string& model_path, const std::string& out_path) {
  RunConfig config = common.load();
  require_inputs(config);
  require_file("model", model_path);
  const SignatureModel model = load_model(model_path);
  const Dataset dataset = load_input(config, model.schema);
  const std::string diff = schema_difference(model.schema, dataset.schema());
  if (!diff.empty()) throw Error(diff);
  const auto start = std::chrono::steady_clock::now();
  const CandidateSet candidates = block(dataset, model, config.block);
  const double seconds = seconds_since(start);
  std::ofstream out = open_out(out_path);
  write_candidates(candidates, out);
  print_summary(candidates, dataset.size(), seconds);
  return 0;
}

int cmd_baseline(const Common& common, const std::string& out_path) {
  RunConfig config = common.load();
  require_inputs(config);
  const Dataset dataset = load_input(config);
  MethodSpec method;
  if (config.baseline.method == "key") {
    method = parse_method("key:" + config.baseline.key);
  } else {
    method.kind = MethodSpec::Kind::minhash;
    method.name = "minhash";
    method.theta = config.baseline.minhash_theta;
    method.attribute = config.baseline.attributes;
  }
  const auto start = std::chrono::steady_clock::now();
  const CandidateSet candidates = run_baseline(dataset, method, config);
  const double seconds = seconds_since(start);
  std::ofstream out = open_out(out_path);
  write_candidates(candidates, out);
  print_summary(candidates, dataset.size(), seconds);
  return 0;
}

int cmd_eval(const Common& common, const std::vector<std::string>& candidate_paths,
             const std::vector<std::string>& method_names, const std::string& out_path,
             const std::string& report_path, bool timing, const std::string& regime) {
  RunConfig config = common.load();
  require_inputs(config);
  require_file("data.labels", config.data.labels);
  const Dataset dataset = load_input(config);
  const LabelSet labels = load_labels(config.data.labels, dataset);
  if (labels.empty()) throw Error("label file '" + config.data.labels + "' has no pairs");

  std::vector<RunResult> rows;
  if (!candidate_paths.empty()) {
    if (!method_names.empty() && method_names.size() != candidate_paths.size()) {
      throw ConfigError("--method: give one name per candidates file");
    }
    for (std::size_t k = 0; k < candidate_paths.size(); ++k) {
      require_file("candidates", candidate_paths[k]);
      const CandidateSet candidates = read_candidates(candidate_paths[k]);
      const std::string name = method_names.empty() ? fs::path(candidate_paths[k]).stem().string() : method_names[k];
      rows.push_back({name, config.data.name, regime, 0, recall(candidates, labels),
                      pe_ratio(candidates, dataset.size()), {}});
    }
  } else {
    if (method_names.empty()) throw ConfigError("eval: give --candidates files or --method names to run");
    std::vector<MethodSpec> methods;
    for (const auto& name : method_names) methods.push_back(parse_method(name));
    rows = run_experiment(dataset, labels, config, methods, config.data.name, regime, timing, log_line);
  }
  std::ofstream out = open_out(out_path);
  write_metrics(rows, out);
  const auto summary = report(rows);
  write_report_text(summary, std::cout);
  if (!report_path.empty()) {
    std::ofstream rep = open_out(report_path);
    write_report_csv(summary, rep);
  }
  return 0;
}

int cmd_synth(const Common& common, const std::string& out_dir, const std::string& regime_flag) {
  // A regime's noise rates sit beneath the file and flag settings.
  RunConfig base;
  if (!regime_flag.empty()) base.synth = SynthSpec::defaults(parse_regime(regime_flag));
  const RunConfig config = common.load(base);
  const SynthCorpus corpus = synthesize(config.synth, config.synth_seed);
  fs::create_directories(out_dir);
  const std::string records = (fs::path(out_dir) / "records.csv").string();
  const std::string labels = (fs::path(out_dir) / "labels.csv").string();
  export_table(corpus.dataset, 0, records, DataFormat::csv, "id");
  save_labels(corpus.labels, labels);
  std::printf("records=%zu labels=%zu regime=%s\n", corpus.dataset.size(), corpus.labels.size(),
              regime_name(config.synth.regime).c_str());
  return 0;
}

int cmd_index(const Common& common, const std::string& model_path, std::size_t signature, const std::string& out_path) {
  RunConfig config = common.load();
  require_inputs(config);
  require_file("model", model_path);
  const SignatureModel model = load_model(model_path);
  const Dataset dataset = load_input(config, model.schema);
  const std::string diff = schema_difference(model.schema, dataset.schema());
  if (!diff.empty()) throw Error(diff);
  if (signature == 0 || signature > model.signature_count()) {
    throw ConfigError("--signature: must lie in [1, " + std::to_string(model.signature_count()) + "]");
  }
  std::size_t begin = 0, end = dataset.size();
  if (dataset.bipartite()) {
    const std::size_t big = dataset.table_size(1) > dataset.table_size(0) ? 1 : 0;
    begin = dataset.table_offset(big);
    end = begin + dataset.table_size(big);
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<LshItem> items;
  for (std::size_t t = begin; t < end; ++t) {
    const auto sigs = model.signatures(dataset.tuple(t));
    const auto& sig = sigs[signature - 1];
    if (!sig) continue;
    double norm = 0.0;
    for (double x : *sig) norm += x * x;
    if (norm == 0.0) continue;
    std::vector<double> v(*sig);
    for (double& x : v) x /= std::sqrt(norm);
    items.push_back({dataset.tuple(t).record_id, static_cast<std::uint32_t>(signature), std::move(v)});
  }
  LshParams params = config.block.lsh;
  params.seed = mix64(config.block.lsh.seed + (signature - 1));
  const LshIndex index = LshIndex::build(std::move(items), model.embeddings.dim(), params);
  std::ofstream out = open_out(out_path);
  index.save(out);
  std::printf("indexed=%zu tables=%zu entries=%zu wall_time_s=%.3f\n", index.size(), params.tables,
              index.stored_entries(), seconds_since(start));
  return 0;
}

int cmd_inspect(const Common& common, const std::string& model_path, const std::string& attribute,
                std::size_t limit, const std::string& out_path) {
  RunConfig config = common.load();
  require_inputs(config);
  require_file("model", model_path);
  const SignatureModel model = load_model(model_path);
  const Dataset dataset = load_input(config, model.schema);
  const std::string diff = schema_difference(model.schema, dataset.schema());
  if (!diff.empty()) throw Error(diff);
  std::vector<std::size_t> columns;
  if (attribute.empty()) {
    for (std::size_t j = 0; j < model.schema.size(); ++j) columns.push_back(j);
  } else {
    auto j = dataset.attribute_index(attribute);
    if (!j) throw ConfigError("--attribute: '" + attribute + "' not in schema");
    columns.push_back(*j);
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file = open_out(out_path);
    out = &file;
  }
  csv::write_row(*out, {"record_id", "attribute", "weights"});
  const std::size_t n = limit ? std::min(limit, dataset.size()) : dataset.size();
  for (std::size_t t = 0; t < n; ++t) {
    const Tuple& tuple = dataset.tuple(t);
    for (std::size_t j : columns) {
      const AttributeValue& value = tuple.attributes[j];
      if (value.missing()) continue;
      std::vector<double> beta;
      encode_attribute(model.encoders[j], model.embeddings, value, &beta);
      std::string cell;
      for (std::size_t k = 0; k < beta.size(); ++k) {
        if (k) cell += ' ';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", beta[k]);
        cell += value.tokens[k] + ":" + buf;
      }
      csv::write_row(*out, {tuple.record_id, model.schema[j], cell});
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned-signature blocking for entity resolution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "autoblock 1.0");

  Common train_opts, block_opts, eval_opts, baseline_opts, synth_opts, index_opts, inspect_opts;
  std::string model_path, out_path, report_path, attribute, regime = "";
  std::vector<std::string> candidate_paths, method_names;
  std::size_t signature = 1, limit = 0;
  bool timing = false;

  auto data_shortcuts = [](Common& c, CLI::App* sub) {
    c.shortcut(sub, "-i,--input", "data.input", "Input table");
    c.shortcut(sub, "--input-b", "data.input_b", "Second table (bipartite mode)");
    c.shortcut(sub, "--format", "data.format", "csv, tsv or jsonl");
    c.shortcut(sub, "--id-column", "data.id_column", "Record id column");
    c.shortcut(sub, "--schema", "data.schema", "Comma-separated attributes");
    c.shortcut(sub, "--mode", "data.mode", "self or bipartite");
    c.shortcut(sub, "--workers", "run.workers", "Parallel workers, 0 = all cores");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a signature model");
  train_opts.attach(train_cmd);
  data_shortcuts(train_opts, train_cmd);
  train_opts.shortcut(train_cmd, "-l,--labels", "data.labels", "Positive label pairs");
  train_opts.shortcut(train_cmd, "--seed", "train.seed", "Training seed");
  train_opts.shortcut(train_cmd, "--iterations", "train.iterations", "Steps per signature");
  train_cmd->add_option("-m,--model", model_path, "Output model file")->required();

  auto* block_cmd = app.add_subcommand("block", "Generate candidate pairs with a trained model");
  block_opts.attach(block_cmd);
  data_shortcuts(block_opts, block_cmd);
  block_opts.shortcut(block_cmd, "--theta", "block.theta", "Cosine threshold");
  block_opts.shortcut(block_cmd, "--seed", "block.seed", "LSH seed");
  block_cmd->add_option("-m,--model", model_path, "Model file")->required();
  block_cmd->add_option("-o,--out", out_path, "Candidate CSV")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score candidate files, or run split experiments");
  eval_opts.attach(eval_cmd);
  data_shortcuts(eval_opts, eval_cmd);
  eval_opts.shortcut(eval_cmd, "-l,--labels", "data.labels", "Ground-truth label pairs");
  eval_opts.shortcut(eval_cmd, "--repeats", "eval.repeats", "Number of splits");
  eval_opts.shortcut(eval_cmd, "--name", "data.name", "Dataset name in the metrics");
  eval_cmd->add_option("--candidates", candidate_paths, "Candidate CSV files to score");
  eval_cmd->add_option("--method", method_names,
                       "Method names (with --candidates) or methods to run: autoblock, key:<attrs>, minhash:<theta>");
  eval_cmd->add_option("--regime", regime, "Regime label in the metrics");
  eval_cmd->add_flag("--timing", timing, "Record wall time per run (makes output nondeterministic)");
  eval_cmd->add_option("-o,--out", out_path, "Metrics CSV")->required();
  eval_cmd->add_option("--report", report_path, "Aggregated report CSV");

  auto* baseline_cmd = app.add_subcommand("baseline", "Key or MinHash blocking");
  baseline_opts.attach(baseline_cmd);
  data_shortcuts(baseline_opts, baseline_cmd);
  baseline_opts.shortcut(baseline_cmd, "--method", "baseline.method", "key or minhash");
  baseline_opts.shortcut(baseline_cmd, "--key", "baseline.key", "Key: attr, a+b (conjunction), a|b or all (disjunction)");
  baseline_opts.shortcut(baseline_cmd, "--theta", "baseline.minhash_theta", "Jaccard threshold");
  baseline_opts.shortcut(baseline_cmd, "--attributes", "baseline.attributes", "MinHash attribute or all");
  baseline_opts.shortcut(baseline_cmd, "--seed", "baseline.seed", "MinHash seed");
  baseline_cmd->add_option("-o,--out", out_path, "Candidate CSV")->required();

  std::string out_dir;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus (records.csv, labels.csv)");
  synth_opts.attach(synth_cmd);
  synth_opts.shortcut(synth_cmd, "--entities", "synth.entities", "Entity count");
  synth_opts.shortcut(synth_cmd, "--duplicates", "synth.duplicates", "Duplicates per entity");
  synth_opts.shortcut(synth_cmd, "--seed", "synth.seed", "Generator seed");
  synth_cmd->add_option("--regime", regime, "clean, dirty or unstructured (sets default noise rates)");
  synth_cmd->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  auto* index_cmd = app.add_subcommand("index", "Build and save the LSH index of one signature");
  index_opts.attach(index_cmd);
  data_shortcuts(index_opts, index_cmd);
  index_cmd->add_option("-m,--model", model_path, "Model file")->required();
  index_cmd->add_option("-s,--signature", signature, "Signature number (1-based)");
  index_cmd->add_option("-o,--out", out_path, "Index file")->required();

  auto* inspect_cmd = app.add_subcommand("inspect", "Dump attention weights as token:weight CSV");
  inspect_opts.attach(inspect_cmd);
  data_shortcuts(inspect_opts, inspect_cmd);
  inspect_cmd->add_option("-m,--model", model_path, "Model file")->required();
  inspect_cmd->add_option("-a,--attribute", attribute, "Only this attribute");
  inspect_cmd->add_option("-n,--limit", limit, "First n tuples only");
  inspect_cmd->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) return cmd_train(train_opts, model_path);
    if (*block_cmd) return cmd_block(block_opts, model_path, out_path);
    if (*eval_cmd) return cmd_eval(eval_opts, candidate_paths, method_names, out_path, report_path, timing, regime);
    if (*baseline_cmd) return cmd_baseline(baseline_opts, out_path);
    if (*synth_cmd) return cmd_synth(synth_opts, out_dir, regime);
    if (*index_cmd) return cmd_index(index_opts, model_path, signature, out_path);
    if (*inspect_cmd) return cmd_inspect(inspect_opts, model_path, attribute, limit, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
