#pragma once

#include <string>
#include <utility>
#include <vector>

#include "autoblock/baselines.hpp"
#include "autoblock/blocking.hpp"
#include "autoblock/data_model.hpp"
#include "autoblock/evaluation.hpp"
#include "autoblock/synth.hpp"
#include "autoblock/training.hpp"

namespace autoblock {

struct DataConfig {
  std::string input;    // first (or only) table
  std::string input_b;  // second table in bipartite mode
  std::string labels;
  std::string format;  // csv, tsv, jsonl; empty = from extension
  std::string id_column = "id";
  std::vector<std::string> schema;  // empty = every non-id column
  std::string mode = "self";        // self | bipartite
  std::string name = "dataset";     // label used in metrics output
};

struct BaselineConfig {
  std::string method = "key";  // key | minhash
  std::string key = "title";   // see KeySpec::parse
  std::string attributes = "all";
  double minhash_theta = 0.4;
  MinHashParams minhash;
};

/// Every tunable, loaded from an INI file (sections data, model, train,
/// block, baseline, eval, synth, run) with flag overrides applied on top.
struct RunConfig {
  DataConfig data;
  ModelConfig model;
  TrainingConfig train;
  BlockingParams block;
  double theta_prime = 0.4;
  BaselineConfig baseline;
  SplitSpec eval;
  SynthSpec synth = SynthSpec::defaults(Regime::dirty);
  std::uint64_t synth_seed = 1;
  std::size_t workers = 0;  // 0 = all cores

  /// Cross-field checks; throws ConfigError naming the field.
  void validate() const;

  /// Key/value snapshot of the model and training sections, stored in the
  /// model file.
  std::vector<std::pair<std::string, std::string>> snapshot() const;
};

/// Starts from `base`, applies the file, then `overrides` ("section.key=value"
/// strings). An empty path skips the file. Unknown keys are errors.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides, RunConfig base = {});

/// Loads the dataset named by the data section.
Dataset load_dataset(const DataConfig& data);

std::vector<std::string> split_list(const std::string& text);

}  // namespace autoblock
