#include "autoblock/experiment.hpp"

#include <chrono>

#include "autoblock/error.hpp"
#include "autoblock/model_io.hpp"

namespace autoblock {

MethodSpec parse_method(const std::string& text) {
  MethodSpec m;
  m.name = text;
  if (text == "autoblock") {
    m.kind = MethodSpec::Kind::autoblock;
    return m;
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "key") {
    if (rest.empty()) throw ConfigError("method '" + text + "': key needs attributes, e.g. key:title");
    m.kind = MethodSpec::Kind::key;
    m.key = rest;
    return m;
  }
  if (head == "minhash") {
    m.kind = MethodSpec::Kind::minhash;
    const auto second = rest.find(':');
    const std::string theta = rest.substr(0, second);
    if (!theta.empty()) {
      try {
        m.theta = std::stod(theta);
      } catch (const std::exception&) {
        throw ConfigError("method '" + text + "': bad threshold '" + theta + "'");
      }
    }
    if (second != std::string::npos) m.attribute = rest.substr(second + 1);
    return m;
  }
  throw ConfigError("unknown method '" + text + "' (expected autoblock, key:<attrs> or minhash:<theta>)");
}

CandidateSet run_baseline(const Dataset& dataset, const MethodSpec& method, const RunConfig& config) {
  switch (method.kind) {
    case MethodSpec::Kind::key:
      return key_block(dataset, KeySpec::parse(method.key, dataset.schema()));
    case MethodSpec::Kind::minhash: {
      std::vector<std::size_t> attributes;
      if (method.attribute.empty() || method.attribute == "all") {
        for (std::size_t j = 0; j < dataset.attribute_count(); ++j) attributes.push_back(j);
      } else {
        auto j = dataset.attribute_index(method.attribute);
        if (!j) throw ConfigError("method '" + method.name + "': attribute not in schema");
        attributes.push_back(*j);
      }
      return minhash_block(dataset, attributes, method.theta, config.baseline.minhash);
    }
    case MethodSpec::Kind::autoblock:
      break;
  }
  throw Error("run_baseline: '" + method.name + "' is not a baseline");
}

std::vector<RunResult> run_experiment(const Dataset& dataset, const LabelSet& labels, const RunConfig& config,
                                      const std::vector<MethodSpec>& methods, const std::string& dataset_name,
                                      const std::string& regime, bool record_time, const TrainingLog& log) {
  using Clock = std::chrono::steady_clock;
  const auto splits = split(labels, dataset, config.eval);
  std::vector<RunResult> rows;
  for (std::size_t r = 0; r < splits.size(); ++r) {
    const Split& s = splits[r];
    if (s.test_labels.empty()) throw Error("split " + std::to_string(r) + " has no test labels");
    const Dataset train_set = dataset.subset(s.train_tuples);
    const Dataset test_set = dataset.subset(s.test_tuples);
    for (const MethodSpec& method : methods) {
      const auto start = Clock::now();
      CandidateSet candidates;
      if (method.kind == MethodSpec::Kind::autoblock) {
        TrainingConfig train_config = config.train;
        train_config.seed = config.train.seed + r;
        if (log) log("repeat " + std::to_string(r) + ": training on " + std::to_string(train_set.size()) +
                     " tuples, " + std::to_string(s.train_labels.size()) + " labels");
        // Block with the model as it would be reloaded from disk.
        const SignatureModel model = round_trip(train(train_set, s.train_labels, config.model, train_config, log));
        candidates = block(test_set, model, config.block);
      } else {
        candidates = run_baseline(test_set, method, config);
      }
      const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
      RunResult row{method.name, dataset_name, regime, r, recall(candidates, s.test_labels),
                    pe_ratio(candidates, test_set.size()), {}};
      if (record_time) row.wall_time_s = seconds;
      if (log) {
        log("repeat " + std::to_string(r) + " " + method.name + ": recall=" + std::to_string(row.recall) +
            " pe_ratio=" + std::to_string(row.pe_ratio) + " time=" + std::to_string(seconds) + "s");
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace autoblock
