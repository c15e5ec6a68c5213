#pragma once

#include <string>
#include <vector>

#include "autoblock/config.hpp"

namespace autoblock {

/// A blocking method by name: "autoblock", "key:<KeySpec>" (e.g.
/// "key:title", "key:all") or "minhash:<theta>[:<attribute>]" (all
/// attributes, unioned, when none is named).
struct MethodSpec {
  enum class Kind { autoblock, key, minhash };
  Kind kind = Kind::autoblock;
  std::string name;
  std::string key;
  double theta = 0.4;
  std::string attribute;  // minhash only; empty = every attribute
};

MethodSpec parse_method(const std::string& text);

/// Candidates of a baseline method on `dataset`.
CandidateSet run_baseline(const Dataset& dataset, const MethodSpec& method, const RunConfig& config);

/// Repeated split experiment: for every split, AutoBlock trains on the
/// training part (seed offset by the repeat) and every method blocks the
/// test part. Rows are ordered by repeat, then by method.
std::vector<RunResult> run_experiment(const Dataset& dataset, const LabelSet& labels, const RunConfig& config,
                                      const std::vector<MethodSpec>& methods, const std::string& dataset_name,
                                      const std::string& regime, bool record_time, const TrainingLog& log = {});

}  // namespace autoblock
