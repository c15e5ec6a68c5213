#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "autoblock/blocking.hpp"
#include "autoblock/data_model.hpp"

namespace autoblock {

struct SplitSpec {
  double train_fraction = 0.8;
  std::size_t repeats = 5;
  std::uint64_t seed = 1;
  /// Share of tuples outside every label that joins the training side.
  double unlabeled_train_fraction = 0.2;

  void validate() const;
};

/// One train/test partition, as global tuple indices of the source dataset.
struct Split {
  std::vector<std::size_t> train_tuples;
  std::vector<std::size_t> test_tuples;
  LabelSet train_labels;
  LabelSet test_labels;
};

/// Connected components of the label graph over global tuple indices, each
/// sorted, listed by smallest member.
std::vector<std::vector<std::size_t>> match_groups(const LabelSet& labels, const Dataset& dataset);

/// `repeats` independent splits. Match groups are shuffled and assigned to
/// train while the train label count is below train_fraction of the total.
std::vector<Split> split(const LabelSet& labels, const Dataset& dataset, const SplitSpec& spec);

/// |C intersect T| / |T|. Throws on empty T.
double recall(const CandidateSet& candidates, const LabelSet& test_labels);

struct RunResult {
  std::string method;
  std::string dataset;
  std::string regime;
  std::size_t repeat = 0;
  double recall = 0.0;
  double pe_ratio = 0.0;
  std::optional<double> wall_time_s;  // blank in the CSV when absent
};

struct MetricSummary {
  double mean = 0.0, min = 0.0, max = 0.0, stddev = 0.0;
};

struct MethodSummary {
  std::string method, dataset, regime;
  std::size_t runs = 0;
  MetricSummary recall, pe_ratio;
  std::optional<double> mean_wall_time_s;
};

MetricSummary summarize_values(const std::vector<double>& values);

/// Grouped by (method, dataset, regime) in first-appearance order.
std::vector<MethodSummary> report(const std::vector<RunResult>& runs);

/// `method,dataset,regime,repeat,recall,pe_ratio,wall_time_s`.
void write_metrics(const std::vector<RunResult>& runs, std::ostream& out);
std::vector<RunResult> read_metrics(const std::string& path);
void write_report_csv(const std::vector<MethodSummary>& summary, std::ostream& out);
void write_report_text(const std::vector<MethodSummary>& summary, std::ostream& out);

}  // namespace autoblock
