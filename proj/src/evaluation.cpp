#include "autoblock/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>

#include "autoblock/csv.hpp"
#include "autoblock/error.hpp"
#include "autoblock/hashing.hpp"
#include "autoblock/random.hpp"

namespace autoblock {

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("split.train_fraction: must lie in (0, 1)");
  if (repeats == 0) throw ConfigError("split.repeats: must be at least 1");
  if (!(unlabeled_train_fraction >= 0.0 && unlabeled_train_fraction <= 1.0)) {
    throw ConfigError("split.unlabeled_train_fraction: must lie in [0, 1]");
  }
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::size_t require(const Dataset& dataset, const std::string& id) {
  auto g = dataset.find(id);
  if (!g) throw Error("label names unknown record_id '" + id + "'");
  return *g;
}

}  // namespace

std::vector<std::vector<std::size_t>> match_groups(const LabelSet& labels, const Dataset& dataset) {
  UnionFind uf(dataset.size());
  std::vector<bool> labelled(dataset.size(), false);
  for (const auto& [a, b] : labels.pairs()) {
    const std::size_t ia = require(dataset, a), ib = require(dataset, b);
    labelled[ia] = labelled[ib] = true;
    uf.unite(ia, ib);
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t t = 0; t < dataset.size(); ++t) {
    if (labelled[t]) groups[uf.find(t)].push_back(t);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

std::vector<Split> split(const LabelSet& labels, const Dataset& dataset, const SplitSpec& spec) {
  spec.validate();
  const auto groups = match_groups(labels, dataset);
  std::vector<std::size_t> group_of(dataset.size(), SIZE_MAX);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t t : groups[g]) group_of[t] = g;
  std::vector<std::size_t> label_count(groups.size(), 0);
  for (const auto& [a, b] : labels.pairs()) ++label_count[group_of[*dataset.find(a)]];
  std::vector<std::size_t> unlabelled;
  for (std::size_t t = 0; t < dataset.size(); ++t)
    if (group_of[t] == SIZE_MAX) unlabelled.push_back(t);

  std::vector<Split> out;
  for (std::size_t r = 0; r < spec.repeats; ++r) {
    Rng rng(mix64(spec.seed * 0x9e3779b97f4a7c15ULL + r));
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<bool> in_train(dataset.size(), false);
    const double target = spec.train_fraction * static_cast<double>(labels.size());
    std::size_t train_labels = 0;
    std::vector<bool> group_train(groups.size(), false);
    for (std::size_t g : order) {
      if (static_cast<double>(train_labels) < target) {
        group_train[g] = true;
        train_labels += label_count[g];
        for (std::size_t t : groups[g]) in_train[t] = true;
      }
    }
    std::vector<std::size_t> pool = unlabelled;
    rng.shuffle(pool);
    const auto extra = static_cast<std::size_t>(
        std::llround(spec.unlabeled_train_fraction * static_cast<double>(pool.size())));
    for (std::size_t k = 0; k < extra; ++k) in_train[pool[k]] = true;

    Split s;
    for (std::size_t t = 0; t < dataset.size(); ++t) (in_train[t] ? s.train_tuples : s.test_tuples).push_back(t);
    for (const auto& [a, b] : labels.pairs()) {
      (group_train[group_of[*dataset.find(a)]] ? s.train_labels : s.test_labels).insert(a, b);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double recall(const CandidateSet& candidates, const LabelSet& test_labels) {
  if (test_labels.empty()) throw Error("recall needs at least one test label");
  std::size_t hit = 0;
  for (const auto& [a, b] : test_labels.pairs()) hit += candidates.contains(a, b);
  return static_cast<double>(hit) / static_cast<double>(test_labels.size());
}

MetricSummary summarize_values(const std::vector<double>& values) {
  if (values.empty()) throw Error("summary of no runs");
  MetricSummary s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  // Keep the mean inside [min, max] despite rounding.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

std::vector<MethodSummary> report(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw Error("report needs at least one run");
  std::vector<MethodSummary> out;
  std::vector<std::vector<const RunResult*>> members;
  for (const auto& run : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const MethodSummary& m) {
      return m.method == run.method && m.dataset == run.dataset && m.regime == run.regime;
    });
    if (it == out.end()) {
      out.push_back({run.method, run.dataset, run.regime, 0, {}, {}, {}});
      members.emplace_back();
      it = out.end() - 1;
    }
    members[static_cast<std::size_t>(it - out.begin())].push_back(&run);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::vector<double> r, p, w;
    for (const RunResult* run : members[k]) {
      r.push_back(run->recall);
      p.push_back(run->pe_ratio);
      if (run->wall_time_s) w.push_back(*run->wall_time_s);
    }
    out[k].runs = r.size();
    out[k].recall = summarize_values(r);
    out[k].pe_ratio = summarize_values(p);
    if (w.size() == r.size()) out[k].mean_wall_time_s = summarize_values(w).mean;
  }
  return out;
}

void write_metrics(const std::vector<RunResult>& runs, std::ostream& out) {
  csv::write_row(out, {"method", "dataset", "regime", "repeat", "recall", "pe_ratio", "wall_time_s"});
  for (const auto& r : runs) {
    csv::write_row(out, {r.method, r.dataset, r.regime, std::to_string(r.repeat), csv::format_double(r.recall),
                         csv::format_double(r.pe_ratio),
                         r.wall_time_s ? csv::format_double(*r.wall_time_s) : std::string()});
  }
}

std::vector<RunResult> read_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  csv::Reader reader(in, ',');
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields.size() != 7 || fields[0] != "method") {
    throw Error(path + ": expected metrics header");
  }
  std::vector<RunResult> runs;
  while (reader.next(fields)) {
    if (fields.size() != 7) throw Error(path + ":" + std::to_string(reader.record_line()) + ": expected 7 columns");
    RunResult r{fields[0], fields[1], fields[2], std::stoul(fields[3]), std::stod(fields[4]), std::stod(fields[5]), {}};
    if (!fields[6].empty()) r.wall_time_s = std::stod(fields[6]);
    runs.push_back(std::move(r));
  }
  return runs;
}

void write_report_csv(const std::vector<MethodSummary>& summary, std::ostream& out) {
  csv::write_row(out, {"method", "dataset", "regime", "runs", "recall_mean", "recall_min", "recall_max",
                       "recall_std", "pe_mean", "pe_min", "pe_max", "pe_std", "wall_time_mean_s"});
  auto f = [](double v) { return csv::format_double(v); };
  for (const auto& m : summary) {
    csv::write_row(out, {m.method, m.dataset, m.regime, std::to_string(m.runs), f(m.recall.mean), f(m.recall.min),
                         f(m.recall.max), f(m.recall.stddev), f(m.pe_ratio.mean), f(m.pe_ratio.min),
                         f(m.pe_ratio.max), f(m.pe_ratio.stddev),
                         m.mean_wall_time_s ? f(*m.mean_wall_time_s) : std::string()});
  }
}

void write_report_text(const std::vector<MethodSummary>& summary, std::ostream& out) {
  std::vector<std::vector<std::string>> rows{{"method", "dataset", "regime", "runs", "recall", "recall [min, max]",
                                              "P/E", "P/E [min, max]", "time (s)"}};
  char buf[96];
  for (const auto& m : summary) {
    std::vector<std::string> row{m.method, m.dataset, m.regime, std::to_string(m.runs)};
    std::snprintf(buf, sizeof(buf), "%.4f +- %.4f", m.recall.mean, m.recall.stddev);
    row.emplace_back(buf);
    std::snprintf(buf, sizeof(buf), "[%.4f, %.4f]", m.recall.min, m.recall.max);
    row.emplace_back(buf);
    std::snprintf(buf, sizeof(buf), "%.3f +- %.3f", m.pe_ratio.mean, m.pe_ratio.stddev);
    row.emplace_back(buf);
    std::snprintf(buf, sizeof(buf), "[%.3f, %.3f]", m.pe_ratio.min, m.pe_ratio.max);
    row.emplace_back(buf);
    if (m.mean_wall_time_s) {
      std::snprintf(buf, sizeof(buf), "%.2f", *m.mean_wall_time_s);
      row.emplace_back(buf);
    } else {
      row.emplace_back("-");
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

}  // namespace autoblock
