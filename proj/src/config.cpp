#include "autoblock/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "autoblock/csv.hpp"
#include "autoblock/error.hpp"

namespace autoblock {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  auto flush = [&] {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    item.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else {
      item += c;
    }
  }
  flush();
  return out;
}

namespace {

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

template <typename T>
T parse_number(const std::string& field, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(field + ": cannot parse '" + text + "'");
  return value;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(field + ": expected true or false, got '" + text + "'");
}

// One binding per key: reads a string into the config and writes it back.
struct Binding {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::map<std::string, Binding> bindings() {
  std::map<std::string, Binding> b;
  auto text = [&](const std::string& key, auto member) {
    b[key] = {[member](RunConfig& c, const std::string& v) { member(c) = v; },
              [member](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); }};
  };
  auto count = [&](const std::string& key, auto member) {
    b[key] = {[member, key](RunConfig& c, const std::string& v) {
                member(c) = parse_number<std::size_t>(key, v);
              },
              [member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); }};
  };
  auto seed = [&](const std::string& key, auto member) {
    b[key] = {[member, key](RunConfig& c, const std::string& v) {
                member(c) = parse_number<std::uint64_t>(key, v);
              },
              [member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); }};
  };
  auto real = [&](const std::string& key, auto member) {
    b[key] = {[member, key](RunConfig& c, const std::string& v) { member(c) = parse_number<double>(key, v); },
              [member](const RunConfig& c) { return csv::format_double(member(const_cast<RunConfig&>(c))); }};
  };
  auto list = [&](const std::string& key, auto member) {
    b[key] = {[member](RunConfig& c, const std::string& v) { member(c) = split_list(v); },
              [member](const RunConfig& c) { return join_list(member(const_cast<RunConfig&>(c))); }};
  };

  text("data.input", [](RunConfig& c) -> auto& { return c.data.input; });
  text("data.input_b", [](RunConfig& c) -> auto& { return c.data.input_b; });
  text("data.labels", [](RunConfig& c) -> auto& { return c.data.labels; });
  text("data.format", [](RunConfig& c) -> auto& { return c.data.format; });
  text("data.id_column", [](RunConfig& c) -> auto& { return c.data.id_column; });
  list("data.schema", [](RunConfig& c) -> auto& { return c.data.schema; });
  text("data.mode", [](RunConfig& c) -> auto& { return c.data.mode; });
  text("data.name", [](RunConfig& c) -> auto& { return c.data.name; });

  count("model.dim", [](RunConfig& c) -> auto& { return c.model.embedding.dim; });
  count("model.buckets", [](RunConfig& c) -> auto& { return c.model.embedding.bucket_count; });
  b["model.min_n"] = {[](RunConfig& c, const std::string& v) { c.model.embedding.min_n = parse_number<int>("model.min_n", v); },
                      [](const RunConfig& c) { return std::to_string(c.model.embedding.min_n); }};
  b["model.max_n"] = {[](RunConfig& c, const std::string& v) { c.model.embedding.max_n = parse_number<int>("model.max_n", v); },
                      [](const RunConfig& c) { return std::to_string(c.model.embedding.max_n); }};
  seed("model.hash_seed", [](RunConfig& c) -> auto& { return c.model.embedding.hash_seed; });
  count("model.hidden", [](RunConfig& c) -> auto& { return c.model.hidden; });
  count("model.max_tokens", [](RunConfig& c) -> auto& { return c.model.max_tokens; });
  b["model.rho"] = {[](RunConfig& c, const std::string& v) {
                      c.model.rho.clear();
                      for (const auto& item : split_list(v)) c.model.rho.push_back(parse_number<double>("model.rho", item));
                    },
                    [](const RunConfig& c) {
                      std::vector<std::string> items;
                      for (double r : c.model.rho) items.push_back(csv::format_double(r));
                      return join_list(items);
                    }};
  text("model.primary_attribute", [](RunConfig& c) -> auto& { return c.model.primary_attribute; });
  real("model.init_scale", [](RunConfig& c) -> auto& { return c.model.init_scale; });
  text("model.pretrained", [](RunConfig& c) -> auto& { return c.model.pretrained_path; });

  count("train.iterations", [](RunConfig& c) -> auto& { return c.train.max_iterations; });
  count("train.signatures", [](RunConfig& c) -> auto& { return c.train.max_signatures; });
  count("train.negatives", [](RunConfig& c) -> auto& { return c.train.negatives; });
  count("train.batch_size", [](RunConfig& c) -> auto& { return c.train.batch_size; });
  real("train.learning_rate", [](RunConfig& c) -> auto& { return c.train.learning_rate; });
  real("train.beta1", [](RunConfig& c) -> auto& { return c.train.beta1; });
  real("train.beta2", [](RunConfig& c) -> auto& { return c.train.beta2; });
  real("train.epsilon", [](RunConfig& c) -> auto& { return c.train.epsilon; });
  real("train.temperature", [](RunConfig& c) -> auto& { return c.train.temperature; });
  seed("train.seed", [](RunConfig& c) -> auto& { return c.train.seed; });
  count("train.log_every", [](RunConfig& c) -> auto& { return c.train.log_every; });

  real("block.theta", [](RunConfig& c) -> auto& { return c.block.theta; });
  real("block.theta_prime", [](RunConfig& c) -> auto& { return c.theta_prime; });
  count("block.tables", [](RunConfig& c) -> auto& { return c.block.lsh.tables; });
  count("block.hashes_per_table", [](RunConfig& c) -> auto& { return c.block.lsh.hashes_per_table; });
  count("block.multiprobe", [](RunConfig& c) -> auto& { return c.block.lsh.multiprobe; });
  count("block.max_results", [](RunConfig& c) -> auto& { return c.block.max_results; });
  seed("block.seed", [](RunConfig& c) -> auto& { return c.block.lsh.seed; });

  text("baseline.method", [](RunConfig& c) -> auto& { return c.baseline.method; });
  text("baseline.key", [](RunConfig& c) -> auto& { return c.baseline.key; });
  text("baseline.attributes", [](RunConfig& c) -> auto& { return c.baseline.attributes; });
  real("baseline.minhash_theta", [](RunConfig& c) -> auto& { return c.baseline.minhash_theta; });
  count("baseline.bands", [](RunConfig& c) -> auto& { return c.baseline.minhash.bands; });
  count("baseline.rows", [](RunConfig& c) -> auto& { return c.baseline.minhash.rows; });
  count("baseline.ngram_n", [](RunConfig& c) -> auto& { return c.baseline.minhash.ngram_n; });
  seed("baseline.seed", [](RunConfig& c) -> auto& { return c.baseline.minhash.seed; });
  b["baseline.verify"] = {[](RunConfig& c, const std::string& v) { c.baseline.minhash.verify = parse_bool("baseline.verify", v); },
                          [](const RunConfig& c) { return std::string(c.baseline.minhash.verify ? "true" : "false"); }};

  real("eval.train_fraction", [](RunConfig& c) -> auto& { return c.eval.train_fraction; });
  count("eval.repeats", [](RunConfig& c) -> auto& { return c.eval.repeats; });
  seed("eval.seed", [](RunConfig& c) -> auto& { return c.eval.seed; });
  real("eval.unlabeled_train_fraction", [](RunConfig& c) -> auto& { return c.eval.unlabeled_train_fraction; });

  count("synth.entities", [](RunConfig& c) -> auto& { return c.synth.entity_count; });
  count("synth.duplicates", [](RunConfig& c) -> auto& { return c.synth.duplicates_per_entity; });
  real("synth.typo_rate", [](RunConfig& c) -> auto& { return c.synth.typo_rate; });
  real("synth.token_drop_rate", [](RunConfig& c) -> auto& { return c.synth.token_drop_rate; });
  real("synth.missing_attr_rate", [](RunConfig& c) -> auto& { return c.synth.missing_attr_rate; });
  real("synth.attr_swap_rate", [](RunConfig& c) -> auto& { return c.synth.attr_swap_rate; });
  real("synth.version_suffix_rate", [](RunConfig& c) -> auto& { return c.synth.version_suffix_rate; });
  seed("synth.seed", [](RunConfig& c) -> auto& { return c.synth_seed; });
  b["synth.regime"] = {[](RunConfig& c, const std::string& v) { c.synth.regime = parse_regime(v); },
                       [](const RunConfig& c) { return regime_name(c.synth.regime); }};

  count("run.workers", [](RunConfig& c) -> auto& { return c.workers; });
  return b;
}

const std::map<std::string, Binding>& all_bindings() {
  static const auto instance = bindings();
  return instance;
}

void apply(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = all_bindings();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown setting '" + key + "'");
  it->second.set(config, value);
}

}  // namespace

void RunConfig::validate() const {
  if (data.mode != "self" && data.mode != "bipartite") {
    throw ConfigError("data.mode: expected self or bipartite, got '" + data.mode + "'");
  }
  if (data.mode == "bipartite" && !data.input.empty() && data.input_b.empty()) {
    throw ConfigError("data.input_b: required in bipartite mode");
  }
  if (!data.format.empty()) parse_format(data.format);
  model.validate();
  train.validate();
  block.lsh.validate();
  if (!(block.theta > 0.0 && block.theta < 1.0)) throw ConfigError("block.theta: must lie in (0, 1)");
  if (!(theta_prime > -1.0 && theta_prime < block.theta)) {
    throw ConfigError("block.theta_prime: must lie in (-1, block.theta)");
  }
  if (baseline.method != "key" && baseline.method != "minhash") {
    throw ConfigError("baseline.method: unknown method '" + baseline.method + "' (expected key or minhash)");
  }
  if (!(baseline.minhash_theta > 0.0 && baseline.minhash_theta <= 1.0)) {
    throw ConfigError("baseline.minhash_theta: must lie in (0, 1]");
  }
  baseline.minhash.validate();
  eval.validate();
  synth.validate();
}

std::vector<std::pair<std::string, std::string>> RunConfig::snapshot() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, binding] : all_bindings()) {
    if (key.rfind("model.", 0) == 0 || key.rfind("train.", 0) == 0) {
      if (key == "model.pretrained") continue;  // paths are machine specific
      out.emplace_back(key, binding.get(*this));
    }
  }
  return out;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides, RunConfig base) {
  RunConfig config = std::move(base);
  if (!path.empty()) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file '" + path + "' not found");
    pt::ptree tree;
    try {
      pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("config file '" + path + "': " + e.message() + " at line " + std::to_string(e.line()));
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) throw ConfigError("config file '" + path + "': key '" + section + "' outside a section");
      for (const auto& [key, value] : body) apply(config, section + "." + key, value.data());
    }
  }
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + item + "' is not section.key=value");
    apply(config, item.substr(0, eq), item.substr(eq + 1));
  }
  config.validate();
  return config;
}

Dataset load_dataset(const DataConfig& data) {
  if (data.input.empty()) throw ConfigError("data.input: no input file given");
  const DataFormat format = data.format.empty() ? format_from_path(data.input) : parse_format(data.format);
  if (data.mode == "bipartite") return ingest_bipartite(data.input, data.input_b, format, data.schema, data.id_column);
  return ingest(data.input, format, data.schema, data.id_column);
}

}  // namespace autoblock
