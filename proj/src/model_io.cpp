#include "autoblock/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "autoblock/binary_io.hpp"
#include "autoblock/error.hpp"

namespace autoblock {

namespace {

constexpr char kMagic[8] = {'A', 'B', 'M', 'O', 'D', 'E', 'L', '\0'};
constexpr std::size_t kMaxAttributes = 1 << 12;

}  // namespace

void save_model(const SignatureModel& model, std::ostream& out) {
  const std::size_t m = model.schema.size();
  if (model.encoders.size() != m || model.weights.attribute_count() != m) {
    throw Error("save_model: inconsistent model shape");
  }
  binary::Writer w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(m));
  for (const auto& name : model.schema) w.str(name);

  const EmbeddingTable& e = model.embeddings;
  const EmbeddingConfig& ec = e.config();
  w.u32(static_cast<std::uint32_t>(ec.dim));
  w.u64(ec.bucket_count);
  w.u32(static_cast<std::uint32_t>(ec.min_n));
  w.u32(static_cast<std::uint32_t>(ec.max_n));
  w.u64(ec.hash_seed);
  w.u8(e.trainable() ? 1 : 0);
  for (double x : e.rows()) w.f32(x);
  w.u64(e.pretrained_count());
  for (std::size_t k = 0; k < e.pretrained_count(); ++k) {
    w.str(e.pretrained_tokens()[k]);
    for (std::size_t i = 0; i < ec.dim; ++i) w.f32(e.pretrained_values()[k * ec.dim + i]);
  }

  w.str(kRecurrentCell);
  for (const auto& enc : model.encoders) {
    const EncoderConfig& c = enc.config();
    w.u32(static_cast<std::uint32_t>(c.input_dim));
    w.u32(static_cast<std::uint32_t>(c.hidden));
    w.u32(static_cast<std::uint32_t>(c.max_tokens));
    w.f32(c.rho);
    w.u64(enc.param_count());
    for (double x : enc.params()) w.f32(x);
  }

  const std::size_t s = model.signature_count();
  w.u32(static_cast<std::uint32_t>(s));
  for (double x : model.weights.values()) w.f32(x);

  w.u32(static_cast<std::uint32_t>(model.metadata.size()));
  for (const auto& [key, value] : model.metadata) {
    w.str(key);
    w.str(value);
  }
  if (!out) throw Error("failed writing model");
}

SignatureModel load_model(std::istream& in) {
  binary::Reader r(in, "model");
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 8, kMagic)) throw Error("model: not a model file (bad magic bytes)");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw Error("model: format version " + std::to_string(version) + " unsupported (this build reads version " +
                std::to_string(kModelFormatVersion) + ")");
  }
  SignatureModel model;
  const std::uint32_t m = r.u32();
  if (m == 0 || m > kMaxAttributes) throw Error("model: attribute count out of range");
  for (std::uint32_t j = 0; j < m; ++j) model.schema.push_back(r.str());

  EmbeddingConfig ec;
  ec.dim = r.u32();
  ec.bucket_count = r.u64();
  ec.min_n = static_cast<int>(r.u32());
  ec.max_n = static_cast<int>(r.u32());
  ec.hash_seed = r.u64();
  if (ec.dim == 0 || ec.dim > (1u << 16) || ec.bucket_count == 0 || ec.bucket_count > (std::uint64_t{1} << 28)) {
    throw Error("model: embedding shape out of range");
  }
  EmbeddingTable table = EmbeddingTable::zeros(ec);
  table.set_trainable(r.u8() != 0);
  for (double& x : table.rows()) x = r.f32();
  const std::size_t pretrained = r.count(std::uint64_t{1} << 26, "pretrained count");
  std::vector<double> buffer(ec.dim);
  for (std::size_t k = 0; k < pretrained; ++k) {
    std::string token = r.str();
    for (double& x : buffer) x = r.f32();
    table.add_pretrained(std::move(token), buffer);
  }
  model.embeddings = std::move(table);

  const std::string cell = r.str();
  if (cell != kRecurrentCell) throw Error("model: unsupported recurrent cell '" + cell + "'");
  for (std::uint32_t j = 0; j < m; ++j) {
    EncoderConfig c;
    c.input_dim = r.u32();
    c.hidden = r.u32();
    c.max_tokens = r.u32();
    c.rho = r.f32();
    if (c.input_dim != ec.dim || c.hidden == 0 || c.hidden > (1u << 14)) throw Error("model: encoder shape mismatch");
    AttentionalEncoder enc(c);
    const std::size_t n = r.count(std::uint64_t{1} << 32, "parameter count");
    if (n != enc.param_count()) throw Error("model: encoder parameter count mismatch");
    for (double& x : enc.params()) x = r.f32();
    model.encoders.push_back(std::move(enc));
  }

  const std::uint32_t s = r.u32();
  if (s > m) throw Error("model: more signatures than attributes");
  model.weights = SignatureWeights(m);
  std::vector<double> row(m);
  for (std::uint32_t k = 0; k < s; ++k) {
    for (double& x : row) x = r.f32();
    model.weights.append_row(row);
  }
  const std::uint32_t entries = r.u32();
  for (std::uint32_t k = 0; k < entries; ++k) {
    std::string key = r.str();
    std::string value = r.str();
    model.metadata.emplace_back(std::move(key), std::move(value));
  }
  r.expect_end();
  return model;
}

void save_model(const SignatureModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  save_model(model, out);
}

SignatureModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read model '" + path + "'");
  return load_model(in);
}

SignatureModel round_trip(const SignatureModel& model) {
  std::stringstream buffer;
  save_model(model, buffer);
  return load_model(buffer);
}

std::string schema_difference(const std::vector<std::string>& model_schema,
                              const std::vector<std::string>& data_schema) {
  if (model_schema == data_schema) return {};
  std::string missing, extra;
  for (const auto& a : model_schema)
    if (std::find(data_schema.begin(), data_schema.end(), a) == data_schema.end()) missing += " " + a;
  for (const auto& a : data_schema)
    if (std::find(model_schema.begin(), model_schema.end(), a) == model_schema.end()) extra += " " + a;
  std::string msg = "schema mismatch between model and data;";
  if (!missing.empty()) msg += " missing from data:" + missing + ";";
  if (!extra.empty()) msg += " not in model:" + extra + ";";
  if (missing.empty() && extra.empty()) msg += " same attributes in a different order;";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& a : v) s += (s.empty() ? "" : ",") + a;
    return s;
  };
  msg += " model=[" + join(model_schema) + "] data=[" + join(data_schema) + "]";
  return msg;
}

}  // namespace autoblock
