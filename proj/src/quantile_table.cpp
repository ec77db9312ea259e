#include "largevar/quantile_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "largevar/errors.hpp"

namespace largevar {

namespace {

constexpr double kAlphaMatchTolerance = 1e-9;

std::ptrdiff_t find_alpha(const std::vector<double>& alphas, double alpha) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (std::abs(alphas[i] - alpha) <= kAlphaMatchTolerance) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

std::ptrdiff_t find_r(const std::vector<int>& rs, int r) {
  auto it = std::find(rs.begin(), rs.end(), r);
  return it == rs.end() ? -1 : it - rs.begin();
}

}  // namespace

QuantileTable::QuantileTable(std::vector<int> rs, std::vector<double> alphas, std::vector<double> values_row_major,
                             QuantileTableMeta meta)
    : rs_(std::move(rs)), alphas_(std::move(alphas)), values_(std::move(values_row_major)), meta_(std::move(meta)) {
  if (rs_.empty() || alphas_.empty()) throw ConfigError("quantile table: empty r or alpha grid");
  if (values_.size() != rs_.size() * alphas_.size()) {
    throw ConfigError("quantile table: values do not match the r x alpha grid");
  }
  for (int r : rs_) {
    if (r < 1) throw ConfigError("quantile table: r must be >= 1");
  }
  for (double a : alphas_) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("quantile table: alpha must lie in (0, 1)");
  }
  for (std::size_t i = 0; i < rs_.size(); ++i) {
    for (std::size_t j = 0; j < alphas_.size(); ++j) {
      if (!std::isfinite(value_at(i, j))) throw ConfigError("quantile table: non-finite value");
      if (j > 0 && alphas_[j] > alphas_[j - 1] && !(value_at(i, j) > value_at(i, j - 1))) {
        throw ConfigError("quantile table: values must increase strictly in alpha");
      }
    }
  }
}

bool QuantileTable::contains(int r, double alpha) const noexcept {
  return find_r(rs_, r) >= 0 && find_alpha(alphas_, alpha) >= 0;
}

double QuantileTable::critical_value(int r, double alpha) const {
  const auto i = find_r(rs_, r);
  const auto j = find_alpha(alphas_, alpha);
  if (i < 0 || j < 0) {
    std::ostringstream msg;
    msg << "quantile table has no entry for r = " << r << ", alpha = " << alpha << " (available r:";
    for (int x : rs_) msg << ' ' << x;
    msg << "; alpha:";
    for (double a : alphas_) msg << ' ' << a;
    msg << ')';
    throw ConfigError(msg.str());
  }
  return value_at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

bool QuantileTable::operator==(const QuantileTable& other) const {
  const auto& a = meta_;
  const auto& b = other.meta_;
  return rs_ == other.rs_ && alphas_ == other.alphas_ && values_ == other.values_ && a.reps == b.reps &&
         a.model_size == b.model_size && a.seed == b.seed && a.generator_version == b.generator_version &&
         a.source == b.source && a.quantile_method == b.quantile_method;
}

const QuantileTable& builtin_quantile_table() {
  static const QuantileTable table = [] {
    QuantileTableMeta meta;
    meta.reps = 1000000;
    meta.model_size = 100000000;
    meta.seed = 0;
    meta.source = "published";
    return QuantileTable({1, 2, 3}, {0.9, 0.95, 0.975, 0.99},
                         {0.44, 0.97, 1.45, 2.01,     //
                          -1.88, -1.09, -0.40, 0.41,  //
                          -5.91, -4.91, -4.03, -2.99},
                         meta);
  }();
  return table;
}

std::string table_to_json(const QuantileTable& table) {
  const auto& m = table.meta();
  nlohmann::ordered_json j;
  j["schema_version"] = kQuantileTableSchemaVersion;
  j["rs"] = table.rs();
  j["alphas"] = table.alphas();
  j["values"] = table.values_row_major();
  j["reps"] = m.reps;
  j["model_size"] = m.model_size;
  j["seed"] = m.seed;
  j["generator_version"] = m.generator_version;
  j["source"] = m.source;
  j["quantile_method"] = m.quantile_method;
  j["low_reps_warning"] = m.low_reps_warning;
  return j.dump(2) + "\n";
}

QuantileTable table_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream msg;
    msg << "quantile table: parse error at byte " << e.byte << ": " << e.what();
    throw ParseError(msg.str());
  }
  try {
    if (!j.is_object() || !j.contains("schema_version")) {
      throw ParseError("quantile table: missing schema_version");
    }
    const int schema = j.at("schema_version").get<int>();
    if (schema != kQuantileTableSchemaVersion) {
      std::ostringstream msg;
      msg << "quantile table: schema version " << schema << " is not supported (expected "
          << kQuantileTableSchemaVersion << ")";
      throw SchemaVersionError(msg.str());
    }
    QuantileTableMeta meta;
    meta.reps = j.at("reps").get<std::uint64_t>();
    meta.model_size = j.at("model_size").get<std::uint64_t>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.generator_version = j.value("generator_version", kGeneratorVersion);
    meta.source = j.value("source", std::string("generated"));
    meta.quantile_method = j.value("quantile_method", meta.quantile_method);
    meta.low_reps_warning = j.value("low_reps_warning", false);
    meta.version_mismatch_warning = meta.generator_version != kGeneratorVersion;
    return QuantileTable(j.at("rs").get<std::vector<int>>(), j.at("alphas").get<std::vector<double>>(),
                         j.at("values").get<std::vector<double>>(), meta);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("quantile table: malformed field: ") + e.what());
  }
}

void save_table(const QuantileTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << table_to_json(table);
  if (!out) throw ConfigError("failed writing " + path.string());
}

QuantileTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open quantile table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return table_from_json(buf.str());
}

}  // namespace largevar
