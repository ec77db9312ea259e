#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace largevar {

/// Version of the Monte Carlo generator that produced a table. Bump when the
/// sampling algorithm changes in a way that alters generated values.
inline constexpr int kGeneratorVersion = 1;
inline constexpr int kQuantileTableSchemaVersion = 1;

struct QuantileTableMeta {
  std::uint64_t reps = 0;
  std::uint64_t model_size = 0;
  std::uint64_t seed = 0;
  int generator_version = kGeneratorVersion;
  std::string source;  // "published" or "generated"
  std::string quantile_method = "linear interpolation of order statistics (type 7)";
  bool low_reps_warning = false;        // reps < 1000 when generated
  bool version_mismatch_warning = false;  // loaded from a different generator version
};

/// Critical values of sum_{i<=r} a_i (Airy_1 point process) indexed by
/// (r, alpha). Values are strictly increasing in alpha for every r.
class QuantileTable {
 public:
  QuantileTable() = default;
  QuantileTable(std::vector<int> rs, std::vector<double> alphas, std::vector<double> values_row_major,
                QuantileTableMeta meta);

  const std::vector<int>& rs() const noexcept { return rs_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  const QuantileTableMeta& meta() const noexcept { return meta_; }
  QuantileTableMeta& meta() noexcept { return meta_; }

  bool contains(int r, double alpha) const noexcept;
  /// Throws ConfigError when (r, alpha) is not tabulated.
  double critical_value(int r, double alpha) const;
  double value_at(std::size_t r_index, std::size_t alpha_index) const {
    return values_[r_index * alphas_.size() + alpha_index];
  }
  const std::vector<double>& values_row_major() const noexcept { return values_; }

  bool operator==(const QuantileTable& other) const;

 private:
  std::vector<int> rs_;
  std::vector<double> alphas_;
  std::vector<double> values_;
  QuantileTableMeta meta_;
};

/// Published quantiles for r = 1, 2, 3 and alpha = 0.9, 0.95, 0.975, 0.99.
const QuantileTable& builtin_quantile_table();

std::string table_to_json(const QuantileTable& table);
QuantileTable table_from_json(const std::string& text);
void save_table(const QuantileTable& table, const std::filesystem::path& path);
QuantileTable load_table(const std::filesystem::path& path);

}  // namespace largevar
