#pragma once

// Reproducible Monte Carlo drivers. Every replication draws from its own
// counter-based stream derived from (seed, cell, rep), so results do not
// depend on the number of worker threads.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "largevar/johansen.hpp"
#include "largevar/quantile_table.hpp"
#include "largevar/rmt.hpp"
#include "largevar/varsim.hpp"

namespace largevar {

/// 0 means std::thread::hardware_concurrency().
unsigned resolve_threads(unsigned threads);

/// Calls body(rep) for rep in [0, reps) on `threads` workers. Each rep is
/// handled exactly once; the first exception thrown by any worker is
/// rethrown after all workers join.
void parallel_for(std::uint64_t reps, unsigned threads, const std::function<void(std::uint64_t)>& body);

/// Evaluates body(rep) into slot rep of the result vector.
template <typename T, typename F>
std::vector<T> parallel_map(std::uint64_t reps, unsigned threads, F&& body) {
  std::vector<T> out(reps);
  parallel_for(reps, threads, [&](std::uint64_t rep) { out[rep] = body(rep); });
  return out;
}

/// Linear interpolation between order statistics at h = (n - 1) alpha.
/// `sorted` must be ascending and non-empty.
double quantile_type7(const std::vector<double>& sorted, double alpha);

/// Kolmogorov-Smirnov sup-distance between two empirical distributions.
double ks_distance(std::vector<double> a, std::vector<double> b);
/// One-sample sup-distance between an empirical distribution and a continuous CDF.
double ks_distance(std::vector<double> a, const std::function<double(double)>& cdf);

// ---- quantile tables ----

struct QuantileBuildConfig {
  std::vector<int> rs{1, 2, 3};
  std::vector<double> alphas{0.9, 0.95, 0.975, 0.99};
  std::uint64_t reps = 100000;
  Index model_size = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  Index window = 0;  // 0 selects edge_window(model_size)
};

QuantileTable build_quantile_table(const QuantileBuildConfig& config);

/// Raw sums sum_{i<=r} a_i, one row per replication (r = 1..max r).
std::vector<Eigen::VectorXd> airy_partial_sums(Index max_r, std::uint64_t reps, Index model_size,
                                               std::uint64_t seed, unsigned threads, Index window = 0);

// ---- experiment reports ----

struct ReportCell {
  nlohmann::ordered_json config;
  std::uint64_t reps = 0;
  double estimate = 0;
  double std_error = 0;
  std::optional<std::string> skipped;  // reason when the cell was not run
};

struct ExperimentReport {
  std::string kind;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<ReportCell> cells;

  /// One JSON object per line, one line per cell.
  std::string to_jsonl() const;
};

/// sqrt(p (1 - p) / reps); 0 when reps is 0.
double binomial_std_error(double p, std::uint64_t reps);

struct SizeExperimentConfig {
  std::vector<Index> ns;
  std::optional<Index> t;        // fixed T for every N, or
  std::optional<double> ratio;   // T = round(ratio * N)
  double alpha = 0.95;
  int r = 1;
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  SimplifiedMode simplified = SimplifiedMode::kAuto;
  PipelineOptions pipeline;
  ErrorDist error_dist = ErrorDist::kGaussian;
  /// VAR(2) variant: Gamma1 = theta E_11, or theta E_12 when gamma_offdiag
  /// is set (needs N >= 2). theta = 0 gives VAR(1).
  double theta = 0.0;
  bool gamma_offdiag = false;
};

ExperimentReport size_experiment(const SizeExperimentConfig& config, const QuantileTable& table);

enum class PowerKind { kAsymRank1, kSymRank1, kX0Sweep };
PowerKind parse_power_kind(std::string_view text);
std::string_view to_string(PowerKind kind);

struct PowerExperimentConfig {
  PowerKind kind = PowerKind::kSymRank1;
  /// asym-rank1: values of N (T from `t` or `ratio`); sym-rank1: values of
  /// lambda; x0-sweep: values of std0 under an asymmetric rank-1 alternative.
  std::vector<double> grid;
  Index n = 100;
  std::optional<Index> t;
  std::optional<double> ratio;
  double alpha = 0.95;
  int r = 1;
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  SimplifiedMode simplified = SimplifiedMode::kAuto;
};

ExperimentReport power_experiment(const PowerExperimentConfig& config, const QuantileTable& table);

/// Rejection indicator for one replication of a given dgp, exposed for tests.
bool simulate_and_decide(const VarModelSpec& spec, int r, double alpha, const QuantileTable& table,
                         SimplifiedMode mode, const PipelineOptions& pipeline, RngStream& rng);

// ---- Wachter goodness of fit ----

struct WachterFit {
  std::vector<double> bin_edges;   // bins + 1 edges spanning the support
  std::vector<double> mass;        // empirical mass per bin
  std::vector<double> pdf;         // law density at bin midpoints
  double ks = 0;
  double lambda_minus = 0;
  double lambda_plus = 0;
};

WachterFit wachter_fit(const std::vector<double>& eigenvalues, const Wachter& law, int bins = 40);

}  // namespace largevar
