#include "largevar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>

namespace largevar {

namespace {

std::uint64_t cell_key(std::uint64_t tag, std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return mix64(mix64(mix64(tag) ^ a) ^ b) ^ c;
}

Index resolve_t(Index n, const std::optional<Index>& t, const std::optional<double>& ratio, const char* who) {
  if (t.has_value() == ratio.has_value()) {
    throw ConfigError(std::string(who) + ": give exactly one of a fixed T or a T/N ratio");
  }
  if (t) return *t;
  return static_cast<Index>(std::llround(*ratio * static_cast<double>(n)));
}

}  // namespace

unsigned resolve_threads(unsigned threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t reps, unsigned threads, const std::function<void(std::uint64_t)>& body) {
  if (reps == 0) return;
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), reps));
  if (workers == 1) {
    for (std::uint64_t rep = 0; rep < reps; ++rep) body(rep);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::uint64_t rep = next.fetch_add(1, std::memory_order_relaxed);
      if (rep >= reps) return;
      try {
        body(rep);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

double quantile_type7(const std::vector<double>& sorted, double alpha) {
  if (sorted.empty()) throw InvalidInput("quantile_type7: empty sample");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("quantile_type7: alpha must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * alpha;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  if (sorted[hi] == sorted[lo]) return sorted[lo];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw InvalidInput("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<Eigen::VectorXd> airy_partial_sums(Index max_r, std::uint64_t reps, Index model_size,
                                               std::uint64_t seed, unsigned threads, Index window) {
  const std::uint64_t cell = cell_key(0xA1, static_cast<std::uint64_t>(model_size), static_cast<std::uint64_t>(max_r));
  return parallel_map<Eigen::VectorXd>(reps, threads, [&](std::uint64_t rep) {
    RngStream rng = replication_stream(seed, cell, rep);
    const Airy1Sample s = airy1_sample(max_r, model_size, rng, 1.0, window);
    Eigen::VectorXd sums(max_r);
    double acc = 0.0;
    for (Index i = 0; i < max_r; ++i) sums(i) = acc += s.a(i);
    return sums;
  });
}

QuantileTable build_quantile_table(const QuantileBuildConfig& config) {
  if (config.rs.empty() || config.alphas.empty()) throw ConfigError("build_quantile_table: empty grid");
  if (config.reps < 2) throw ConfigError("build_quantile_table: need at least 2 replications");
  const int max_r = *std::max_element(config.rs.begin(), config.rs.end());
  if (*std::min_element(config.rs.begin(), config.rs.end()) < 1) throw ConfigError("build_quantile_table: r >= 1");
  const auto sums =
      airy_partial_sums(max_r, config.reps, config.model_size, config.seed, config.threads, config.window);
  std::vector<double> values;
  values.reserve(config.rs.size() * config.alphas.size());
  std::vector<double> column(config.reps);
  for (int r : config.rs) {
    for (std::uint64_t rep = 0; rep < config.reps; ++rep) column[rep] = sums[rep](r - 1);
    std::sort(column.begin(), column.end());
    for (double alpha : config.alphas) values.push_back(quantile_type7(column, alpha));
  }
  QuantileTableMeta meta;
  meta.reps = config.reps;
  meta.model_size = static_cast<std::uint64_t>(config.model_size);
  meta.seed = config.seed;
  meta.source = "generated";
  meta.low_reps_warning = config.reps < 1000;
  return QuantileTable(config.rs, config.alphas, std::move(values), meta);
}

std::string ExperimentReport::to_jsonl() const {
  std::ostringstream out;
  for (const auto& cell : cells) {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["config"] = cell.config;
    j["reps"] = cell.reps;
    j["seed"] = seed;
    if (cell.skipped) {
      j["skipped"] = *cell.skipped;
    } else {
      j["estimate"] = cell.estimate;
      j["std_error"] = cell.std_error;
    }
    out << j.dump() << '\n';
  }
  return out.str();
}

double binomial_std_error(double p, std::uint64_t reps) {
  if (reps == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(reps));
}

bool simulate_and_decide(const VarModelSpec& spec, int r, double alpha, const QuantileTable& table,
                         SimplifiedMode mode, const PipelineOptions& pipeline, RngStream& rng) {
  const Panel panel = simulate(spec, rng);
  EigenSpectrum spectrum;
  try {
    spectrum = johansen_spectrum(panel, pipeline);
  } catch (const DegenerateSample&) {
    // A canonical correlation of one gives an infinite standardized statistic.
    return true;
  }
  return decide(spectrum, spec.n, spec.t, r, alpha, table, mode).reject;
}

namespace {

ReportCell run_rejection_cell(nlohmann::ordered_json config_json, std::uint64_t reps, std::uint64_t seed,
                              std::uint64_t cell, unsigned threads,
                              const std::function<bool(RngStream&)>& one_rep) {
  ReportCell out;
  out.config = std::move(config_json);
  out.reps = reps;
  if (reps == 0) return out;
  const auto hits = parallel_map<char>(reps, threads, [&](std::uint64_t rep) {
    RngStream rng = replication_stream(seed, cell, rep);
    return static_cast<char>(one_rep(rng));
  });
  std::uint64_t count = 0;
  for (char h : hits) count += static_cast<std::uint64_t>(h);
  out.estimate = static_cast<double>(count) / static_cast<double>(reps);
  out.std_error = binomial_std_error(out.estimate, reps);
  return out;
}

}  // namespace

ExperimentReport size_experiment(const SizeExperimentConfig& config, const QuantileTable& table) {
  ExperimentReport report;
  report.kind = "size";
  report.reps = config.reps;
  report.seed = config.seed;
  (void)table.critical_value(config.r, config.alpha);
  if (config.reps == 0) return report;
  if (config.theta < 0.0 || config.theta >= 1.0) throw ConfigError("size_experiment: theta must lie in [0, 1)");
  if (config.theta > 0.0 && config.gamma_offdiag &&
      std::any_of(config.ns.begin(), config.ns.end(), [](Index n) { return n < 2; })) {
    throw ConfigError("size_experiment: Gamma1 = theta E_12 needs N >= 2");
  }
  for (Index n : config.ns) {
    const Index t = resolve_t(n, config.t, config.ratio, "size_experiment");
    nlohmann::ordered_json cfg{{"n", n},
                               {"t", t},
                               {"alpha", config.alpha},
                               {"r", config.r},
                               {"simplified", to_string(config.simplified)},
                               {"detrend", config.pipeline.detrend},
                               {"demean", config.pipeline.demean},
                               {"error_dist", to_string(config.error_dist)},
                               {"theta", config.theta},
                               {"gamma1", config.gamma_offdiag ? "E12" : "E11"}};
    if (n < 1 || static_cast<double>(t) <= 2.0 * static_cast<double>(n) || n < config.r) {
      ReportCell skipped;
      skipped.config = cfg;
      skipped.skipped = n < config.r ? "r exceeds N"
                                     : "T/N <= 2: the two N-dimensional subspaces intersect and the largest "
                                       "canonical correlation is identically 1";
      report.cells.push_back(std::move(skipped));
      continue;
    }
    const std::uint64_t cell =
        cell_key(0x512E, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t),
                 std::bit_cast<std::uint64_t>(config.theta) ^ static_cast<std::uint64_t>(config.error_dist) ^
                     (config.gamma_offdiag ? 0x100u : 0u));
    report.cells.push_back(run_rejection_cell(cfg, config.reps, config.seed, cell, config.threads, [&](RngStream& rng) {
      VarModelSpec spec = VarModelSpec::random_walk(n, t);
      spec.error_dist = config.error_dist;
      if (config.theta > 0.0) {
        Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
        gamma(0, config.gamma_offdiag ? 1 : 0) = config.theta;
        spec.gamma1 = std::move(gamma);
      }
      return simulate_and_decide(spec, config.r, config.alpha, table, config.simplified, config.pipeline, rng);
    }));
  }
  return report;
}

PowerKind parse_power_kind(std::string_view text) {
  if (text == "asym-rank1") return PowerKind::kAsymRank1;
  if (text == "sym-rank1") return PowerKind::kSymRank1;
  if (text == "x0-sweep") return PowerKind::kX0Sweep;
  throw ConfigError("unknown power experiment kind '" + std::string(text) +
                    "' (expected asym-rank1, sym-rank1 or x0-sweep)");
}

std::string_view to_string(PowerKind kind) {
  switch (kind) {
    case PowerKind::kAsymRank1: return "asym-rank1";
    case PowerKind::kSymRank1: return "sym-rank1";
    case PowerKind::kX0Sweep: return "x0-sweep";
  }
  return "unknown";
}

ExperimentReport power_experiment(const PowerExperimentConfig& config, const QuantileTable& table) {
  ExperimentReport report;
  report.kind = std::string("power/") + std::string(to_string(config.kind));
  report.reps = config.reps;
  report.seed = config.seed;
  (void)table.critical_value(config.r, config.alpha);
  if (config.reps == 0) return report;
  for (double g : config.grid) {
    Index n = config.n;
    if (config.kind == PowerKind::kAsymRank1) {
      if (!(g >= 1.0) || g != std::floor(g)) throw ConfigError("power_experiment: asym-rank1 grid holds N values");
      n = static_cast<Index>(g);
    }
    const Index t = resolve_t(n, config.t, config.ratio, "power_experiment");
    nlohmann::ordered_json cfg{{"n", n}, {"t", t}, {"alpha", config.alpha}, {"r", config.r},
                               {"simplified", to_string(config.simplified)}};
    if (config.kind == PowerKind::kSymRank1) cfg["lambda"] = g;
    if (config.kind == PowerKind::kX0Sweep) cfg["std0"] = g;
    if (config.kind == PowerKind::kSymRank1 && !(g >= 0.0 && g <= 2.0)) {
      throw ConfigError("power_experiment: sym-rank1 lambda must lie in [0, 2]");
    }
    if (config.kind == PowerKind::kX0Sweep && !(g >= 0.0)) {
      throw ConfigError("power_experiment: std0 must be non-negative");
    }
    if (static_cast<double>(t) <= 2.0 * static_cast<double>(n)) {
      ReportCell skipped;
      skipped.config = cfg;
      skipped.skipped = "T/N <= 2";
      report.cells.push_back(std::move(skipped));
      continue;
    }
    const std::uint64_t cell = cell_key(0x90E5 + static_cast<std::uint64_t>(config.kind),
                                        static_cast<std::uint64_t>(n) << 32 | static_cast<std::uint64_t>(t),
                                        std::bit_cast<std::uint64_t>(g));
    report.cells.push_back(run_rejection_cell(cfg, config.reps, config.seed, cell, config.threads, [&](RngStream& rng) {
      VarModelSpec spec = VarModelSpec::random_walk(n, t);
      switch (config.kind) {
        case PowerKind::kAsymRank1: spec.pi = rank1_alternative(n, rng); break;
        case PowerKind::kSymRank1: spec.pi = sym_rank1_alternative(n, g, rng); break;
        case PowerKind::kX0Sweep:
          spec.pi = rank1_alternative(n, rng);
          spec.x0 = scaled_x0(n, g, rng);
          break;
      }
      return simulate_and_decide(spec, config.r, config.alpha, table, config.simplified, {}, rng);
    }));
  }
  return report;
}

WachterFit wachter_fit(const std::vector<double>& eigenvalues, const Wachter& law, int bins) {
  if (eigenvalues.empty()) throw InvalidInput("wachter_fit: no eigenvalues");
  if (bins < 1) throw InvalidInput("wachter_fit: bins must be >= 1");
  WachterFit fit;
  fit.lambda_minus = law.lambda_minus();
  fit.lambda_plus = law.lambda_plus();
  const auto [mn, mx] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
  const double lo = std::min(*mn, law.lambda_minus());
  const double hi = std::max(*mx, law.lambda_plus());
  const double width = (hi - lo) / bins;
  fit.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) fit.bin_edges[static_cast<std::size_t>(i)] = lo + width * i;
  fit.bin_edges.back() = hi;
  fit.mass.assign(static_cast<std::size_t>(bins), 0.0);
  const double unit = 1.0 / static_cast<double>(eigenvalues.size());
  for (double x : eigenvalues) {
    auto idx = width > 0.0 ? static_cast<std::ptrdiff_t>((x - lo) / width) : 0;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, bins - 1);
    fit.mass[static_cast<std::size_t>(idx)] += unit;
  }
  fit.pdf.resize(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) fit.pdf[static_cast<std::size_t>(i)] = law.pdf(lo + width * (i + 0.5));
  fit.ks = ks_distance(eigenvalues, [&](double x) { return law.cdf(x); });
  return fit;
}

}  // namespace largevar
