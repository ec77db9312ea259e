// largevar: command-line front end for the high-dimensional cointegration
// test and its Monte Carlo tables.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "largevar/errors.hpp"
#include "largevar/harness.hpp"
#include "largevar/johansen.hpp"
#include "largevar/panel_io.hpp"
#include "largevar/quantile_table.hpp"
#include "largevar/rmt.hpp"

namespace {

using namespace largevar;
using nlohmann::ordered_json;

constexpr int kOutputSchemaVersion = 1;
constexpr int kExitNoReject = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output;
};

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty() || g.output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + g.output);
  out << text;
}

// "5:10", "5:10:2", "5,6,9" or a single value.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("cannot parse '" + s + "' in grid '" + text + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("range must be lo:hi or lo:hi:step");
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const double step = parts.size() == 3 ? to_double(parts[2]) : 1.0;
    if (!(step > 0)) throw ConfigError("range step must be positive");
    for (int i = 0;; ++i) {
      const double v = lo + step * i;
      if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
      out.push_back(v);
    }
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(to_double(part));
  }
  if (out.empty()) throw ConfigError("empty grid '" + text + "'");
  return out;
}

std::vector<Index> parse_index_grid(const std::string& text) {
  std::vector<Index> out;
  for (double v : parse_grid(text)) {
    if (v != std::floor(v) || v < 1) throw ConfigError("expected positive integers in '" + text + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

QuantileTable resolve_table(const std::string& spec) {
  if (spec.empty() || spec == "builtin") return builtin_quantile_table();
  QuantileTable table = load_table(spec);
  if (table.meta().version_mismatch_warning) {
    std::cerr << "warning: quantile table " << spec << " was produced by generator version "
              << table.meta().generator_version << " (current " << kGeneratorVersion << ")\n";
  }
  if (table.meta().low_reps_warning) {
    std::cerr << "warning: quantile table " << spec << " rests on fewer than 1000 replications\n";
  }
  return table;
}

ordered_json spectrum_json(const EigenSpectrum& s) {
  return std::vector<double>(s.lambdas.data(), s.lambdas.data() + s.lambdas.size());
}

struct TestArgs {
  std::string input;
  int r = 1;
  double alpha = 0.95;
  std::string table = "builtin";
  std::string simplified = "auto";
  bool wn = false;
  bool no_detrend = false;
  bool no_demean = false;
};

int cmd_test(const Globals& g, const TestArgs& a) {
  const NamedPanel named = read_panel_csv(std::filesystem::path(a.input));
  const Panel& panel = named.panel;
  ordered_json j;
  j["schema_version"] = kOutputSchemaVersion;
  if (a.wn) {
    const EigenSpectrum s = run_wn_test(panel);
    const JacobiParams law = jacobi_for_white_noise(panel.n(), panel.t());
    j["test"] = "white-noise";
    j["n"] = panel.n();
    j["t"] = panel.t();
    j["smallest"] = s.smallest();
    j["largest"] = s.largest();
    j["jacobi_p"] = law.p;
    j["jacobi_q"] = law.q;
    j["spectrum"] = spectrum_json(s);
    emit(g, j.dump(2) + "\n");
    return kExitNoReject;
  }
  const QuantileTable table = resolve_table(a.table);
  PipelineOptions options;
  options.detrend = !a.no_detrend;
  options.demean = !a.no_demean;
  const TestOutcome out = run_test(panel, a.r, a.alpha, table, parse_simplified_mode(a.simplified), options);
  auto finite_or_null = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  j["test"] = "cointegration";
  j["n"] = panel.n();
  j["t"] = panel.t();
  j["r"] = out.r;
  j["alpha"] = out.alpha;
  j["raw_stat"] = finite_or_null(out.raw_stat);
  j["standardized"] = finite_or_null(out.standardized);
  j["c1"] = out.constants.c1;
  j["c2"] = out.constants.c2;
  j["lambda_plus"] = out.constants.lambda_plus;
  j["lambda_minus"] = out.constants.lambda_minus;
  j["critical_value"] = out.critical_value;
  j["reject"] = out.reject;
  j["degenerate"] = out.degenerate;
  j["simplified_used"] = out.constants.simplified;
  j["detrend"] = options.detrend;
  j["demean"] = options.demean;
  j["spectrum"] = spectrum_json(out.spectrum);
  emit(g, j.dump(2) + "\n");
  return out.reject ? kExitReject : kExitNoReject;
}

struct QuantileArgs {
  std::string rs = "1,2,3";
  std::string alphas = "0.9,0.95,0.975,0.99";
  std::uint64_t reps = 100000;
  Index model_size = 1000000;
  Index window = 0;
};

int cmd_quantiles(const Globals& g, const QuantileArgs& a) {
  QuantileBuildConfig c;
  c.rs.clear();
  for (Index r : parse_index_grid(a.rs)) c.rs.push_back(static_cast<int>(r));
  c.alphas = parse_grid(a.alphas);
  c.reps = a.reps;
  c.model_size = a.model_size;
  c.seed = g.seed;
  c.threads = g.threads;
  c.window = a.window;
  const QuantileTable table = build_quantile_table(c);
  if (table.meta().low_reps_warning) std::cerr << "warning: fewer than 1000 replications\n";
  emit(g, table_to_json(table));
  return 0;
}

struct SizeArgs {
  std::string ns = "5:10";
  std::optional<Index> t;
  std::optional<double> ratio;
  double alpha = 0.95;
  int r = 1;
  std::uint64_t reps = 100000;
  std::string table = "builtin";
  std::string simplified = "auto";
  std::string error_dist = "gaussian";
  double theta = 0;
  bool gamma_offdiag = false;
  bool no_detrend = false;
  bool no_demean = false;
};

int cmd_size(const Globals& g, const SizeArgs& a) {
  SizeExperimentConfig c;
  c.ns = parse_index_grid(a.ns);
  c.t = a.t;
  c.ratio = a.ratio;
  c.alpha = a.alpha;
  c.r = a.r;
  c.reps = a.reps;
  c.seed = g.seed;
  c.threads = g.threads;
  c.simplified = parse_simplified_mode(a.simplified);
  c.error_dist = parse_error_dist(a.error_dist);
  c.theta = a.theta;
  c.gamma_offdiag = a.gamma_offdiag;
  c.pipeline.detrend = !a.no_detrend;
  c.pipeline.demean = !a.no_demean;
  emit(g, size_experiment(c, resolve_table(a.table)).to_jsonl());
  return 0;
}

struct PowerArgs {
  std::string kind = "sym-rank1";
  std::string grid = "0:2:0.25";
  Index n = 100;
  std::optional<Index> t;
  std::optional<double> ratio;
  double alpha = 0.95;
  int r = 1;
  std::uint64_t reps = 100000;
  std::string table = "builtin";
  std::string simplified = "auto";
};

int cmd_power(const Globals& g, const PowerArgs& a) {
  PowerExperimentConfig c;
  c.kind = parse_power_kind(a.kind);
  c.grid = parse_grid(a.grid);
  c.n = a.n;
  c.t = a.t;
  c.ratio = a.ratio;
  c.alpha = a.alpha;
  c.r = a.r;
  c.reps = a.reps;
  c.seed = g.seed;
  c.threads = g.threads;
  c.simplified = parse_simplified_mode(a.simplified);
  emit(g, power_experiment(c, resolve_table(a.table)).to_jsonl());
  return 0;
}

struct WachterArgs {
  std::string panel;
  std::string spectrum;
  std::optional<Index> n;
  std::optional<Index> t;
  bool wn = false;
  int bins = 40;
};

int cmd_wachter(const Globals& g, const WachterArgs& a) {
  if (a.panel.empty() == a.spectrum.empty()) throw ConfigError("wachter: give exactly one of --panel or --spectrum");
  std::vector<double> eigs;
  Index n = 0;
  Index t = 0;
  if (!a.panel.empty()) {
    const Panel panel = read_panel_csv(std::filesystem::path(a.panel)).panel;
    const EigenSpectrum s = a.wn ? run_wn_test(panel) : johansen_spectrum(panel);
    eigs.assign(s.lambdas.data(), s.lambdas.data() + s.lambdas.size());
    n = panel.n();
    t = panel.t();
  } else {
    if (!a.n || !a.t) throw ConfigError("wachter: --spectrum needs --n and --t");
    eigs = read_values_file(a.spectrum);
    n = *a.n;
    t = *a.t;
  }
  const JacobiParams params = a.wn ? jacobi_for_white_noise(n, t) : jacobi_for_cointegration(n, t);
  const Wachter law = wachter_for(params);
  const WachterFit fit = wachter_fit(eigs, law, a.bins);
  ordered_json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["n"] = n;
  j["t"] = t;
  j["eigenvalue_count"] = eigs.size();
  j["p_bar"] = law.p_bar();
  j["q_bar"] = law.q_bar();
  j["lambda_minus"] = fit.lambda_minus;
  j["lambda_plus"] = fit.lambda_plus;
  j["ks"] = fit.ks;
  j["bin_edges"] = fit.bin_edges;
  j["mass"] = fit.mass;
  j["pdf"] = fit.pdf;
  emit(g, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "largevar: cointegration test for high-dimensional VAR(1) panels and the Monte Carlo tables behind it.\n"
      "Panel CSV: header row of series names, then X_0 as the FIRST data row, then X_1..X_T."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  Globals g;
  app.add_option("--seed", g.seed, "Base seed of the counter-based random streams")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for Monte Carlo (0 = all cores)")->capture_default_str();
  app.add_option("--output", g.output, "Write the result to this file instead of stdout");

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Run the test on a CSV panel; exit 0 = no reject, 1 = reject, 2 = error");
  test->add_option("input", ta.input, "Panel CSV (first data row is X_0)")->required();
  test->add_option("--r", ta.r, "Number of top eigenvalues in the statistic")->capture_default_str();
  test->add_option("--alpha", ta.alpha, "Quantile level of the critical value")->capture_default_str();
  test->add_option("--table", ta.table, "Quantile table JSON file, or 'builtin'")->capture_default_str();
  test->add_option("--simplified", ta.simplified, "Scaling constants: auto (simplified iff T/N >= 6), on, off")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  test->add_flag("--wn", ta.wn, "White-noise variant: report the spectrum with cyclic increments");
  test->add_flag("--no-detrend", ta.no_detrend, "Skip de-trending (robustness experiments only)");
  test->add_flag("--no-demean", ta.no_demean, "Skip de-meaning (robustness experiments only)");

  QuantileArgs qa;
  auto* quant = app.add_subcommand("quantiles", "Generate a quantile table of sums of top Airy_1 points");
  quant->add_option("--r", qa.rs, "Values of r, e.g. 1,2,3 or 1:3")->capture_default_str();
  quant->add_option("--alphas", qa.alphas, "Quantile levels, e.g. 0.9,0.95")->capture_default_str();
  quant->add_option("--reps", qa.reps, "Monte Carlo replications")->capture_default_str();
  quant->add_option("--model-size", qa.model_size, "Size n of the tridiagonal model")->capture_default_str();
  quant->add_option("--window", qa.window, "Rows simulated (0 = automatic edge window)")->capture_default_str();

  SizeArgs sa;
  auto* size = app.add_subcommand("size", "Empirical size under Pi = 0 (JSON Lines, one record per N)");
  size->add_option("--N", sa.ns, "Values of N, e.g. 5:10 or 50,100")->capture_default_str();
  auto* size_t_opt = size->add_option("--T", sa.t, "Fixed T for every N");
  size->add_option("--ratio", sa.ratio, "T = round(ratio * N)")->excludes(size_t_opt);
  size->add_option("--alpha", sa.alpha, "Nominal level")->capture_default_str();
  size->add_option("--r", sa.r, "Number of top eigenvalues")->capture_default_str();
  size->add_option("--reps", sa.reps, "Replications per cell")->capture_default_str();
  size->add_option("--table", sa.table, "Quantile table JSON file, or 'builtin'")->capture_default_str();
  size->add_option("--simplified", sa.simplified, "auto, on or off")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  size->add_option("--error-dist", sa.error_dist, "gaussian, uniform01, uniform-3pt, gaussian-product, cauchy")
      ->capture_default_str();
  size->add_option("--theta", sa.theta, "VAR(2) dgp with Gamma1 = theta E_11 (0 = VAR(1))")->capture_default_str();
  size->add_flag("--gamma-e12", sa.gamma_offdiag, "Use Gamma1 = theta E_12 instead of theta E_11");
  size->add_flag("--no-detrend", sa.no_detrend, "Skip de-trending");
  size->add_flag("--no-demean", sa.no_demean, "Skip de-meaning");

  PowerArgs pa;
  auto* power = app.add_subcommand("power", "Power against random alternatives (JSON Lines)");
  power->add_option("--kind", pa.kind, "asym-rank1 (grid = N), sym-rank1 (grid = lambda), x0-sweep (grid = std0)")
      ->capture_default_str();
  power->add_option("--grid", pa.grid, "Grid values, e.g. 0:2:0.25")->capture_default_str();
  power->add_option("--N", pa.n, "N for sym-rank1 and x0-sweep")->capture_default_str();
  auto* power_t_opt = power->add_option("--T", pa.t, "Fixed T");
  power->add_option("--ratio", pa.ratio, "T = round(ratio * N)")->excludes(power_t_opt);
  power->add_option("--alpha", pa.alpha, "Nominal level")->capture_default_str();
  power->add_option("--r", pa.r, "Number of top eigenvalues")->capture_default_str();
  power->add_option("--reps", pa.reps, "Replications per grid point")->capture_default_str();
  power->add_option("--table", pa.table, "Quantile table JSON file, or 'builtin'")->capture_default_str();
  power->add_option("--simplified", pa.simplified, "auto, on or off")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();

  WachterArgs wa;
  auto* wachter = app.add_subcommand("wachter", "Histogram, Wachter density and KS distance of a spectrum");
  wachter->add_option("--panel", wa.panel, "Panel CSV whose pipeline spectrum is fitted");
  wachter->add_option("--spectrum", wa.spectrum, "File of eigenvalues (needs --n and --t)");
  wachter->add_option("--n", wa.n, "N of the panel behind --spectrum");
  wachter->add_option("--t", wa.t, "T of the panel behind --spectrum");
  wachter->add_flag("--wn", wa.wn, "Use the white-noise spectrum and its Jacobi parameters");
  wachter->add_option("--bins", wa.bins, "Histogram bins")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*test) return cmd_test(g, ta);
    if (*quant) return cmd_quantiles(g, qa);
    if (*size) return cmd_size(g, sa);
    if (*power) return cmd_power(g, pa);
    if (*wachter) return cmd_wachter(g, wa);
  } catch (const largevar::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
