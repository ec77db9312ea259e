#pragma once

// Modified Johansen likelihood-ratio test for high-dimensional VAR(1):
// de-trend, de-mean, form the residual cross-products, extract squared
// sample canonical correlations and standardize the top-r log statistic
// against Airy_1 quantiles.

#include <Eigen/Dense>

#include "largevar/linalg.hpp"
#include "largevar/quantile_table.hpp"
#include "largevar/varsim.hpp"

namespace largevar {

/// Pipeline switches. The defaults give the test whose null distribution is
/// tabulated; the other combinations exist for robustness experiments only.
struct PipelineOptions {
  bool detrend = true;
  bool demean = true;
};

struct ResidualPair {
  Eigen::MatrixXd r0;  // differences
  Eigen::MatrixXd r1;  // (de-trended) lagged levels
};

struct SMatrices {
  Eigen::MatrixXd s00, s01, s10, s11;
};

/// Squared sample canonical correlations, largest first, all in [0, 1].
struct EigenSpectrum {
  Eigen::VectorXd lambdas;

  Index size() const noexcept { return lambdas.size(); }
  double largest() const { return lambdas(0); }
  double smallest() const { return lambdas(lambdas.size() - 1); }
};

enum class SimplifiedMode { kAuto, kOn, kOff };

SimplifiedMode parse_simplified_mode(std::string_view text);
std::string_view to_string(SimplifiedMode mode);

/// Centering/scaling constants of the edge limit.
struct ScalingConstants {
  double p_hat = 0;
  double q_hat = 0;
  double lambda_plus = 0;
  double lambda_minus = 0;
  double c1 = 0;
  double c2 = 0;
  bool simplified = false;
};

struct TestOutcome {
  int r = 1;
  double raw_stat = 0;      // sum_{i<=r} ln(1 - lambda_i)
  double standardized = 0;  // (raw - r c1) / (N^{-2/3} c2)
  double alpha = 0.95;
  double critical_value = 0;
  bool reject = false;
  bool degenerate = false;  // some lambda_i, i <= r, equals 1
  EigenSpectrum spectrum;
  ScalingConstants constants;
};

/// Column t (1-based) is X_{t-1} - (t-1)/T (X_T - X_0).
Eigen::MatrixXd detrend(const Panel& panel);

/// Subtracts each row's mean (right-multiplication by the de-meaning projector).
Eigen::MatrixXd demean_rows(const Eigen::MatrixXd& m);

/// First differences dX_t = X_t - X_{t-1}, t = 1..T.
Eigen::MatrixXd differences(const Panel& panel);

ResidualPair residuals(const Panel& panel, const PipelineOptions& options = {});

SMatrices s_matrices(const ResidualPair& res);

/// Roots of det(S10 S00^{-1} S01 - lambda S11) = 0, clamped into [0, 1].
EigenSpectrum canonical_eigs(const SMatrices& s);

/// Constants for an N x T panel. kAuto picks the simplified variant iff T/N >= 6.
ScalingConstants scaling_constants(Index n, Index t, SimplifiedMode mode = SimplifiedMode::kAuto);

/// Edge constants for explicit (p_hat, q_hat); shared by the Wachter law.
ScalingConstants scaling_constants_from(double p_hat, double q_hat, bool simplified);

/// Spectrum-level decision. Throws ConfigError when the table lacks (r, alpha).
TestOutcome decide(const EigenSpectrum& spectrum, Index n, Index t, int r, double alpha,
                   const QuantileTable& table, SimplifiedMode mode = SimplifiedMode::kAuto);

/// Full pipeline: residuals -> S-matrices -> spectrum -> decision.
TestOutcome run_test(const Panel& panel, int r, double alpha, const QuantileTable& table,
                     SimplifiedMode mode = SimplifiedMode::kAuto, const PipelineOptions& options = {});

/// Spectrum of the Johansen pencil without a decision; used by Monte Carlo code.
EigenSpectrum johansen_spectrum(const Panel& panel, const PipelineOptions& options = {});

/// Cyclic increments: X_{t+1} - X_t for t < T and X_1 - X_T for t = T.
Eigen::MatrixXd cyclic_differences(const Eigen::MatrixXd& x);

/// White-noise variant on X_1..X_T (X_0 is not used). Returns the spectrum;
/// its smallest value is the natural statistic, no critical values attached.
EigenSpectrum run_wn_test(const Panel& panel);

}  // namespace largevar
