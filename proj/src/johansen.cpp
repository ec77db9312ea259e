#include "largevar/johansen.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace largevar {

namespace {

// Lagged levels X_0..X_{T-1} as an n x T matrix.
Eigen::MatrixXd lagged_levels(const Panel& panel) {
  Eigen::MatrixXd lag(panel.n(), panel.t());
  lag.col(0) = panel.x0;
  if (panel.t() > 1) lag.rightCols(panel.t() - 1) = panel.data.leftCols(panel.t() - 1);
  return lag;
}

// Cholesky factor of a residual cross-product. Exact rank deficiency (e.g.
// duplicated series) survives LLT with tiny pivots. Each squared pivot is
// compared with its own diagonal entry: that ratio is the pivot of the
// correlation-scaled matrix and does not depend on the units of the series.
Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& s, const char* name) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  const double scale = s.diagonal().minCoeff();
  double min_pivot = -1.0;
  if (llt.info() == Eigen::Success && scale > 0.0) {
    min_pivot = (llt.matrixLLT().diagonal().array().square() / s.diagonal().array()).minCoeff();
  }
  const double floor = 1e-11 * static_cast<double>(s.rows());
  if (llt.info() != Eigen::Success || !(min_pivot > floor) || !(scale > 0.0)) {
    std::ostringstream msg;
    msg << "singular pencil: " << name
        << " is not positive definite, smallest relative pivot " << min_pivot
        << " (degenerate sample; canonical correlations need T/N > 2 and linearly independent series, "
           "otherwise the two N-dimensional subspaces intersect)";
    throw DegenerateSample(msg.str());
  }
  return llt;
}

}  // namespace

SimplifiedMode parse_simplified_mode(std::string_view text) {
  if (text == "auto") return SimplifiedMode::kAuto;
  if (text == "on") return SimplifiedMode::kOn;
  if (text == "off") return SimplifiedMode::kOff;
  throw InvalidInput("simplified mode must be one of auto, on, off");
}

std::string_view to_string(SimplifiedMode mode) {
  switch (mode) {
    case SimplifiedMode::kAuto: return "auto";
    case SimplifiedMode::kOn: return "on";
    case SimplifiedMode::kOff: return "off";
  }
  return "auto";
}

Eigen::MatrixXd detrend(const Panel& panel) {
  panel.validate();
  const Index t = panel.t();
  if (t < 2) throw InvalidInput("detrend: need T >= 2");
  const Eigen::VectorXd drift = (panel.data.col(t - 1) - panel.x0) / static_cast<double>(t);
  Eigen::MatrixXd out = lagged_levels(panel);
  for (Index col = 1; col < t; ++col) out.col(col) -= static_cast<double>(col) * drift;
  return out;
}

Eigen::MatrixXd demean_rows(const Eigen::MatrixXd& m) {
  return m.colwise() - m.rowwise().mean();
}

Eigen::MatrixXd differences(const Panel& panel) {
  panel.validate();
  Eigen::MatrixXd d(panel.n(), panel.t());
  d.col(0) = panel.data.col(0) - panel.x0;
  if (panel.t() > 1) {
    d.rightCols(panel.t() - 1) = panel.data.rightCols(panel.t() - 1) - panel.data.leftCols(panel.t() - 1);
  }
  return d;
}

ResidualPair residuals(const Panel& panel, const PipelineOptions& options) {
  panel.validate();
  if (panel.t() < 2) throw InvalidInput("residuals: need T >= 2");
  ResidualPair res;
  res.r0 = differences(panel);
  res.r1 = options.detrend ? detrend(panel) : lagged_levels(panel);
  if (options.demean) {
    res.r0 = demean_rows(res.r0);
    res.r1 = demean_rows(res.r1);
  }
  return res;
}

SMatrices s_matrices(const ResidualPair& res) {
  if (res.r0.rows() != res.r1.rows() || res.r0.cols() != res.r1.cols()) {
    throw InvalidInput("s_matrices: residual blocks differ in shape");
  }
  const Index n = res.r0.rows();
  SMatrices s;
  s.s00 = Eigen::MatrixXd::Zero(n, n);
  s.s11 = Eigen::MatrixXd::Zero(n, n);
  s.s00.selfadjointView<Eigen::Lower>().rankUpdate(res.r0);
  s.s11.selfadjointView<Eigen::Lower>().rankUpdate(res.r1);
  s.s00.triangularView<Eigen::StrictlyUpper>() = s.s00.transpose();
  s.s11.triangularView<Eigen::StrictlyUpper>() = s.s11.transpose();
  s.s01.noalias() = res.r0 * res.r1.transpose();
  s.s10 = s.s01.transpose();
  return s;
}

EigenSpectrum canonical_eigs(const SMatrices& s) {
  const Index n = s.s00.rows();
  if (s.s01.rows() != n || s.s11.rows() != n || s.s00.cols() != n) {
    throw InvalidInput("canonical_eigs: S-matrices differ in size");
  }
  if (!s.s00.allFinite() || !s.s01.allFinite() || !s.s11.allFinite()) {
    throw InvalidInput("canonical_eigs: non-finite S-matrices");
  }
  // Unit-diagonal rescaling leaves the roots unchanged and keeps series of
  // very different magnitude (heavy-tailed innovations) well conditioned.
  const Eigen::VectorXd d0 = s.s00.diagonal().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd d1 = s.s11.diagonal().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  if (!d0.allFinite() || !d1.allFinite()) {
    throw DegenerateSample("singular pencil: a residual series is identically zero (smallest relative pivot 0)");
  }
  const Eigen::MatrixXd s00 = d0.asDiagonal() * s.s00 * d0.asDiagonal();
  const Eigen::MatrixXd s11 = d1.asDiagonal() * s.s11 * d1.asDiagonal();
  const Eigen::MatrixXd s01 = d0.asDiagonal() * s.s01 * d1.asDiagonal();
  auto chol00 = checked_cholesky(s00, "S00");
  checked_cholesky(s11, "S11");
  // A = S10 S00^{-1} S01 = Z^T Z with Z = L00^{-1} S01, symmetric by construction.
  const Eigen::MatrixXd z = chol00.matrixL().solve(s01);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  Eigen::VectorXd values;
  try {
    values = gen_eigs_spd(SymMatrix<double>(a), SymMatrix<double>(s11));
  } catch (const SingularPencil& e) {
    throw DegenerateSample(e.what());
  }
  return {clamp_unit_interval<double>(std::move(values), "canonical_eigs")};
}

ScalingConstants scaling_constants_from(double p_hat, double q_hat, bool simplified) {
  if (!(p_hat > 0.0) || !(q_hat > 0.0)) {
    throw UnsupportedRegime("scaling constants need positive p and q");
  }
  ScalingConstants c;
  c.p_hat = p_hat;
  c.q_hat = q_hat;
  c.simplified = simplified;
  const double sum = p_hat + q_hat;
  const double a = std::sqrt(p_hat * (sum - 1.0));
  const double b = std::sqrt(q_hat);
  c.lambda_plus = (a + b) * (a + b) / (sum * sum);
  c.lambda_minus = (a - b) * (a - b) / (sum * sum);
  if (!(c.lambda_minus > 0.0 && c.lambda_minus < c.lambda_plus && c.lambda_plus < 1.0)) {
    throw UnsupportedRegime("scaling constants: edges outside 0 < lambda- < lambda+ < 1");
  }
  c.c1 = std::log1p(-c.lambda_plus);
  c.c2 = -std::cbrt(4.0) * std::cbrt(c.lambda_plus * c.lambda_plus) /
         (std::cbrt(1.0 - c.lambda_plus) * std::cbrt(c.lambda_plus - c.lambda_minus)) /
         std::cbrt(sum * sum);
  return c;
}

ScalingConstants scaling_constants(Index n, Index t, SimplifiedMode mode) {
  if (n < 1 || t < 1) throw InvalidInput("scaling_constants: need N, T >= 1");
  const double ratio = static_cast<double>(t) / static_cast<double>(n);
  if (!(ratio > 2.0)) {
    throw UnsupportedRegime(
        "T/N must exceed 2: for T/N <= 2 the two N-dimensional subspaces intersect and the "
        "largest canonical correlation is identically 1");
  }
  const bool simplified = mode == SimplifiedMode::kOn || (mode == SimplifiedMode::kAuto && ratio >= 6.0);
  const double shift = simplified ? 0.0 : 2.0 / static_cast<double>(n);
  return scaling_constants_from(2.0 - shift, ratio - 1.0 - shift, simplified);
}

TestOutcome decide(const EigenSpectrum& spectrum, Index n, Index t, int r, double alpha,
                   const QuantileTable& table, SimplifiedMode mode) {
  if (r < 1 || r > spectrum.size()) throw InvalidInput("decide: need 1 <= r <= N");
  if (spectrum.size() != n) throw InvalidInput("decide: spectrum length differs from N");
  TestOutcome out;
  out.r = r;
  out.alpha = alpha;
  out.critical_value = table.critical_value(r, alpha);
  out.constants = scaling_constants(n, t, mode);
  out.spectrum = spectrum;

  double raw = 0.0;
  for (int i = 0; i < r; ++i) {
    const double lam = spectrum.lambdas(i);
    if (1.0 - lam <= kUnitClampTolerance) {
      out.degenerate = true;
      raw = -std::numeric_limits<double>::infinity();
      break;
    }
    raw += std::log1p(-lam);
  }
  out.raw_stat = raw;
  const double scale = std::pow(static_cast<double>(n), -2.0 / 3.0) * out.constants.c2;
  out.standardized = out.degenerate ? std::numeric_limits<double>::infinity()
                                    : (raw - r * out.constants.c1) / scale;
  out.reject = out.standardized > out.critical_value;
  return out;
}

EigenSpectrum johansen_spectrum(const Panel& panel, const PipelineOptions& options) {
  return canonical_eigs(s_matrices(residuals(panel, options)));
}

TestOutcome run_test(const Panel& panel, int r, double alpha, const QuantileTable& table,
                     SimplifiedMode mode, const PipelineOptions& options) {
  // Look up the configuration before paying for the eigen-solve.
  (void)table.critical_value(r, alpha);
  (void)scaling_constants(panel.n(), panel.t(), mode);
  return decide(johansen_spectrum(panel, options), panel.n(), panel.t(), r, alpha, table, mode);
}

Eigen::MatrixXd cyclic_differences(const Eigen::MatrixXd& x) {
  const Index t = x.cols();
  Eigen::MatrixXd d(x.rows(), t);
  if (t > 1) d.leftCols(t - 1) = x.rightCols(t - 1) - x.leftCols(t - 1);
  d.col(t - 1) = x.col(0) - x.col(t - 1);
  return d;
}

EigenSpectrum run_wn_test(const Panel& panel) {
  panel.validate();
  const Index n = panel.n();
  const Index t = panel.t();
  if (t - 1 < 2 * n) {
    throw DegenerateSample("white-noise test needs T - 1 >= 2N");
  }
  ResidualPair res{demean_rows(cyclic_differences(panel.data)), demean_rows(panel.data)};
  return canonical_eigs(s_matrices(res));
}

}  // namespace largevar
