#include "largevar/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace largevar {

namespace {

bool is_integral(double x) { return std::abs(x - std::round(x)) < 1e-9; }

template <typename Scalar>
Eigen::VectorXd cc_spectrum(Index n, Index k, Index t, RngStream& rng) {
  const MatrixX<Scalar> x = gaussian_matrix<Scalar>(n, t, rng);
  const MatrixX<Scalar> y = gaussian_matrix<Scalar>(k, t, rng);
  MatrixX<Scalar> sxx = MatrixX<Scalar>::Zero(n, n);
  MatrixX<Scalar> syy = MatrixX<Scalar>::Zero(k, k);
  sxx.template selfadjointView<Eigen::Lower>().rankUpdate(x);
  syy.template selfadjointView<Eigen::Lower>().rankUpdate(y);
  const MatrixX<Scalar> syx = y * x.adjoint();
  Eigen::LLT<MatrixX<Scalar>> chol(syy.template selfadjointView<Eigen::Lower>());
  if (chol.info() != Eigen::Success) throw NumericalError("sample_jacobi_cc: S_YY not positive definite");
  const MatrixX<Scalar> z = chol.matrixL().solve(syx);
  MatrixX<Scalar> a = MatrixX<Scalar>::Zero(n, n);
  a.template selfadjointView<Eigen::Lower>().rankUpdate(z.adjoint());
  return clamp_unit_interval<double>(gen_eigs_spd(SymMatrix<Scalar>(a), SymMatrix<Scalar>(sxx)),
                                     "sample_jacobi_cc");
}

void check_corner_dims(Index n, Index horizon, const char* who) {
  if (n < 1) throw InvalidInput(std::string(who) + ": N must be >= 1");
  if (horizon < 2 * n) {
    throw UnsupportedRegime(std::string(who) +
                            ": horizon must be >= 2N (otherwise V and its image intersect and "
                            "eigenvalues equal to 1 are deterministic)");
  }
}

template <typename Scalar>
SymMatrix<Scalar> sum_corner(Index n, Index horizon, RngStream& rng) {
  check_corner_dims(n, horizon, "sample_jacobi_sum_corner");
  const MatrixX<Scalar> o = haar_orthogonal<Scalar>(horizon, rng).dense();
  const MatrixX<Scalar> ipo = MatrixX<Scalar>::Identity(horizon, horizon) + o;
  // Only the first N columns of U = (1 + O)^{-1} enter the corner formula.
  const MatrixX<Scalar> u_cols = ipo.partialPivLu().solve(MatrixX<Scalar>::Identity(horizon, n));
  const MatrixX<Scalar> corner = u_cols.topRows(n);
  MatrixX<Scalar> gram = MatrixX<Scalar>::Zero(n, n);
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(u_cols.adjoint());
  Eigen::LLT<MatrixX<Scalar>> chol(gram.template selfadjointView<Eigen::Lower>());
  if (chol.info() != Eigen::Success) throw NumericalError("sum corner: Gram matrix not positive definite");
  const MatrixX<Scalar> w = chol.matrixL().solve(corner.adjoint());
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n, n);
  m.template selfadjointView<Eigen::Lower>().rankUpdate(w.adjoint());
  return SymMatrix<Scalar>(m);
}

template <typename Scalar>
SymMatrix<Scalar> var0_corner(Index n, Index horizon, RngStream& rng) {
  check_corner_dims(n, horizon, "sample_jacobi_var0_corner");
  const MatrixX<Scalar> cols = haar_columns<Scalar>(horizon, n, rng);
  const MatrixX<Scalar> a = cols.topRows(n);
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> k = Scalar(2) * id + a + a.adjoint();
  Eigen::LLT<MatrixX<Scalar>> chol(k);
  if (chol.info() != Eigen::Success) throw NumericalError("var0 corner: 2 + A + A* not positive definite");
  const MatrixX<Scalar> w = chol.matrixL().solve(MatrixX<Scalar>(id + a.adjoint()));
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n, n);
  m.template selfadjointView<Eigen::Lower>().rankUpdate(w.adjoint());
  return SymMatrix<Scalar>(m);
}

// Lower-triangular Bartlett factor C with C C^T ~ W_n(dof, I); dof > n - 1 real.
Eigen::MatrixXd bartlett_factor(Index n, double dof, RngStream& rng) {
  std::normal_distribution<double> normal;
  std::gamma_distribution<double> gamma;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    using Param = std::gamma_distribution<double>::param_type;
    c(i, i) = std::sqrt(gamma(rng, Param((dof - static_cast<double>(i)) / 2.0, 2.0)));
    for (Index j = 0; j < i; ++j) c(i, j) = normal(rng);
  }
  return c;
}

// Composite Simpson on [a, b] refined adaptively.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = (a + b) / 2;
  const double lm = (a + m) / 2;
  const double rm = (m + b) / 2;
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f((a + b) / 2);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

void JacobiParams::validate() const {
  if (n < 1) throw InvalidInput("JacobiParams: n must be >= 1");
  if (!(p > 0.0) || !(q > 0.0)) throw InvalidInput("JacobiParams: p and q must be positive");
  if (beta != 1 && beta != 2) throw InvalidInput("JacobiParams: beta must be 1 or 2");
}

JacobiParams jacobi_for_cointegration(Index n, Index t) {
  return {n, static_cast<double>(n) / 2.0, static_cast<double>(t - 2 * n) / 2.0, 1};
}

JacobiParams jacobi_for_white_noise(Index n, Index t) {
  return {n, static_cast<double>(t - n - 1) / 2.0, static_cast<double>(t - 2 * n) / 2.0, 1};
}

JacobiParams jacobi_for_sum_corner(Index n, Index horizon, int beta) {
  const double b = beta;
  return {n, b * static_cast<double>(n) / 2.0 + b - 1.0, b * static_cast<double>(horizon - 2 * n + 1) / 2.0,
          beta};
}

JacobiParams jacobi_for_var0_corner(Index n, Index horizon, int beta) {
  const double b = beta;
  return {n, b * static_cast<double>(horizon - n) / 2.0 + b - 1.0,
          b * static_cast<double>(horizon - 2 * n + 1) / 2.0, beta};
}

JacobiParams jacobi_for_canonical_correlations(Index n, Index k_dim, Index t_dim, int beta) {
  const double b = beta;
  return {n, b * static_cast<double>(k_dim - n + 1) / 2.0, b * static_cast<double>(t_dim - n - k_dim + 1) / 2.0,
          beta};
}

CcDims cc_dims_for(const JacobiParams& params) {
  params.validate();
  const double scale = 2.0 / params.beta;
  const double k = scale * params.p + static_cast<double>(params.n) - 1.0;
  const double t = scale * params.q + static_cast<double>(params.n) + k - 1.0;
  if (!is_integral(k) || !is_integral(t)) {
    throw InvalidInput("cc_dims_for: (p, q) has no integer (K, T) realisation");
  }
  return {static_cast<Index>(std::llround(k)), static_cast<Index>(std::llround(t))};
}

Eigen::VectorXd sample_jacobi_cc(const JacobiParams& params, Index t_dim, Index k_dim, RngStream& rng) {
  params.validate();
  const Index n = params.n;
  if (k_dim < n || n + k_dim > t_dim) {
    throw InvalidInput("sample_jacobi_cc: need N <= K and N + K <= T");
  }
  const JacobiParams implied = jacobi_for_canonical_correlations(n, k_dim, t_dim, params.beta);
  if (std::abs(implied.p - params.p) > 1e-9 || std::abs(implied.q - params.q) > 1e-9) {
    std::ostringstream msg;
    msg << "sample_jacobi_cc: (N, K, T) = (" << n << ", " << k_dim << ", " << t_dim << ") realises p = "
        << implied.p << ", q = " << implied.q << ", not the requested p = " << params.p << ", q = " << params.q;
    throw InvalidInput(msg.str());
  }
  if (params.beta == 1) return cc_spectrum<double>(n, k_dim, t_dim, rng);
  return cc_spectrum<std::complex<double>>(n, k_dim, t_dim, rng);
}

SymMatrix<double> sample_jacobi_sum_corner(Index n, Index horizon, RngStream& rng) {
  return sum_corner<double>(n, horizon, rng);
}

SymMatrix<std::complex<double>> sample_jacobi_sum_corner_complex(Index n, Index horizon, RngStream& rng) {
  return sum_corner<std::complex<double>>(n, horizon, rng);
}

SymMatrix<double> sample_jacobi_var0_corner(Index n, Index horizon, RngStream& rng) {
  return var0_corner<double>(n, horizon, rng);
}

SymMatrix<std::complex<double>> sample_jacobi_var0_corner_complex(Index n, Index horizon, RngStream& rng) {
  return var0_corner<std::complex<double>>(n, horizon, rng);
}

Eigen::VectorXd sample_jacobi_manova(const JacobiParams& params, RngStream& rng) {
  params.validate();
  if (params.beta != 1) throw InvalidInput("sample_jacobi_manova: only beta = 1 is supported");
  const Index n = params.n;
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd ca = bartlett_factor(n, 2.0 * params.p + nd - 1.0, rng);
  const Eigen::MatrixXd cb = bartlett_factor(n, 2.0 * params.q + nd - 1.0, rng);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  s.selfadjointView<Eigen::Lower>().rankUpdate(ca);
  s.selfadjointView<Eigen::Lower>().rankUpdate(cb);
  Eigen::LLT<Eigen::MatrixXd> chol(s.selfadjointView<Eigen::Lower>());
  if (chol.info() != Eigen::Success) throw NumericalError("sample_jacobi_manova: A + B not positive definite");
  Eigen::MatrixXd g = ca;
  chol.matrixL().solveInPlace(g);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.selfadjointView<Eigen::Lower>().rankUpdate(g);
  return clamp_unit_interval<double>(sym_eigs(SymMatrix<double>(m)), "sample_jacobi_manova");
}

double jacobi_log_density(const JacobiParams& params, const std::vector<double>& eigs) {
  params.validate();
  if (static_cast<Index>(eigs.size()) != params.n) {
    throw InvalidInput("jacobi_log_density: expected N eigenvalues");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const double x = eigs[i];
    if (!(x > 0.0 && x < 1.0)) return kNegInf;
    total += (params.p - 1.0) * std::log(x) + (params.q - 1.0) * std::log1p(-x);
    for (std::size_t j = i + 1; j < eigs.size(); ++j) {
      const double gap = std::abs(x - eigs[j]);
      if (gap == 0.0) return kNegInf;
      total += params.beta * std::log(gap);
    }
  }
  return total;
}

Wachter::Wachter(double p_bar, double q_bar) : p_bar_(p_bar), q_bar_(q_bar) {
  if (!(p_bar > 0.0) || !(q_bar > 0.0) || !(p_bar + q_bar > 1.0)) {
    throw InvalidInput("Wachter: need p_bar, q_bar > 0 and p_bar + q_bar > 1");
  }
  const double sum = p_bar + q_bar;
  const double a = std::sqrt(p_bar * (sum - 1.0));
  const double b = std::sqrt(q_bar);
  lambda_plus_ = (a + b) * (a + b) / (sum * sum);
  lambda_minus_ = (a - b) * (a - b) / (sum * sum);
  if (!(lambda_plus_ > lambda_minus_)) throw InvalidInput("Wachter: empty support");
  const double width = std::sqrt(lambda_plus_ - lambda_minus_);
  c_plus_ = sum / 2.0 * width / (lambda_plus_ * (1.0 - lambda_plus_));
  c_minus_ = lambda_minus_ > 0.0 ? sum / 2.0 * width / (lambda_minus_ * (1.0 - lambda_minus_))
                                  : std::numeric_limits<double>::infinity();
  edges_valid_ = p_bar > 1.0 && q_bar > 1.0;
}

double Wachter::pdf(double x) const {
  if (!(x > lambda_minus_ && x < lambda_plus_)) return 0.0;
  return (p_bar_ + q_bar_) / (2.0 * std::numbers::pi) * std::sqrt((x - lambda_minus_) * (lambda_plus_ - x)) /
         (x * (1.0 - x));
}

double Wachter::cdf(double x) const {
  if (x <= lambda_minus_) return 0.0;
  if (x >= lambda_plus_) return 1.0;
  // x(theta) = lambda_- + w (1 - cos theta)/2 removes the square-root edges.
  const double w = lambda_plus_ - lambda_minus_;
  const double scale = (p_bar_ + q_bar_) / (2.0 * std::numbers::pi) * w * w / 4.0;
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double xx = lambda_minus_ + w * (1.0 - std::cos(theta)) / 2.0;
    const double denom = xx * (1.0 - xx);
    return denom > 0.0 ? scale * s * s / denom : 0.0;
  };
  const double upper = std::acos(std::clamp(1.0 - 2.0 * (x - lambda_minus_) / w, -1.0, 1.0));
  return std::clamp(integrate(integrand, 0.0, upper, 1e-11), 0.0, 1.0);
}

Wachter wachter_for(const JacobiParams& params) {
  params.validate();
  const double scale = 2.0 / (params.beta * static_cast<double>(params.n));
  return Wachter(1.0 + scale * (params.p - 1.0), 1.0 + scale * (params.q - 1.0));
}

double standardized_top_edge(double x1, Index n, const Wachter& law) {
  return std::cbrt(static_cast<double>(n) * static_cast<double>(n) * law.c_plus() * law.c_plus()) *
         (x1 - law.lambda_plus());
}

double standardized_bottom_edge(double xn, Index n, const Wachter& law) {
  return std::cbrt(static_cast<double>(n) * static_cast<double>(n) * law.c_minus() * law.c_minus()) *
         (law.lambda_minus() - xn);
}

Index edge_window(Index model_size) {
  const double w = std::ceil(kEdgeWindowFactor * std::cbrt(static_cast<double>(model_size)));
  return std::min<Index>(model_size, static_cast<Index>(w));
}

TriDiag<double> beta_hermite_block(Index model_size, Index window, double beta, RngStream& rng) {
  if (model_size < 1 || window < 1 || window > model_size) {
    throw InvalidInput("beta_hermite_block: need 1 <= window <= model_size");
  }
  if (!(beta > 0.0)) throw InvalidInput("beta_hermite_block: beta must be positive");
  using Param = std::gamma_distribution<double>::param_type;
  std::normal_distribution<double> normal;
  std::gamma_distribution<double> gamma;
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);
  const double diag_sd = std::sqrt(2.0) * inv_sqrt_beta;
  TriDiag<double> t;
  t.diag.resize(window);
  t.offdiag.resize(window - 1);
  // Row-major generation order keeps smaller windows a prefix of larger ones.
  for (Index k = 0; k < window; ++k) {
    t.diag(k) = diag_sd * normal(rng);
    if (k + 1 < window) {
      const double dof = beta * static_cast<double>(model_size - (k + 1));
      t.offdiag(k) = std::sqrt(gamma(rng, Param(dof / 2.0, 2.0))) * inv_sqrt_beta;
    }
  }
  return t;
}

Airy1Sample airy1_sample(Index r, Index model_size, RngStream& rng, double beta, Index window) {
  if (r < 1 || r > model_size) throw InvalidInput("airy1_sample: need 1 <= r <= model_size");
  if (window <= 0) window = edge_window(model_size);
  window = std::max(window, r);
  window = std::min(window, model_size);
  const TriDiag<double> t = beta_hermite_block(model_size, window, beta, rng);
  const double n = static_cast<double>(model_size);
  const double center = 2.0 * std::sqrt(n);
  const double unit = std::pow(n, -1.0 / 6.0);
  // The top r scaled values almost surely lie well inside [-40, 25]; the
  // bracket is verified by Sturm counts before use.
  const Eigen::VectorXd mu = tridiag_top_eigs(t, r, center - 40.0 * unit, center + 25.0 * unit);
  Airy1Sample out;
  out.model_size = model_size;
  out.window = window;
  out.a = (mu.array() - center) / unit;
  return out;
}

}  // namespace largevar
