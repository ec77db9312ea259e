#pragma once

// Random-matrix side: Jacobi ensembles and their matrix models, the Wachter
// equilibrium law, and Airy_1 edge samples from the tridiagonal
// beta-Hermite model.

#include <vector>

#include <Eigen/Dense>

#include "largevar/linalg.hpp"
#include "largevar/rng.hpp"

namespace largevar {

/// J(N; p, q): density proportional to det(M)^{p-1} det(1-M)^{q-1} on
/// 0 < M < 1; eigenvalue density prod |x_i - x_j|^beta prod x^{p-1}(1-x)^{q-1}.
struct JacobiParams {
  Index n = 1;
  double p = 1;
  double q = 1;
  int beta = 1;

  void validate() const;
  bool operator==(const JacobiParams&) const = default;
};

// ---- parameter maps (the only place where dimension bookkeeping lives) ----

/// Horizon of the orthogonal-group models for a panel with T observations.
inline Index horizon_from_time(Index t) { return t - 1; }
inline Index time_from_horizon(Index horizon) { return horizon + 1; }

/// Law coupled to the Johansen spectrum under Pi = 0: J(N; N/2, (T-2N)/2).
JacobiParams jacobi_for_cointegration(Index n, Index t);
/// Law coupled to the white-noise spectrum: J(N; (T-N-1)/2, (T-2N)/2).
JacobiParams jacobi_for_white_noise(Index n, Index t);
/// Law of the (1 + O)^{-1} corner model on a horizon of size `horizon`.
JacobiParams jacobi_for_sum_corner(Index n, Index horizon, int beta = 1);
/// Law of the (1 + A)(2 + A + A*)^{-1}(1 + A*) corner model.
JacobiParams jacobi_for_var0_corner(Index n, Index horizon, int beta = 1);
/// Squared canonical correlations of independent Gaussian N x T and K x T data.
JacobiParams jacobi_for_canonical_correlations(Index n, Index k_dim, Index t_dim, int beta = 1);

struct CcDims {
  Index k_dim = 0;
  Index t_dim = 0;
};
/// Inverse of jacobi_for_canonical_correlations; throws if (p, q) has no
/// integer realisation.
CcDims cc_dims_for(const JacobiParams& params);

// ---- samplers ----

/// Squared sample canonical correlations of independent Gaussian blocks.
Eigen::VectorXd sample_jacobi_cc(const JacobiParams& params, Index t_dim, Index k_dim, RngStream& rng);

/// M = [U]_NN ([U*U]_NN)^{-1} [U*]_NN with U = (1 + O)^{-1}, O Haar.
SymMatrix<double> sample_jacobi_sum_corner(Index n, Index horizon, RngStream& rng);
SymMatrix<std::complex<double>> sample_jacobi_sum_corner_complex(Index n, Index horizon, RngStream& rng);

/// M = (1 + A)(2 + A + A*)^{-1}(1 + A*) with A the N x N corner of Haar O.
SymMatrix<double> sample_jacobi_var0_corner(Index n, Index horizon, RngStream& rng);
SymMatrix<std::complex<double>> sample_jacobi_var0_corner_complex(Index n, Index horizon, RngStream& rng);

/// Eigenvalues of a corner-model matrix (descending, clamped into [0, 1]).
template <typename Scalar>
Eigen::VectorXd jacobi_eigs(const SymMatrix<Scalar>& m) {
  return clamp_unit_interval<double>(sym_eigs(m), "jacobi_eigs");
}

/// Eigenvalues of J(N; p, q), beta = 1, for real p, q > 0 via two Bartlett
/// Wishart factors: eig of A (A + B)^{-1} with A ~ W_N(2p + N - 1),
/// B ~ W_N(2q + N - 1). O(N^3) per draw with no T-sized intermediates.
Eigen::VectorXd sample_jacobi_manova(const JacobiParams& params, RngStream& rng);

/// log of prod_{i<j} |x_i - x_j|^beta prod x_i^{p-1} (1 - x_i)^{q-1}; -inf
/// if any x_i lies outside (0, 1).
double jacobi_log_density(const JacobiParams& params, const std::vector<double>& eigs);

// ---- Wachter law ----

class Wachter {
 public:
  Wachter(double p_bar, double q_bar);

  double p_bar() const noexcept { return p_bar_; }
  double q_bar() const noexcept { return q_bar_; }
  double lambda_plus() const noexcept { return lambda_plus_; }
  double lambda_minus() const noexcept { return lambda_minus_; }
  double c_plus() const noexcept { return c_plus_; }
  double c_minus() const noexcept { return c_minus_; }
  /// False when p_bar or q_bar is <= 1: the soft-edge constants are then
  /// not meaningful, though pdf/cdf are still served.
  bool edge_constants_valid() const noexcept { return edges_valid_; }

  double pdf(double x) const;
  /// Adaptive quadrature of pdf, absolute tolerance 1e-8 or better.
  double cdf(double x) const;

 private:
  double p_bar_, q_bar_;
  double lambda_plus_, lambda_minus_;
  double c_plus_, c_minus_;
  bool edges_valid_;
};

/// (p_bar, q_bar) of the equilibrium law of J(N; p, q):
/// p_bar = 1 + 2(p - 1)/(beta N), q_bar likewise.
Wachter wachter_for(const JacobiParams& params);

/// Largest-edge fluctuation N^{2/3} c_+^{2/3} (x_1 - lambda_+).
double standardized_top_edge(double x1, Index n, const Wachter& law);
/// Smallest-edge fluctuation N^{2/3} c_-^{2/3} (lambda_- - x_N).
double standardized_bottom_edge(double xn, Index n, const Wachter& law);

// ---- Airy_1 edge ----

struct Airy1Sample {
  Eigen::VectorXd a;  // a_1 > a_2 > ... > a_r
  Index model_size = 0;
  Index window = 0;   // leading rows of the tridiagonal model actually simulated
};

/// Rows of the beta-Hermite model that carry the top-edge eigenvectors: the
/// edge eigenvectors decay like Airy functions on the scale n^{1/3}, so
/// rows beyond kEdgeWindowFactor * n^{1/3} change the top eigenvalues by far
/// less than the bisection tolerance.
inline constexpr double kEdgeWindowFactor = 24.0;
Index edge_window(Index model_size);

/// Leading `window` x `window` block of the beta-Hermite tridiagonal model
/// of size `model_size`: diagonal N(0, 2)/sqrt(beta), off-diagonal k
/// distributed as chi_{beta (n - k)}/sqrt(beta).
TriDiag<double> beta_hermite_block(Index model_size, Index window, double beta, RngStream& rng);

/// n^{1/6}(mu_i - 2 sqrt(n)) for the r largest eigenvalues mu_i.
Airy1Sample airy1_sample(Index r, Index model_size, RngStream& rng, double beta = 1.0, Index window = 0);

}  // namespace largevar
