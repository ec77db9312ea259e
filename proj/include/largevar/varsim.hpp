#pragma once

// Data-generating processes: VAR(1) in error-correction form, the rank-1
// VAR(2) robustness variant, non-Gaussian innovations and the random
// alternatives used in power studies.

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "largevar/linalg.hpp"
#include "largevar/rng.hpp"

namespace largevar {

enum class ErrorDist {
  kGaussian,
  kUniform01,        // U[0, 1] minus 1/2
  kUniform3Point,    // uniform on {1, 2, 3} minus 2
  kGaussianProduct,  // product of two independent N(0, 1)
  kCauchy,
};

std::string_view to_string(ErrorDist dist);
ErrorDist parse_error_dist(std::string_view name);

/// Description of
///   dX_t = Gamma1 dX_{t-1} + Pi X_{t-1} + mu + eps_t,  eps_t = L z_t,
/// with z_t i.i.d. coordinates drawn from `error_dist` (centered).
struct VarModelSpec {
  Index n = 0;
  Index t = 0;
  Eigen::MatrixXd pi;
  std::optional<Eigen::MatrixXd> gamma1;
  Eigen::VectorXd mu;
  Eigen::MatrixXd lambda_chol;  // lower triangular, positive diagonal
  Eigen::VectorXd x0;
  ErrorDist error_dist = ErrorDist::kGaussian;

  /// Pi = 0, mu = 0, identity covariance, X_0 = 0.
  static VarModelSpec random_walk(Index n, Index t);

  void validate() const;
};

/// Observations X_1..X_T as columns plus the initial condition X_0.
struct Panel {
  Eigen::VectorXd x0;
  Eigen::MatrixXd data;  // n x t, column tau - 1 holds X_tau

  Index n() const noexcept { return data.rows(); }
  Index t() const noexcept { return data.cols(); }

  void validate() const;
};

/// Draw a length-n vector of centered innovations z (before applying L).
Eigen::VectorXd draw_innovations(ErrorDist dist, Index n, RngStream& rng);

Panel simulate(const VarModelSpec& spec, RngStream& rng);

/// Pi = u v^T with u, v independent uniform unit vectors and v^T u < 0.
Eigen::MatrixXd rank1_alternative(Index n, RngStream& rng);

/// Pi = -lam v v^T with v uniform on the unit sphere, lam in [0, 2].
Eigen::MatrixXd sym_rank1_alternative(Index n, double lam, RngStream& rng);

/// X_0 with i.i.d. std0 * N(0, 1) coordinates.
Eigen::VectorXd scaled_x0(Index n, double std0, RngStream& rng);

/// Uniform point on the unit sphere in R^n.
Eigen::VectorXd uniform_unit_vector(Index n, RngStream& rng);

}  // namespace largevar
