#include "largevar/varsim.hpp"

#include <cmath>
#include <random>

namespace largevar {

std::string_view to_string(ErrorDist dist) {
  switch (dist) {
    case ErrorDist::kGaussian: return "gaussian";
    case ErrorDist::kUniform01: return "uniform01";
    case ErrorDist::kUniform3Point: return "uniform-3pt";
    case ErrorDist::kGaussianProduct: return "gaussian-product";
    case ErrorDist::kCauchy: return "cauchy";
  }
  return "unknown";
}

ErrorDist parse_error_dist(std::string_view name) {
  for (auto d : {ErrorDist::kGaussian, ErrorDist::kUniform01, ErrorDist::kUniform3Point,
                 ErrorDist::kGaussianProduct, ErrorDist::kCauchy}) {
    if (to_string(d) == name) return d;
  }
  throw InvalidInput("unknown error distribution '" + std::string(name) + "'");
}

VarModelSpec VarModelSpec::random_walk(Index n, Index t) {
  VarModelSpec spec;
  spec.n = n;
  spec.t = t;
  spec.pi = Eigen::MatrixXd::Zero(n, n);
  spec.mu = Eigen::VectorXd::Zero(n);
  spec.lambda_chol = Eigen::MatrixXd::Identity(n, n);
  spec.x0 = Eigen::VectorXd::Zero(n);
  return spec;
}

void VarModelSpec::validate() const {
  if (n < 1 || t < 1) throw InvalidInput("VarModelSpec: need n >= 1 and t >= 1");
  auto square = [this](const Eigen::MatrixXd& m) { return m.rows() == n && m.cols() == n; };
  if (!square(pi)) throw InvalidInput("VarModelSpec: Pi must be n x n");
  if (gamma1 && !square(*gamma1)) throw InvalidInput("VarModelSpec: Gamma1 must be n x n");
  if (!square(lambda_chol)) throw InvalidInput("VarModelSpec: Lambda factor must be n x n");
  if (mu.size() != n || x0.size() != n) {
    throw InvalidInput("VarModelSpec: mu and X0 must have length n");
  }
  if (!lambda_chol.isLowerTriangular(0.0)) {
    throw InvalidInput("VarModelSpec: Lambda factor must be lower triangular");
  }
  if ((lambda_chol.diagonal().array() <= 0.0).any()) {
    throw InvalidInput("VarModelSpec: Lambda factor needs a strictly positive diagonal");
  }
  if (!pi.allFinite() || !mu.allFinite() || !x0.allFinite() || !lambda_chol.allFinite() ||
      (gamma1 && !gamma1->allFinite())) {
    throw InvalidInput("VarModelSpec: non-finite parameters");
  }
}

void Panel::validate() const {
  if (data.cols() < 1) throw InvalidInput("Panel: need t >= 1");
  if (x0.size() != data.rows()) throw InvalidInput("Panel: X0 length differs from n");
  if (!data.allFinite() || !x0.allFinite()) throw InvalidInput("Panel: non-finite entries");
}

Eigen::VectorXd draw_innovations(ErrorDist dist, Index n, RngStream& rng) {
  Eigen::VectorXd z(n);
  switch (dist) {
    case ErrorDist::kGaussian: {
      std::normal_distribution<double> normal;
      for (Index i = 0; i < n; ++i) z(i) = normal(rng);
      break;
    }
    case ErrorDist::kUniform01: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (Index i = 0; i < n; ++i) z(i) = unif(rng) - 0.5;
      break;
    }
    case ErrorDist::kUniform3Point: {
      std::uniform_int_distribution<int> pick(1, 3);
      for (Index i = 0; i < n; ++i) z(i) = pick(rng) - 2.0;
      break;
    }
    case ErrorDist::kGaussianProduct: {
      std::normal_distribution<double> normal;
      for (Index i = 0; i < n; ++i) {
        const double a = normal(rng);
        z(i) = a * normal(rng);
      }
      break;
    }
    case ErrorDist::kCauchy: {
      std::cauchy_distribution<double> cauchy;
      for (Index i = 0; i < n; ++i) z(i) = cauchy(rng);
      break;
    }
  }
  return z;
}

Panel simulate(const VarModelSpec& spec, RngStream& rng) {
  spec.validate();
  const Index n = spec.n;
  Panel panel;
  panel.x0 = spec.x0;
  panel.data.resize(n, spec.t);

  const auto chol = spec.lambda_chol.triangularView<Eigen::Lower>();
  const bool is_rw = spec.pi.isZero(0.0) && !spec.gamma1;
  Eigen::VectorXd prev = spec.x0;
  Eigen::VectorXd prev_delta = Eigen::VectorXd::Zero(n);  // dX_0 := 0
  Eigen::VectorXd delta(n);
  for (Index t = 0; t < spec.t; ++t) {
    delta.noalias() = chol * draw_innovations(spec.error_dist, n, rng);
    delta += spec.mu;
    if (!is_rw) {
      delta.noalias() += spec.pi * prev;
      if (spec.gamma1) delta.noalias() += *spec.gamma1 * prev_delta;
    }
    prev += delta;
    panel.data.col(t) = prev;
    prev_delta = delta;
  }
  return panel;
}

Eigen::VectorXd uniform_unit_vector(Index n, RngStream& rng) {
  if (n < 1) throw InvalidInput("uniform_unit_vector: n must be >= 1");
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  double norm = 0.0;
  do {
    for (Index i = 0; i < n; ++i) v(i) = normal(rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

Eigen::MatrixXd rank1_alternative(Index n, RngStream& rng) {
  if (n < 1) throw InvalidInput("rank1_alternative: n must be >= 1");
  Eigen::VectorXd u = uniform_unit_vector(n, rng);
  Eigen::VectorXd v = uniform_unit_vector(n, rng);
  double dot = v.dot(u);
  // Negating v maps the sphere to itself, so this keeps v uniform on the
  // half-space {v : v^T u < 0}. A zero dot product has probability zero.
  while (dot == 0.0) {
    v = uniform_unit_vector(n, rng);
    dot = v.dot(u);
  }
  if (dot > 0.0) v = -v;
  return u * v.transpose();
}

Eigen::MatrixXd sym_rank1_alternative(Index n, double lam, RngStream& rng) {
  if (!(lam >= 0.0 && lam <= 2.0)) {
    throw InvalidInput("sym_rank1_alternative: lambda must lie in [0, 2]");
  }
  Eigen::VectorXd v = uniform_unit_vector(n, rng);
  return -lam * v * v.transpose();
}

Eigen::VectorXd scaled_x0(Index n, double std0, RngStream& rng) {
  if (!(std0 >= 0.0)) throw InvalidInput("scaled_x0: std0 must be >= 0");
  if (n < 1) throw InvalidInput("scaled_x0: n must be >= 1");
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = std0 * normal(rng);
  return x;
}

}  // namespace largevar
