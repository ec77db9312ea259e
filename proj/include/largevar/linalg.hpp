#pragma once

// Dense and tridiagonal symmetric eigen-machinery plus Haar sampling.
// Everything here is templated on the scalar so the same code serves the
// real (beta = 1) and complex (beta = 2) random-matrix samplers.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <type_traits>
#include <vector>

#include "largevar/errors.hpp"
#include "largevar/rng.hpp"

namespace largevar {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

/// Tolerance under which eigenvalues of canonical-correlation problems are
/// snapped back into [0, 1]. Anything further out is a hard error.
inline constexpr double kUnitClampTolerance = 1e-9;

/// Self-adjoint matrix; only the lower triangle of the source is read.
template <typename Scalar>
class SymMatrix {
 public:
  SymMatrix() = default;

  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& source) {
    if (source.rows() != source.cols() || source.rows() < 1) {
      throw InvalidInput("SymMatrix: source must be square with n >= 1");
    }
    MatrixX<Scalar> lower = source.template triangularView<Eigen::Lower>();
    m_ = lower.template selfadjointView<Eigen::Lower>();
    // The diagonal of a Hermitian matrix is real.
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
      m_.diagonal() = m_.diagonal().real().template cast<Scalar>();
    }
  }

  Index size() const noexcept { return m_.rows(); }
  const MatrixX<Scalar>& dense() const noexcept { return m_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  bool all_finite() const { return m_.allFinite(); }

 private:
  MatrixX<Scalar> m_;
};

/// Symmetric tridiagonal matrix stored as its two nonzero diagonals.
template <typename Scalar>
struct TriDiag {
  VectorX<Scalar> diag;
  VectorX<Scalar> offdiag;  // length n - 1

  Index size() const noexcept { return diag.size(); }

  void validate() const {
    if (diag.size() < 1 || offdiag.size() != diag.size() - 1) {
      throw InvalidInput("TriDiag: need n >= 1 diagonal and n - 1 off-diagonal entries");
    }
  }

  MatrixX<Scalar> densify() const {
    validate();
    const Index n = size();
    MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n, n);
    m.diagonal() = diag;
    if (n > 1) {
      m.diagonal(1) = offdiag;
      m.diagonal(-1) = offdiag;
    }
    return m;
  }
};

/// Orthogonal (or unitary) matrix produced by haar_orthogonal.
template <typename Scalar>
class OrthogonalMatrix {
 public:
  explicit OrthogonalMatrix(MatrixX<Scalar> q) : q_(std::move(q)) {}
  Index size() const noexcept { return q_.rows(); }
  const MatrixX<Scalar>& dense() const noexcept { return q_; }

 private:
  MatrixX<Scalar> q_;
};

template <typename Scalar>
struct SymEigenDecomposition {
  VectorX<RealOf<Scalar>> values;  // descending
  MatrixX<Scalar> vectors;         // column i pairs with values(i)
};

namespace detail {

template <typename Real>
VectorX<Real> reversed(const VectorX<Real>& ascending) {
  return ascending.reverse();
}

template <typename Scalar>
void require_finite(const MatrixX<Scalar>& m, const char* who) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(who) + ": matrix has non-finite entries");
  }
}

}  // namespace detail

/// Eigenvalues of a symmetric/Hermitian matrix, largest first.
template <typename Scalar>
VectorX<RealOf<Scalar>> sym_eigs(const SymMatrix<Scalar>& m) {
  detail::require_finite(m.dense(), "sym_eigs");
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(m.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("sym_eigs: eigen solver did not converge");
  }
  return detail::reversed<RealOf<Scalar>>(solver.eigenvalues());
}

template <typename Scalar>
SymEigenDecomposition<Scalar> sym_eigen_decomposition(const SymMatrix<Scalar>& m) {
  detail::require_finite(m.dense(), "sym_eigen_decomposition");
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(m.dense(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("sym_eigen_decomposition: eigen solver did not converge");
  }
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

/// Roots of det(A - lambda B) = 0 for symmetric A and positive definite B,
/// largest first. Solved by congruence with the Cholesky factor of B.
template <typename Scalar>
VectorX<RealOf<Scalar>> gen_eigs_spd(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b) {
  if (a.size() != b.size()) {
    throw InvalidInput("gen_eigs_spd: A and B differ in size");
  }
  detail::require_finite(a.dense(), "gen_eigs_spd");
  detail::require_finite(b.dense(), "gen_eigs_spd");
  Eigen::LLT<MatrixX<Scalar>> chol(b.dense());
  if (chol.info() != Eigen::Success) {
    Eigen::LDLT<MatrixX<Scalar>> ldlt(b.dense());
    const double pivot = static_cast<double>(ldlt.vectorD().real().minCoeff());
    std::ostringstream msg;
    msg << "singular pencil: B is not positive definite (smallest LDL^T pivot " << pivot << ")";
    throw SingularPencil(msg.str(), pivot);
  }
  // C = L^{-1} A L^{-*}
  MatrixX<Scalar> y = chol.matrixL().solve(a.dense());
  MatrixX<Scalar> c = chol.matrixL().solve(y.adjoint());
  MatrixX<Scalar> sym = (c + c.adjoint()) / RealOf<Scalar>(2);
  return sym_eigs(SymMatrix<Scalar>(sym));
}

/// Matrix of i.i.d. standard Gaussians; complex entries have E|z|^2 = 1.
template <typename Scalar>
MatrixX<Scalar> gaussian_matrix(Index rows, Index cols, RngStream& rng) {
  std::normal_distribution<double> normal;
  MatrixX<Scalar> g(rows, cols);
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    const double s = std::sqrt(0.5);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) g(i, j) = Scalar(s * normal(rng), s * normal(rng));
  } else {
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) g(i, j) = Scalar(normal(rng));
  }
  return g;
}

namespace detail {

// QR of a Gaussian block with R's diagonal made positive (real) or real
// positive (complex). Returns the first `cols` columns of Q together with
// the sign of det of the full Householder product (real case only).
template <typename Scalar>
MatrixX<Scalar> haar_qr(Index rows, Index cols, RngStream& rng, int* det_sign) {
  MatrixX<Scalar> g = gaussian_matrix<Scalar>(rows, cols, rng);
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(g);
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(rows, cols);
  const auto& r = qr.matrixQR();
  int sign = 1;
  for (Index i = 0; i < cols; ++i) {
    const Scalar rii = r(i, i);
    const auto mag = std::abs(rii);
    if (mag > 0) {
      q.col(i) *= rii / mag;
      if constexpr (!Eigen::NumTraits<Scalar>::IsComplex) {
        if (rii < 0) sign = -sign;
      }
    }
  }
  if constexpr (!Eigen::NumTraits<Scalar>::IsComplex) {
    // Each nontrivial Householder reflector has determinant -1.
    const auto& tau = qr.hCoeffs();
    for (Index i = 0; i < tau.size(); ++i)
      if (tau(i) != Scalar(0)) sign = -sign;
  }
  if (det_sign) *det_sign = sign;
  return q;
}

}  // namespace detail

/// Haar-distributed element of SO(n) (real) or U(n) (complex).
template <typename Scalar = double>
OrthogonalMatrix<Scalar> haar_orthogonal(Index n, RngStream& rng) {
  if (n < 1) throw InvalidInput("haar_orthogonal: n must be >= 1");
  int det_sign = 1;
  MatrixX<Scalar> q = detail::haar_qr<Scalar>(n, n, rng, &det_sign);
  if constexpr (!Eigen::NumTraits<Scalar>::IsComplex) {
    if (det_sign < 0) q.col(0) = -q.col(0);
  }
  return OrthogonalMatrix<Scalar>(std::move(q));
}

/// First `k` columns of a Haar orthogonal/unitary n x n matrix (k < n), i.e.
/// a uniform point of the Stiefel manifold. For k < n the determinant
/// constraint of SO(n) does not affect the law of these columns.
template <typename Scalar = double>
MatrixX<Scalar> haar_columns(Index n, Index k, RngStream& rng) {
  if (k < 1 || k > n) throw InvalidInput("haar_columns: need 1 <= k <= n");
  if (k == n) return haar_orthogonal<Scalar>(n, rng).dense();
  return detail::haar_qr<Scalar>(n, k, rng, nullptr);
}

namespace detail {

// Number of eigenvalues of t strictly below x (Sturm count via LDL^T).
template <typename Real>
Index sturm_count_below(const VectorX<Real>& diag, const VectorX<Real>& off_sq, Real x, Real pivmin) {
  Index count = 0;
  Real d = diag(0) - x;
  if (std::abs(d) < pivmin) d = -pivmin;
  count += d < 0;
  for (Index i = 1; i < diag.size(); ++i) {
    d = diag(i) - x - off_sq(i - 1) / d;
    if (std::abs(d) < pivmin) d = -pivmin;
    count += d < 0;
  }
  return count;
}

// Sturm counts at kShifts points in one sweep; the independent recurrences
// overlap the division latency.
inline constexpr int kShifts = 8;

template <typename Real>
void sturm_counts_below(const VectorX<Real>& diag, const VectorX<Real>& off_sq, const Real* x, Real pivmin,
                        Index* counts) {
  Real d[kShifts];
  Index c[kShifts];
  for (int s = 0; s < kShifts; ++s) {
    d[s] = diag(0) - x[s];
    d[s] = std::abs(d[s]) < pivmin ? -pivmin : d[s];
    c[s] = d[s] < 0;
  }
  const Real* dg = diag.data();
  const Real* os = off_sq.data();
  for (Index i = 1; i < diag.size(); ++i) {
    const Real di = dg[i];
    const Real ei = os[i - 1];
    for (int s = 0; s < kShifts; ++s) {
      Real v = di - x[s] - ei / d[s];
      v = std::abs(v) < pivmin ? -pivmin : v;
      c[s] += v < 0;
      d[s] = v;
    }
  }
  for (int s = 0; s < kShifts; ++s) counts[s] = c[s];
}

}  // namespace detail

/// The k largest eigenvalues of a symmetric tridiagonal matrix by Sturm
/// multisection, largest first. `hint_lo`/`hint_hi` optionally narrow the
/// start bracket; they are checked and ignored if they do not enclose the k
/// values. `rel_tol` scales the Gershgorin bound into the absolute tolerance.
template <typename Real>
VectorX<Real> tridiag_top_eigs(const TriDiag<Real>& t, Index k, Real hint_lo = Real(0), Real hint_hi = Real(0),
                               Real rel_tol = Real(1e-10)) {
  static_assert(!Eigen::NumTraits<Real>::IsComplex, "tridiag_top_eigs is real-only");
  t.validate();
  const Index n = t.size();
  if (k < 1 || k > n) throw InvalidInput("tridiag_top_eigs: need 1 <= k <= n");
  if (!t.diag.allFinite() || !t.offdiag.allFinite()) {
    throw InvalidInput("tridiag_top_eigs: non-finite entries");
  }

  VectorX<Real> off_sq = t.offdiag.array().square();
  Real lo = std::numeric_limits<Real>::max();
  Real hi = std::numeric_limits<Real>::lowest();
  for (Index i = 0; i < n; ++i) {
    Real radius = 0;
    if (i > 0) radius += std::abs(t.offdiag(i - 1));
    if (i + 1 < n) radius += std::abs(t.offdiag(i));
    lo = std::min(lo, t.diag(i) - radius);
    hi = std::max(hi, t.diag(i) + radius);
  }
  const Real scale = std::max(std::abs(lo), std::abs(hi));
  const Real tol = rel_tol * std::max(scale, Real(1e-300));
  const Real pivmin = std::numeric_limits<Real>::min() * std::max(Real(1), off_sq.size() ? off_sq.maxCoeff() : Real(1));
  auto count_at_or_above = [&](Real x) {
    return n - detail::sturm_count_below(t.diag, off_sq, x, pivmin);
  };

  if (hint_hi > hint_lo) {
    if (count_at_or_above(hint_hi) == 0 && count_at_or_above(hint_lo) >= k) {
      lo = hint_lo;
      hi = hint_hi;
    }
  }

  // bracket j holds the (j+1)-th largest eigenvalue: count_at_or_above(lower) > j,
  // count_at_or_above(upper) <= j.
  std::vector<Real> lower(static_cast<std::size_t>(k), lo);
  std::vector<Real> upper(static_cast<std::size_t>(k), hi);
  constexpr int m = detail::kShifts;
  Real shifts[m];
  Index below[m];
  for (Index j = 0; j < k; ++j) {
    auto& l = lower[static_cast<std::size_t>(j)];
    auto& u = upper[static_cast<std::size_t>(j)];
    while (u - l > tol) {
      const Real step = (u - l) / (m + 1);
      if (!(l + step > l)) break;
      for (int s = 0; s < m; ++s) shifts[s] = l + step * (s + 1);
      detail::sturm_counts_below(t.diag, off_sq, shifts, pivmin, below);
      // Every sweep tightens all remaining brackets it carries information for.
      for (int s = 0; s < m; ++s) {
        const Index above = n - below[s];
        for (Index b = j; b < k; ++b) {
          auto& lb = lower[static_cast<std::size_t>(b)];
          auto& ub = upper[static_cast<std::size_t>(b)];
          if (above > b) {
            lb = std::max(lb, shifts[s]);
          } else {
            ub = std::min(ub, shifts[s]);
          }
        }
      }
    }
  }
  VectorX<Real> out(k);
  for (Index j = 0; j < k; ++j) {
    out(j) = lower[static_cast<std::size_t>(j)] +
             (upper[static_cast<std::size_t>(j)] - lower[static_cast<std::size_t>(j)]) / 2;
  }
  return out;
}

/// Snap values within kUnitClampTolerance of [0, 1] onto the interval.
template <typename Real>
VectorX<Real> clamp_unit_interval(VectorX<Real> values, const char* who) {
  for (Index i = 0; i < values.size(); ++i) {
    Real& v = values(i);
    if (v < Real(0)) {
      if (v < -Real(kUnitClampTolerance)) {
        std::ostringstream msg;
        msg << who << ": eigenvalue " << v << " below 0 beyond clamp tolerance";
        throw NumericalError(msg.str());
      }
      v = 0;
    } else if (v > Real(1)) {
      if (v > Real(1) + Real(kUnitClampTolerance)) {
        std::ostringstream msg;
        msg << who << ": eigenvalue " << v << " above 1 beyond clamp tolerance";
        throw NumericalError(msg.str());
      }
      v = 1;
    }
  }
  return values;
}

}  // namespace largevar
