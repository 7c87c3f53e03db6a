#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "deepesn/core.hpp"
#include "deepesn/random.hpp"

namespace deepesn {

struct SpectralOptions {
  /// Iterations per attempt.
  int max_iterations = 1000;
  /// Additional attempts after the first, each seeded with a fresh random
  /// perturbation of the last iterate.
  int restarts = 5;
  /// Relative residual of the Ritz fit that counts as converged.
  double tolerance = 1e-9;
  /// Square matrices up to this size go straight to a dense eigensolver.
  Index dense_threshold = 64;
  /// Use a dense decomposition when the iteration does not converge.
  bool dense_fallback = true;
  std::uint64_t seed = 0x243f6a8885a308d3ULL;
};

namespace detail {

/// Largest eigenvalue modulus of the operator `apply`, by power iteration.
///
/// Each step fits the newest iterate against the two previous ones. A
/// one-term fit resolves a dominant real eigenvalue; a two-term fit resolves
/// a dominant complex-conjugate pair (or a +/- real pair), where the plain
/// Rayleigh quotient never settles. Returns nullopt when no fit reaches the
/// tolerance within the iteration budget. `warm`, when non-null and sized
/// `n`, seeds the first attempt and receives the last iterate.
template <typename Scalar, typename Apply>
std::optional<Scalar> power_modulus(Apply&& apply, Index n, const SpectralOptions& opts,
                                    Vector<Scalar>* warm = nullptr) {
  using Real = Scalar;
  Rng rng(opts.seed);
  const Real tol = static_cast<Real>(opts.tolerance);

  Vector<Scalar> cur = (warm != nullptr && warm->size() == n && warm->norm() > Real(0))
                           ? Vector<Scalar>(*warm)
                           : rng.symmetric_vector<Scalar>(n);
  Vector<Scalar> prev(n), w(n);

  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    if (attempt > 0) {
      Vector<Scalar> kick = rng.symmetric_vector<Scalar>(n);
      cur += Real(1e-2) * kick.normalized();
    }
    if (cur.norm() == Real(0)) cur = rng.symmetric_vector<Scalar>(n);
    cur.normalize();

    w = apply(cur);
    Real scale = w.norm();
    if (scale == Real(0)) {
      // A random vector mapped to zero: retry from a fresh draw once; two
      // independent annihilated draws mean the operator is zero on a
      // generic subspace, i.e. nilpotent, and the radius is 0.
      cur = rng.symmetric_vector<Scalar>(n).normalized();
      w = apply(cur);
      scale = w.norm();
      if (scale == Real(0)) return Real(0);
    }
    prev = cur;
    cur = w / scale;

    for (int it = 0; it < opts.max_iterations; ++it) {
      w = apply(cur);
      const Real wn = w.norm();
      if (wn == Real(0)) return Real(0);

      const Real rq = cur.dot(w);
      const Real res_real = (w - rq * cur).norm() / wn;
      if (res_real <= tol) {
        if (warm != nullptr) *warm = cur;
        return std::abs(rq);
      }

      // Two-term fit w = c0 * cur + c1 * prev via the 2x2 normal equations.
      const Real cp = cur.dot(prev);
      const Real pp = prev.squaredNorm();
      const Real det = pp - cp * cp;
      if (det > Real(1e-10) * pp) {
        const Real rc = rq;
        const Real rp = prev.dot(w);
        const Real c0 = (pp * rc - cp * rp) / det;
        const Real c1 = (rp - cp * rc) / det;
        const Real res_pair = (w - c0 * cur - c1 * prev).norm() / wn;
        if (res_pair <= tol) {
          // A * prev = scale * cur, so on the invariant plane
          // A^2 = p * A + q * I with p = c0, q = c1 * scale.
          const Real p = c0;
          const Real q = c1 * scale;
          const Real disc = p * p + Real(4) * q;
          Real modulus;
          if (disc < Real(0)) {
            modulus = std::sqrt(-q);
          } else {
            const Real root = std::sqrt(disc);
            modulus = std::max(std::abs(p + root), std::abs(p - root)) / Real(2);
          }
          if (warm != nullptr) *warm = cur;
          return modulus;
        }
      }

      prev = cur;
      scale = wn;
      cur = w / wn;
    }
  }
  if (warm != nullptr) *warm = cur;
  return std::nullopt;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
bool all_finite(const Eigen::SparseMatrixBase<Derived>& m) {
  for (Index k = 0; k < m.outerSize(); ++k)
    for (typename Derived::InnerIterator it(m.derived(), k); it; ++it)
      if (!std::isfinite(it.value())) return false;
  return true;
}

template <typename Scalar>
Scalar dense_spectral_radius(const Matrix<Scalar>& m) {
  if (m.rows() == 0) return Scalar(0);
  Eigen::EigenSolver<Matrix<Scalar>> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar dense_operator_norm(const Matrix<Scalar>& m) {
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  return svd.singularValues()(0);
}

}  // namespace detail

/// Spectral radius of the square operator `apply` of dimension `n`.
///
/// `densify` materializes the operator for the dense path; it is called only
/// for small `n` or after the iteration fails to converge.
template <typename Scalar, typename Apply, typename Densify>
Scalar spectral_radius_of(Apply&& apply, Densify&& densify, Index n,
                          const SpectralOptions& opts = {}, Vector<Scalar>* warm = nullptr) {
  if (n == 0) return Scalar(0);
  if (n <= opts.dense_threshold) return detail::dense_spectral_radius<Scalar>(densify());
  if (auto estimate = detail::power_modulus<Scalar>(apply, n, opts, warm)) return *estimate;
  if (!opts.dense_fallback)
    throw NumericalError("spectral radius: power iteration did not converge after restarts");
  return detail::dense_spectral_radius<Scalar>(densify());
}

/// Largest eigenvalue modulus of a dense square matrix.
template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& m,
                                         const SpectralOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  require(m.rows() == m.cols(), "spectral_radius: matrix must be square");
  require(m.allFinite(), "spectral_radius: matrix has non-finite entries");
  const Matrix<Scalar> dense = m;
  return spectral_radius_of<Scalar>([&](const Vector<Scalar>& x) -> Vector<Scalar> { return dense * x; },
                                    [&]() { return dense; }, dense.rows(), opts);
}

/// Largest eigenvalue modulus of a sparse square matrix; iterates on the
/// compressed form and only densifies on the fallback path.
template <typename Scalar, int Options, typename StorageIndex>
Scalar spectral_radius(const Eigen::SparseMatrix<Scalar, Options, StorageIndex>& m,
                       const SpectralOptions& opts = {}) {
  require(m.rows() == m.cols(), "spectral_radius: matrix must be square");
  require(detail::all_finite(m), "spectral_radius: matrix has non-finite entries");
  return spectral_radius_of<Scalar>([&](const Vector<Scalar>& x) -> Vector<Scalar> { return m * x; },
                                    [&]() { return Matrix<Scalar>(m); }, m.rows(), opts);
}

/// Largest singular value (operator 2-norm), by power iteration on M^T M.
template <typename MatrixType>
typename MatrixType::Scalar operator_norm(const MatrixType& m, const SpectralOptions& opts = {}) {
  using Scalar = typename MatrixType::Scalar;
  const Index n = m.cols();
  if (m.rows() == 0 || n == 0) return Scalar(0);
  require(detail::all_finite(m), "operator_norm: matrix has non-finite entries");
  if (std::min(m.rows(), n) <= opts.dense_threshold)
    return detail::dense_operator_norm<Scalar>(Matrix<Scalar>(m));

  // M^T M is symmetric positive semidefinite, so the one-term fit suffices.
  Rng rng(opts.seed);
  const Scalar tol = static_cast<Scalar>(opts.tolerance);
  Vector<Scalar> v = rng.symmetric_vector<Scalar>(n).normalized();
  Vector<Scalar> mv(m.rows()), w(n);
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    if (attempt > 0) {
      v += Scalar(1e-2) * rng.symmetric_vector<Scalar>(n).normalized();
      v.normalize();
    }
    for (int it = 0; it < opts.max_iterations; ++it) {
      mv.noalias() = m * v;
      w.noalias() = m.transpose() * mv;
      const Scalar wn = w.norm();
      if (wn == Scalar(0)) {
        if (attempt == 0 && it == 0) return Scalar(0);
        break;
      }
      const Scalar rq = v.dot(w);
      if ((w - rq * v).norm() / wn <= tol) return std::sqrt(std::max(rq, Scalar(0)));
      v = w / wn;
    }
  }
  if (!opts.dense_fallback)
    throw NumericalError("operator_norm: power iteration did not converge after restarts");
  return detail::dense_operator_norm<Scalar>(Matrix<Scalar>(m));
}

}  // namespace deepesn
