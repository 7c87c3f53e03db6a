#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

#include "deepesn/core.hpp"

namespace deepesn {

/// Streaming normal equations for a linear readout with a bias feature.
///
/// Rows are augmented with a trailing constant 1 (x~ = [x; 1]). Only the
/// lower triangle of the Gram matrix is updated; `gram()` returns the full
/// symmetric matrix.
template <typename Scalar>
class RidgeAccumulator {
 public:
  RidgeAccumulator(Index state_dim, Index output_dim)
      : xtx_(Matrix<Scalar>::Zero(state_dim + 1, state_dim + 1)),
        xty_(Matrix<Scalar>::Zero(state_dim + 1, output_dim)) {
    require(state_dim > 0 && output_dim > 0, "RidgeAccumulator: dimensions must be positive");
  }

  Index state_dim() const { return xtx_.rows() - 1; }
  Index output_dim() const { return xty_.cols(); }
  Index count() const { return count_; }

  /// Adds one batch of (state, target) rows.
  template <typename StatesDerived, typename TargetsDerived>
  void add(const Eigen::MatrixBase<StatesDerived>& states, const Eigen::MatrixBase<TargetsDerived>& targets) {
    require(states.rows() == targets.rows(), "accumulate: state and target row counts differ");
    require(states.cols() == state_dim(), "accumulate: state width mismatch");
    require(targets.cols() == output_dim(), "accumulate: target width mismatch");
    if (states.rows() == 0) return;

    Matrix<Scalar> augmented(states.rows(), state_dim() + 1);
    augmented.leftCols(state_dim()) = states.template cast<Scalar>();
    augmented.col(state_dim()).setOnes();
    xtx_.template selfadjointView<Eigen::Lower>().rankUpdate(augmented.transpose());
    xty_.noalias() += augmented.transpose() * targets.template cast<Scalar>();
    count_ += states.rows();
  }

  /// Merges an independently built accumulator of the same shape.
  RidgeAccumulator& operator+=(const RidgeAccumulator& other) {
    require(other.state_dim() == state_dim() && other.output_dim() == output_dim(),
            "RidgeAccumulator: shape mismatch on merge");
    xtx_.template triangularView<Eigen::Lower>() += other.xtx_;
    xty_ += other.xty_;
    count_ += other.count_;
    return *this;
  }

  /// Full symmetric sum of x~ x~^T.
  Matrix<Scalar> gram() const {
    Matrix<Scalar> full = xtx_.template selfadjointView<Eigen::Lower>();
    return full;
  }

  /// Sum of x~ y^T.
  const Matrix<Scalar>& cross() const { return xty_; }

  /// Lower triangle only; the strict upper part is unspecified.
  const Matrix<Scalar>& gram_lower() const { return xtx_; }

 private:
  Matrix<Scalar> xtx_;
  Matrix<Scalar> xty_;
  Index count_ = 0;
};

template <typename Scalar, typename StatesDerived, typename TargetsDerived>
RidgeAccumulator<Scalar> accumulate(RidgeAccumulator<Scalar> acc, const Eigen::MatrixBase<StatesDerived>& states,
                                    const Eigen::MatrixBase<TargetsDerived>& targets) {
  acc.add(states, targets);
  return acc;
}

/// Linear readout y = W x + c, stored as [W | c] (N_Y x (D + 1)).
template <typename Scalar>
struct RidgeReadout {
  Matrix<Scalar> weights;
  Scalar threshold = Scalar(0.5);

  Index state_dim() const { return weights.cols() - 1; }
  Index output_dim() const { return weights.rows(); }
};

/// Closed-form ridge solution W_out^T = (X~^T X~ + lambda I)^{-1} X~^T Y.
///
/// The bias row of the system is regularized like every other row. Throws
/// NumericalError when the regularized Gram matrix is not numerically
/// positive definite (typically lambda_r = 0 on rank-deficient states).
template <typename Scalar>
RidgeReadout<Scalar> solve(const RidgeAccumulator<Scalar>& acc, Scalar lambda_r) {
  require(acc.count() > 0, "solve: accumulator is empty");
  require(lambda_r >= Scalar(0) && std::isfinite(lambda_r), "solve: lambda_r must be a nonnegative finite value");

  Matrix<Scalar> system = acc.gram_lower();
  system.diagonal().array() += lambda_r;
  Eigen::LLT<Matrix<Scalar>, Eigen::Lower> llt(system);
  const Scalar min_rcond = Scalar(16) * std::numeric_limits<Scalar>::epsilon() * static_cast<Scalar>(system.rows());
  if (llt.info() != Eigen::Success || !(llt.rcond() > min_rcond)) {
    throw NumericalError(lambda_r == Scalar(0)
                             ? "solve: normal equations are singular at lambda_r = 0; use lambda_r > 0"
                             : "solve: regularized normal equations are not positive definite");
  }
  RidgeReadout<Scalar> readout;
  readout.weights = llt.solve(acc.cross()).transpose();
  if (!readout.weights.allFinite()) throw NumericalError("solve: non-finite readout weights");
  return readout;
}

/// Affine readout of each state row.
template <typename Scalar, typename Derived>
RowMatrix<Scalar> predict(const RidgeReadout<Scalar>& readout, const Eigen::MatrixBase<Derived>& states) {
  require(states.cols() == readout.state_dim(), "predict: state width mismatch");
  const Index d = readout.state_dim();
  RowMatrix<Scalar> out = states.template cast<Scalar>() * readout.weights.leftCols(d).transpose();
  out.rowwise() += readout.weights.col(d).transpose();
  return out;
}

/// Note on iff output >= threshold.
template <typename Derived>
NoteMatrix binarize(const Eigen::MatrixBase<Derived>& outputs, typename Derived::Scalar threshold) {
  return (outputs.array() >= threshold).template cast<std::uint8_t>().matrix();
}

}  // namespace deepesn
