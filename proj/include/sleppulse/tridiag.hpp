#pragma once

#include <Eigen/Core>

namespace sleppulse {

// Thomas algorithm. sub(i) couples row i to i-1 (sub(0) unused), sup(i) couples
// row i to i+1 (sup(n-1) unused). No pivoting: callers pass diagonally dominant systems.
template <typename Scalar>
void solve_tridiagonal(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& sub,
                       const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& diag,
                       const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& sup,
                       Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> rhs) {
  const Eigen::Index n = diag.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(n);
  Scalar beta = diag(0);
  rhs(0) /= beta;
  for (Eigen::Index i = 1; i < n; ++i) {
    c(i - 1) = sup(i - 1) / beta;
    beta = diag(i) - sub(i) * c(i - 1);
    rhs(i) = (rhs(i) - sub(i) * rhs(i - 1)) / beta;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs(i) -= c(i) * rhs(i + 1);
}

// Constant-coefficient factorisation reused across many right-hand sides.
class TridiagonalFactor {
 public:
  TridiagonalFactor() = default;
  TridiagonalFactor(const Eigen::VectorXd& sub, const Eigen::VectorXd& diag, const Eigen::VectorXd& sup)
      : sub_(sub), c_(diag.size()), inv_(diag.size()) {
    const Eigen::Index n = diag.size();
    double beta = diag(0);
    inv_(0) = 1.0 / beta;
    for (Eigen::Index i = 1; i < n; ++i) {
      c_(i - 1) = sup(i - 1) * inv_(i - 1);
      beta = diag(i) - sub(i) * c_(i - 1);
      inv_(i) = 1.0 / beta;
    }
  }

  void solve(Eigen::Ref<Eigen::VectorXd> rhs) const {
    const Eigen::Index n = inv_.size();
    rhs(0) *= inv_(0);
    for (Eigen::Index i = 1; i < n; ++i) rhs(i) = (rhs(i) - sub_(i) * rhs(i - 1)) * inv_(i);
    for (Eigen::Index i = n - 2; i >= 0; --i) rhs(i) -= c_(i) * rhs(i + 1);
  }

  Eigen::Index size() const { return inv_.size(); }

 private:
  Eigen::VectorXd sub_;
  Eigen::VectorXd c_;
  Eigen::VectorXd inv_;
};

}  // namespace sleppulse
