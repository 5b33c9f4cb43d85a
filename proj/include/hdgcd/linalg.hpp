// Linear algebra kernels used across the solver: dense/sparse LU solves
// and 2-norm condition number estimation for the trace matrix.

#ifndef HDGCD_LINALG_HPP
#define HDGCD_LINALG_HPP

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace hdgcd::linalg {

using DenseMatrix = Eigen::MatrixXd;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SparseColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Dense LU solve with partial pivoting. Throws on (near-)singular input.
inline Eigen::VectorXd lu_solve(const DenseMatrix& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("lu_solve: dimension mismatch");
  Eigen::PartialPivLU<DenseMatrix> lu(A);
  const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  const double scale = A.cwiseAbs().maxCoeff();
  if (!(pivot_min > 1e-14 * scale))
    throw std::runtime_error("lu_solve: matrix is singular to working precision");
  return lu.solve(b);
}

/// Sparse LU factorization (COLAMD ordering) with solves against A and A^T.
class SparseLUSolver {
 public:
  explicit SparseLUSolver(const SparseRowMatrix& A) : n_(static_cast<int>(A.rows())) {
    SparseColMatrix Ac = A;
    Ac.makeCompressed();
    lu_.compute(Ac);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("SparseLUSolver: factorization failed (singular matrix?)");
  }

  int size() const { return n_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return lu_.solve(b); }
  // Eigen's transposed-solve view is non-const
  Eigen::VectorXd solve_transposed(const Eigen::VectorXd& b) { return lu_.transpose().solve(b); }

 private:
  int n_;
  Eigen::SparseLU<SparseColMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

/// Sparse direct solve with one step of iterative refinement.
inline Eigen::VectorXd lu_solve(const SparseRowMatrix& A, const Eigen::VectorXd& b) {
  SparseLUSolver lu(A);
  Eigen::VectorXd x = lu.solve(b);
  x += lu.solve(b - A * x);
  return x;
}

struct ConditionEstimate {
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  bool converged = true;   // false when an iterative estimate hit its cap
  bool singular = false;   // kappa = +inf signal

  static ConditionEstimate singular_signal() {
    ConditionEstimate c;
    c.kappa = std::numeric_limits<double>::infinity();
    c.singular = true;
    return c;
  }
};

inline constexpr int kDenseConditionLimit = 2000;

/// 2-norm condition number sigma_max / sigma_min of a dense matrix.
inline ConditionEstimate cond2(const DenseMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("cond2: matrix must be square");
  Eigen::BDCSVD<DenseMatrix> svd(A);
  ConditionEstimate c;
  c.sigma_max = svd.singularValues()(0);
  c.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(c.sigma_min > 0.0)) return ConditionEstimate::singular_signal();
  c.kappa = c.sigma_max / c.sigma_min;
  return c;
}

/// 2-norm condition number of a sparse matrix. Small systems go through a
/// dense SVD; larger ones use power iteration on A^T A for sigma_max and
/// inverse power iteration with the LU factors for sigma_min.
inline ConditionEstimate cond2(const SparseRowMatrix& A, double tol = 1e-6,
                               int max_iterations = 5000, unsigned seed = 20240u) {
  if (A.rows() != A.cols()) throw std::invalid_argument("cond2: matrix must be square");
  const int n = static_cast<int>(A.rows());
  if (n <= kDenseConditionLimit) return cond2(DenseMatrix(A));

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    return v.normalized().eval();
  };

  ConditionEstimate c;
  {
    Eigen::VectorXd x = random_vector();
    double prev = 0.0;
    c.converged = false;
    for (int it = 0; it < max_iterations; ++it) {
      Eigen::VectorXd y = A.transpose() * (A * x);
      const double norm = y.norm();
      const double sigma = std::sqrt(norm);
      x = y / norm;
      if (it > 10 && std::abs(sigma - prev) <= tol * sigma) {
        c.converged = true;
        prev = sigma;
        break;
      }
      prev = sigma;
    }
    c.sigma_max = prev;
  }
  try {
    SparseLUSolver lu(A);
    Eigen::VectorXd x = random_vector();
    double prev = 0.0;
    bool ok = false;
    for (int it = 0; it < max_iterations; ++it) {
      Eigen::VectorXd y = lu.solve(lu.solve_transposed(x));
      const double norm = y.norm();
      const double inv_sigma = std::sqrt(norm);
      x = y / norm;
      if (it > 10 && std::abs(inv_sigma - prev) <= tol * inv_sigma) {
        ok = true;
        prev = inv_sigma;
        break;
      }
      prev = inv_sigma;
    }
    c.converged = c.converged && ok;
    c.sigma_min = 1.0 / prev;
  } catch (const std::runtime_error&) {
    return ConditionEstimate::singular_signal();
  }
  c.kappa = c.sigma_max / c.sigma_min;
  return c;
}

}  // namespace hdgcd::linalg

#endif
