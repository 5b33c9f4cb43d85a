// Gauss rules on the reference interval and triangle.
//
// Triangle rules are built from a Duffy-type collapse of the unit square:
// a Gauss-Legendre rule in the first direction and a Gauss-Jacobi(1,0)
// rule absorbing the collapse weight in the second. This yields rules
// that are exact for any requested total degree without tabulation.

#ifndef HDGCD_QUADRATURE_HPP
#define HDGCD_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace hdgcd {

/// Nodes/weights for a 1D rule on [0,1].
struct EdgeRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  int exactness = 0;  // exact for polynomials up to this degree

  int size() const { return static_cast<int>(points.size()); }
};

/// Nodes/weights on the reference triangle {(0,0),(1,0),(0,1)}.
struct TriangleRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int exactness = 0;

  int size() const { return static_cast<int>(points.rows()); }
};

namespace detail {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1,1].
inline void gauss_jacobi(int n, double alpha, double beta,
                         Eigen::VectorXd& x, Eigen::VectorXd& w) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  auto diag = [&](int k) -> double {
    const double s = 2.0 * k + alpha + beta;
    if (k == 0) return (beta - alpha) / (alpha + beta + 2.0);
    return (beta * beta - alpha * alpha) / (s * (s + 2.0));
  };
  auto offdiag = [&](int k) -> double {  // b_k for k >= 1
    const double s = 2.0 * k + alpha + beta;
    if (k == 1)
      return std::sqrt(4.0 * (1.0 + alpha) * (1.0 + beta) /
                       ((2.0 + alpha + beta) * (2.0 + alpha + beta) * (3.0 + alpha + beta)));
    return std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta) /
                     (s * s * (s + 1.0) * (s - 1.0)));
  };
  for (int k = 0; k < n; ++k) {
    J(k, k) = diag(k);
    if (k + 1 < n) J(k, k + 1) = J(k + 1, k) = offdiag(k + 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, alpha + beta + 1.0) *
                     std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(alpha + beta + 2.0);
  x = es.eigenvalues();
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    const double q0 = es.eigenvectors()(0, k);
    w(k) = mu0 * q0 * q0;
  }
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [0,1]; exact for degree <= 2n-1.
inline EdgeRule edge_gauss(int n) {
  Eigen::VectorXd x, w;
  detail::gauss_jacobi(n, 0.0, 0.0, x, w);
  EdgeRule r;
  r.points = 0.5 * (x.array() + 1.0);
  r.weights = 0.5 * w;
  r.exactness = 2 * n - 1;
  return r;
}

inline constexpr int kMaxTriangleDegree = 20;

/// Rule exact for all polynomials of total degree <= degree on the
/// reference triangle. Supported up to degree 20.
inline TriangleRule triangle_quadrature(int degree) {
  if (degree < 0 || degree > kMaxTriangleDegree)
    throw std::invalid_argument("triangle_quadrature: unsupported degree");
  const int m = degree / 2 + 1;
  EdgeRule gl = edge_gauss(m);
  Eigen::VectorXd xj, wj;
  detail::gauss_jacobi(m, 1.0, 0.0, xj, wj);  // weight (1-x) on [-1,1]
  // map to [0,1] with weight (1-b): total mass 1/2
  Eigen::VectorXd b = 0.5 * (xj.array() + 1.0);
  Eigen::VectorXd wb = 0.25 * wj;

  TriangleRule r;
  r.points.resize(m * m, 2);
  r.weights.resize(m * m);
  int idx = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j, ++idx) {
      r.points(idx, 0) = gl.points(i) * (1.0 - b(j));
      r.points(idx, 1) = b(j);
      r.weights(idx) = gl.weights(i) * wb(j);
    }
  r.exactness = degree;
  return r;
}

/// Exact value of the monomial integral over the reference triangle,
/// int x^a y^b = a! b! / (a+b+2)!.
inline double reference_monomial_integral(int a, int b) {
  double val = 1.0;
  // a! b! / (a+b+2)! computed as a stable product
  for (int i = 1; i <= a + b + 2; ++i) {
    val /= i;
    if (i <= a) val *= i;
  }
  for (int i = 1; i <= b; ++i) val *= i;
  return val;
}

}  // namespace hdgcd

#endif
