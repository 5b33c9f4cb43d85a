// Polynomial bases: an L2-orthonormal modal basis on the reference
// triangle (Koornwinder-Dubiner family, evaluated through singularity-free
// recurrences), and orthonormal Legendre bases on faces.

#ifndef HDGCD_BASIS_HPP
#define HDGCD_BASIS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace hdgcd {

using PointList = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Values and reference-coordinate gradients of a scalar basis at a set
/// of points; one row per basis function.
struct BasisTable {
  Eigen::MatrixXd value;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

inline int scalar_space_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// L2-orthonormal basis of P_k on the reference triangle {(0,0),(1,0),(0,1)}.
///
/// Functions are indexed by total degree d = 0..k and, within a degree,
/// by the collapsed-direction index m = d..0. The reference mass matrix is
/// the identity to machine precision for all supported degrees.
class ScalarBasis {
 public:
  explicit ScalarBasis(int degree) : degree_(degree) {
    if (degree < 0 || degree > 6)
      throw std::invalid_argument("ScalarBasis: degree out of supported range");
  }

  int degree() const { return degree_; }
  int dim() const { return scalar_space_dim(degree_); }

  /// Index of basis function (m, n); functions with m + n == d span the
  /// degree-d complement.
  int index_of(int m, int n) const { return scalar_space_dim(m + n) - (m + n + 1) + (m + n - m); }

  /// True if basis function i has total degree exactly degree().
  bool is_top_degree(int i) const { return i >= scalar_space_dim(degree_ - 1); }

  BasisTable evaluate(const PointList& pts) const {
    const int np = static_cast<int>(pts.rows());
    const int nb = dim();
    BasisTable t;
    t.value.resize(nb, np);
    t.dx.resize(nb, np);
    t.dy.resize(nb, np);

    const int k = degree_;
    // Scaled Legendre S_m in the collapsed direction and its derivatives.
    std::vector<Eigen::ArrayXd> S(k + 1), Sx(k + 1), Sy(k + 1);
    Eigen::ArrayXd x = pts.col(0).array(), y = pts.col(1).array();
    Eigen::ArrayXd u = 2.0 * x + y - 1.0;
    Eigen::ArrayXd v = 1.0 - y;
    Eigen::ArrayXd b = 2.0 * y - 1.0;
    S[0] = Eigen::ArrayXd::Ones(np);
    Sx[0] = Sy[0] = Eigen::ArrayXd::Zero(np);
    if (k >= 1) {
      S[1] = u;
      Sx[1] = Eigen::ArrayXd::Constant(np, 2.0);
      Sy[1] = Eigen::ArrayXd::Ones(np);
    }
    for (int m = 1; m < k; ++m) {
      const double c1 = 2.0 * m + 1.0, c2 = m, c3 = m + 1.0;
      S[m + 1] = (c1 * u * S[m] - c2 * v * v * S[m - 1]) / c3;
      Sx[m + 1] = (c1 * (2.0 * S[m] + u * Sx[m]) - c2 * v * v * Sx[m - 1]) / c3;
      Sy[m + 1] = (c1 * (S[m] + u * Sy[m]) - c2 * (-2.0 * v * S[m - 1] + v * v * Sy[m - 1])) / c3;
    }

    int row = 0;
    for (int d = 0; d <= k; ++d) {
      for (int m = d; m >= 0; --m, ++row) {
        const int n = d - m;
        const double alpha = 2.0 * m + 1.0;
        // Jacobi P_j^{(alpha,0)}(b) and d/db, by recurrence.
        Eigen::ArrayXd J = Eigen::ArrayXd::Ones(np), Jb = Eigen::ArrayXd::Zero(np);
        if (n >= 1) {
          Eigen::ArrayXd J1 = 0.5 * ((alpha + 2.0) * b + alpha);
          Eigen::ArrayXd J1b = Eigen::ArrayXd::Constant(np, 0.5 * (alpha + 2.0));
          Eigen::ArrayXd Jm1 = J, Jm1b = Jb;
          J = J1;
          Jb = J1b;
          for (int j = 2; j <= n; ++j) {
            const double s = 2.0 * j + alpha;
            const double a1 = 2.0 * j * (j + alpha) * (s - 2.0);
            const double a2 = s - 1.0;
            const double a3 = s * (s - 2.0);
            const double a4 = alpha * alpha;
            const double a5 = 2.0 * (j + alpha - 1.0) * (j - 1.0) * s;
            Eigen::ArrayXd Jn = (a2 * (a3 * b + a4) * J - a5 * Jm1) / a1;
            Eigen::ArrayXd Jnb = (a2 * (a3 * b + a4) * Jb + a2 * a3 * J - a5 * Jm1b) / a1;
            Jm1 = J;
            Jm1b = Jb;
            J = Jn;
            Jb = Jnb;
          }
        }
        const double nrm = std::sqrt(2.0 * (2.0 * m + 1.0) * (m + n + 1.0));
        t.value.row(row) = (nrm * S[m] * J).matrix().transpose();
        t.dx.row(row) = (nrm * Sx[m] * J).matrix().transpose();
        t.dy.row(row) = (nrm * (Sy[m] * J + 2.0 * S[m] * Jb)).matrix().transpose();
      }
    }
    return t;
  }

 private:
  int degree_;
};

/// Orthonormal Legendre basis of P_k(F) in the arclength parameter
/// s in [0,1] of a face of length |F|; <psi_i, psi_j>_F = delta_ij.
class FaceBasis {
 public:
  FaceBasis(int degree, double face_length) : degree_(degree), length_(face_length) {
    if (degree < 0) throw std::invalid_argument("FaceBasis: negative degree");
    if (!(face_length > 0.0)) throw std::invalid_argument("FaceBasis: nonpositive length");
  }

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }
  double face_length() const { return length_; }

  /// Values at parameters s in [0,1]; (k+1) x n.
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& s) const {
    const int np = static_cast<int>(s.size());
    Eigen::MatrixXd vals(degree_ + 1, np);
    Eigen::ArrayXd t = 2.0 * s.array() - 1.0;
    Eigen::ArrayXd pm1 = Eigen::ArrayXd::Ones(np), p = t;
    const double scale0 = 1.0 / std::sqrt(length_);
    vals.row(0) = (scale0 * pm1).matrix().transpose();
    if (degree_ >= 1) vals.row(1) = (std::sqrt(3.0) * scale0 * p).matrix().transpose();
    for (int n = 1; n < degree_; ++n) {
      Eigen::ArrayXd pn = ((2.0 * n + 1.0) * t * p - n * pm1) / (n + 1.0);
      pm1 = p;
      p = pn;
      vals.row(n + 1) = (std::sqrt(2.0 * (n + 1) + 1.0) * scale0 * p).matrix().transpose();
    }
    return vals;
  }

 private:
  int degree_;
  double length_;
};

}  // namespace hdgcd

#endif
