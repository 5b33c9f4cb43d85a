// Problem data: velocity fields, Dirichlet/source data, exact solutions,
// and the built-in test problems.

#ifndef HDGCD_PROBLEM_HPP
#define HDGCD_PROBLEM_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdgcd/mesh.hpp"

namespace hdgcd {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Vec2(double, double)>;

/// Velocity field with a closed-form divergence.
struct VelocityField {
  VectorField eval;
  ScalarField divergence;
  bool is_piecewise_constant = false;

  Vec2 operator()(double x, double y) const { return eval(x, y); }
};

inline VelocityField constant_velocity(const Vec2& b) {
  return VelocityField{[b](double, double) { return b; },
                       [](double, double) { return 0.0; },
                       true};
}

/// Report of the sampled admissibility checks on a velocity field:
/// nonvanishing and nonnegative effective reaction -div(beta).
struct VelocityCheck {
  bool nonvanishing = true;
  bool nonnegative_reaction = true;
  std::vector<Vec2> violations;

  bool pass() const { return nonvanishing && nonnegative_reaction; }
};

inline VelocityCheck check_velocity_field(const VelocityField& beta, int samples = 400,
                                          unsigned seed = 7u) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  VelocityCheck rep;
  for (int i = 0; i < samples; ++i) {
    const double x = unit(rng), y = unit(rng);
    if (beta(x, y).norm() <= 1e-14) {
      rep.nonvanishing = false;
      rep.violations.push_back({x, y});
    }
    if (-beta.divergence(x, y) < -1e-12) {
      rep.nonnegative_reaction = false;
      rep.violations.push_back({x, y});
    }
  }
  return rep;
}

struct ExactSolution {
  ScalarField u;
  VectorField grad_u;

  /// Flux q = -eps * grad(u).
  Vec2 flux(double x, double y, double eps) const { return -eps * grad_u(x, y); }
};

/// One instance of the model problem -eps Lap(u) + beta.grad(u) = f with
/// Dirichlet data g on the outer boundary and, optionally, on a slit.
struct ProblemSpec {
  std::string name;
  double epsilon = 1.0;
  VelocityField beta;
  ScalarField source;
  ScalarField dirichlet;
  std::optional<ExactSolution> exact;

  // present when the problem prescribes data on an interior segment
  struct SlitData {
    Vec2 from, to;
    ScalarField value;
  };
  std::optional<SlitData> slit;
};

/// Max |f(x,y) - (-eps Lap u + beta.grad u)| over random interior points,
/// with derivatives of u taken by fourth-order central differences.
/// Cross-checks a manufactured source against its exact solution.
inline double manufactured_source_mismatch(const ProblemSpec& p, int npoints = 100,
                                           unsigned seed = 123u) {
  if (!p.exact) throw std::invalid_argument("manufactured_source_mismatch: no exact solution");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> pos(0.05, 0.95);
  const double h = 2e-3;
  const auto& u = p.exact->u;
  double worst = 0.0;
  for (int i = 0; i < npoints; ++i) {
    const double x = pos(rng), y = pos(rng);
    auto d2 = [&](bool in_x) {
      auto f1 = [&](double t) { return in_x ? u(x + t, y) : u(x, y + t); };
      return (-f1(2 * h) + 16 * f1(h) - 30 * f1(0) + 16 * f1(-h) - f1(-2 * h)) / (12 * h * h);
    };
    auto d1 = [&](bool in_x) {
      auto f1 = [&](double t) { return in_x ? u(x + t, y) : u(x, y + t); };
      return (-f1(2 * h) + 8 * f1(h) - 8 * f1(-h) + f1(-2 * h)) / (12 * h);
    };
    const Vec2 b = p.beta(x, y);
    const double fd = -p.epsilon * (d2(true) + d2(false)) + b.x() * d1(true) + b.y() * d1(false);
    worst = std::max(worst, std::abs(fd - p.source(x, y)));
  }
  return worst;
}

namespace builtin {

inline ProblemSpec smooth(double eps) {
  ProblemSpec p;
  p.name = "smooth";
  p.epsilon = eps;
  p.beta = constant_velocity({1.0, 2.0});
  const double tp = 2.0 * M_PI;
  p.exact = ExactSolution{
      [tp](double x, double y) { return std::sin(tp * x) * std::sin(tp * y); },
      [tp](double x, double y) {
        return Vec2(tp * std::cos(tp * x) * std::sin(tp * y),
                    tp * std::sin(tp * x) * std::cos(tp * y));
      }};
  p.source = [tp, eps](double x, double y) {
    return 2.0 * tp * tp * eps * std::sin(tp * x) * std::sin(tp * y) +
           tp * std::cos(tp * x) * std::sin(tp * y) +
           2.0 * tp * std::sin(tp * x) * std::cos(tp * y);
  };
  p.dirichlet = p.exact->u;
  return p;
}

inline ProblemSpec rotating(double eps) {
  ProblemSpec p;
  p.name = "rotating";
  p.epsilon = eps;
  p.beta = VelocityField{[](double x, double y) { return Vec2(y - 0.5, 0.5 - x); },
                         [](double, double) { return 0.0; },
                         false};
  p.source = [](double, double) { return 0.0; };
  p.dirichlet = [](double, double) { return 0.0; };
  const double tp = 2.0 * M_PI;
  p.slit = ProblemSpec::SlitData{
      Vec2(0.5, 0.0), Vec2(0.5, 0.5),
      [tp](double, double y) { const double s = std::sin(tp * y); return s * s; }};
  return p;
}

inline ProblemSpec interior_layer(double eps) {
  ProblemSpec p;
  p.name = "interior_layer";
  p.epsilon = eps;
  p.beta = constant_velocity({0.5, 0.5 * std::sqrt(3.0)});
  p.source = [](double, double) { return 0.0; };
  p.dirichlet = [](double x, double y) {
    if (y <= 1e-12) return 1.0;                  // bottom edge
    if (x <= 1e-12 && y <= 0.2) return 1.0;      // lower part of the left edge
    return 0.0;
  };
  return p;
}

inline ProblemSpec boundary_layer(double eps) {
  ProblemSpec p;
  p.name = "boundary_layer";
  p.epsilon = eps;
  p.beta = constant_velocity({1.0, 1.0});
  const double hp = 0.5 * M_PI;
  const double A = std::exp(-1.0 / eps);  // underflows to 0 for tiny eps
  const double B = 1.0 - A;
  auto layer = [eps](double x, double y) { return std::exp(-(1.0 - x) * (1.0 - y) / eps); };
  p.exact = ExactSolution{
      [=](double x, double y) {
        const double s = std::sin(hp * x), t = std::sin(hp * y);
        return s + t * (1.0 - s) + (A - layer(x, y)) / B;
      },
      [=](double x, double y) {
        const double s = std::sin(hp * x), c = std::cos(hp * x);
        const double t = std::sin(hp * y), d = std::cos(hp * y);
        const double e = layer(x, y);
        return Vec2(hp * c * (1.0 - t) - (1.0 - y) / (eps * B) * e,
                    hp * d * (1.0 - s) - (1.0 - x) / (eps * B) * e);
      }};
  p.source = [=](double x, double y) {
    const double s = std::sin(hp * x), c = std::cos(hp * x);
    const double t = std::sin(hp * y), d = std::cos(hp * y);
    const double e = layer(x, y);
    const double lap_smooth = -hp * hp * (s * (1.0 - t) + t * (1.0 - s));
    const double lap_layer = -((1.0 - y) * (1.0 - y) + (1.0 - x) * (1.0 - x)) / (eps * eps * B) * e;
    const double ux = hp * c * (1.0 - t) - (1.0 - y) / (eps * B) * e;
    const double uy = hp * d * (1.0 - s) - (1.0 - x) / (eps * B) * e;
    return -eps * (lap_smooth + lap_layer) + ux + uy;
  };
  p.dirichlet = p.exact->u;
  return p;
}

}  // namespace builtin

/// Built-in problems by name: smooth | rotating | interior_layer | boundary_layer.
inline ProblemSpec builtin_problem(const std::string& name, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("builtin_problem: epsilon must be positive");
  if (name == "smooth") return builtin::smooth(eps);
  if (name == "rotating") return builtin::rotating(eps);
  if (name == "interior_layer") return builtin::interior_layer(eps);
  if (name == "boundary_layer") return builtin::boundary_layer(eps);
  throw std::invalid_argument("builtin_problem: unknown problem '" + name + "'");
}

/// Applies the problem's slit tag to a mesh (no-op for problems without one).
inline int apply_problem_slit(Mesh& mesh, const ProblemSpec& p) {
  if (!p.slit) return 0;
  return mark_slit_faces(mesh, p.slit->from, p.slit->to);
}

}  // namespace hdgcd

#endif
