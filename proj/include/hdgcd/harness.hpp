// End-to-end experiment driver: named method presets, convergence and
// conditioning tables as CSV artifacts, field exports, and the aggregated
// consistency-check suite. All runs are deterministic: fixed element and
// reduction order, fixed output formatting.

#ifndef HDGCD_HARNESS_HPP
#define HDGCD_HARNESS_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdgcd/errors.hpp"
#include "hdgcd/expression.hpp"
#include "hdgcd/mesh_check.hpp"
#include "hdgcd/mesh_io.hpp"
#include "hdgcd/mhdg.hpp"
#include "hdgcd/postprocess.hpp"
#include "hdgcd/problem.hpp"
#include "hdgcd/streamline.hpp"
#include "hdgcd/trace_system.hpp"
#include "hdgcd/version.hpp"

namespace hdgcd {

struct CustomProblemConfig {
  std::string beta_x, beta_y;
  std::string div_beta = "0";
  std::string source = "0";
  std::string dirichlet = "0";
  std::optional<std::string> exact_u;
  std::optional<std::string> exact_dux, exact_duy;
};

struct RunConfig {
  std::string problem = "smooth";
  std::vector<double> epsilons{1.0};
  std::vector<int> degrees{1};
  std::vector<int> levels{5, 10, 20, 40};
  std::vector<std::string> methods{"HDG1"};
  std::string scaling = "scaled";
  std::string tau2_length = "h_K";  // or "h_F"
  double tau2_rho0 = 0.1;
  bool postprocess = false;
  bool reduced_domain = false;  // errors over [0, 0.9]^2
  std::string out_dir = "out";
  std::optional<CustomProblemConfig> custom;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("problem")) c.problem = j["problem"].get<std::string>();
  if (j.contains("epsilon")) c.epsilons = j["epsilon"].get<std::vector<double>>();
  if (j.contains("k")) c.degrees = j["k"].get<std::vector<int>>();
  if (j.contains("levels")) c.levels = j["levels"].get<std::vector<int>>();
  if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("scaling")) c.scaling = j["scaling"].get<std::string>();
  if (j.contains("tau2_length")) c.tau2_length = j["tau2_length"].get<std::string>();
  if (j.contains("tau2_rho0")) c.tau2_rho0 = j["tau2_rho0"].get<double>();
  if (j.contains("postprocess")) c.postprocess = j["postprocess"].get<bool>();
  if (j.contains("reduced_domain")) c.reduced_domain = j["reduced_domain"].get<bool>();
  if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
  if (j.contains("custom")) {
    const auto& k = j["custom"];
    CustomProblemConfig p;
    p.beta_x = k.at("beta").at(0).get<std::string>();
    p.beta_y = k.at("beta").at(1).get<std::string>();
    if (k.contains("div_beta")) p.div_beta = k["div_beta"].get<std::string>();
    if (k.contains("f")) p.source = k["f"].get<std::string>();
    if (k.contains("g")) p.dirichlet = k["g"].get<std::string>();
    if (k.contains("exact_u")) p.exact_u = k["exact_u"].get<std::string>();
    if (k.contains("exact_grad")) {
      p.exact_dux = k["exact_grad"].at(0).get<std::string>();
      p.exact_duy = k["exact_grad"].at(1).get<std::string>();
    }
    c.custom = p;
  }
  return c;
}

inline nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["problem"] = problem;
  j["epsilon"] = epsilons;
  j["k"] = degrees;
  j["levels"] = levels;
  j["methods"] = methods;
  j["scaling"] = scaling;
  j["tau2_length"] = tau2_length;
  j["tau2_rho0"] = tau2_rho0;
  j["postprocess"] = postprocess;
  j["reduced_domain"] = reduced_domain;
  j["out"] = out_dir;
  if (custom) {
    nlohmann::json k;
    k["beta"] = {custom->beta_x, custom->beta_y};
    k["div_beta"] = custom->div_beta;
    k["f"] = custom->source;
    k["g"] = custom->dirichlet;
    if (custom->exact_u) k["exact_u"] = *custom->exact_u;
    if (custom->exact_dux && custom->exact_duy) k["exact_grad"] = {*custom->exact_dux, *custom->exact_duy};
    j["custom"] = k;
  }
  return j;
}

/// Method presets: HDG1 = plain space + upwind tau, HDG2 = plain space +
/// upwind tau with the diffusive addition, HDG3 = enriched space + upwind.
inline SolverOptions method_options(const std::string& method, int k, const RunConfig& cfg) {
  SolverOptions o;
  o.degree = k;
  o.scaling = (cfg.scaling == "unscaled") ? ScalingMode::Unscaled : ScalingMode::EpsilonRobust;
  if (method == "HDG1") {
    o.space = VectorSpace::Plain;
    o.tau = StabilizationSpec::upwind();
  } else if (method == "HDG2") {
    o.space = VectorSpace::Plain;
    const TauLengthScale ls = (cfg.tau2_length == "h_F") ? TauLengthScale::FaceLength
                                                         : TauLengthScale::ElementSize;
    o.tau = StabilizationSpec::upwind_diffusion(cfg.tau2_rho0, ls);
  } else if (method == "HDG3") {
    o.space = VectorSpace::RtEnriched;
    o.tau = StabilizationSpec::upwind();
  } else {
    throw std::invalid_argument("method_options: unknown method '" + method + "'");
  }
  return o;
}

inline ProblemSpec make_problem(const RunConfig& cfg, double eps) {
  if (!cfg.custom) return builtin_problem(cfg.problem, eps);
  const CustomProblemConfig& p = *cfg.custom;
  ProblemSpec spec;
  spec.name = "custom";
  spec.epsilon = eps;
  auto bx = compile_expression(p.beta_x), by = compile_expression(p.beta_y);
  auto db = compile_expression(p.div_beta);
  spec.beta = VelocityField{
      [bx, by](double x, double y) { return Vec2(bx(x, y), by(x, y)); },
      [db](double x, double y) { return db(x, y); }, false};
  spec.source = compile_expression(p.source);
  spec.dirichlet = compile_expression(p.dirichlet);
  if (p.exact_u && p.exact_dux && p.exact_duy) {
    auto u = compile_expression(*p.exact_u);
    auto dx = compile_expression(*p.exact_dux), dy = compile_expression(*p.exact_duy);
    spec.exact = ExactSolution{[u](double x, double y) { return u(x, y); },
                               [dx, dy](double x, double y) {
                                 return Vec2(dx(x, y), dy(x, y));
                               }};
  }
  return spec;
}

// ---------------------------------------------------------------------------
// table artifacts

struct ConvergenceRow {
  int k = 0;
  int inv_h = 0;
  double error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTable {
  std::string method;
  double epsilon = 0.0;
  std::string quantity;  // "u" or "u_star"
  std::vector<ConvergenceRow> rows;

  double entry(int k, int inv_h) const {
    for (const auto& r : rows)
      if (r.k == k && r.inv_h == inv_h) return r.error;
    throw std::out_of_range("ConvergenceTable::entry: no such row");
  }
  double order_entry(int k, int inv_h) const {
    for (const auto& r : rows)
      if (r.k == k && r.inv_h == inv_h) return r.order;
    throw std::out_of_range("ConvergenceTable::order_entry: no such row");
  }
};

namespace detail {
inline std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  std::string s(buf);
  for (char& c : s)
    if (c == '+' || c == '.') c = '_';
  return s;
}

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}
}  // namespace detail

inline void write_convergence_csv(const ConvergenceTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_convergence_csv: cannot open " + path);
  out << "method,epsilon,quantity,k,inv_h,error,order\n";
  for (const auto& r : t.rows) {
    out << t.method << "," << detail::csv_number(t.epsilon) << "," << t.quantity << "," << r.k
        << "," << r.inv_h << "," << detail::csv_number(r.error) << ",";
    if (std::isnan(r.order))
      out << "--";
    else
      out << detail::csv_number(r.order);
    out << "\n";
  }
}

struct ConvergenceArtifacts {
  std::vector<ConvergenceTable> tables;  // per (method, eps): u, then u_star if requested
  std::vector<std::string> files;

  const ConvergenceTable& table(const std::string& method, double eps,
                                const std::string& quantity = "u") const {
    for (const auto& t : tables)
      if (t.method == method && t.quantity == quantity &&
          std::abs(t.epsilon - eps) <= 1e-300 + 1e-12 * eps)
        return t;
    throw std::out_of_range("ConvergenceArtifacts::table: not found");
  }
};

/// One solve; returns the solver and solution for further measurement.
struct SolveOutput {
  Mesh mesh;
  ProblemSpec problem;
  std::unique_ptr<HdgSolver> solver;
  HdgSolution solution;
};

inline SolveOutput run_single(const RunConfig& cfg, const std::string& method, double eps, int k,
                              int n) {
  SolveOutput out;
  out.mesh = structured_unit_square(n);
  out.problem = make_problem(cfg, eps);
  apply_problem_slit(out.mesh, out.problem);
  out.solver = std::make_unique<HdgSolver>(out.mesh, out.problem, method_options(method, k, cfg));
  out.solution = out.solver->solve();
  return out;
}

/// Manufactured-solution convergence study; writes one CSV per
/// (method, epsilon, quantity).
inline ConvergenceArtifacts run_convergence(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  ConvergenceArtifacts art;
  for (const std::string& method : cfg.methods) {
    for (double eps : cfg.epsilons) {
      ConvergenceTable tu{method, eps, "u", {}};
      ConvergenceTable ts{method, eps, "u_star", {}};
      const ProblemSpec probe = make_problem(cfg, eps);
      if (!probe.exact)
        throw std::invalid_argument("run_convergence: problem '" + cfg.problem +
                                    "' has no exact solution");
      for (int k : cfg.degrees) {
        std::vector<double> errs, errs_star, hs;
        for (int n : cfg.levels) {
          const SolveOutput so = run_single(cfg, method, eps, k, n);
          const ErrorDomain dom = cfg.reduced_domain ? ErrorDomain::box() : ErrorDomain::full();
          errs.push_back(l2_error(*so.solver, so.solution, so.problem.exact->u, dom));
          hs.push_back(1.0 / n);
          if (cfg.postprocess && k >= 1) {
            const PostprocessedField post = postprocess(*so.solver, so.solution);
            errs_star.push_back(l2_error(*so.solver, post, so.problem.exact->u, dom));
          }
        }
        const std::vector<double> ord = convergence_orders(errs, hs);
        for (size_t i = 0; i < errs.size(); ++i)
          tu.rows.push_back({k, cfg.levels[i], errs[i], ord[i]});
        if (!errs_star.empty()) {
          const std::vector<double> ord_s = convergence_orders(errs_star, hs);
          for (size_t i = 0; i < errs_star.size(); ++i)
            ts.rows.push_back({k, cfg.levels[i], errs_star[i], ord_s[i]});
        }
      }
      const std::string base = cfg.out_dir + "/convergence_" + cfg.problem + "_" + method +
                               "_eps" + detail::eps_tag(eps);
      write_convergence_csv(tu, base + ".csv");
      art.files.push_back(base + ".csv");
      art.tables.push_back(std::move(tu));
      if (!ts.rows.empty()) {
        write_convergence_csv(ts, base + "_post.csv");
        art.files.push_back(base + "_post.csv");
        art.tables.push_back(std::move(ts));
      }
    }
  }
  return art;
}

// ---------------------------------------------------------------------------
// conditioning

struct ConditioningRow {
  std::string method;
  double epsilon = 0.0;
  int k = 0;
  int inv_h = 0;
  double kappa_unscaled = 0.0;
  double kappa_scaled = 0.0;
  bool converged = true;
};

struct ConditioningArtifacts {
  std::vector<ConditioningRow> rows;
  std::vector<std::string> files;

  const ConditioningRow& row(const std::string& method, double eps, int k, int inv_h) const {
    for (const auto& r : rows)
      if (r.method == method && r.k == k && r.inv_h == inv_h &&
          std::abs(r.epsilon - eps) <= 1e-300 + 1e-12 * eps)
        return r;
    throw std::out_of_range("ConditioningArtifacts::row: not found");
  }
};

/// Spectral condition numbers of the trace matrix, unscaled and scaled.
inline ConditioningArtifacts run_conditioning(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  ConditioningArtifacts art;
  for (const std::string& method : cfg.methods) {
    for (double eps : cfg.epsilons) {
      for (int k : cfg.degrees) {
        for (int n : cfg.levels) {
          const ProblemSpec prob = make_problem(cfg, eps);
          Mesh mesh = structured_unit_square(n);
          apply_problem_slit(mesh, prob);
          const HdgSolver solver(mesh, prob, method_options(method, k, cfg));
          const TraceSystem& sys = solver.trace_system();
          const linalg::ConditionEstimate cu = linalg::cond2(sys.matrix);
          const TraceSystem scaled = apply_scaling(sys, ScalingMode::EpsilonRobust);
          const linalg::ConditionEstimate cs = linalg::cond2(scaled.matrix);
          art.rows.push_back(
              {method, eps, k, n, cu.kappa, cs.kappa, cu.converged && cs.converged});
        }
      }
    }
  }
  const std::string path = cfg.out_dir + "/conditioning_" + cfg.problem + ".csv";
  std::ofstream out(path);
  out << "method,epsilon,k,inv_h,kappa_unscaled,kappa_scaled,converged\n";
  for (const auto& r : art.rows)
    out << r.method << "," << detail::csv_number(r.epsilon) << "," << r.k << "," << r.inv_h << ","
        << detail::csv_number(r.kappa_unscaled) << "," << detail::csv_number(r.kappa_scaled)
        << "," << (r.converged ? 1 : 0) << "\n";
  art.files.push_back(path);
  return art;
}

// ---------------------------------------------------------------------------
// fields

struct FieldsArtifacts {
  std::vector<std::string> files;
  double min_value = 0.0, max_value = 0.0;  // across all sampled u_h values
};

/// Solves and exports u_h (and u*_h when requested) on a plot grid with
/// 4^k sub-triangles per element.
inline FieldsArtifacts run_fields(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  FieldsArtifacts art;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const std::string& method : cfg.methods) {
    for (double eps : cfg.epsilons) {
      for (int k : cfg.degrees) {
        for (int n : cfg.levels) {
          const SolveOutput so = run_single(cfg, method, eps, k, n);
          const int levels = std::min(k, 3);
          std::optional<PostprocessedField> post;
          std::vector<std::pair<std::string, const PostprocessedField*>> posts;
          if (cfg.postprocess && k >= 1) {
            post = postprocess(*so.solver, so.solution);
            posts.push_back({"u_star", &*post});
          }
          const std::string path = cfg.out_dir + "/fields_" + cfg.problem + "_" + method + "_k" +
                                   std::to_string(k) + "_n" + std::to_string(n) + "_eps" +
                                   detail::eps_tag(eps) + ".vtk";
          std::ofstream out(path);
          write_field_vtk(*so.solver, {{"u", &so.solution}}, posts, levels, out);
          art.files.push_back(path);
          const detail::PlotGrid grid = detail::plot_grid(levels);
          for (int e = 0; e < so.mesh.n_elements(); ++e) {
            const Eigen::VectorXd vals = so.solver->u_values(so.solution, e, grid.points);
            lo = std::min(lo, vals.minCoeff());
            hi = std::max(hi, vals.maxCoeff());
          }
        }
      }
    }
  }
  art.min_value = lo;
  art.max_value = hi;
  return art;
}

// ---------------------------------------------------------------------------
// checks

struct ChecksReport {
  bool tau_valid = false;
  bool mesh_assumption_beta11 = false;
  bool equivalence_enriched = false;
  bool equivalence_plain_differs = false;
  double max_energy_residual = 0.0;
  double max_conservation_residual = 0.0;
  double max_boundary_residual = 0.0;
  bool identities_pass = false;

  bool all_pass() const {
    return tau_valid && mesh_assumption_beta11 && equivalence_enriched &&
           equivalence_plain_differs && identities_pass;
  }
};

/// Aggregated consistency suite on a small default configuration.
inline ChecksReport run_checks(const RunConfig& cfg) {
  ChecksReport rep;
  const Mesh mesh = structured_unit_square(std::max(2, cfg.levels.empty() ? 2 : cfg.levels[0]));
  const double eps = cfg.epsilons.empty() ? 1e-3 : cfg.epsilons[0];
  const ProblemSpec prob = make_problem(cfg, eps);

  rep.tau_valid = validate_tau(mesh, StabilizationSpec::upwind(), prob.beta, eps).pass;
  rep.mesh_assumption_beta11 =
      check_mesh_assumption(mesh, constant_velocity({1.0, 1.0}), 1.0).pass;

  ProblemSpec mh = prob;
  mh.dirichlet = [](double, double) { return 0.0; };
  if (mh.beta.is_piecewise_constant) {
    rep.equivalence_enriched =
        mhdg_equivalence_check(mesh, mh, 1, VectorSpace::RtEnriched).equivalent;
    rep.equivalence_plain_differs =
        !mhdg_equivalence_check(mesh, mh, 1, VectorSpace::Plain).equivalent;
  }

  double e_max = 0.0, c_max = 0.0, b_max = 0.0;
  for (const std::string& method : cfg.methods) {
    for (int k : cfg.degrees) {
      const SolveOutput so = run_single(cfg, method, eps, k, 2);
      const IdentityResiduals r = identity_residuals(*so.solver, so.solution);
      c_max = std::max(c_max, r.conservation);
      b_max = std::max(b_max, r.boundary);
      // the energy identity is only an identity for homogeneous data
      bool g_zero = true;
      for (double t : {0.1, 0.5, 0.9}) {
        if (std::abs(so.problem.dirichlet(t, 0.0)) > 1e-13 ||
            std::abs(so.problem.dirichlet(0.0, t)) > 1e-13 ||
            std::abs(so.problem.dirichlet(t, 1.0)) > 1e-13 ||
            std::abs(so.problem.dirichlet(1.0, t)) > 1e-13)
          g_zero = false;
      }
      if (g_zero && !so.problem.slit) e_max = std::max(e_max, r.energy);
    }
  }
  rep.max_energy_residual = e_max;
  rep.max_conservation_residual = c_max;
  rep.max_boundary_residual = b_max;
  rep.identities_pass = e_max <= 1e-10 && c_max <= 1e-10 && b_max <= 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// manifest

inline void write_manifest(const RunConfig& cfg, const std::string& command,
                           double wall_seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  nlohmann::json j;
  j["command"] = command;
  j["config"] = cfg.to_json();
  j["version"] = kVersion;
  j["wall_time_s"] = wall_seconds;
  std::ofstream out(cfg.out_dir + "/manifest.json");
  out << j.dump(2) << "\n";
}

}  // namespace hdgcd

#endif
