// Command-line driver: convergence and conditioning tables, field exports,
// the consistency-check suite, and mesh generation/validation.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdgcd/harness.hpp"
#include "hdgcd/mesh_io.hpp"
#include "hdgcd/streamline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string problem;
  std::vector<double> epsilons;
  std::vector<int> degrees;
  std::vector<int> levels;
  std::vector<std::string> methods;
  std::string scaling;
  std::string out_dir;
  bool postprocess = false;
  bool reduced = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--problem", a.problem, "smooth | rotating | interior_layer | boundary_layer");
  cmd->add_option("--epsilon", a.epsilons, "diffusion coefficients");
  cmd->add_option("--k", a.degrees, "polynomial degrees");
  cmd->add_option("--levels", a.levels, "mesh subdivisions per side");
  cmd->add_option("--method", a.methods, "HDG1 | HDG2 | HDG3");
  cmd->add_option("--scaling", a.scaling, "scaled | unscaled");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_flag("--postprocess", a.postprocess, "also report the postprocessed field");
  cmd->add_flag("--reduced-domain", a.reduced, "errors over the box [0,0.9]^2");
}

hdgcd::RunConfig build_config(const CommonArgs& a) {
  hdgcd::RunConfig cfg;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw std::runtime_error("cannot open config " + a.config_path);
    cfg = hdgcd::RunConfig::from_json(nlohmann::json::parse(in));
  }
  if (!a.problem.empty()) cfg.problem = a.problem;
  if (!a.epsilons.empty()) cfg.epsilons = a.epsilons;
  if (!a.degrees.empty()) cfg.degrees = a.degrees;
  if (!a.levels.empty()) cfg.levels = a.levels;
  if (!a.methods.empty()) cfg.methods = a.methods;
  if (!a.scaling.empty()) cfg.scaling = a.scaling;
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  if (a.postprocess) cfg.postprocess = true;
  if (a.reduced) cfg.reduced_domain = true;
  return cfg;
}

int run_timed(const hdgcd::RunConfig& cfg, const std::string& command,
              const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  hdgcd::write_manifest(cfg, command, secs);
  std::cout << command << " done in " << secs << " s, outputs in " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG solver for convection-dominated diffusion on the unit square"};
  app.require_subcommand(1);

  CommonArgs conv_args, cond_args, field_args, check_args;
  CLI::App* conv = app.add_subcommand("convergence", "manufactured-solution error tables");
  add_common(conv, conv_args);
  CLI::App* cond = app.add_subcommand("conditioning", "trace-matrix condition numbers");
  add_common(cond, cond_args);
  CLI::App* fields = app.add_subcommand("fields", "solve and export VTK fields");
  add_common(fields, field_args);
  CLI::App* checks = app.add_subcommand("checks", "equivalence/identity/mesh check suite");
  add_common(checks, check_args);

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "generate and validate meshes");
  int mesh_n = 5;
  std::string mesh_kind = "structured";
  std::string mesh_out = "mesh.txt";
  std::string mesh_vtk;
  std::string mesh_validate;
  double mesh_h = 0.1;
  std::vector<double> mesh_beta{1.0, 1.0};
  double mesh_C = 1.0;
  mesh_cmd->add_option("--kind", mesh_kind, "structured | streamline");
  mesh_cmd->add_option("--n", mesh_n, "subdivisions per side (structured)");
  mesh_cmd->add_option("--h", mesh_h, "target size (streamline)");
  mesh_cmd->add_option("--beta", mesh_beta, "constant velocity (streamline/validate)")
      ->expected(2);
  mesh_cmd->add_option("--C", mesh_C, "alignment constant for the check");
  mesh_cmd->add_option("--out", mesh_out, "text-format output path");
  mesh_cmd->add_option("--vtk", mesh_vtk, "also export legacy VTK");
  mesh_cmd->add_option("--validate", mesh_validate, "validate an existing text-format mesh");

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      const hdgcd::RunConfig cfg = build_config(conv_args);
      return run_timed(cfg, "convergence", [&] { hdgcd::run_convergence(cfg); });
    }
    if (cond->parsed()) {
      const hdgcd::RunConfig cfg = build_config(cond_args);
      return run_timed(cfg, "conditioning", [&] { hdgcd::run_conditioning(cfg); });
    }
    if (fields->parsed()) {
      const hdgcd::RunConfig cfg = build_config(field_args);
      return run_timed(cfg, "fields", [&] {
        const hdgcd::FieldsArtifacts art = hdgcd::run_fields(cfg);
        std::cout << "sampled u range [" << art.min_value << ", " << art.max_value << "]\n";
      });
    }
    if (checks->parsed()) {
      const hdgcd::RunConfig cfg = build_config(check_args);
      int status = 0;
      run_timed(cfg, "checks", [&] {
        const hdgcd::ChecksReport rep = hdgcd::run_checks(cfg);
        auto line = [](const std::string& name, bool ok) {
          std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        };
        line("stabilization well-posedness", rep.tau_valid);
        line("mesh alignment check, beta = (1,1)", rep.mesh_assumption_beta11);
        line("upwind mixed-hybrid equivalence (enriched space)", rep.equivalence_enriched);
        line("equivalence check discriminates the plain space", rep.equivalence_plain_differs);
        std::cout << "residuals: energy " << rep.max_energy_residual << ", conservation "
                  << rep.max_conservation_residual << ", boundary " << rep.max_boundary_residual
                  << "\n";
        line("identity residuals", rep.identities_pass);
        status = rep.all_pass() ? 0 : 1;
      });
      return status;
    }
    if (mesh_cmd->parsed()) {
      if (!mesh_validate.empty()) {
        const hdgcd::Mesh m = hdgcd::read_mesh_text(mesh_validate);
        const auto issues = m.validate();
        for (const auto& s : issues) std::cout << "issue: " << s << "\n";
        const auto rep = hdgcd::check_mesh_assumption(
            m, hdgcd::constant_velocity({mesh_beta[0], mesh_beta[1]}), mesh_C);
        std::cout << "alignment check (C = " << mesh_C << "): "
                  << (rep.pass ? "pass" : "fail, " + std::to_string(rep.violations.size()) +
                                              " violations")
                  << "\n";
        return issues.empty() && rep.pass ? 0 : 1;
      }
      hdgcd::Mesh m;
      if (mesh_kind == "structured") {
        m = hdgcd::structured_unit_square(mesh_n);
      } else if (mesh_kind == "streamline") {
        const auto res = hdgcd::streamline_mesh(
            hdgcd::constant_velocity({mesh_beta[0], mesh_beta[1]}), mesh_h, mesh_C);
        if (!res.pass) {
          std::cerr << "streamline mesh failed the alignment check; "
                    << res.report.violations.size() << " faces remain\n";
          for (size_t i = 0; i < std::min<size_t>(10, res.report.violations.size()); ++i) {
            const auto& v = res.report.violations[i];
            std::cerr << "  element " << v.element << " face " << v.local_face << " value "
                      << v.value << " > " << v.limit << "\n";
          }
          return 1;
        }
        m = res.mesh;
      } else {
        throw std::invalid_argument("unknown mesh kind '" + mesh_kind + "'");
      }
      hdgcd::write_mesh_text(m, mesh_out);
      if (!mesh_vtk.empty()) hdgcd::write_mesh_vtk(m, mesh_vtk);
      std::cout << "mesh: " << m.n_vertices() << " vertices, " << m.n_elements() << " elements, "
                << m.n_faces() << " faces -> " << mesh_out << "\n";
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
