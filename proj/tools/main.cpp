#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spike/errors.hpp"
#include "spike/io.hpp"
#include "spike/moser.hpp"
#include "spike/sweep.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace spike;

namespace {

// Numerical failure that is not an spike::Error (exit code 1).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v))
      throw Error(ErrorKind::InvalidParameter, std::string("malformed ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidParameter, std::string(what) + " is empty");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::InvalidParameter, "cannot write " + path.string());
}

void emit(const fs::path& out, const char* name, const json& j) {
  io::write_json(out / name, j);
  std::cout << j.dump(2) << '\n';
}

Domain domain_from(const json& cfg) {
  const std::string kind = cfg.at("domain").get<std::string>();
  if (kind == "disk") return Domain::unit_disk();
  if (kind == "ellipse") return Domain::ellipse(cfg.at("a").get<double>(), cfg.at("b").get<double>());
  throw Error(ErrorKind::InvalidParameter, "unknown domain '" + kind + "' (disk or ellipse)");
}

void run_profile(const json& cfg, const fs::path& out) {
  RadialProfile w = shoot_ground_state(cfg.at("tol").get<double>(), cfg.at("rmax").get<double>(),
                                       cfg.at("integrator_tol").get<double>());
  io::write_profile(out / "profile.txt", w);
  json j;
  j["amplitude"] = w.amplitude();
  j["I_w"] = energy_I(w);
  j["gamma"] = gamma_constant(w);
  j["theta"] = w.theta;
  emit(out, "profile.json", j);
}

void run_solve(const json& cfg, const fs::path& out) {
  const double d = cfg.at("d").get<double>();
  const double h = cfg.at("h").get<double>();
  if (!(d > 0)) throw Error(ErrorKind::InvalidParameter, "d must be positive");
  if (!(h > 0)) throw Error(ErrorKind::InvalidParameter, "h must be positive");
  Domain domain = domain_from(cfg);
  auto mesh = std::make_shared<const Mesh>(domain.kind() == Domain::Kind::UnitDisk ? build_disk_mesh(1.0, h)
                                                                                   : build_domain_mesh(domain, h));
  SolveOptions o;
  o.init = init_preset_from_string(cfg.at("init").get<std::string>());
  if (o.init == InitPreset::Custom) throw Error(ErrorKind::InvalidParameter, "init must be curvature-bump or constant");
  o.max_iterations = cfg.at("max_iterations").get<int>();
  o.tolerance = cfg.at("tolerance").get<double>();
  SolveReport r = solve_ground_state(d, mesh, domain, o);
  io::write_mesh(out / "solution.mesh", *mesh);
  io::write_field(out / "solution.field", *r.u);
  emit(out, "report.json", json::parse(report_json(r)));
  if (!r.converged)
    throw NumericalFailure("solver did not converge in " + std::to_string(r.iterations) + " iterations (gradient norm " +
                           io::format_double(r.grad_norm) + ")");
}

// u along the inner normal from the boundary projection of the peak, in the
// stretched variable rho = distance / sqrt(d).
svg::Series normal_trace(const SolveReport& s, const Domain& disk) {
  const double arc = disk.project(s.peak);
  const Point P = disk.point(arc), n = disk.inner_normal(arc);
  MeshLocator loc(*s.u->mesh);
  std::vector<double> vals(s.u->values.data(), s.u->values.data() + s.u->values.size());
  svg::Series t;
  char label[32];
  std::snprintf(label, sizeof label, "d = %g", s.d);
  t.label = label;
  for (double rho = 0; rho <= 8 + 1e-12 && std::sqrt(s.d) * rho <= 1.9; rho += 0.05) {
    t.x.push_back(rho);
    t.y.push_back(loc.interpolate(vals, P + std::sqrt(s.d) * rho * n));
  }
  return t;
}

void run_sweep(const json& cfg, const fs::path& out) {
  const std::vector<double> ds = cfg.at("d_list").get<std::vector<double>>();
  if (ds.empty()) throw Error(ErrorKind::InvalidParameter, "d list is empty");
  const bool plots = cfg.at("plots").get<bool>();
  SweepOptions o;
  o.cells_per_sqrt_d = cfg.at("cells_per_sqrt_d").get<double>();
  o.threads = worker_count();
  o.keep_solves = plots;
  const RadialProfile& w = default_profile();
  SweepResult res = run_disk_sweep(ds, w, o);
  io::write_sweep_csv(out / "sweep.csv", res.rows);

  json j;
  j["rows"] = res.rows.size();
  j["half_I"] = 0.5 * energy_I(w);
  j["gamma"] = gamma_constant(w);
  if (res.expansion) {
    const ExpansionReport& e = *res.expansion;
    j["curvature"] = e.curvature;
    j["expected_coeff"] = e.expected_coeff;
    j["fitted_gamma_coeff"] = e.fitted_gamma_coeff;
    j["fitted_beta"] = e.fitted_beta;
    j["t0_loglog_slope"] = e.t0_loglog_slope;
  }
  emit(out, "sweep.json", j);

  if (plots) {
    svg::Series md{"m_d / d", {}, {}, true}, mt{"M_test / d", {}, {}, true}, half{"I(w) / 2", {}, {}, false};
    for (const SweepRow& r : res.rows) {
      md.x.push_back(r.d);
      md.y.push_back(r.m_d / r.d);
      mt.x.push_back(r.d);
      mt.y.push_back(r.M_test / r.d);
    }
    half.x = {ds.back(), ds.front()};
    half.y = {0.5 * energy_I(w), 0.5 * energy_I(w)};
    write_text(out / "energy.svg", svg::line_plot("Energy levels along the sweep", "d", "level / d", {md, mt, half}));

    svg::Series limit{"w", {}, {}, false};
    for (double rho = 0; rho <= 8 + 1e-12; rho += 0.05) {
      limit.x.push_back(rho);
      limit.y.push_back(w.value(rho));
    }
    std::vector<svg::Series> traces{limit};
    const Domain disk = Domain::unit_disk();
    for (const SolveReport& s : res.solves) traces.push_back(normal_trace(s, disk));
    write_text(out / "profile_overlay.svg",
               svg::line_plot("Rescaled solutions along the inner normal", "distance / sqrt(d)", "u", traces));
  }
}

void run_moser(const json& cfg, const fs::path& out) {
  SharpnessTable t = sharpness_sweep(cfg.at("alphas").get<std::vector<double>>(),
                                     cfg.at("eps_list").get<std::vector<double>>(), cfg.at("delta").get<double>());
  io::write_moser_csv(out / "moser.csv", t);
  json j;
  for (const SharpnessRow& row : t.rows) {
    char key[40] = "alpha=";
    *std::to_chars(key + 6, key + sizeof key - 1, row.alpha).ptr = '\0';
    j[key] = to_string(row.growth);
  }
  emit(out, "moser.json", j);
}

void run_gradcheck(const json& cfg, const fs::path& out) {
  const double d = cfg.at("d").get<double>(), h = cfg.at("h").get<double>();
  const int fields = cfg.at("fields").get<int>();
  if (!(d > 0) || !(h > 0)) throw Error(ErrorKind::InvalidParameter, "d and h must be positive");
  EnergyFunctional E(std::make_shared<const Mesh>(build_disk_mesh(1.0, h)), d);
  const double err = gradient_fd_check(E, fields, cfg.at("seed").get<std::uint64_t>());
  json j;
  j["fields"] = fields;
  j["max_relative_error"] = err;
  j["pass"] = err <= 1e-4;
  emit(out, "gradcheck.json", j);
  if (!(err <= 1e-4)) throw NumericalFailure("gradient check failed: relative error " + io::format_double(err));
}

void run(const json& cfg, const fs::path& out) {
  fs::create_directories(out);
  io::write_json(out / "config.json", cfg);
  const std::string cmd = cfg.at("command").get<std::string>();
  if (cmd == "profile")
    run_profile(cfg, out);
  else if (cmd == "solve")
    run_solve(cfg, out);
  else if (cmd == "sweep")
    run_sweep(cfg, out);
  else if (cmd == "moser")
    run_moser(cfg, out);
  else if (cmd == "gradcheck")
    run_gradcheck(cfg, out);
  else
    throw Error(ErrorKind::InvalidParameter, "unknown command '" + cmd + "' in config");
}

int fail(int code, const std::string& msg) {
  std::cerr << "error: " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of -d Lap u + u = u (e^{u^2} - 1) with Neumann conditions"};
  app.require_subcommand(0, 1);
  std::string out = ".", config_path;
  app.add_option("--out,-o", out, "Output directory")->capture_default_str();
  app.add_option("--config", config_path, "Re-run from a config.json echo")->check(CLI::ExistingFile);

  double tol = 1e-10, rmax = 25, itol = 1e-12;
  auto* profile = app.add_subcommand("profile", "Radial ground state of the limit problem");
  profile->add_option("--tol", tol, "Amplitude tolerance")->capture_default_str();
  profile->add_option("--rmax", rmax, "Shooting radius")->capture_default_str();
  profile->add_option("--integrator-tol", itol, "ODE relative tolerance")->capture_default_str();

  std::string domain = "disk", init = "curvature-bump";
  double a = 1, b = 1, d = 0, h = 0;
  int max_iter = 5000;
  double solve_tol = 1e-8;
  auto* solve = app.add_subcommand("solve", "Ground state on a planar domain");
  solve->set_help_flag("--help", "Print this help message and exit");
  solve->add_option("--domain", domain, "disk or ellipse")->capture_default_str();
  solve->add_option("--a", a, "Ellipse semi-axis along x")->capture_default_str();
  solve->add_option("--b", b, "Ellipse semi-axis along y")->capture_default_str();
  solve->add_option("--d", d, "Diffusion coefficient")->required();
  solve->add_option("--h", h, "Mesh size (default min(0.05, sqrt(d)/6))");
  solve->add_option("--init", init, "curvature-bump or constant")->capture_default_str();
  solve->add_option("--max-iterations", max_iter)->capture_default_str();
  solve->add_option("--tolerance", solve_tol, "Relative gradient tolerance")->capture_default_str();

  std::string d_list;
  double cells = 16;
  bool plots = false;
  auto* sweep = app.add_subcommand("sweep", "Energy expansion, concentration and symmetry over a d list");
  sweep->add_option("--d-list", d_list, "Comma-separated, strictly decreasing")->required();
  sweep->add_option("--cells", cells, "Mesh cells per sqrt(d) near the peak")->capture_default_str();
  sweep->add_flag("--plots", plots, "Also write SVG plots");

  std::string alphas, eps_list;
  double delta = 0.5;
  auto* moser = app.add_subcommand("moser", "Trudinger-Moser functional on the Moser sequence");
  moser->add_option("--alphas", alphas, "Comma-separated exponents")->required();
  moser->add_option("--eps-list", eps_list, "Comma-separated, decreasing")->capture_default_str();
  moser->add_option("--delta", delta, "Outer radius of the half-disk model")->capture_default_str();
  eps_list = "1e-2,1e-3,1e-4,1e-5,1e-6";

  int fields = 20;
  std::uint64_t seed = 1;
  double gd = 0.1, gh = 0.1;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the energy gradient on random fields");
  grad->set_help_flag("--help", "Print this help message and exit");
  grad->add_option("--d", gd)->capture_default_str();
  grad->add_option("--h", gh)->capture_default_str();
  grad->add_option("--fields", fields)->capture_default_str();
  grad->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    json cfg;
    if (!config_path.empty()) {
      if (!app.get_subcommands().empty()) return fail(2, "--config cannot be combined with a subcommand");
      cfg = io::read_json(config_path);
    } else if (profile->parsed()) {
      cfg = {{"command", "profile"}, {"tol", tol}, {"rmax", rmax}, {"integrator_tol", itol}};
    } else if (solve->parsed()) {
      if (h == 0 && d > 0) h = std::min(0.05, std::sqrt(d) / 6);
      cfg = {{"command", "solve"}, {"domain", domain}};
      if (domain == "ellipse") {
        cfg["a"] = a;
        cfg["b"] = b;
      }
      cfg.update(json{{"d", d}, {"h", h}, {"init", init}, {"max_iterations", max_iter}, {"tolerance", solve_tol}});
    } else if (sweep->parsed()) {
      cfg = {{"command", "sweep"}, {"d_list", parse_list(d_list, "d list")}, {"cells_per_sqrt_d", cells}, {"plots", plots}};
    } else if (moser->parsed()) {
      cfg = {{"command", "moser"},
             {"alphas", parse_list(alphas, "alpha list")},
             {"eps_list", parse_list(eps_list, "eps list")},
             {"delta", delta}};
    } else if (grad->parsed()) {
      cfg = {{"command", "gradcheck"}, {"d", gd}, {"h", gh}, {"fields", fields}, {"seed", seed}};
    } else {
      std::cout << app.help();
      return 2;
    }
    run(cfg, out);
    return 0;
  } catch (const Error& e) {
    return fail(is_usage_error(e.kind()) ? 2 : 1, e.what());
  } catch (const NumericalFailure& e) {
    return fail(1, e.what());
  } catch (const json::exception& e) {
    return fail(2, std::string("config: ") + e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(2, e.what());
  }
}
