// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.
//
// Usage: spike_acceptance [path to the spike executable]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <unistd.h>
#include <string>
#include <vector>

#include "spike/asymptotics.hpp"
#include "spike/errors.hpp"
#include "spike/moser.hpp"
#include "spike/radial_profile.hpp"
#include "spike/sweep.hpp"
#include "spike/symmetry.hpp"

using namespace spike;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void verdict(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Runs body; an exception counts as a failure of the criterion.
void criterion(int id, const char* name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, name, false, std::string("threw: ") + e.what());
  }
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
  return s;
}

bool same_files(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
  std::size_t count_b = std::distance(fs::directory_iterator(b), fs::directory_iterator());
  if (names.size() != count_b) return false;
  for (const auto& n : names) {
    std::ifstream fa(a / n, std::ios::binary), fb(b / n, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    if (!fb || sa != sb) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> sweep_d{0.1, 0.05, 0.025, 0.0125};
  const Domain disk = Domain::unit_disk();
  RadialProfile w;

  criterion(1, "limit-profile identities", [&] {
    auto t = std::chrono::steady_clock::now();
    w = shoot_ground_state(1e-10, 25);
    PohozaevResiduals p = pohozaev_checks(w);
    NehariIdentity n = nehari_identity(w);
    double dt = seconds_since(t);
    bool ok = p.residual_z1 <= 1e-3 && p.residual_z2 <= 1e-3 && p.residual_energy <= 1e-3 &&
              n.relative_residual <= 1e-4 && dt < 10;
    verdict(1, "limit-profile identities", ok,
            fmt("moment residuals %.2e %.2e %.2e (<= 1e-3), Nehari %.2e (<= 1e-4), %.2f s", p.residual_z1,
                p.residual_z2, p.residual_energy, n.relative_residual, dt));
  });

  criterion(2, "decay", [&] {
    auto t = std::chrono::steady_clock::now();
    RadialProfile deep = shoot_ground_state(1e-10, 25);
    double theta = decay_rate(deep, 10, 15);
    double bessel = decay_rate_bessel(deep, 10, 15);
    double dt = seconds_since(t);
    bool ok = theta > 0.5 && theta <= 1.2 && std::abs(bessel - 1) <= 0.05 && dt < 10;
    verdict(2, "decay", ok, fmt("theta %.4f in (0.5, 1.2], -log(w sqrt r) slope %.4f, %.2f s", theta, bessel, dt));
  });

  criterion(3, "energy bracket", [&] {
    const MeshPolicy coarse = disk_mesh_policy(Point(0, -1), 6);
    bool ok = true;
    std::string detail;
    for (double d : sweep_d) {
      auto t = std::chrono::steady_clock::now();
      SolveReport r = solve_ground_state(d, coarse(d), disk);
      double dt = seconds_since(t);
      ok = ok && r.m_d > 0 && r.m_d < kPi * d && dt <= 180;
      detail += fmt("%sd=%g: m_d/(pi d) = %.4f (%.1f s)", detail.empty() ? "" : "; ", d, r.m_d / (kPi * d), dt);
    }
    verdict(3, "energy bracket", ok, detail);
  });

  SweepResult sweep;
  bool have_sweep = false;
  criterion(4, "leading asymptotics", [&] {
    SweepOptions o;
    o.threads = worker_count();
    sweep = run_disk_sweep(sweep_d, w, o);
    have_sweep = true;
    const ExpansionReport& e = *sweep.expansion;
    const double I = 2 * e.half_I;
    std::vector<double> gap;
    bool ordered = true;
    for (const SweepRow& r : sweep.rows) {
      gap.push_back(std::abs(r.m_d / r.d - e.half_I));
      ordered = ordered && r.M_test >= r.m_d - 1e-8;
    }
    bool ok = strictly_decreasing(gap) && gap.back() <= 0.05 * I && ordered;
    verdict(4, "leading asymptotics", ok,
            fmt("|m_d/d - I/2| = %s (limit %.4f at the smallest d), M_test >= m_d - 1e-8: %s", join(gap).c_str(),
                0.05 * I, ordered ? "yes" : "no"));
  });

  criterion(5, "curvature correction", [&] {
    if (!have_sweep) throw Error(ErrorKind::Precondition, "sweep unavailable");
    const ExpansionReport& e = *sweep.expansion;
    bool disk_ok = e.fitted_gamma_coeff > 0 && e.fitted_gamma_coeff >= 0.5 * e.expected_coeff &&
                   e.fitted_gamma_coeff <= 2 * e.expected_coeff;
    auto flat = StraighteningChart::flat(Point(0, 0), Point(1, 0), 10.0);
    ExpansionReport f = expansion_fit(sweep_d, flat, 4.0, w, half_plane_mesh_policy(10.0));
    bool flat_ok = std::abs(f.fitted_gamma_coeff) <= 0.1 * e.gamma;
    verdict(5, "curvature correction", disk_ok && flat_ok,
            fmt("disk coefficient %.4f vs gamma %.4f (factor-2 window), flat coefficient %.4f (limit %.4f)",
                e.fitted_gamma_coeff, e.expected_coeff, f.fitted_gamma_coeff, 0.1 * e.gamma));
  });

  criterion(6, "t0 expansion", [&] {
    if (!have_sweep) throw Error(ErrorKind::Precondition, "sweep unavailable");
    const ExpansionReport& e = *sweep.expansion;
    std::vector<double> dt;
    for (const SweepRow& r : sweep.rows) dt.push_back(r.t0 - 1);
    double s = e.t0_loglog_slope;
    verdict(6, "t0 expansion", std::abs(s - 0.5) <= 0.15,
            fmt("log-log slope of |t0 - 1| is %.3f (want 0.5 +- 0.15); t0 - 1 = %s", s, join(dt, "%.3e").c_str()));
  });

  criterion(7, "concentration", [&] {
    if (!have_sweep) throw Error(ErrorKind::Precondition, "sweep unavailable");
    bool boundary = true, decay = true, budget = true;
    std::vector<double> err, mu, bud;
    for (const SweepRow& r : sweep.rows) {
      if (r.d <= 0.1) boundary = boundary && r.peak_on_boundary;
      err.push_back(r.concentration.profile_sup_err);
      mu.push_back(r.concentration.mu1);
      bud.push_back(r.budget);
      decay = decay && r.concentration.mu1 > 0.3;
      budget = budget && r.budget < 4 * kPi;
    }
    bool ok = boundary && strictly_decreasing(err) && decay && budget;
    verdict(7, "concentration", ok,
            fmt("peaks on boundary: %s; sup errors %s; mu1 %s; budgets %s (< %.4f)", boundary ? "yes" : "no",
                join(err).c_str(), join(mu).c_str(), join(bud).c_str(), 4 * kPi));
  });

  criterion(8, "Moser sharpness", [&] {
    auto t = std::chrono::steady_clock::now();
    SharpnessTable tab = sharpness_sweep({2 * kPi, 0.9 * 2 * kPi}, {1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    double dt = seconds_since(t);
    const SharpnessRow &crit = tab.rows[0], &sub = tab.rows[1];
    bool ok = crit.slope > 0 && crit.r_squared > 0.9 && sub.ratio <= 2 && dt < 5;
    verdict(8, "Moser sharpness", ok,
            fmt("alpha 2 pi: slope %.4f, R^2 %.5f; alpha 0.9 x 2 pi: last/first %.3f; %.3f s", crit.slope,
                crit.r_squared, sub.ratio, dt));
  });

  criterion(9, "disk symmetry", [&] {
    bool ok = true;
    std::string detail;
    for (double d : {0.5, 0.2, 0.1, 0.05, 0.02}) {
      DiskSymmetryRun run = disk_symmetry_run(d);
      const SymmetryReport& s = run.symmetry;
      ok = ok && s.maxima_count == 1 && run.solve.peak_on_boundary && s.reflection_residual <= 1e-2 &&
           s.angular_min >= -1e-3 && s.vertical_min >= -1e-3;
      detail += fmt("%sd=%g: maxima %d, refl %.1e, ang %.1e, vert %.1e", detail.empty() ? "" : "; ", d, s.maxima_count,
                    s.reflection_residual, s.angular_min, s.vertical_min);
    }
    verdict(9, "disk symmetry", ok, detail);
  });

  criterion(10, "numerical hygiene", [&] {
    EnergyFunctional E(std::make_shared<const Mesh>(build_disk_mesh(1.0, 0.1)), 0.1);
    double grad_err = gradient_fd_check(E, 20, 20240601);
    bool cli_ok = false;
    std::string cli = "CLI not checked (no executable given)";
    if (argc > 1) {
      const fs::path exe = argv[1];
      const fs::path root = fs::temp_directory_path() / fmt("spike_acceptance_%d", static_cast<int>(getpid()));
      fs::remove_all(root);
      const std::vector<std::pair<std::string, std::string>> runs{
          {"profile", "profile --tol 1e-10 --rmax 30"},
          {"solve", "solve --domain disk --d 0.05 --h 0.03"},
          {"sweep", "sweep --d-list 0.1,0.05,0.025 --plots"},
          {"moser", "moser --alphas 6.2832,5.6549 --eps-list 1e-2,1e-3,1e-4,1e-5"},
          {"gradcheck", "gradcheck --fields 20 --seed 3"}};
      cli_ok = true;
      int identical = 0;
      for (const auto& [name, args] : runs) {
        const std::string first = exe.string() + " --out " + (root / name).string() + " " + args + " > /dev/null";
        const std::string again = exe.string() + " --out " + (root / (name + "_again")).string() + " --config " +
                                  (root / name / "config.json").string() + " > /dev/null";
        bool same = std::system(first.c_str()) == 0 && std::system(again.c_str()) == 0 &&
                    same_files(root / name, root / (name + "_again"));
        identical += same;
        cli_ok = cli_ok && same;
      }
      fs::remove_all(root);
      cli = fmt("%d/%zu CLI runs byte-identical from their config echo", identical, runs.size());
    }
    verdict(10, "numerical hygiene", grad_err <= 1e-4 && cli_ok,
            fmt("max relative gradient error %.2e over 20 fields (<= 1e-4); ", grad_err) + cli);
  });

  std::printf("%d failure(s), %.1f s\n", failures, seconds_since(start));
  return failures;
}
