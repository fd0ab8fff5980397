#include "spike/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "spike/errors.hpp"

namespace spike {

int worker_count() {
  if (const char* env = std::getenv("NB_THREADS"); env && *env) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw Error(ErrorKind::InvalidParameter, std::string("NB_THREADS must be a positive integer, got ") + env);
    return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExpansionReport fit_sweep_rows(const std::vector<SweepRow>& rows, const RadialProfile& profile) {
  ExpansionReport rep;
  rep.half_I = 0.5 * energy_I(profile);
  rep.gamma = gamma_constant(profile);
  rep.curvature = default_chart(Domain::unit_disk(), Point(0, -1)).chart.phi2_at_0();
  rep.expected_coeff = rep.curvature * rep.gamma;
  for (const SweepRow& r : rows) rep.entries.push_back({r.d, r.m_d, r.M_test, r.t0, r.t0_golden});
  refit_expansion(rep);
  return rep;
}

SweepResult run_disk_sweep(const std::vector<double>& d_list, const RadialProfile& profile,
                           const SweepOptions& options) {
  if (d_list.empty()) throw Error(ErrorKind::InvalidParameter, "d list is empty");
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    if (!(d_list[i] > 0) || !std::isfinite(d_list[i])) throw Error(ErrorKind::InvalidParameter, "d values must be positive");
    if (i > 0 && !(d_list[i] < d_list[i - 1]))
      throw Error(ErrorKind::InvalidParameter, "d values must be strictly decreasing");
  }
  const Domain disk = Domain::unit_disk();
  const Point P(0, -1);
  const ChartChoice cc = default_chart(disk, P);
  const MeshPolicy meshes = disk_mesh_policy(P, options.cells_per_sqrt_d);

  const std::size_t n = d_list.size();
  std::vector<SweepRow> rows(n);
  std::vector<SolveReport> solves(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        const double d = d_list[i];
        auto mesh = meshes(d);
        ExpansionEntry e = expansion_entry(d, cc.chart, cc.k, profile, mesh);
        SolveOptions o;
        o.init = InitPreset::Custom;
        o.custom_init = build_test_function({cc.chart, profile, d, cc.k}, mesh);
        SolveReport s = solve_ground_state(d, mesh, disk, o);
        SweepRow& r = rows[i];
        r.d = d;
        r.m_d = s.m_d;
        r.M_test = e.M_test;
        r.t0 = e.t0;
        r.t0_golden = e.t0_golden;
        r.peak_on_boundary = s.peak_on_boundary;
        r.concentration = concentration_report(s, profile, disk);
        r.budget = scaled_energy_budget(s).value;
        r.symmetry = symmetry_report(d, *s.u, s.peak_index);
        if (options.keep_solves) solves[i] = std::move(s);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp<int>(options.threads, 1, static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult out;
  out.rows = std::move(rows);
  if (options.keep_solves) out.solves = std::move(solves);
  if (n >= 2) out.expansion = fit_sweep_rows(out.rows, profile);
  return out;
}

}  // namespace spike
