#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epiwave/certificates.hpp"
#include "epiwave/config.hpp"
#include "epiwave/csv.hpp"
#include "epiwave/dispersion.hpp"
#include "epiwave/model.hpp"
#include "epiwave/solver.hpp"
#include "epiwave/wavelab.hpp"

namespace fs = std::filesystem;
using namespace epiwave;

namespace {

struct BadRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path resolve_out_dir(const RunConfig& cfg, const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("EPIWAVE_OUT"); env && *env) return env;
  return cfg.out_dir;
}

std::string row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s;
}

int cmd_analyze(const RunConfig& cfg, const fs::path& out_dir) {
  const ModelParams& p = cfg.params;
  const auto q = derived_quantities(p);
  const auto e0 = disease_free_equilibrium(p);

  fs::create_directories(out_dir);
  AtomicFileWriter w(out_dir / "summary.csv");
  w.line("quantity,value");
  w.line(row({"r0", fmt_double(q.r0)}));
  w.line(row({"l0", fmt_double(q.l0)}));
  w.line(row({"l1", fmt_double(q.l1)}));
  w.line(row({"alpha_max_0", fmt_double(q.alpha_max_zero)}));
  w.line(row({"e0_x1", fmt_double(e0.x1)}));
  w.line(row({"e0_x2", fmt_double(e0.x2)}));
  w.line(row({"e0_x3", fmt_double(e0.x3)}));
  w.line(row({"e0_x4", fmt_double(e0.x4)}));

  std::cout << "r0 = " << fmt_double(q.r0) << "\n"
            << "l0 = " << fmt_double(q.l0) << ", l1 = " << fmt_double(q.l1)
            << ", alpha_max(0) = " << fmt_double(q.alpha_max_zero) << "\n"
            << "E0 = (" << fmt_double(e0.x1) << ", 0, " << fmt_double(e0.x3)
            << ", 0)\n";

  if (q.r0 > 1.0 + 1e-12) {
    const auto e1 = endemic_equilibrium(p);
    const auto disp = minimal_wave_speed(p);
    w.line(row({"e1_x1", fmt_double(e1.x1)}));
    w.line(row({"e1_x2", fmt_double(e1.x2)}));
    w.line(row({"e1_x3", fmt_double(e1.x3)}));
    w.line(row({"e1_x4", fmt_double(e1.x4)}));
    w.line(row({"c_star", fmt_double(disp.c_star)}));
    w.line(row({"lambda_star", fmt_double(disp.lambda_star)}));
    std::cout << "E1 = (" << fmt_double(e1.x1) << ", " << fmt_double(e1.x2)
              << ", " << fmt_double(e1.x3) << ", " << fmt_double(e1.x4) << ")\n"
              << "c* = " << fmt_double(disp.c_star)
              << " at lambda* = " << fmt_double(disp.lambda_star) << "\n";
  } else {
    w.line(row({"e1", "none"}));
    w.line(row({"c_star", "subcritical"}));
    std::cout << "endemic: none (r0 <= 1)\nc*: subcritical\n";
  }
  w.commit();
  std::cout << "wrote " << (out_dir / "summary.csv").string() << "\n";
  return 0;
}

int cmd_dispersion(const RunConfig& cfg, const fs::path& out_dir,
                   double lambda_min, double lambda_max, long samples) {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || samples < 2)
    throw BadRange("need 0 < lambda-min < lambda-max and samples >= 2");
  const ModelParams& p = cfg.params;
  fs::create_directories(out_dir);
  AtomicFileWriter w(out_dir / "dispersion.csv");
  w.line("lambda,alpha_min,alpha_max,c_lambda");
  const double step = std::log(lambda_max / lambda_min) / double(samples - 1);
  for (long i = 0; i < samples; ++i) {
    const double lam = (i + 1 == samples) ? lambda_max
                                          : lambda_min * std::exp(step * double(i));
    const auto br = alpha_branches(lam, p);
    w.line(row({fmt_double(lam), fmt_double(br.alpha_min),
                fmt_double(br.alpha_max), fmt_double(br.alpha_max / lam)}));
  }
  const auto q = derived_quantities(p);
  if (q.alpha_max_zero > 0.0) {
    const auto disp = minimal_wave_speed(p);
    w.line("# lambda_star=" + fmt_double(disp.lambda_star) +
           ",c_star=" + fmt_double(disp.c_star));
    std::cout << "c* = " << fmt_double(disp.c_star)
              << " at lambda* = " << fmt_double(disp.lambda_star) << "\n";
  } else {
    w.line("# subcritical");
    std::cout << "subcritical: alpha_max(0) <= 0\n";
  }
  w.commit();
  std::cout << "wrote " << (out_dir / "dispersion.csv").string() << "\n";
  return 0;
}

void write_snapshot(const fs::path& out_dir, const SimState& s, const Grid1D& grid) {
  AtomicFileWriter w(out_dir / ("snap_" + fmt_double(s.t) + ".csv"));
  w.line("y,x1,x2,x3,x4");
  for (std::size_t j = 0; j < s.n(); ++j) {
    const double y = grid.dx * double(j);
    w.line(row({fmt_double(y), fmt_double(s.f[0][j]), fmt_double(s.f[1][j]),
                fmt_double(s.f[2][j]), fmt_double(s.f[3][j])}));
  }
  w.commit();
}

// Largest contiguous node range where every field exceeds the floor.
std::pair<std::size_t, std::size_t> positive_window(const SimState& s, double floor) {
  std::size_t best_a = 0, best_b = 0, a = 0;
  bool in_run = false;
  for (std::size_t j = 0; j <= s.n(); ++j) {
    const bool ok = j < s.n() && s.f[0][j] > floor && s.f[1][j] > floor &&
                    s.f[2][j] > floor && s.f[3][j] > floor;
    if (ok && !in_run) {
      a = j;
      in_run = true;
    } else if (!ok && in_run) {
      if (j - a > best_b - best_a) {
        best_a = a;
        best_b = j;
      }
      in_run = false;
    }
  }
  return {best_a, best_b};
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, bool serial) {
  const ModelParams& p = cfg.params;
  const auto q = derived_quantities(p);
  const bool supercritical = q.r0 > 1.0 + 1e-12;

  SimConfig sim;
  sim.grid = make_grid(cfg.grid_length, cfg.grid_n);
  sim.t_end = cfg.t_end;
  sim.dt = cfg.dt;
  sim.snapshot_every = cfg.snapshot_every;
  sim.exec = serial ? Exec::serial : Exec::parallel;
  const Equilibrium e0 = disease_free_equilibrium(p);
  if (supercritical) {
    sim.ic = {{0.0, endemic_equilibrium(p).to_array()},
              {cfg.split_at, e0.to_array()}};
  } else {
    sim.ic = {{0.0, {e0.x1, 1.0, e0.x3, 1.0}}, {cfg.split_at, e0.to_array()}};
  }

  const auto res = run(sim, p);
  fs::create_directories(out_dir);
  for (const auto& s : res.snapshots) write_snapshot(out_dir, s, sim.grid);

  // Front trace and speed fit. The level anchors to half the endemic infected
  // density when it exists, else half the initial infected maximum.
  double level;
  if (supercritical) {
    level = endemic_equilibrium(p).x2 / 2.0;
  } else {
    double m0 = 0.0;
    for (double v : res.snapshots.front().f[1]) m0 = std::max(m0, v);
    level = m0 / 2.0;
  }
  const auto trace = trace_front(res.snapshots, sim.grid, 2, level);
  {
    AtomicFileWriter w(out_dir / "front.csv");
    w.line("t,y_front");
    for (const auto& [t, y] : trace.entries)
      w.line(row({fmt_double(t), fmt_double(y)}));
    w.commit();
  }

  bool have_speed = false;
  SpeedEstimate sp{};
  try {
    sp = estimate_speed(trace, 0.5);
    have_speed = true;
  } catch (const InsufficientPoints&) {
  }

  // Extinction indicator: final infected maxima relative to initial.
  double x2_0 = 0, x4_0 = 0, x2_T = 0, x4_T = 0;
  for (double v : res.snapshots.front().f[1]) x2_0 = std::max(x2_0, v);
  for (double v : res.snapshots.front().f[3]) x4_0 = std::max(x4_0, v);
  for (double v : res.snapshots.back().f[1]) x2_T = std::max(x2_T, v);
  for (double v : res.snapshots.back().f[3]) x4_T = std::max(x4_T, v);
  const bool extinct = x2_T < 1e-6 * x2_0 && x4_T < 1e-6 * x4_0;

  {
    AtomicFileWriter w(out_dir / "report_speed.csv");
    w.line("quantity,value");
    w.line(row({"level", fmt_double(level)}));
    if (have_speed) {
      w.line(row({"speed", fmt_double(sp.speed)}));
      w.line(row({"intercept", fmt_double(sp.intercept)}));
      w.line(row({"rms_residual", fmt_double(sp.rms_residual)}));
      w.line(row({"fit_t_lo", fmt_double(sp.fit_window.first)}));
      w.line(row({"fit_t_hi", fmt_double(sp.fit_window.second)}));
      w.line(row({"points", std::to_string(sp.points)}));
    } else {
      w.line(row({"speed", "none"}));
    }
    w.line(row({"x2_initial_max", fmt_double(x2_0)}));
    w.line(row({"x2_final_max", fmt_double(x2_T)}));
    w.line(row({"x4_initial_max", fmt_double(x4_0)}));
    w.line(row({"x4_final_max", fmt_double(x4_T)}));
    w.line(row({"extinct", extinct ? "1" : "0"}));
    w.commit();
  }

  {
    const auto rep = conservation_report(res.snapshots, p);
    AtomicFileWriter w(out_dir / "report_conservation.csv");
    w.line("t,host_dev,vec_dev");
    for (const auto& e : rep.entries)
      w.line(row({fmt_double(e.t), fmt_double(e.host_dev), fmt_double(e.vec_dev)}));
    w.line(std::string("# host_monotone=") + (rep.host_monotone ? "1" : "0") +
           ",vec_monotone=" + (rep.vec_monotone ? "1" : "0"));
    w.commit();
  }

  const auto& last = res.snapshots.back();
  const auto [wa, wb] = positive_window(last, 1e-12);
  const double c_ref = supercritical ? minimal_wave_speed(p).c_star : 0.0;

  {
    AtomicFileWriter w(out_dir / "report_harnack.csv");
    w.line("field,bound,max_ratio,argmax_y,checked,violations");
    if (supercritical) {
      const auto [h2, h4] = harnack_gradient_check(last, sim.grid, c_ref, p);
      for (const auto* h : {&h2, &h4})
        w.line(row({h == &h2 ? "x2" : "x4", fmt_double(h->bound),
                    fmt_double(h->max_ratio), fmt_double(h->argmax_y),
                    std::to_string(h->checked), std::to_string(h->violations)}));
    } else {
      w.line("# skipped: subcritical (no reference wave speed)");
    }
    w.commit();
  }

  {
    AtomicFileWriter w(out_dir / "report_lyapunov.csv");
    if (supercritical && wb - wa >= 3) {
      // Reverse the window so the disease-free side sits at -infinity, the
      // orientation in which V descends along a wave.
      std::vector<double> z(wb - wa);
      std::array<std::vector<double>, 4> fz;
      for (auto& f : fz) f.resize(wb - wa);
      for (std::size_t k = 0; k < wb - wa; ++k) {
        const std::size_t j = wb - 1 - k;
        z[k] = -sim.grid.dx * double(j);
        for (int i = 0; i < 4; ++i) fz[i][k] = last.f[i][j];
      }
      const auto lp = lyapunov_profile(z, fz, c_ref, p);
      w.line("y,V");
      for (std::size_t k = 0; k < lp.y.size(); ++k)
        w.line(row({fmt_double(lp.y[k]), fmt_double(lp.V[k])}));
      w.line("# max_rise=" + fmt_double(lp.max_rise) +
             ",rising_fraction=" + fmt_double(lp.rising_fraction));
    } else {
      w.line("# skipped: subcritical or empty positive window");
    }
    w.commit();
  }

  {
    AtomicFileWriter w(out_dir / "report_comparability.csv");
    w.line("quantity,value");
    if (wb - wa >= 1) {
      std::vector<double> x2(last.f[1].begin() + wa, last.f[1].begin() + wb);
      std::vector<double> x4(last.f[3].begin() + wa, last.f[3].begin() + wb);
      w.line(row({"m", fmt_double(comparability_check(x2, x4))}));
      w.line(row({"window_lo", fmt_double(sim.grid.dx * double(wa))}));
      w.line(row({"window_hi", fmt_double(sim.grid.dx * double(wb - 1))}));
    } else {
      w.line(row({"m", "none"}));
    }
    w.commit();
  }

  {
    AtomicFileWriter w(out_dir / "manifest.csv");
    w.line("key,value");
    for (const auto& [k, v] : cfg.echo()) w.line(row({k, v}));
    w.line(row({"derived.r0", fmt_double(q.r0)}));
    w.line(row({"derived.l0", fmt_double(q.l0)}));
    w.line(row({"derived.l1", fmt_double(q.l1)}));
    w.line(row({"derived.alpha_max_0", fmt_double(q.alpha_max_zero)}));
    w.line(row({"derived.dt_used", fmt_double(res.dt)}));
    w.line(row({"derived.ic", supercritical ? "endemic_block" : "seeded_block"}));
    if (supercritical)
      w.line(row({"derived.c_star", fmt_double(c_ref)}));
    else
      w.line(row({"derived.c_star", "subcritical"}));
    w.commit();
  }

  std::cout << "snapshots: " << res.snapshots.size() << ", dt = " << fmt_double(res.dt)
            << "\n";
  if (have_speed)
    std::cout << "front speed = " << fmt_double(sp.speed) << " (fit on ["
              << fmt_double(sp.fit_window.first) << ", "
              << fmt_double(sp.fit_window.second) << "], rms "
              << fmt_double(sp.rms_residual) << ")\n";
  else
    std::cout << "front speed: not measurable (no persistent crossing)\n";
  if (extinct) std::cout << "extinction: infected fields below 1e-6 of initial\n";
  std::cout << "wrote reports under " << out_dir.string() << "\n";
  return 0;
}

int cmd_certify(const RunConfig& cfg, const fs::path& out_dir, double c) {
  const ModelParams& p = cfg.params;
  const auto cert = default_certificate(c, p);  // throws SpeedNotSupercritical
  const auto grid =
      uniform_grid(-5.0 / cert.kappa, 5.0 / cert.lambda_tilde, 2001);
  const auto rep = verify_supersub(cert, c, p, grid);

  fs::create_directories(out_dir);
  AtomicFileWriter w(out_dir / "certificate.csv");
  w.line("name,kind,worst,worst_y,points");
  w.line(row({"lambda", "param", fmt_double(cert.lambda), "", ""}));
  w.line(row({"kappa", "param", fmt_double(cert.kappa), "", ""}));
  w.line(row({"lambda_tilde", "param", fmt_double(cert.lambda_tilde), "", ""}));
  w.line(row({"A", "param", fmt_double(cert.A), "", ""}));
  w.line(row({"B", "param", fmt_double(cert.B), "", ""}));
  for (const auto& e : rep.identities)
    w.line(row({e.name, "identity", fmt_double(e.worst), fmt_double(e.worst_y),
                std::to_string(e.points)}));
  for (const auto& e : rep.inequalities)
    w.line(row({e.name, "inequality", fmt_double(e.worst), fmt_double(e.worst_y),
                std::to_string(e.points)}));
  w.line(row({"b0_separation", "constraint", fmt_double(rep.b0_separation_margin),
              "", ""}));
  w.line(row({"constraints_ok", "constraint", rep.constraints_ok ? "1" : "0", "",
              ""}));
  w.commit();

  for (const auto& e : rep.identities)
    std::cout << e.name << ": |worst| = " << fmt_double(std::abs(e.worst)) << "\n";
  for (const auto& e : rep.inequalities)
    std::cout << e.name << ": min = " << fmt_double(e.worst) << "\n";
  std::cout << "b0 separation margin = " << fmt_double(rep.b0_separation_margin)
            << "\n"
            << "wrote " << (out_dir / "certificate.csv").string() << "\n";
  const bool ok = rep.passed(1e-10);
  std::cout << (ok ? "certificate PASSED" : "certificate FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vector-host epidemic wave toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  double cert_c = 0.0;
  double lambda_min = 0.01, lambda_max = 10.0;
  long samples = 500;
  bool serial = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
  };
  auto* a_analyze = app.add_subcommand("analyze", "equilibria, r0 and minimal speed");
  add_common(a_analyze);
  auto* a_disp = app.add_subcommand("dispersion", "sample the dispersion curve");
  add_common(a_disp);
  a_disp->add_option("--lambda-min", lambda_min, "lowest wavenumber");
  a_disp->add_option("--lambda-max", lambda_max, "highest wavenumber");
  a_disp->add_option("--samples", samples, "number of log-spaced samples");
  auto* a_sim = app.add_subcommand("simulate", "run the reaction-diffusion system");
  add_common(a_sim);
  a_sim->add_flag("--serial", serial, "use the serial reference kernels");
  auto* a_cert = app.add_subcommand("certify", "verify super/sub-solution certificates");
  add_common(a_cert);
  a_cert->add_option("--c", cert_c, "wave speed, must exceed c*")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = load_config(config_path);
    cfg.params.validate();
    const fs::path out_dir = resolve_out_dir(cfg, out_override);
    if (a_analyze->parsed()) return cmd_analyze(cfg, out_dir);
    if (a_disp->parsed())
      return cmd_dispersion(cfg, out_dir, lambda_min, lambda_max, samples);
    if (a_sim->parsed()) return cmd_simulate(cfg, out_dir, serial);
    if (a_cert->parsed()) return cmd_certify(cfg, out_dir, cert_c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return 3;
  } catch (const BadRange& e) {
    std::cerr << "bad range: " << e.what() << "\n";
    return 4;
  } catch (const InstabilityDetected& e) {
    std::cerr << "instability: " << e.what() << "\n";
    return 5;
  } catch (const SpeedNotSupercritical& e) {
    std::cerr << "speed not supercritical: " << e.what() << "\n";
    return 6;
  } catch (const SubcriticalR0& e) {
    std::cerr << "subcritical: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
