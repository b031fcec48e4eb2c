#include <doctest.h>

#include <cmath>
#include <random>

#include "epiwave/model.hpp"
#include "epiwave/solver.hpp"
#include "epiwave/wavelab.hpp"

using namespace epiwave;

namespace {

constexpr double kCStar = 0.34097564293246508;

SimState single_field_state(const Grid1D& g, const std::vector<double>& x2) {
  SimState s;
  for (auto& f : s.f) f.assign(g.n, 0.0);
  s.f[1] = x2;
  return s;
}

RunResult reference_run(std::size_t n, double t_end, double snap_every) {
  const auto p = table2_params();
  SimConfig cfg;
  cfg.grid = make_grid(500.0, n);
  cfg.t_end = t_end;
  cfg.snapshot_every = snap_every;
  cfg.ic = {{0.0, endemic_equilibrium(p).to_array()},
            {200.0, disease_free_equilibrium(p).to_array()}};
  return run(cfg, p);
}

}  // namespace

TEST_CASE("front position on synthetic profiles") {
  const auto p = table2_params();
  const auto g = make_grid(500.0, 1001);
  const double x2ss = endemic_equilibrium(p).x2;

  std::vector<double> stepf(g.n);
  for (std::size_t j = 0; j < g.n; ++j)
    stepf[j] = (g.dx * double(j) < 200.0) ? x2ss : 0.0;
  const auto s = single_field_state(g, stepf);
  const auto pos = front_position(s, g, 2, x2ss / 2.0);
  REQUIRE(pos.has_value());
  CHECK(std::abs(*pos - 200.0) <= g.dx);

  std::vector<double> ramp(g.n);
  for (std::size_t j = 0; j < g.n; ++j) ramp[j] = g.dx * double(j) / 500.0;
  const auto r = front_position(single_field_state(g, ramp), g, 2, 0.25);
  REQUIRE(r.has_value());
  CHECK(std::abs(*r - 125.0) < 1e-9);

  // Level outside the field's range.
  CHECK(!front_position(s, g, 2, 2.0 * x2ss).has_value());
  CHECK(!front_position(s, g, 2, -1.0).has_value());

  // Front-seeding split IC.
  const auto ic = build_front_ic(g, p, 200.0);
  const auto q = front_position(ic, g, 2, x2ss / 2.0);
  REQUIRE(q.has_value());
  CHECK(std::abs(*q - 200.0) <= g.dx);
}

TEST_CASE("front position is translation equivariant") {
  const auto g = make_grid(100.0, 201);
  std::vector<double> f(g.n);
  for (std::size_t j = 0; j < g.n; ++j)
    f[j] = 1.0 / (1.0 + std::exp(0.3 * (g.dx * double(j) - 40.0)));
  const auto base = front_position(single_field_state(g, f), g, 2, 0.5);
  REQUIRE(base.has_value());
  const int k = 17;
  std::vector<double> shifted(g.n, f.back());
  for (std::size_t j = k; j < g.n; ++j) shifted[j] = f[j - k];
  for (std::size_t j = 0; j < std::size_t(k); ++j) shifted[j] = f[0];
  const auto moved = front_position(single_field_state(g, shifted), g, 2, 0.5);
  REQUIRE(moved.has_value());
  CHECK(std::abs(*moved - (*base + k * g.dx)) < 1e-12 * 100.0);
}

TEST_CASE("speed estimation on exact traces") {
  FrontTrace tr;
  tr.level = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.5 * i;
    tr.entries.emplace_back(t, 3.0 + 0.34 * t);
  }
  const auto e = estimate_speed(tr, 0.5);
  CHECK(std::abs(e.speed - 0.34) < 1e-12);
  CHECK(e.points >= 5);
  CHECK(e.rms_residual < 1e-12);

  FrontTrace flat;
  flat.level = 1.0;
  for (int i = 0; i <= 20; ++i) flat.entries.emplace_back(double(i), 42.0);
  CHECK(std::abs(estimate_speed(flat, 0.0).speed) < 1e-12);

  FrontTrace tiny;
  tiny.level = 1.0;
  for (int i = 0; i < 4; ++i) tiny.entries.emplace_back(double(i), double(i));
  CHECK_THROWS_AS(estimate_speed(tiny, 0.0), InsufficientPoints);

  // Invariance under time-origin shift, equivariance under space rescale.
  FrontTrace shifted = tr, scaled = tr;
  for (auto& [t, y] : shifted.entries) t += 1000.0;
  for (auto& [t, y] : scaled.entries) y *= 3.0;
  CHECK(std::abs(estimate_speed(shifted, 0.5).speed - e.speed) < 1e-9);
  CHECK(std::abs(estimate_speed(scaled, 0.5).speed - 3.0 * e.speed) < 1e-9);
}

TEST_CASE("measured front speed approaches the dispersion minimum") {
  // The pulled front converges like c* - 3/(2 lambda* t); a fit window in the
  // hundreds of days is needed before the deficit drops inside 15%.
  const auto p = table2_params();
  SimConfig cfg;
  cfg.grid = make_grid(800.0, 801);
  cfg.t_end = 350.0;
  cfg.snapshot_every = 5.0;
  cfg.ic = {{0.0, endemic_equilibrium(p).to_array()},
            {200.0, disease_free_equilibrium(p).to_array()}};
  const auto res = run(cfg, p);
  const double level = endemic_equilibrium(p).x2 / 2.0;
  const auto tr = trace_front(res.snapshots, cfg.grid, 2, level);
  const auto est = estimate_speed(tr, 0.5);  // fit on [175, 350]
  CHECK(std::abs(est.speed - kCStar) < 0.15 * kCStar);
  CHECK(est.speed >= (1.0 - 0.15) * kCStar);  // supercritical speed floor
}

TEST_CASE("conservation report") {
  const auto p = table2_params();

  CHECK(conservation_report({}, p).entries.empty());

  // Uniform +1 host offset relaxes like exp(-mu t).
  SimConfig cfg;
  cfg.grid = make_grid(100.0, 51);
  cfg.t_end = 10.0;
  cfg.dt = 0.01;
  cfg.snapshot_every = 1.0;
  Vec4 x0 = disease_free_equilibrium(p).to_array();
  x0[0] += 1.0;
  cfg.ic = {{0.0, x0}};
  const auto res = run(cfg, p);
  const auto rep = conservation_report(res.snapshots, p);
  REQUIRE(rep.entries.size() == res.snapshots.size());
  for (const auto& e : rep.entries) {
    if (e.t == 0.0) continue;
    const double expected = std::exp(-p.mu * e.t);
    CHECK(std::abs(e.host_dev / expected - 1.0) < 0.01);
  }
  CHECK(rep.host_monotone);
  CHECK(rep.vec_monotone);

  // Equilibrium-split IC keeps both sums pinned.
  const auto ref = reference_run(201, 5.0, 1.0);
  const auto rep2 = conservation_report(ref.snapshots, p);
  for (const auto& e : rep2.entries) {
    CHECK(e.host_dev < 1e-6);
    CHECK(e.vec_dev < 1e-6);
  }
}

TEST_CASE("log-derivative bound on exact exponentials") {
  const auto p = table2_params();
  const auto g = make_grid(100.0, 401);
  SimState s;
  for (auto& f : s.f) f.assign(g.n, 0.0);
  for (std::size_t j = 0; j < g.n; ++j) {
    const double y = g.dx * double(j);
    s.f[1][j] = std::exp(0.2 * (y - 50.0));
    s.f[3][j] = std::exp(0.3 * (y - 50.0));
  }
  const auto [h2, h4] = harnack_gradient_check(s, g, kCStar, p);
  CHECK(h2.max_ratio < h2.bound);
  CHECK(h2.max_ratio == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(h4.max_ratio < h4.bound);
  CHECK(h4.violations == 0);

  // A sign-changing field is only assessed where it is positive.
  SimState t = s;
  for (std::size_t j = 0; j < g.n / 2; ++j) t.f[1][j] = -1.0;
  const auto [g2, g4] = harnack_gradient_check(t, g, kCStar, p);
  CHECK(g2.checked < h2.checked);
  CHECK(g2.checked > 0);
}

TEST_CASE("log-derivative bound on a simulated late-time profile") {
  const auto p = table2_params();
  const auto res = reference_run(501, 50.0, 50.0);
  const auto g = make_grid(500.0, 501);
  const auto [h2, h4] = harnack_gradient_check(res.snapshots.back(), g, kCStar, p);

  // The infected-host bound holds with a wide margin at the default floor.
  CHECK(h2.max_ratio <= 1.05 * h2.bound);
  CHECK(h2.violations == 0);

  // The infected-vector bound is a wave-profile statement; the t=50 transient
  // still carries a heat-kernel tail whose log-slope exceeds it far ahead of
  // the front, so the default floor reports violations there while the wave
  // body (floor at 1% of the endemic level) is clean.
  CHECK(h4.violations > 0);
  const double x4ss = endemic_equilibrium(p).x4;
  const auto [b2, b4] =
      harnack_gradient_check(res.snapshots.back(), g, kCStar, p, 0.01 * x4ss);
  CHECK(b4.max_ratio <= 1.05 * b4.bound);
  CHECK(b4.violations == 0);
}

TEST_CASE("dissipation functional on the invariant manifold") {
  const auto p = table2_params();
  const auto e1 = endemic_equilibrium(p);
  CHECK(std::abs(g_functional(e1.to_array(), p)) <= 1e-10);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  const double hbar = p.b1 / p.mu, vbar = p.b2 / p.eta;
  for (int i = 0; i < 10000; ++i) {
    const double x2 = hbar * u(rng);
    const double x4 = vbar * u(rng);
    const Vec4 x = {hbar - x2, x2, vbar - x4, x4};
    CHECK(g_functional(x, p) <= 1e-10);
  }
  CHECK_THROWS_AS(g_functional({1.0, 0.0, 1.0, 1.0}, p), NonpositiveProfile);
}

TEST_CASE("descent function vanishes at the endemic state") {
  const auto p = table2_params();
  const auto e1 = endemic_equilibrium(p).to_array();
  const std::size_t n = 51;
  std::vector<double> y(n);
  std::array<std::vector<double>, 4> fields;
  for (auto& f : fields) f.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = double(j);
    for (int i = 0; i < 4; ++i) fields[i][j] = e1[i];
  }
  const auto lp = lyapunov_profile(y, fields, kCStar, p);
  for (double v : lp.V) CHECK(std::abs(v) <= 1e-12);
  CHECK(lp.rising_fraction == 0.0);

  fields[1][3] = 0.0;
  CHECK_THROWS_AS(lyapunov_profile(y, fields, kCStar, p), NonpositiveProfile);
}

TEST_CASE("descent along the simulated front") {
  const auto p = table2_params();
  const auto res = reference_run(501, 50.0, 50.0);
  const auto& last = res.snapshots.back();
  const auto g = make_grid(500.0, 501);

  // Keep nodes where every field is comfortably positive, then flip the axis
  // so the disease-free tail sits at -infinity as in the wave orientation.
  std::size_t hi = 0;
  for (std::size_t j = 0; j < g.n; ++j) {
    bool ok = true;
    for (int i = 0; i < 4; ++i) ok = ok && last.f[i][j] > 1e-12;
    if (ok) hi = j;
  }
  REQUIRE(hi > 10);
  std::vector<double> z(hi + 1);
  std::array<std::vector<double>, 4> fz;
  for (auto& f : fz) f.resize(hi + 1);
  for (std::size_t k = 0; k <= hi; ++k) {
    const std::size_t j = hi - k;
    z[k] = -g.dx * double(j);
    for (int i = 0; i < 4; ++i) fz[i][k] = last.f[i][j];
  }
  const auto lp = lyapunov_profile(z, fz, kCStar, p, 0.01);
  CHECK(lp.rising_fraction == 0.0);
}

TEST_CASE("infected compartments are mutually comparable") {
  std::vector<double> x2 = {1.0, 2.0, 3.0};
  std::vector<double> x4 = {0.5, 1.0, 1.5};
  CHECK(comparability_check(x2, x4) == doctest::Approx(2.0).epsilon(1e-12));
  std::vector<double> x4b = {2.0, 4.0, 6.0};
  CHECK(comparability_check(x2, x4b) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> with_zero = {1.0, 0.0, 3.0};
  CHECK_THROWS_AS(comparability_check(with_zero, x4), NonpositiveProfile);

  const auto p = table2_params();
  const auto res = reference_run(501, 20.0, 20.0);
  const auto& last = res.snapshots.back();
  std::size_t hi = 0;
  for (std::size_t j = 0; j < last.n(); ++j)
    if (last.f[1][j] > 1e-12 && last.f[3][j] > 1e-12) hi = j;
  std::vector<double> a(last.f[1].begin(), last.f[1].begin() + hi + 1);
  std::vector<double> b(last.f[3].begin(), last.f[3].begin() + hi + 1);
  const double m = comparability_check(a, b);
  CHECK(std::isfinite(m));
  CHECK(m >= 1.0);
}
