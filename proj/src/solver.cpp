#include "epiwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epiwave {

Grid1D make_grid(double length, std::size_t n) {
  if (!(length > 0.0) || n < 3)
    throw InvalidParams("grid needs length > 0 and n >= 3");
  return {length, n, length / static_cast<double>(n - 1)};
}

SimState build_ic(const Grid1D& grid, const std::vector<ICSegment>& segments) {
  if (segments.empty()) throw InvalidParams("empty IC segment list");
  SimState s;
  for (auto& f : s.f) f.assign(grid.n, 0.0);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double y = grid.dx * static_cast<double>(j);
    Vec4 v = segments.front().value;
    for (const auto& seg : segments)
      if (seg.from <= y) v = seg.value;
    for (int i = 0; i < 4; ++i) s.f[i][j] = v[i];
  }
  return s;
}

SimState build_front_ic(const Grid1D& grid, const ModelParams& p, double split_at) {
  if (!(split_at > 0.0 && split_at < grid.length))
    throw InvalidParams("split_at must lie inside the domain");
  const Equilibrium e1 = endemic_equilibrium(p);  // throws when r0 <= 1
  const Equilibrium e0 = disease_free_equilibrium(p);
  return build_ic(grid, {{0.0, e1.to_array()}, {split_at, e0.to_array()}});
}

SimState build_seeded_ic(const Grid1D& grid, const ModelParams& p, double split_at,
                         double seed) {
  if (!(split_at > 0.0 && split_at < grid.length))
    throw InvalidParams("split_at must lie inside the domain");
  const Equilibrium e0 = disease_free_equilibrium(p);
  const Vec4 left = {e0.x1, seed, e0.x3, seed};
  return build_ic(grid, {{0.0, left}, {split_at, e0.to_array()}});
}

namespace {

// Number of fixed steps covering [0, t_end]: exact when t_end/dt is an
// integer up to rounding, one partial step otherwise.
std::size_t steps_for(double t_end, double dt) {
  const double raw = t_end / dt;
  const double rounded = std::round(raw);
  if (rounded >= 1.0 && std::abs(raw - rounded) <= 1e-9 * std::max(1.0, raw))
    return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(raw));
}

// Shared per-node update body. j is an interior-safe index pattern: jm/jp are
// the mirror-ghost neighbours.
struct RhsKernel {
  const double *x1, *x2, *x3, *x4;
  double *o1, *o2, *o3, *o4;
  double inv_dx2;
  ModelParams p;
  std::size_t n;
  bool with_kinetics;

  inline void node(std::size_t j) const {
    const std::size_t jm = (j == 0) ? 1 : j - 1;
    const std::size_t jp = (j == n - 1) ? n - 2 : j + 1;
    const double lap1 = (x1[jm] - 2.0 * x1[j] + x1[jp]) * inv_dx2;
    const double lap2 = (x2[jm] - 2.0 * x2[j] + x2[jp]) * inv_dx2;
    const double lap3 = (x3[jm] - 2.0 * x3[j] + x3[jp]) * inv_dx2;
    const double lap4 = (x4[jm] - 2.0 * x4[j] + x4[jp]) * inv_dx2;
    if (with_kinetics) {
      const double u1 = x1[j], u2 = x2[j], u3 = x3[j], u4 = x4[j];
      o1[j] = p.d_h * lap1 + p.b1 - (p.mu + p.beta2 * u4 + p.beta1 * u2) * u1 +
              p.phi * u2;
      o2[j] = p.d_h * lap2 + (p.beta1 * u1 - (p.phi + p.mu)) * u2 +
              p.beta2 * u1 * u4;
      o3[j] = p.d_v * lap3 + p.b2 - (p.eta + p.beta * u2) * u3;
      o4[j] = p.d_v * lap4 + p.beta * u2 * u3 - p.eta * u4;
    } else {
      o1[j] = p.d_h * lap1;
      o2[j] = p.d_h * lap2;
      o3[j] = p.d_v * lap3;
      o4[j] = p.d_v * lap4;
    }
  }
};

}  // namespace

void rd_rhs(const std::array<std::vector<double>, 4>& u, const ModelParams& p,
            const Grid1D& grid, std::array<std::vector<double>, 4>& out,
            Exec exec, bool with_kinetics) {
  const std::size_t n = grid.n;
  for (auto& o : out)
    if (o.size() != n) o.assign(n, 0.0);
  RhsKernel k{u[0].data(), u[1].data(), u[2].data(), u[3].data(),
              out[0].data(), out[1].data(), out[2].data(), out[3].data(),
              1.0 / (grid.dx * grid.dx), p, n, with_kinetics};
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n); ++j)
      k.node(static_cast<std::size_t>(j));
  } else {
    for (std::size_t j = 0; j < n; ++j) k.node(j);
  }
}

namespace {

void axpy_into(std::array<std::vector<double>, 4>& dst,
               const std::array<std::vector<double>, 4>& x, double a,
               const std::array<std::vector<double>, 4>& k, Exec exec) {
  const std::size_t n = x[0].size();
  for (int i = 0; i < 4; ++i) {
    double* d = dst[i].data();
    const double* xs = x[i].data();
    const double* ks = k[i].data();
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n); ++j)
        d[j] = xs[j] + a * ks[j];
    } else {
      for (std::size_t j = 0; j < n; ++j) d[j] = xs[j] + a * ks[j];
    }
  }
}

struct Stepper {
  std::array<std::vector<double>, 4> k1, k2, k3, k4, tmp;

  void resize(std::size_t n) {
    for (auto* a : {&k1, &k2, &k3, &k4, &tmp})
      for (auto& v : *a) v.assign(n, 0.0);
  }

  void advance(SimState& s, const ModelParams& p, const Grid1D& grid, double dt,
               Exec exec, bool with_kinetics) {
    rd_rhs(s.f, p, grid, k1, exec, with_kinetics);
    axpy_into(tmp, s.f, 0.5 * dt, k1, exec);
    rd_rhs(tmp, p, grid, k2, exec, with_kinetics);
    axpy_into(tmp, s.f, 0.5 * dt, k2, exec);
    rd_rhs(tmp, p, grid, k3, exec, with_kinetics);
    axpy_into(tmp, s.f, dt, k3, exec);
    rd_rhs(tmp, p, grid, k4, exec, with_kinetics);
    const std::size_t n = s.n();
    const double w = dt / 6.0;
    for (int i = 0; i < 4; ++i) {
      double* u = s.f[i].data();
      const double *a = k1[i].data(), *b = k2[i].data(), *c = k3[i].data(),
                   *d = k4[i].data();
      if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n); ++j)
          u[j] += w * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]);
      } else {
        for (std::size_t j = 0; j < n; ++j)
          u[j] += w * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]);
      }
    }
  }
};

// Scans the state once: throws on blow-up, returns the smallest entry seen.
double check_stability(const SimState& s, const ModelParams& p, double t_last) {
  const double cap = 10.0 * (p.b1 / p.mu + p.b2 / p.eta);
  double lo = 0.0;
  for (const auto& field : s.f)
    for (double v : field) {
      if (!std::isfinite(v) || v > cap)
        throw InstabilityDetected(
            t_last, "instability detected; last stable time t = " +
                        std::to_string(t_last));
      lo = std::min(lo, v);
    }
  return lo;
}

SimState clipped_copy(const SimState& s) {
  SimState out = s;
  for (auto& field : out.f)
    for (double& v : field)
      if (v < 0.0) v = 0.0;
  return out;
}

}  // namespace

SimState step(const SimState& state, const ModelParams& p, const Grid1D& grid,
              double dt, Exec exec, bool with_kinetics) {
  p.validate();
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  SimState out = state;
  Stepper st;
  st.resize(state.n());
  st.advance(out, p, grid, dt, exec, with_kinetics);
  out.t = state.t + dt;
  check_stability(out, p, state.t);
  return out;
}

double auto_dt(const SimConfig& cfg, const ModelParams& p) {
  const double host_cap = p.b1 / p.mu;
  const double vec_cap = p.b2 / p.eta;
  const double max_rate =
      std::max({p.mu + p.beta1 * host_cap + p.beta2 * vec_cap, p.mu + p.phi,
                p.eta + p.beta * host_cap, p.eta});
  const double dx = cfg.grid.dx;
  double dt = std::min(0.9 * dx * dx / (2.0 * std::max(p.d_h, p.d_v)),
                       0.05 / max_rate);
  if (cfg.snapshot_every > 0.0 && dt < cfg.snapshot_every) {
    const double m = std::ceil(cfg.snapshot_every / dt - 1e-12);
    dt = cfg.snapshot_every / m;
  }
  return dt;
}

RunResult run(const SimConfig& cfg, const ModelParams& p) {
  p.validate();
  if (!(cfg.t_end > 0.0)) throw InvalidParams("t_end must be positive");
  if (!(cfg.snapshot_every > 0.0))
    throw InvalidParams("snapshot_every must be positive");

  const double dt = cfg.dt ? *cfg.dt : auto_dt(cfg, p);
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");

  SimState s = build_ic(cfg.grid, cfg.ic);
  RunResult res;
  res.dt = dt;
  res.min_value = check_stability(s, p, 0.0);
  res.snapshots.push_back(clipped_copy(s));

  Stepper st;
  st.resize(s.n());
  const std::size_t nsteps = steps_for(cfg.t_end, dt);
  double next_mark = cfg.snapshot_every;
  for (std::size_t i = 0; i < nsteps; ++i) {
    const bool last = (i + 1 == nsteps);
    const double h = last ? cfg.t_end - dt * static_cast<double>(nsteps - 1) : dt;
    const double t_before = s.t;
    st.advance(s, p, cfg.grid, h, cfg.exec, true);
    s.t = last ? cfg.t_end : dt * static_cast<double>(i + 1);
    res.min_value = std::min(res.min_value, check_stability(s, p, t_before));
    if (last || s.t >= next_mark - 1e-9) {
      res.snapshots.push_back(clipped_copy(s));
      while (next_mark <= s.t + 1e-9) next_mark += cfg.snapshot_every;
    }
  }
  return res;
}

}  // namespace epiwave
