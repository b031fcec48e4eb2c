#include "epiwave/wavelab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epiwave {

std::optional<double> front_position(const SimState& state, const Grid1D& grid,
                                     int field_index, double level) {
  if (field_index < 1 || field_index > 4)
    throw InvalidParams("field_index must be in 1..4");
  const auto& f = state.f[field_index - 1];
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  if (!(*lo < level && level < *hi)) return std::nullopt;
  for (std::size_t j = f.size() - 1; j > 0; --j) {
    const double a = f[j - 1], b = f[j];
    if ((a - level) * (b - level) <= 0.0 && a != b) {
      const double y_left = grid.dx * static_cast<double>(j - 1);
      return y_left + grid.dx * (level - a) / (b - a);
    }
  }
  return std::nullopt;
}

FrontTrace trace_front(const std::vector<SimState>& snapshots, const Grid1D& grid,
                       int field_index, double level) {
  FrontTrace tr;
  tr.level = level;
  for (const auto& s : snapshots)
    if (auto pos = front_position(s, grid, field_index, level))
      tr.entries.emplace_back(s.t, *pos);
  return tr;
}

SpeedEstimate estimate_speed(const FrontTrace& trace, double discard_fraction) {
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0))
    throw InvalidParams("discard_fraction must be in [0,1)");
  if (trace.entries.empty()) throw InsufficientPoints("empty front trace");
  const double t0 = trace.entries.front().first;
  const double t1 = trace.entries.back().first;
  const double cut = t0 + discard_fraction * (t1 - t0);

  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t m = 0;
  for (const auto& [t, y] : trace.entries) {
    if (t < cut) continue;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++m;
  }
  if (m < 5)
    throw InsufficientPoints("need >= 5 trace points after transient removal");
  const double mm = static_cast<double>(m);
  const double denom = mm * stt - st * st;
  SpeedEstimate e;
  e.points = m;
  e.fit_window = {cut, t1};
  if (denom == 0.0) {  // all points at one time
    throw InsufficientPoints("degenerate time window");
  }
  e.speed = (mm * sty - st * sy) / denom;
  e.intercept = (sy - e.speed * st) / mm;
  double ss = 0;
  for (const auto& [t, y] : trace.entries) {
    if (t < cut) continue;
    const double r = y - (e.intercept + e.speed * t);
    ss += r * r;
  }
  e.rms_residual = std::sqrt(ss / mm);
  return e;
}

ConservationReport conservation_report(const std::vector<SimState>& snapshots,
                                       const ModelParams& p) {
  ConservationReport rep;
  const double host_target = p.b1 / p.mu;
  const double vec_target = p.b2 / p.eta;
  for (const auto& s : snapshots) {
    ConservationEntry e{s.t, 0.0, 0.0};
    for (std::size_t j = 0; j < s.n(); ++j) {
      e.host_dev = std::max(e.host_dev, std::abs(s.f[0][j] + s.f[1][j] - host_target));
      e.vec_dev = std::max(e.vec_dev, std::abs(s.f[2][j] + s.f[3][j] - vec_target));
    }
    rep.entries.push_back(e);
  }
  for (std::size_t k = 1; k < rep.entries.size(); ++k) {
    if (rep.entries[k].host_dev > rep.entries[k - 1].host_dev + 1e-10)
      rep.host_monotone = false;
    if (rep.entries[k].vec_dev > rep.entries[k - 1].vec_dev + 1e-10)
      rep.vec_monotone = false;
  }
  return rep;
}

namespace {

HarnackFieldReport harnack_field(const std::vector<double>& u, const Grid1D& grid,
                                 double c, double kappa, double d, double floor) {
  HarnackFieldReport r;
  r.bound = (std::sqrt(c * c + 4.0 * kappa) + std::abs(c)) / (2.0 * d);
  r.max_ratio = 0.0;
  r.argmax_y = 0.0;
  r.checked = 0;
  r.violations = 0;
  for (std::size_t j = 1; j + 1 < u.size(); ++j) {
    if (!(u[j] > floor)) continue;
    const double du = (u[j + 1] - u[j - 1]) / (2.0 * grid.dx);
    const double ratio = std::abs(du) / u[j];
    ++r.checked;
    if (ratio > r.bound) ++r.violations;
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.argmax_y = grid.dx * static_cast<double>(j);
    }
  }
  return r;
}

}  // namespace

std::pair<HarnackFieldReport, HarnackFieldReport> harnack_gradient_check(
    const SimState& profile, const Grid1D& grid, double c, const ModelParams& p,
    double floor) {
  return {harnack_field(profile.f[1], grid, c, p.mu + p.phi, p.d_h, floor),
          harnack_field(profile.f[3], grid, c, p.eta, p.d_v, floor)};
}

namespace {

Vec4 lyapunov_weights(const ModelParams& p, const Equilibrium& e1) {
  const double a1 = p.beta * e1.x1 * e1.x4;
  const double a3 = p.beta2 * e1.x3 * e1.x2 + p.beta1 * e1.x1 * e1.x4;
  return {a1, a1, a3, a3};
}

}  // namespace

double g_functional(const Vec4& x, const ModelParams& p) {
  for (double v : x)
    if (!(v > 0.0)) throw NonpositiveProfile("g_functional needs x > 0");
  const Equilibrium e1 = endemic_equilibrium(p);
  const Vec4 a = lyapunov_weights(p, e1);
  const Vec4 xs = e1.to_array();
  const Vec4 F = kinetics(x, p);
  double g = 0.0;
  for (int i = 0; i < 4; ++i) g += a[i] * (1.0 - xs[i] / x[i]) * F[i];
  return g;
}

LyapunovProfile lyapunov_profile(const std::vector<double>& y,
                                 const std::array<std::vector<double>, 4>& fields,
                                 double c, const ModelParams& p,
                                 double rise_tol_frac) {
  const std::size_t n = y.size();
  if (n < 3) throw InvalidParams("need at least 3 profile nodes");
  for (const auto& f : fields) {
    if (f.size() != n) throw InvalidParams("field/grid size mismatch");
    for (double v : f)
      if (!(v > 0.0)) throw NonpositiveProfile("profile must be strictly positive");
  }
  const Equilibrium e1 = endemic_equilibrium(p);
  const Vec4 a = lyapunov_weights(p, e1);
  const Vec4 xs = e1.to_array();
  const Vec4 d = {p.d_h, p.d_h, p.d_v, p.d_v};
  const auto ell = [](double s) { return s - 1.0 - std::log(s); };

  LyapunovProfile out;
  out.y.reserve(n - 2);
  out.V.reserve(n - 2);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double du = (fields[i][j + 1] - fields[i][j - 1]) / (y[j + 1] - y[j - 1]);
      const double u = fields[i][j];
      v += a[i] * (d[i] * du * (xs[i] / u - 1.0) + c * xs[i] * ell(u / xs[i]));
    }
    out.y.push_back(y[j]);
    out.V.push_back(v);
  }

  double vmax = 0.0;
  for (double v : out.V) vmax = std::max(vmax, std::abs(v));
  const double tol = rise_tol_frac * vmax;
  out.max_rise = -std::numeric_limits<double>::infinity();
  std::size_t rising = 0;
  for (std::size_t k = 1; k < out.V.size(); ++k) {
    const double dv = out.V[k] - out.V[k - 1];
    out.max_rise = std::max(out.max_rise, dv);
    if (dv > tol) ++rising;
  }
  out.rising_fraction =
      out.V.size() > 1 ? static_cast<double>(rising) / (out.V.size() - 1) : 0.0;
  return out;
}

double comparability_check(const std::vector<double>& x2,
                           const std::vector<double>& x4) {
  if (x2.size() != x4.size() || x2.empty())
    throw InvalidParams("fields must be non-empty and equally sized");
  double m = 1.0;
  for (std::size_t j = 0; j < x2.size(); ++j) {
    if (!(x2[j] > 0.0 && x4[j] > 0.0))
      throw NonpositiveProfile("comparability needs strictly positive fields");
    m = std::max({m, x2[j] / x4[j], x4[j] / x2[j]});
  }
  return m;
}

}  // namespace epiwave
