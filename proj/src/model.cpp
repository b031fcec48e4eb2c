#include "epiwave/model.hpp"

#include <cmath>
#include <string>

namespace epiwave {

void ModelParams::validate() const {
  const struct { const char* name; double v; } fields[] = {
      {"mu", mu},       {"eta", eta}, {"phi", phi}, {"beta1", beta1},
      {"beta2", beta2}, {"beta", beta}, {"b1", b1}, {"b2", b2},
      {"d_h", d_h},     {"d_v", d_v},
  };
  for (const auto& f : fields) {
    if (!(std::isfinite(f.v) && f.v > 0.0))
      throw InvalidParams(std::string("parameter ") + f.name +
                          " must be strictly positive and finite");
  }
}

ModelParams table2_params() {
  return ModelParams{0.83, 0.001, 0.35, 0.005, 0.003, 0.0011, 100.0, 0.1, 0.2, 0.5};
}

DerivedQuantities derived_quantities(const ModelParams& p) {
  p.validate();
  DerivedQuantities q;
  q.l0 = p.mu + p.phi - p.beta1 * p.b1 / p.mu;
  q.l1 = p.beta * p.beta2 * p.b1 * p.b2 / (p.mu * p.eta);
  q.r0 = p.beta1 * p.b1 / (p.mu * (p.mu + p.phi)) +
         p.beta * p.beta2 * p.b1 * p.b2 / (p.eta * p.eta * p.mu * (p.phi + p.mu));
  const double t = p.eta - q.l0;
  q.alpha_max_zero = 0.5 * (-(p.eta + q.l0) + std::sqrt(t * t + 4.0 * q.l1));
  return q;
}

Equilibrium disease_free_equilibrium(const ModelParams& p) {
  p.validate();
  return {p.b1 / p.mu, 0.0, p.b2 / p.eta, 0.0};
}

std::array<double, 3> endemic_quadratic(const ModelParams& p) {
  const double r0 = derived_quantities(p).r0;
  const double k0 = -p.mu * p.eta * p.eta * (p.mu + p.phi) * (r0 - 1.0);
  const double k1 = p.phi * p.beta * p.eta * p.mu + p.eta * p.eta * p.beta1 * p.mu +
                    p.beta * p.b2 * p.beta2 * p.mu + p.beta * p.eta * p.mu * p.mu -
                    p.beta * p.b1 * p.eta * p.beta1;
  const double k2 = p.beta * p.eta * p.beta1 * p.mu;
  return {k0, k1, k2};
}

Equilibrium endemic_equilibrium(const ModelParams& p) {
  const auto q = derived_quantities(p);
  if (q.r0 <= 1.0 + 1e-12)
    throw NoEndemicEquilibrium("endemic equilibrium requires r0 > 1 (r0 = " +
                               std::to_string(q.r0) + ")");
  const auto [k0, k1, k2] = endemic_quadratic(p);
  // k0 < 0 when r0 > 1; the roots have opposite signs. Compute the
  // larger-magnitude root first, recover the other from the product k0/k2.
  const double disc = std::sqrt(k1 * k1 - 4.0 * k2 * k0);
  const double qq = -0.5 * (k1 + std::copysign(disc, k1));
  const double x2 = (k1 >= 0.0) ? k0 / qq : qq / k2;
  const double denom = p.eta + p.beta * x2;
  Equilibrium e;
  e.x2 = x2;
  e.x3 = p.b2 / denom;
  e.x4 = (p.beta * p.b2 / p.eta) * x2 / denom;
  e.x1 = p.eta * (p.mu + p.phi) * denom /
         (p.beta1 * p.eta * denom + p.beta * p.beta2 * p.b2);
  return e;
}

Vec4 kinetics(const Vec4& x, const ModelParams& p) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
  return {
      p.b1 - (p.mu + p.beta2 * x4 + p.beta1 * x2) * x1 + p.phi * x2,
      (p.beta1 * x1 - (p.phi + p.mu)) * x2 + p.beta2 * x1 * x4,
      p.b2 - (p.eta + p.beta * x2) * x3,
      p.beta * x2 * x3 - p.eta * x4,
  };
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

Vec4 axpy(const Vec4& x, double a, const Vec4& k) {
  return {x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2], x[3] + a * k[3]};
}

Vec4 rk4_step(const Vec4& x, const ModelParams& p, double dt) {
  const Vec4 k1 = kinetics(x, p);
  const Vec4 k2 = kinetics(axpy(x, 0.5 * dt, k1), p);
  const Vec4 k3 = kinetics(axpy(x, 0.5 * dt, k2), p);
  const Vec4 k4 = kinetics(axpy(x, dt, k3), p);
  Vec4 out;
  for (int i = 0; i < 4; ++i)
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

std::vector<OdeSample> integrate_kinetics(const Vec4& x0, const ModelParams& p,
                                          double t_end, double dt) {
  p.validate();
  if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
  if (!(t_end >= 0.0)) throw InvalidParams("t_end must be nonnegative");
  for (double v : x0)
    if (!(v >= 0.0)) throw InvalidParams("initial state must be nonnegative");

  std::vector<OdeSample> traj;
  const std::size_t nsteps = (t_end == 0.0) ? 0 : steps_for(t_end, dt);
  traj.reserve(nsteps + 1);
  traj.push_back({0.0, x0});
  Vec4 x = x0;
  for (std::size_t i = 0; i < nsteps; ++i) {
    const bool last = (i + 1 == nsteps);
    const double h = last ? t_end - dt * static_cast<double>(nsteps - 1) : dt;
    x = rk4_step(x, p, h);
    const double t = last ? t_end : dt * static_cast<double>(i + 1);
    for (double v : x)
      if (!std::isfinite(v) || v < -1e-9)
        throw StepTooLarge("state left the admissible region at t = " +
                           std::to_string(t) + "; reduce dt");
    traj.push_back({t, x});
  }
  return traj;
}

}  // namespace epiwave
