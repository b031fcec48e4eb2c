#include "epiwave/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "epiwave/dispersion.hpp"

namespace epiwave {

Vec4 WaveProfilePair::upper(double y) const {
  const double e = std::exp(lambda * y);
  return {host_cap, k2_lambda * e, vector_cap, k4_lambda * e};
}

Vec4 WaveProfilePair::lower(double y) const {
  const double el = std::exp(lambda * y);
  const double ek = std::exp(kappa * y);
  const double et = std::exp(lambda_tilde * y);
  return {
      std::max(0.0, host_cap - A * et),
      std::max(0.0, k2_lambda - B * k2_lambda_kappa * ek) * el,
      std::max(0.0, vector_cap - A * et),
      std::max(0.0, k4_lambda - B * k4_lambda_kappa * ek) * el,
  };
}

WaveProfilePair make_profiles(const CertificateParams& cert, const ModelParams& p) {
  p.validate();
  if (!(cert.lambda > 0.0)) throw InvalidCertificate("lambda must be positive");
  if (!(cert.kappa > 0.0)) throw InvalidCertificate("kappa must be positive");
  if (!(cert.lambda_tilde > 0.0))
    throw InvalidCertificate("lambda_tilde must be positive");
  if (!(cert.A > 0.0 && cert.B > 0.0))
    throw InvalidCertificate("amplitudes must be positive");
  WaveProfilePair w;
  w.lambda = cert.lambda;
  w.kappa = cert.kappa;
  w.lambda_tilde = cert.lambda_tilde;
  w.A = cert.A;
  w.B = cert.B;
  const auto bl = alpha_branches(cert.lambda, p);
  const auto bk = alpha_branches(cert.lambda + cert.kappa, p);
  w.k2_lambda = 1.0;
  w.k4_lambda = bl.eigvec_max[1];
  w.k2_lambda_kappa = 1.0;
  w.k4_lambda_kappa = bk.eigvec_max[1];
  w.c_lambda = bl.alpha_max / cert.lambda;
  w.c_lambda_kappa = bk.alpha_max / (cert.lambda + cert.kappa);
  w.host_cap = p.b1 / p.mu;
  w.vector_cap = p.b2 / p.eta;
  return w;
}

CertificateParams default_certificate(double c, const ModelParams& p) {
  const auto [lmin, lmax] = lambda_roots(c, p);  // throws SpeedNotSupercritical
  (void)lmax;
  const double lambda_star = minimal_wave_speed(p).lambda_star;

  CertificateParams cert;
  cert.lambda = lmin;
  cert.lambda_tilde = std::min(cert.lambda, c / (p.d_h + p.d_v));
  const auto bl = alpha_branches(cert.lambda, p);
  const double k2l = 1.0, k4l = bl.eigvec_max[1];
  const double hbar = p.b1 / p.mu, vbar = p.b2 / p.eta;
  // The last entry is the published bound's third term; the one before it is
  // the symmetric bound actually needed by the susceptible-vector inequality.
  cert.A = 1.01 * std::max({1.0, hbar, vbar,
                            p.b1 * (p.beta2 * k4l + p.beta1 * k2l) / (p.mu * p.mu),
                            p.beta * p.b2 * k2l / (p.eta * p.eta),
                            p.eta * p.mu / (p.b2 * k2l)});
  cert.kappa = 0.5 * std::min(cert.lambda_tilde, lambda_star - cert.lambda);

  const auto bk = alpha_branches(cert.lambda + cert.kappa, p);
  const double k2k = 1.0, k4k = bk.eigvec_max[1];
  const double ck = bk.alpha_max / (cert.lambda + cert.kappa);

  // Support separation: the infected depressions must switch left of the
  // susceptible ones. Doubled until satisfied.
  const double rhs = std::max(std::log(cert.A / hbar), std::log(cert.A / vbar)) /
                     cert.lambda_tilde;
  double b0 = 1.0;
  for (int i = 0; i < 4096; ++i) {
    const double lhs =
        std::min(std::log(b0 * k2k / k2l), std::log(b0 * k4k / k4l)) / cert.kappa;
    if (lhs > rhs) break;
    b0 *= 2.0;
  }

  const double gap = (cert.lambda + cert.kappa) * (c - ck);
  cert.B = 1.01 * std::max({1.0,
                            cert.A * (p.beta1 * k2l + p.beta2 * k4k) / (gap * k2k),
                            cert.A * p.beta * k2l / (gap * k4k), b0});
  return cert;
}

namespace {

void update_worst_abs(ResidualEntry& e, double r, double y) {
  ++e.points;
  if (std::abs(r) > std::abs(e.worst)) {
    e.worst = r;
    e.worst_y = y;
  }
}

void update_worst_min(ResidualEntry& e, double r, double y) {
  ++e.points;
  if (r < e.worst) {
    e.worst = r;
    e.worst_y = y;
  }
}

}  // namespace

bool SupersubReport::identities_ok(double tol) const {
  for (const auto& e : identities)
    if (!(std::abs(e.worst) <= tol)) return false;
  return true;
}

bool SupersubReport::inequalities_ok(double tol) const {
  for (const auto& e : inequalities)
    if (e.points > 0 && !(e.worst >= -tol)) return false;
  return true;
}

SupersubReport verify_supersub(const CertificateParams& cert, double c,
                               const ModelParams& p,
                               const std::vector<double>& y_grid) {
  if (y_grid.size() < 2) throw InvalidParams("y_grid needs at least 2 points");
  if (!std::is_sorted(y_grid.begin(), y_grid.end()))
    throw InvalidParams("y_grid must be sorted");
  const auto w = make_profiles(cert, p);
  const double offd12 = p.beta2 * p.b1 / p.mu;
  const double offd21 = p.beta * p.b2 / p.eta;
  const auto q = derived_quantities(p);

  SupersubReport rep;
  rep.identities = {{"upper_x2_identity_lambda", 0, 0, 0},
                    {"upper_x4_identity_lambda", 0, 0, 0},
                    {"upper_x2_identity_lambda_kappa", 0, 0, 0},
                    {"upper_x4_identity_lambda_kappa", 0, 0, 0}};
  const double big = std::numeric_limits<double>::infinity();
  rep.inequalities = {{"lower_x1_inequality", big, 0, 0},
                      {"lower_x2_inequality", big, 0, 0},
                      {"lower_x3_inequality", big, 0, 0},
                      {"lower_x4_inequality", big, 0, 0}};

  // Positive-part switch locations of the four depressed profiles.
  const double y1s = std::log(w.host_cap / w.A) / w.lambda_tilde;
  const double y3s = std::log(w.vector_cap / w.A) / w.lambda_tilde;
  const double y2s = std::log(w.k2_lambda / (w.B * w.k2_lambda_kappa)) / w.kappa;
  const double y4s = std::log(w.k4_lambda / (w.B * w.k4_lambda_kappa)) / w.kappa;

  // Constraint re-check (parameter bounds as stated, plus separation).
  const double lam_star = minimal_wave_speed(p).lambda_star;
  const auto add_violation = [&](const char* s) {
    rep.constraint_violations.emplace_back(s);
  };
  if (!(cert.lambda > 0.0 && cert.lambda < lam_star)) add_violation("lambda range");
  if (!(cert.lambda_tilde > 0.0 &&
        cert.lambda_tilde <=
            std::min(cert.lambda, c / (p.d_h + p.d_v)) * (1.0 + 1e-12)))
    add_violation("lambda_tilde range");
  if (!(cert.kappa > 0.0 &&
        cert.kappa < std::min(cert.lambda_tilde, lam_star - cert.lambda)))
    add_violation("kappa range");
  if (!(cert.A >= std::max({1.0,
                            p.b1 * (p.beta2 * w.k4_lambda + p.beta1 * w.k2_lambda) /
                                (p.mu * p.mu),
                            p.eta * p.mu / (p.b2 * w.k2_lambda)}) *
                      (1.0 - 1e-12)))
    add_violation("A lower bound");
  const double gap = (cert.lambda + cert.kappa) * (w.c_lambda - w.c_lambda_kappa);
  if (!(cert.B >= std::max({1.0,
                            cert.A * (p.beta1 * w.k2_lambda +
                                      p.beta2 * w.k4_lambda_kappa) /
                                (gap * w.k2_lambda_kappa),
                            cert.A * p.beta * w.k2_lambda /
                                (gap * w.k4_lambda_kappa)}) *
                      (1.0 - 1e-12)))
    add_violation("B lower bound");
  rep.b0_separation_margin = std::min(y1s, y3s) - std::max(y2s, y4s);
  if (!(rep.b0_separation_margin > 0.0)) add_violation("support separation");
  rep.constraints_ok = rep.constraint_violations.empty();

  const double dx_excl = (y_grid.back() - y_grid.front()) /
                         static_cast<double>(y_grid.size() - 1);
  const double lam = w.lambda, kap = w.kappa, lt = w.lambda_tilde;
  const double A = w.A, B = w.B;

  for (double y : y_grid) {
    const double el = std::exp(lam * y);
    const double ek = std::exp(kap * y);
    const double elk = el * ek;  // exp((lambda+kappa)*y)
    const double et = std::exp(lt * y);

    // (a) linear identities, each family with its own speed.
    {
      const double u2 = w.k2_lambda * el, u4 = w.k4_lambda * el;
      const double cnu = w.c_lambda;
      update_worst_abs(rep.identities[0],
                       p.d_h * lam * lam * u2 - cnu * lam * u2 - q.l0 * u2 +
                           offd12 * u4,
                       y);
      update_worst_abs(rep.identities[1],
                       p.d_v * lam * lam * u4 - cnu * lam * u4 - p.eta * u4 +
                           offd21 * u2,
                       y);
    }
    {
      const double nu = lam + kap;
      const double u2 = w.k2_lambda_kappa * elk, u4 = w.k4_lambda_kappa * elk;
      const double cnu = w.c_lambda_kappa;
      update_worst_abs(rep.identities[2],
                       p.d_h * nu * nu * u2 - cnu * nu * u2 - q.l0 * u2 +
                           offd12 * u4,
                       y);
      update_worst_abs(rep.identities[3],
                       p.d_v * nu * nu * u4 - cnu * nu * u4 - p.eta * u4 +
                           offd21 * u2,
                       y);
    }

    // Profile values.
    const double up2 = w.k2_lambda * el, up4 = w.k4_lambda * el;
    const double lo1 = std::max(0.0, w.host_cap - A * et);
    const double lo3 = std::max(0.0, w.vector_cap - A * et);
    const double lo2 = std::max(0.0, w.k2_lambda - B * w.k2_lambda_kappa * ek) * el;
    const double lo4 = std::max(0.0, w.k4_lambda - B * w.k4_lambda_kappa * ek) * el;

    // (b) differential inequalities on each profile's positive region,
    // analytic derivatives of the smooth piece.
    const double d_et = -A * lt * et;        // d/dy of the depression
    const double dd_et = -A * lt * lt * et;  // and its second derivative
    if (lo1 > 0.0 && std::abs(y - y1s) > dx_excl) {
      const double r = p.d_h * dd_et - c * d_et + p.b1 -
                       (p.mu + p.beta2 * up4 + p.beta1 * up2) * lo1;
      update_worst_min(rep.inequalities[0], r, y);
    }
    if (lo3 > 0.0 && std::abs(y - y3s) > dx_excl) {
      const double r =
          p.d_v * dd_et - c * d_et + p.b2 - (p.eta + p.beta * up2) * lo3;
      update_worst_min(rep.inequalities[2], r, y);
    }
    if (lo2 > 0.0 && std::abs(y - y2s) > dx_excl) {
      const double nu = lam + kap;
      const double d2 = w.k2_lambda * lam * el - B * w.k2_lambda_kappa * nu * elk;
      const double dd2 =
          w.k2_lambda * lam * lam * el - B * w.k2_lambda_kappa * nu * nu * elk;
      const double r = p.d_h * dd2 - c * d2 +
                       (p.beta1 * lo1 - (p.phi + p.mu)) * lo2 +
                       p.beta2 * lo1 * lo4;
      update_worst_min(rep.inequalities[1], r, y);
    }
    if (lo4 > 0.0 && std::abs(y - y4s) > dx_excl) {
      const double nu = lam + kap;
      const double d4 = w.k4_lambda * lam * el - B * w.k4_lambda_kappa * nu * elk;
      const double dd4 =
          w.k4_lambda * lam * lam * el - B * w.k4_lambda_kappa * nu * nu * elk;
      const double r = p.d_v * dd4 - c * d4 - p.eta * lo4 + p.beta * lo2 * lo3;
      update_worst_min(rep.inequalities[3], r, y);
    }
  }
  return rep;
}

std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  if (n < 2 || !(b > a)) throw InvalidParams("bad grid request");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

OscillatingSolution oscillating_solution(double epsilon, double gamma, double D,
                              const ModelParams& p, std::size_t samples) {
  p.validate();
  if (!(D > 0.0) || std::abs(p.d_h - D) > 1e-12 * D ||
      std::abs(p.d_v - D) > 1e-12 * D)
    throw InvalidParams("equal diffusion d_h = d_v = D required");
  const auto q = derived_quantities(p);
  if (!(q.alpha_max_zero > 0.0))
    throw SubcriticalR0("alpha_max(0) must be positive");
  const double alpha = (q.alpha_max_zero + q.l0) / (p.beta2 * p.b1 / p.mu);
  const double eps_cap = q.alpha_max_zero / (1.0 + alpha);
  if (!(epsilon > 0.0 && epsilon < eps_cap))
    throw BadEpsilon("epsilon must lie in (0, alpha_max(0)/(1+alpha))");
  const double rate = q.alpha_max_zero - epsilon * (1.0 + alpha);
  const double gamma_cap = std::sqrt(4.0 * D * rate);
  if (!(gamma > 0.0 && gamma < gamma_cap))
    throw BadGamma("gamma must lie in (0, sqrt(4D(alpha_max(0)-eps(1+alpha))))");

  OscillatingSolution sol;
  sol.alpha = alpha;
  sol.gamma_tilde = std::sqrt(4.0 * D * rate - gamma * gamma);
  sol.half_period = D * std::numbers::pi / sol.gamma_tilde;
  const double L = sol.half_period;
  if (samples < 3) samples = 3;
  sol.y.resize(samples);
  sol.h.resize(samples);
  sol.residual.assign(samples, 0.0);
  const double a = gamma / (2.0 * D), b = sol.gamma_tilde / (2.0 * D);
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = -L + 2.0 * L * static_cast<double>(i) /
                             static_cast<double>(samples - 1);
    sol.y[i] = y;
    if (i == 0 || i + 1 == samples) {
      sol.h[i] = 0.0;  // cosine zero at +-L by construction
      continue;
    }
    const double e = std::exp(a * y);
    const double cb = std::cos(b * y), sb = std::sin(b * y);
    const double h = e * cb;
    const double dh = e * (a * cb - b * sb);
    const double ddh = e * ((a * a - b * b) * cb - 2.0 * a * b * sb);
    sol.h[i] = h;
    sol.residual[i] = D * ddh - gamma * dh + rate * h;
  }
  return sol;
}

}  // namespace epiwave
