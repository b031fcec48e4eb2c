#include "epiwave/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epiwave {

DispersionMatrix dispersion_matrix(double lambda, const ModelParams& p) {
  const auto q = derived_quantities(p);
  DispersionMatrix m;
  m.lambda = lambda;
  m.m1 = p.d_h * lambda * lambda - q.l0;
  m.m2 = p.d_v * lambda * lambda - p.eta;
  m.offdiag_12 = p.beta2 * p.b1 / p.mu;
  m.offdiag_21 = p.beta * p.b2 / p.eta;
  return m;
}

namespace {

struct BranchCore {
  double m1, m2, l1;
};

BranchCore branch_core(double lambda, const ModelParams& p) {
  const double l0 = p.mu + p.phi - p.beta1 * p.b1 / p.mu;
  const double l1 = p.beta * p.beta2 * p.b1 * p.b2 / (p.mu * p.eta);
  return {p.d_h * lambda * lambda - l0, p.d_v * lambda * lambda - p.eta, l1};
}

double alpha_max_of(double lambda, const ModelParams& p) {
  const auto c = branch_core(lambda, p);
  const double t = c.m1 - c.m2;
  return 0.5 * (c.m1 + c.m2 + std::sqrt(t * t + 4.0 * c.l1));
}

}  // namespace

EigenBranch alpha_branches(double lambda, const ModelParams& p) {
  p.validate();
  const auto c = branch_core(lambda, p);
  const double t = c.m1 - c.m2;
  const double disc = std::sqrt(t * t + 4.0 * c.l1);
  EigenBranch b;
  b.alpha_min = 0.5 * (c.m1 + c.m2 - disc);
  b.alpha_max = 0.5 * (c.m1 + c.m2 + disc);
  b.eigvec_max = {1.0, (b.alpha_max - c.m1) * p.mu / (p.beta2 * p.b1)};
  return b;
}

double alpha_max_derivative(double lambda, const ModelParams& p) {
  const auto c = branch_core(lambda, p);
  const double t = c.m1 - c.m2;
  const double disc = std::sqrt(t * t + 4.0 * c.l1);
  return (p.d_h + p.d_v) * lambda + t * (p.d_h - p.d_v) * lambda / disc;
}

double wave_speed_at(double lambda, const ModelParams& p) {
  if (!(lambda > 0.0)) throw NonpositiveLambda("lambda must be positive");
  return alpha_branches(lambda, p).alpha_max / lambda;
}

namespace {

// lambda*alpha_max'(lambda) - alpha_max(lambda); strictly increasing on (0,inf)
// by convexity, with the unique zero at lambda_star.
double tangency_gap(double lambda, const ModelParams& p) {
  return lambda * alpha_max_derivative(lambda, p) - alpha_max_of(lambda, p);
}

}  // namespace

DispersionResult minimal_wave_speed(const ModelParams& p, int curve_samples) {
  const auto q = derived_quantities(p);
  if (!(q.alpha_max_zero > 0.0))
    throw SubcriticalR0("alpha_max(0) <= 0 (r0 <= 1): no positive minimal speed");

  const auto c_of = [&](double lam) { return alpha_max_of(lam, p) / lam; };

  // Expand the bracket upper end until c starts increasing.
  double lo = 1e-6;
  double hi = lo;
  double c_prev = c_of(hi);
  for (int i = 0; i < 128; ++i) {
    const double hi2 = 2.0 * hi;
    const double c2 = c_of(hi2);
    if (c2 > c_prev) {
      hi = hi2;
      break;
    }
    c_prev = c2;
    hi = hi2;
  }

  // Golden-section down to relative bracket width 1e-10.
  const double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = c_of(x1), f2 = c_of(x2);
  while (b - a > 1e-10 * b) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = c_of(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = c_of(x2);
    }
  }

  // Polish: bisect the tangency condition, which golden-section cannot
  // resolve past the sqrt(eps) flatness of c_lambda near its minimum.
  double ga = a, gb = b;
  for (int i = 0; i < 64 && !(tangency_gap(ga, p) < 0.0); ++i) ga *= 0.5;
  for (int i = 0; i < 64 && !(tangency_gap(gb, p) > 0.0); ++i) gb *= 2.0;
  if (tangency_gap(ga, p) < 0.0 && tangency_gap(gb, p) > 0.0) {
    for (int i = 0; i < 200 && gb - ga > 4e-16 * gb; ++i) {
      const double mid = 0.5 * (ga + gb);
      (tangency_gap(mid, p) < 0.0 ? ga : gb) = mid;
    }
    a = ga;
    b = gb;
  }

  DispersionResult r;
  r.lambda_star = 0.5 * (a + b);
  r.c_star = c_of(r.lambda_star);

  const int n = std::max(curve_samples, 200);
  r.curve.resize(n);
  const double lam_lo = r.lambda_star * 1e-2, lam_hi = r.lambda_star * 1e2;
  const double step = std::log(lam_hi / lam_lo) / (n - 1);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double lam = lam_lo * std::exp(step * i);
    r.curve[i] = {lam, c_of(lam)};
  }
  return r;
}

std::pair<double, double> lambda_roots(double c, const ModelParams& p) {
  const auto disp = minimal_wave_speed(p);
  if (!(c > disp.c_star))
    throw SpeedNotSupercritical("c = " + std::to_string(c) +
                                " does not exceed c* = " + std::to_string(disp.c_star));
  const auto f = [&](double lam) { return wave_speed_at(lam, p) - c; };

  // Left root: c_lambda decreases through c on (0, lambda_star).
  double hi = disp.lambda_star, lo = hi;
  for (int i = 0; i < 2048 && !(f(lo) > 0.0); ++i) lo *= 0.5;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double lmin = 0.5 * (lo + hi);

  // Right root: c_lambda increases through c on (lambda_star, inf).
  lo = disp.lambda_star;
  hi = lo;
  for (int i = 0; i < 2048 && !(f(hi) > 0.0); ++i) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  const double lmax = 0.5 * (lo + hi);
  return {lmin, lmax};
}

double quartic_eval(const std::array<double, 5>& c, double x) {
  return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
}

WaveOdeSpectrum wave_ode_spectrum(double c, const ModelParams& p) {
  const auto q = derived_quantities(p);
  WaveOdeSpectrum s;
  s.c = c;
  const double dh = p.d_h, dv = p.d_v;
  // det(M(lambda) - lambda*c*I)/(dh*dv), expanded into monomials.
  s.quartic_coeffs = {
      (q.l0 * p.eta - q.l1) / (dh * dv),
      c * (p.eta + q.l0) / (dh * dv),
      (c * c - dh * p.eta - dv * q.l0) / (dh * dv),
      -c * (dh + dv) / (dh * dv),
      1.0,
  };

  // Cauchy root bound for a monic polynomial.
  double bound = 0.0;
  for (int i = 0; i < 4; ++i) bound = std::max(bound, std::abs(s.quartic_coeffs[i]));
  const double big = 1.0 + bound;

  const int scan = 10000;
  const auto P = [&](double x) { return quartic_eval(s.quartic_coeffs, x); };
  double xprev = -big, fprev = P(xprev);
  for (int i = 1; i <= scan; ++i) {
    const double x = -big + 2.0 * big * i / scan;
    const double fx = P(x);
    if (fprev == 0.0) s.real_eigenvalues.push_back(xprev);
    else if (fprev * fx < 0.0) {
      double a = xprev, b = x, fa = fprev;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = P(mid);
        if (fa * fm <= 0.0) b = mid;
        else {
          a = mid;
          fa = fm;
        }
      }
      s.real_eigenvalues.push_back(0.5 * (a + b));
    }
    xprev = x;
    fprev = fx;
  }

  for (double lam : s.real_eigenvalues) {
    const auto br = alpha_branches(lam, p);
    const double lc = lam * c;
    const double dmin = std::abs(lc - br.alpha_min);
    const double dmax = std::abs(lc - br.alpha_max);
    const double scale = std::max({std::abs(lc), std::abs(br.alpha_min),
                                   std::abs(br.alpha_max), 1e-300});
    s.classification.push_back(dmin <= dmax ? Branch::min : Branch::max);
    s.branch_residual.push_back(std::min(dmin, dmax) / scale);
  }
  return s;
}

}  // namespace epiwave
