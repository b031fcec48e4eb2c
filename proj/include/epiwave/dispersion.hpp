#pragma once

#include <utility>
#include <vector>

#include "epiwave/model.hpp"

namespace epiwave {

/// The 2x2 linearization block at the disease-free state for wavenumber lambda:
///   [ m1          offdiag_12 ]      m1 = d_h*lambda^2 - l0
///   [ offdiag_21  m2         ]      m2 = d_v*lambda^2 - eta
struct DispersionMatrix {
  double lambda;
  double m1, m2;
  double offdiag_12;  ///< beta2*b1/mu
  double offdiag_21;  ///< beta*b2/eta
};

DispersionMatrix dispersion_matrix(double lambda, const ModelParams& p);

struct EigenBranch {
  double alpha_min;
  double alpha_max;
  /// Eigenvector of alpha_max normalized to first component 1:
  /// (1, (alpha_max - m1)*mu/(beta2*b1)); both components positive.
  std::array<double, 2> eigvec_max;
};

EigenBranch alpha_branches(double lambda, const ModelParams& p);

/// d(alpha_max)/d(lambda), closed form.
double alpha_max_derivative(double lambda, const ModelParams& p);

/// c_lambda = alpha_max(lambda)/lambda, lambda > 0.
double wave_speed_at(double lambda, const ModelParams& p);

struct DispersionResult {
  double c_star;
  double lambda_star;
  std::vector<std::pair<double, double>> curve;  ///< sampled (lambda, c_lambda)
};

/// Minimizes c_lambda over lambda > 0. Requires alpha_max(0) > 0
/// (throws SubcriticalR0 otherwise). Bracket expansion + golden section,
/// then a derivative-sign bisection polish; curve sampled at `curve_samples`
/// log-spaced wavenumbers around lambda_star.
DispersionResult minimal_wave_speed(const ModelParams& p, int curve_samples = 256);

/// The two solutions of c_lambda = c for c > c_star,
/// 0 < lambda_min < lambda_star < lambda_max. Throws SpeedNotSupercritical.
std::pair<double, double> lambda_roots(double c, const ModelParams& p);

enum class Branch { min, max };

struct WaveOdeSpectrum {
  double c;
  /// Monic quartic P, coefficients in ascending order: p0 + p1*x + ... + p4*x^4.
  std::array<double, 5> quartic_coeffs;
  std::vector<double> real_eigenvalues;
  std::vector<Branch> classification;      ///< per real eigenvalue
  std::vector<double> branch_residual;     ///< relative mismatch |lc - alpha|
};

/// Spectrum of the 4x4 first-order traveling-wave matrix: quartic expansion,
/// real roots by sign-change scan + bisection on a Cauchy-bound interval,
/// and branch classification of each real root via lambda*c vs alpha_min/max.
WaveOdeSpectrum wave_ode_spectrum(double c, const ModelParams& p);

/// P(lambda) evaluated from the quartic coefficients.
double quartic_eval(const std::array<double, 5>& coeffs, double x);

}  // namespace epiwave
