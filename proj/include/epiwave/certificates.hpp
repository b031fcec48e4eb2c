#pragma once

#include <string>
#include <vector>

#include "epiwave/model.hpp"

namespace epiwave {

/// Parameters of the exponential super/sub-solution pair at a supercritical
/// speed c = c_lambda, lambda = lambda_min(c).
struct CertificateParams {
  double lambda;        ///< in (0, lambda_star)
  double kappa;         ///< in (0, min(lambda_tilde, lambda_star - lambda))
  double lambda_tilde;  ///< in (0, min(lambda, c/(d_h+d_v))]
  double A;             ///< susceptible-profile depression amplitude
  double B;             ///< infected-profile depression amplitude
};

/// Eigenvector components (first component normalized to 1) and speeds of the
/// two exponential families used by the construction.
struct WaveProfilePair {
  double lambda, kappa;
  double c_lambda, c_lambda_kappa;
  double k2_lambda, k4_lambda;
  double k2_lambda_kappa, k4_lambda_kappa;
  double lambda_tilde, A, B;
  double host_cap, vector_cap;  ///< b1/mu, b2/eta

  Vec4 upper(double y) const;  ///< constant susceptibles, exponential infecteds
  Vec4 lower(double y) const;  ///< positive-part depressed profiles
};

WaveProfilePair make_profiles(const CertificateParams& cert, const ModelParams& p);

/// Admissible certificate for speed c > c_star: lambda from the left root of
/// c = c_lambda, lambda_tilde at its constraint cap, amplitudes at 1.01x their
/// lower bounds (A additionally covers max(b1/mu, b2/eta) so the depressed
/// susceptible profiles switch at negative y), B over both inequality bounds
/// and the separation threshold B0 found by doubling.
CertificateParams default_certificate(double c, const ModelParams& p);

struct ResidualEntry {
  std::string name;
  double worst;  ///< max |residual| for identities, min residual for inequalities
  double worst_y;
  std::size_t points;
};

struct SupersubReport {
  std::vector<ResidualEntry> identities;    ///< linear eigen-identities, both families
  std::vector<ResidualEntry> inequalities;  ///< the four comparison inequalities
  double b0_separation_margin;  ///< support-separation inequality, >= 0 when satisfied
  bool constraints_ok;          ///< parameter bounds hold as stated
  std::vector<std::string> constraint_violations;

  bool identities_ok(double tol = 1e-10) const;
  bool inequalities_ok(double tol = 1e-10) const;  ///< min residual >= -tol
  bool passed(double tol = 1e-10) const {
    return identities_ok(tol) && inequalities_ok(tol);
  }
};

/// Evaluates, with exact derivatives of the exponential profiles, the linear
/// identities of both families and the four differential inequalities at every
/// grid point (each inequality on the open region where its own profile is
/// positive, excluding one grid spacing around the positive-part switch).
SupersubReport verify_supersub(const CertificateParams& cert, double c,
                               const ModelParams& p,
                               const std::vector<double>& y_grid);

std::vector<double> uniform_grid(double a, double b, std::size_t n);

struct OscillatingSolution {
  double gamma_tilde;
  double half_period;  ///< L; the solution is positive on (-L, L), zero at +-L
  std::vector<double> y;
  std::vector<double> h;
  std::vector<double> residual;  ///< second-order ODE residual, interior points
  double alpha;                  ///< slope of the paired component, u4 = alpha*h
};

/// Closed-form oscillating solution of the equal-diffusion comparison ODE:
/// h(y) = exp(gamma*y/(2D)) * cos(gamma_tilde*y/(2D)) on (-L, L).
/// Requires d_h = d_v = D; epsilon and gamma inside their admissible ranges
/// (BadEpsilon / BadGamma otherwise).
OscillatingSolution oscillating_solution(double epsilon, double gamma, double D,
                              const ModelParams& p, std::size_t samples = 2001);

}  // namespace epiwave
