#pragma once

#include <array>
#include <vector>

#include "epiwave/errors.hpp"

namespace epiwave {

using Vec4 = std::array<double, 4>;

/// Epidemiological rates and diffusion coefficients. All strictly positive.
struct ModelParams {
  double mu;     ///< host mortality rate [1/day]
  double eta;    ///< vector mortality rate [1/day]
  double phi;    ///< host recovery rate [1/day]
  double beta1;  ///< direct host-to-host transmission rate
  double beta2;  ///< vector-to-host transmission rate
  double beta;   ///< host-to-vector transmission rate
  double b1;     ///< host recruitment rate
  double b2;     ///< vector recruitment rate
  double d_h;    ///< host diffusion coefficient [length^2/day]
  double d_v;    ///< vector diffusion coefficient [length^2/day]

  void validate() const;  // throws InvalidParams
};

/// The rate set behind configs/table2.cfg (d_h = 0.2, d_v = 0.5).
ModelParams table2_params();

struct DerivedQuantities {
  double l0;              ///< mu + phi - beta1*b1/mu
  double l1;              ///< beta*beta2*b1*b2/(mu*eta), always > 0
  double r0;              ///< basic reproduction number
  double alpha_max_zero;  ///< dominant linearization eigenvalue at wavenumber 0
};

DerivedQuantities derived_quantities(const ModelParams& p);

struct Equilibrium {
  double x1, x2, x3, x4;
  Vec4 to_array() const { return {x1, x2, x3, x4}; }
};

/// (b1/mu, 0, b2/eta, 0).
Equilibrium disease_free_equilibrium(const ModelParams& p);

/// The unique positive equilibrium; requires r0 > 1 (else NoEndemicEquilibrium).
/// x2 solves k2*x^2 + k1*x + k0 = 0 via the cancellation-safe two-step formula.
Equilibrium endemic_equilibrium(const ModelParams& p);

/// Coefficients (k0, k1, k2) of the quadratic satisfied by the endemic x2.
std::array<double, 3> endemic_quadratic(const ModelParams& p);

/// Reaction terms F(x) of the kinetics system.
Vec4 kinetics(const Vec4& x, const ModelParams& p);

struct OdeSample {
  double t;
  Vec4 x;
};

/// Classical fixed-step RK4 for the spatially homogeneous kinetics.
/// Returns every accepted state including t=0 and t=t_end.
/// Throws StepTooLarge when a component drops below -1e-9 or becomes non-finite.
std::vector<OdeSample> integrate_kinetics(const Vec4& x0, const ModelParams& p,
                                          double t_end, double dt);

}  // namespace epiwave
