#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "epiwave/model.hpp"
#include "epiwave/solver.hpp"

namespace epiwave {

/// Largest y where the field crosses `level`, found by scanning from the right
/// boundary and interpolating linearly between the bracketing nodes. Empty
/// when level is not strictly between the field's min and max.
std::optional<double> front_position(const SimState& state, const Grid1D& grid,
                                     int field_index, double level);

struct FrontTrace {
  std::vector<std::pair<double, double>> entries;  ///< (t, y_front), sorted by t
  double level;
};

/// Trace of front_position over a snapshot sequence; snapshots without a
/// crossing are skipped.
FrontTrace trace_front(const std::vector<SimState>& snapshots, const Grid1D& grid,
                       int field_index, double level);

struct SpeedEstimate {
  double speed;
  double intercept;
  std::pair<double, double> fit_window;
  double rms_residual;
  std::size_t points;
};

/// Least-squares slope of y_front vs t after discarding the first
/// discard_fraction of the time range. Throws InsufficientPoints when fewer
/// than 5 points remain.
SpeedEstimate estimate_speed(const FrontTrace& trace, double discard_fraction = 0.5);

struct ConservationEntry {
  double t;
  double host_dev;  ///< max_j |x1+x2 - b1/mu|
  double vec_dev;   ///< max_j |x3+x4 - b2/eta|
};

struct ConservationReport {
  std::vector<ConservationEntry> entries;
  bool host_monotone = true;  ///< decay monotone up to 1e-10 slack
  bool vec_monotone = true;
};

ConservationReport conservation_report(const std::vector<SimState>& snapshots,
                                       const ModelParams& p);

struct HarnackFieldReport {
  double bound;        ///< (sqrt(c^2+4*kappa)+|c|)/(2*d)
  double max_ratio;    ///< max |u'|/u over checked nodes
  double argmax_y;
  std::size_t checked;
  std::size_t violations;  ///< nodes with ratio > bound
};

/// Log-derivative bound check for x2 (kappa = mu+phi, d = d_h) and
/// x4 (kappa = eta, d = d_v); centered differences, evaluated where u > floor.
std::pair<HarnackFieldReport, HarnackFieldReport> harnack_gradient_check(
    const SimState& profile, const Grid1D& grid, double c, const ModelParams& p,
    double floor = 1e-8);

/// The equilibrium-weighted dissipation functional of the kinetics,
/// sum_i a_i (1 - x_i**/x_i) F_i(x); nonpositive on the invariant manifold
/// {x1+x2=b1/mu, x3+x4=b2/eta, x>0} and zero exactly at the endemic state.
double g_functional(const Vec4& x, const ModelParams& p);

struct LyapunovProfile {
  std::vector<double> y;  ///< interior nodes
  std::vector<double> V;
  double max_rise;        ///< max forward difference of V
  double rising_fraction; ///< fraction of intervals rising beyond tolerance
};

/// V(y) along a positive four-field profile with centered-difference
/// derivatives; rise tolerance is rise_tol_frac * max|V|.
LyapunovProfile lyapunov_profile(const std::vector<double>& y,
                                 const std::array<std::vector<double>, 4>& fields,
                                 double c, const ModelParams& p,
                                 double rise_tol_frac = 0.01);

/// Smallest m with x2/m <= x4 <= m*x2 over the nodes; both fields must be
/// strictly positive (NonpositiveProfile otherwise).
double comparability_check(const std::vector<double>& x2,
                           const std::vector<double>& x4);

}  // namespace epiwave
