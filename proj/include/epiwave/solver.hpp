#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "epiwave/model.hpp"

namespace epiwave {

struct Grid1D {
  double length;
  std::size_t n;  ///< number of nodes, >= 3
  double dx;      ///< length/(n-1); node j sits at y = j*dx
};

Grid1D make_grid(double length, std::size_t n);

/// Four compartment fields on the grid nodes at one time instant.
struct SimState {
  double t = 0.0;
  std::array<std::vector<double>, 4> f;

  std::size_t n() const { return f[0].size(); }
};

/// Piecewise-constant initial data: value of the last segment with from <= y.
struct ICSegment {
  double from;
  Vec4 value;
};

SimState build_ic(const Grid1D& grid, const std::vector<ICSegment>& segments);

/// Front-seeding split: endemic state on [0, split_at), disease-free on
/// [split_at, length].
/// Requires r0 > 1 (NoEndemicEquilibrium otherwise). Half-open convention:
/// a node exactly at split_at takes the disease-free state.
SimState build_front_ic(const Grid1D& grid, const ModelParams& p, double split_at);

/// Disease-free state seeded with x2 = x4 = seed on [0, split_at); used for
/// subcritical runs where no endemic state exists.
SimState build_seeded_ic(const Grid1D& grid, const ModelParams& p, double split_at,
                         double seed);

enum class Exec { serial, parallel };

/// Semi-discrete right-hand side: second-order central Laplacian with mirror
/// ghost nodes (u[-1]=u[1], u[n]=u[n-2]) plus reaction terms. The serial and
/// OpenMP paths run the same per-node body and produce bitwise-equal output.
/// `with_kinetics = false` is a test hook (pure diffusion).
void rd_rhs(const std::array<std::vector<double>, 4>& u, const ModelParams& p,
            const Grid1D& grid, std::array<std::vector<double>, 4>& out,
            Exec exec = Exec::parallel, bool with_kinetics = true);

/// One explicit RK4 step of the semi-discrete system. Throws
/// InstabilityDetected when a component exceeds 10*(b1/mu + b2/eta) or leaves
/// the finite range.
SimState step(const SimState& state, const ModelParams& p, const Grid1D& grid,
              double dt, Exec exec = Exec::parallel, bool with_kinetics = true);

struct SimConfig {
  Grid1D grid;
  double t_end = 50.0;
  std::optional<double> dt;     ///< empty: stability-bound auto rule
  double snapshot_every = 0.5;  ///< days between emitted snapshots
  std::vector<ICSegment> ic;
  Exec exec = Exec::parallel;
};

/// The auto time step: 0.9*dx^2/(2*max(d_h,d_v)) capped by 0.05 over the
/// largest per-capita reaction rate at the invariant-region caps, then rounded
/// down so that it divides snapshot_every exactly.
double auto_dt(const SimConfig& cfg, const ModelParams& p);

struct RunResult {
  std::vector<SimState> snapshots;  ///< exported copies, tiny negatives clipped
  double dt;                        ///< the step actually used
  double min_value = 0.0;           ///< smallest unclipped entry seen at any step
};

/// Advance from the configured IC to t_end with fixed dt; snapshots at the
/// configured cadence plus t=0 and t=t_end. Deterministic for fixed inputs.
RunResult run(const SimConfig& cfg, const ModelParams& p);

}  // namespace epiwave
