#pragma once

// Simulation driver: runs the displacement recursion up to order S, estimates
// a practical convergence radius from the coefficient norms, sums the
// truncated series to advance time, and restarts from the resampled Eulerian
// velocity.  One simulation is one logical thread of control; the inner
// operations parallelize over grid nodes internally.

#include "clg/faadibruno.hpp"
#include "clg/field.hpp"
#include "clg/hodge.hpp"
#include "clg/weights.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace clg {

struct SimState {
  Real time = 0;
  LabelGrid grid;
  VectorField velocity;  // current Eulerian velocity on the grid
  VectorField vorticity; // discrete curl of velocity
  long step_index = 0;
};

struct StepResiduals {
  Real cauchy = 0;
  Real jacobian = 0;
  Real boundary = 0;
  Real energy_drift = 0; // relative to the energy at the start of the run
};

struct StepReport {
  Real radius_estimate = 0;
  Real dt_taken = 0;
  StepResiduals residuals;
  std::vector<Real> coefficient_norms; // ||xi^(s)||_{1,1/2}, s = 1..S
  Real energy = 0;                     // kinetic energy after the step
};

// Thrown by advance() when the label fixed-point iteration fails to contract;
// the caller is expected to retry with a smaller dt.
class MapInversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs the recursion: xi^(1) = v0, then for s = 2..S assembles curl and
// divergence data plus the wall datum (channel) and reconstructs xi^(s) with
// the Hodge solver.  chart may be null; a flat-wall chart is supplied for
// channel grids.  When capture is non-null the per-order Hodge problems are
// appended to it (orders 2..S) for consistency checking.
TaylorSeries compute_coefficients(const VectorField& v0, const VectorField& omega0, int S,
                                  const BoundaryChart* chart = nullptr,
                                  std::vector<HodgeProblem>* capture = nullptr);

// C^{1,1/2} norms of the coefficients, s = 1..S.
std::vector<Real> coefficient_norms(const TaylorSeries& series);

// Practical radius: least-squares fit of log(norm_s / M_s) against s over the
// top half of orders; rho = exp(-slope).  Returns +infinity when the fitted
// norms sit at the rounding floor (super-geometric decay); throws when fewer
// than three norms are nonzero.
Real estimate_radius(const std::vector<Real>& norms, const WeightSequence& W);
Real estimate_radius(const TaylorSeries& series, const WeightSequence& W);

// Sums the series at dt, inverts the label map by fixed-point iteration
// (tolerance 1e-10, at most 50 sweeps), resamples the Lagrangian velocity at
// the recovered labels, and projects the result back onto divergence-free
// fields with impermeable walls.  Throws MapInversionError when dt is too
// large for the iteration to contract.
SimState advance(const SimState& state, const TaylorSeries& series, Real dt);

struct RunOptions {
  int S = 8;
  Real cfl_fraction = 0.25;
  WeightSequence weights;
  Real dt_max = std::numeric_limits<Real>::infinity();
  int max_retries = 8; // dt halvings after a failed map inversion
  // Invoked after every completed step (diagnostics streaming).  Exceptions
  // thrown here propagate to the run_until caller unchanged.
  std::function<void(const SimState&, const StepReport&)> on_step;
};

struct RunResult {
  SimState state;
  std::vector<StepReport> reports;
  bool ok = true;
  std::string error;
};

// Steps until state.time >= t_end with dt = cfl_fraction * radius (clamped by
// dt_max and the remaining interval).  On failure the partial reports are
// returned with ok = false and the message preserved.
RunResult run_until(SimState state, Real t_end, const RunOptions& opt);

} // namespace clg
