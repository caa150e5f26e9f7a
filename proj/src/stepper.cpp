#include "clg/stepper.hpp"

#include "clg/holder.hpp"
#include "clg/operators.hpp"
#include "clg/parallel.hpp"
#include "clg/recursion.hpp"
#include "clg/resample.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

namespace clg {

namespace {

constexpr Real kDataTol = 1e-8;     // admissibility of v0 (div, wall-normal)
constexpr Real kFixedPointTol = 1e-10;
constexpr int kFixedPointMaxIter = 50;

void check_initial_data(const VectorField& v0, const VectorField& omega0) {
  if (!same_grid(v0.grid, omega0.grid))
    throw std::invalid_argument("compute_coefficients: v0 and omega0 on different grids");
  const Real dv = linf(divergence(v0));
  if (!(dv <= kDataTol))
    throw std::invalid_argument("compute_coefficients: divergence(v0) = " + std::to_string(dv) +
                                " exceeds 1e-8");
  if (v0.grid.geometry == Geometry::Channel) {
    const LabelGrid& g = v0.grid;
    Real wall = 0;
    for (Index iy = 0; iy < g.ny; ++iy)
      for (Index ix = 0; ix < g.nx; ++ix) {
        wall = std::max(wall, std::abs(v0.z[g.idx(ix, iy, 0)]));
        wall = std::max(wall, std::abs(v0.z[g.idx(ix, iy, g.nz - 1)]));
      }
    if (!(wall <= kDataTol))
      throw std::invalid_argument("compute_coefficients: wall-normal v0 = " +
                                  std::to_string(wall) + " exceeds 1e-8");
  }
}

// Divergence-cleaning projection with impermeable walls: subtracts grad(phi)
// where Laplacian(phi) carries the measured divergence and the Neumann datum
// the measured wall-normal trace (both in the inward-normal convention).
VectorField project_div_free(const VectorField& u) {
  const LabelGrid& g = u.grid;
  ScalarField div_u = divergence(u);
  ScalarField phi(g);
  if (g.periodic_in_z()) {
    div_u.v -= mean(div_u);
    phi = solve_neumann(div_u);
  } else {
    WallField w(g.nx, g.ny);
    for (Index iy = 0; iy < g.ny; ++iy)
      for (Index ix = 0; ix < g.nx; ++ix) {
        const Index p = ix + g.nx * iy;
        w.bottom[p] = u.z[g.idx(ix, iy, 0)];
        w.top[p] = -u.z[g.idx(ix, iy, g.nz - 1)];
      }
    const HodgeProblem probe{div_u, VectorField(g), w, g.geometry};
    div_u.v -= compatibility_defect(probe) / g.volume();
    phi = solve_neumann(div_u, w);
  }
  const VectorField grad = gradient(phi);
  VectorField out(g);
  out.x = u.x - grad.x;
  out.y = u.y - grad.y;
  out.z = u.z - grad.z;
  return out;
}

} // namespace

TaylorSeries compute_coefficients(const VectorField& v0, const VectorField& omega0, int S,
                                  const BoundaryChart* chart,
                                  std::vector<HodgeProblem>* capture) {
  if (S < 1) throw std::invalid_argument("compute_coefficients: order must be >= 1");
  check_initial_data(v0, omega0);
  const LabelGrid& g = v0.grid;

  std::unique_ptr<ChannelChart> owned;
  if (g.geometry == Geometry::Channel && chart == nullptr) {
    owned = std::make_unique<ChannelChart>(g.Lz);
    chart = owned.get();
  }

  TaylorSeries series;
  series.grid = g;
  series.order = S;
  series.base_time = 0;
  series.coeff.reserve(static_cast<size_t>(S));
  series.coeff.push_back(v0);

  for (int s = 2; s <= S; ++s) {
    try {
      const RecursionInput in{s, series.coeff, omega0};
      // Taking the rotational part of xi^(s) directly from the potential form
      // of the curl datum reproduces that datum to rounding on both
      // geometries; the scalar solve then carries the divergence datum and
      // the wall trace.
      const VectorField V = curl_rhs_potential(in);
      HodgeProblem prob{div_rhs(in), curl(V), WallField(), g.geometry};
      if (g.geometry == Geometry::Channel)
        prob.neumann_data = boundary_normal_rhs(s, series.coeff, *chart, g);
      if (capture) capture->push_back(prob);
      series.coeff.push_back(
          hodge_reconstruct_with_potential(prob.div_data, V, prob.neumann_data));
    } catch (const std::exception& e) {
      throw std::runtime_error("compute_coefficients: order " + std::to_string(s) + ": " +
                               e.what());
    }
  }
  return series;
}

std::vector<Real> coefficient_norms(const TaylorSeries& series) {
  std::vector<Real> norms;
  norms.reserve(static_cast<size_t>(series.order));
  for (const VectorField& c : series.coeff) norms.push_back(holder_norm(c, 1, Real(0.5)));
  return norms;
}

Real estimate_radius(const std::vector<Real>& norms, const WeightSequence& W) {
  const int S = static_cast<int>(norms.size());
  if (S < 4) throw std::invalid_argument("estimate_radius: need at least 4 orders");
  if (W.kmax < S)
    throw std::invalid_argument("estimate_radius: weight sequence shorter than series");

  const Real floor = 1e-14 * std::max(Real(1), norms[0]);
  const int lo = S / 2 + 1; // top half of orders

  bool any_top = false;
  for (int s = lo; s <= S; ++s)
    if (norms[static_cast<size_t>(s - 1)] > floor) any_top = true;
  if (!any_top) return std::numeric_limits<Real>::infinity();

  int nonzero = 0;
  for (Real n : norms)
    if (n > floor) ++nonzero;
  if (nonzero < 3) throw std::runtime_error("estimate_radius: fewer than 3 nonzero norms");

  // least squares of y = log(norm_s / M_s) against s
  Real sum_s = 0, sum_y = 0, sum_ss = 0, sum_sy = 0;
  int npts = 0;
  for (int s = lo; s <= S; ++s) {
    const Real n = norms[static_cast<size_t>(s - 1)];
    if (!(n > floor)) continue;
    const Real y = std::log(n) - std::log(W.values[static_cast<size_t>(s)]);
    sum_s += s;
    sum_y += y;
    sum_ss += Real(s) * Real(s);
    sum_sy += Real(s) * y;
    ++npts;
  }
  if (npts < 2) throw std::runtime_error("estimate_radius: not enough resolvable norms to fit");
  const Real denom = Real(npts) * sum_ss - sum_s * sum_s;
  const Real slope = (Real(npts) * sum_sy - sum_s * sum_y) / denom;
  return std::exp(-slope);
}

Real estimate_radius(const TaylorSeries& series, const WeightSequence& W) {
  return estimate_radius(coefficient_norms(series), W);
}

SimState advance(const SimState& state, const TaylorSeries& series, Real dt) {
  if (!(dt >= 0) || !std::isfinite(dt))
    throw std::invalid_argument("advance: dt must be finite and nonnegative");
  if (!same_grid(state.grid, series.grid))
    throw std::invalid_argument("advance: state and series grids differ");

  SimState next = state;
  next.step_index = state.step_index + 1;
  if (dt == 0) return next;

  const LabelGrid& g = state.grid;
  const VectorField disp = series_displacement(series, dt);
  const VectorField lag_vel = series_velocity(series, dt);
  const FieldEvaluator eval_disp(disp);
  const FieldEvaluator eval_vel(lag_vel);
  const bool channel = g.geometry == Geometry::Channel;

  // Invert x = a + xi(dt, a) for the label a at every grid node, then read
  // off the Lagrangian velocity there.
  VectorField u(g);
  ArrayXr delta(g.size());
  parallel_for(g.size(), [&](Index i) {
    const Vec3 x = g.pos(i);
    Vec3 a = x;
    Real err = 0;
    for (int it = 0; it < kFixedPointMaxIter; ++it) {
      Vec3 a_next = x - eval_disp.eval(a);
      if (channel) a_next.z() = std::clamp(a_next.z(), Real(0), g.Lz);
      err = (a_next - a).cwiseAbs().maxCoeff();
      a = a_next;
      if (err <= kFixedPointTol) break;
    }
    delta[i] = err;
    const Vec3 v = eval_vel.eval(a);
    u.x[i] = v.x();
    u.y[i] = v.y();
    u.z[i] = v.z();
  });
  const Real worst = parallel_max(g.size(), [&](Index i) { return delta[i]; });
  if (worst > kFixedPointTol)
    throw MapInversionError("advance: label fixed point stalled at " + std::to_string(worst) +
                            " (dt too large)");

  next.velocity = project_div_free(u);
  next.vorticity = curl(next.velocity);
  next.time = state.time + dt;
  return next;
}

RunResult run_until(SimState state, Real t_end, const RunOptions& opt) {
  if (!(opt.cfl_fraction > 0) || !(opt.cfl_fraction <= Real(0.5)))
    throw std::invalid_argument("run_until: cfl_fraction must lie in (0, 0.5]");
  if (opt.S < 4) throw std::invalid_argument("run_until: S must be >= 4 for the radius fit");

  RunResult result{std::move(state), {}, true, ""};
  const Real t_eps = 1e-12 * std::max(Real(1), std::abs(t_end));
  const Real energy0 = energy(result.state.velocity);

  std::unique_ptr<ChannelChart> chart;
  if (result.state.grid.geometry == Geometry::Channel)
    chart = std::make_unique<ChannelChart>(result.state.grid.Lz);

  while (result.state.time < t_end - t_eps) {
    try {
      TaylorSeries series = compute_coefficients(result.state.velocity, result.state.vorticity,
                                                 opt.S, chart.get());
      series.base_time = result.state.time;
      const std::vector<Real> norms = coefficient_norms(series);
      const Real rho = estimate_radius(norms, opt.weights);

      Real dt = std::min(opt.cfl_fraction * rho, opt.dt_max);
      dt = std::min(dt, t_end - result.state.time);
      if (!(dt > 0) || !std::isfinite(dt))
        throw std::runtime_error("run_until: no usable dt (radius " + std::to_string(rho) + ")");

      SimState next = result.state;
      for (int attempt = 0;; ++attempt) {
        try {
          next = advance(result.state, series, dt);
          break;
        } catch (const MapInversionError&) {
          if (attempt >= opt.max_retries) throw;
          dt *= Real(0.5);
        }
      }

      StepReport report;
      report.radius_estimate = rho;
      report.dt_taken = dt;
      report.coefficient_norms = norms;
      report.residuals.cauchy = cauchy_residual(series, result.state.vorticity, dt);
      report.residuals.jacobian = jacobian_residual(series, dt);
      report.residuals.boundary = chart ? boundary_residual(series, *chart, dt) : Real(0);
      report.energy = energy(next.velocity);
      report.residuals.energy_drift =
          energy0 > 0 ? (report.energy - energy0) / energy0 : report.energy - energy0;
      result.reports.push_back(std::move(report));
      result.state = std::move(next);
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = e.what();
      break;
    }
    if (opt.on_step) opt.on_step(result.state, result.reports.back());
  }
  return result;
}

} // namespace clg
