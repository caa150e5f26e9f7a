#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "clg/holder.hpp"
#include "clg/oracle.hpp"
#include "clg/operators.hpp"
#include "clg/parallel.hpp"
#include "clg/presets.hpp"
#include "clg/recursion.hpp"
#include "clg/stepper.hpp"

#include <cmath>

using namespace clg;

namespace {

Real linf_diff(const VectorField& a, const VectorField& b) {
  return std::max({(a.x - b.x).abs().maxCoeff(), (a.y - b.y).abs().maxCoeff(),
                   (a.z - b.z).abs().maxCoeff()});
}

SimState make_state(const LabelGrid& g, const InitialData& d) {
  return SimState{0.0, g, d.v0, d.omega0, 0};
}

// Grid mean of det(grad X) - 1 at time t; volume preservation of the
// truncated map holds to quadrature accuracy even though the pointwise
// determinant defect is only O(t^{S+1}).
Real mean_det_defect(const TaylorSeries& series, Real t) {
  const VectorField disp = series_displacement(series, t);
  const TensorField J = jacobian(disp);
  const LabelGrid& g = series.grid;
  const Real total = parallel_sum(g.size(), [&](Index i) {
    Mat3 F;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) F(r, c) = J(r, c)[i] + (r == c ? 1.0 : 0.0);
    return (F.determinant() - 1.0) * g.quad_weight(i);
  });
  return total / g.volume();
}

// Series positions at the grid labels.
std::vector<Vec3> series_positions(const TaylorSeries& series, Real t) {
  const VectorField disp = series_displacement(series, t);
  std::vector<Vec3> out(static_cast<size_t>(series.grid.size()));
  for (Index i = 0; i < series.grid.size(); ++i) {
    const Vec3 a = series.grid.pos(i);
    out[static_cast<size_t>(i)] = a + Vec3(disp.x[i], disp.y[i], disp.z[i]);
  }
  return out;
}

std::vector<Vec3> grid_labels(const LabelGrid& g) {
  std::vector<Vec3> out(static_cast<size_t>(g.size()));
  for (Index i = 0; i < g.size(); ++i) out[static_cast<size_t>(i)] = g.pos(i);
  return out;
}

Real sup_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  Real worst = 0;
  for (size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return worst;
}

} // namespace

TEST_CASE("presets are admissible initial data") {
  SUBCASE("shear: x-only, divergence-free, wall-parallel") {
    const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
    const InitialData d = preset_shear(g, 1.3);
    CHECK(d.v0.y.abs().maxCoeff() == 0.0);
    CHECK(d.v0.z.abs().maxCoeff() == 0.0);
    CHECK(linf(divergence(d.v0)) == 0.0);
  }
  SUBCASE("channel vortex: solenoidal to rounding, impermeable walls") {
    const LabelGrid g = make_channel_grid(16, 4, 17, 1.0, 1.0, 1.0);
    const InitialData d = preset_channel_vortex(g, 0.8);
    CHECK(linf(divergence(d.v0)) <= 1e-10);
    for (Index iy = 0; iy < g.ny; ++iy)
      for (Index ix = 0; ix < g.nx; ++ix) {
        CHECK(std::abs(d.v0.z[g.idx(ix, iy, 0)]) <= 1e-14);
        CHECK(std::abs(d.v0.z[g.idx(ix, iy, g.nz - 1)]) <= 1e-14);
      }
  }
  SUBCASE("abc: Beltrami curl eigenfield") {
    const LabelGrid g = make_periodic_grid(16, 16, 16, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
    const InitialData d = preset_abc(g);
    CHECK(linf_diff(d.omega0, d.v0) <= 1e-10);
  }
}

TEST_CASE("compute_coefficients: zero data, steady shear, input validation") {
  SUBCASE("zero initial velocity gives all-zero coefficients") {
    const LabelGrid g = make_periodic_grid(8, 8, 8, 1.0, 1.0, 1.0);
    const InitialData d = preset_zero(g);
    const TaylorSeries series = compute_coefficients(d.v0, d.omega0, 6);
    REQUIRE(series.coeff.size() == 6);
    for (const VectorField& c : series.coeff) CHECK(linf(c) == 0.0);
  }
  SUBCASE("steady shear: all coefficients beyond the first vanish") {
    const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
    const InitialData d = preset_shear(g);
    const TaylorSeries series = compute_coefficients(d.v0, d.omega0, 8);
    CHECK(linf_diff(series.at_order(1), d.v0) == 0.0);
    for (int s = 2; s <= 8; ++s) {
      CHECK(linf(series.at_order(s)) <= 1e-9);
      CHECK(holder_norm(series.at_order(s), 1, 0.5) <= 1e-9);
    }
  }
  SUBCASE("divergent initial data is rejected") {
    const LabelGrid g = make_periodic_grid(8, 8, 8, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
    VectorField bad(g);
    for (Index i = 0; i < g.size(); ++i) bad.x[i] = std::sin(g.pos(i).x());
    // div = cos(x), far above the 1e-8 gate
    CHECK_THROWS_AS(compute_coefficients(bad, curl(bad), 4), std::invalid_argument);
  }
  SUBCASE("wall-leaking channel data is rejected") {
    const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
    VectorField bad(g);
    bad.z.setConstant(0.5); // constant: div-free but punches through the walls
    CHECK_THROWS_AS(compute_coefficients(bad, curl(bad), 4), std::invalid_argument);
  }
}

TEST_CASE("compute_coefficients: ABC series matches the trajectory oracle") {
  const LabelGrid g = make_periodic_grid(32, 32, 32, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
  const InitialData d = preset_abc(g);
  const TaylorSeries series = compute_coefficients(d.v0, d.omega0, 6);
  CHECK(linf_diff(series.at_order(1), d.v0) == 0.0);

  const Real t = 0.05;
  const std::vector<Vec3> from_series = series_positions(series, t);
  const std::vector<Vec3> from_ode =
      oracle_trajectories("abc", {}, g, grid_labels(g), t, 1e-12);
  CHECK(sup_distance(from_series, from_ode) <= 1e-7);
}

TEST_CASE("estimate_radius: synthetic geometric norms and failure modes") {
  const WeightSequence W = make_weights_analytic(16);

  SUBCASE("norms r^s give rho = 1/r within 1%") {
    const Real r = 0.5;
    std::vector<Real> norms;
    for (int s = 1; s <= 8; ++s) norms.push_back(std::pow(r, s));
    const Real rho = estimate_radius(norms, W);
    CHECK(rho == doctest::Approx(1.0 / r).epsilon(0.01));
  }
  SUBCASE("super-geometric decay returns the +infinity sentinel") {
    std::vector<Real> norms = {3.0, 1e-15, 1e-16, 0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(std::isinf(estimate_radius(norms, W)));
  }
  SUBCASE("fewer than three nonzero norms is an error") {
    std::vector<Real> norms = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5};
    CHECK_THROWS_AS(estimate_radius(norms, W), std::runtime_error);
  }
  SUBCASE("too few orders is an error") {
    std::vector<Real> norms = {1.0, 0.5, 0.25};
    CHECK_THROWS_AS(estimate_radius(norms, W), std::invalid_argument);
  }
}

TEST_CASE("estimate_radius: shear sentinel and ABC scaling symmetry") {
  const WeightSequence W = make_weights_analytic(16);

  SUBCASE("steady shear estimates an infinite radius") {
    const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
    const InitialData d = preset_shear(g);
    const TaylorSeries series = compute_coefficients(d.v0, d.omega0, 8);
    CHECK(std::isinf(estimate_radius(series, W)));
  }

  SUBCASE("doubling v0 halves the radius") {
    const LabelGrid g = make_periodic_grid(16, 16, 16, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
    const InitialData d1 = preset_abc(g);
    const InitialData d2 = preset_abc(g, 2.0, 2.0, 2.0);
    const TaylorSeries s1 = compute_coefficients(d1.v0, d1.omega0, 8);
    const TaylorSeries s2 = compute_coefficients(d2.v0, d2.omega0, 8);

    // the recursion is order-s homogeneous, so the norms scale by lambda^s
    const std::vector<Real> n1 = coefficient_norms(s1);
    const std::vector<Real> n2 = coefficient_norms(s2);
    for (int s = 1; s <= 8; ++s) {
      const Real scaled = std::pow(2.0, s) * n1[static_cast<size_t>(s - 1)];
      CHECK(n2[static_cast<size_t>(s - 1)] ==
            doctest::Approx(scaled).epsilon(1e-10));
    }

    const Real r1 = estimate_radius(n1, W);
    const Real r2 = estimate_radius(n2, W);
    CHECK(r2 == doctest::Approx(0.5 * r1).epsilon(0.05));
  }
}

TEST_CASE("advance: identity at dt=0, steadiness, inversion failure") {
  const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
  const InitialData d = preset_shear(g);
  const SimState state = make_state(g, d);
  const TaylorSeries series = compute_coefficients(d.v0, d.omega0, 4);

  SUBCASE("dt = 0 changes only the step index") {
    const SimState next = advance(state, series, 0.0);
    CHECK(next.time == state.time);
    CHECK(next.step_index == 1);
    CHECK((next.velocity.x == state.velocity.x).all());
    CHECK((next.velocity.y == state.velocity.y).all());
    CHECK((next.velocity.z == state.velocity.z).all());
  }
  SUBCASE("steady shear is reproduced after a step") {
    const SimState next = advance(state, series, 0.25);
    CHECK(next.time == doctest::Approx(0.25));
    CHECK(linf_diff(next.velocity, d.v0) <= 1e-8);
  }
  SUBCASE("absurd dt fails the fixed-point iteration") {
    // needs a displacement whose gradient is O(1): shear's inversion is
    // exactly solvable (xi_x depends only on a_z), so use an ABC field
    const LabelGrid pg = make_periodic_grid(8, 8, 8, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
    const InitialData abc = preset_abc(pg);
    TaylorSeries lin;
    lin.grid = pg;
    lin.order = 1;
    lin.coeff.push_back(abc.v0);
    const SimState pstate = make_state(pg, abc);
    CHECK_THROWS_AS(advance(pstate, lin, 20.0), MapInversionError);
  }
}

TEST_CASE("advance: ABC step-doubling consistency") {
  const LabelGrid g = make_periodic_grid(32, 32, 32, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
  const InitialData d = preset_abc(g);
  const SimState state = make_state(g, d);

  const TaylorSeries s0 = compute_coefficients(state.velocity, state.vorticity, 8);
  const SimState one = advance(state, s0, 0.02);

  const SimState half = advance(state, s0, 0.01);
  const TaylorSeries s1 = compute_coefficients(half.velocity, half.vorticity, 8);
  const SimState two = advance(half, s1, 0.01);

  CHECK(one.time == doctest::Approx(two.time));
  CHECK(linf_diff(one.velocity, two.velocity) <= 1e-8);

  // restart invariants: the projected state is admissible fresh data
  CHECK(linf(divergence(two.velocity)) <= 1e-9);

  // volume preservation of the truncated map (grid mean, not sup)
  CHECK(std::abs(mean_det_defect(s0, 0.02)) <= 1e-8);
}

TEST_CASE("run_until: trivial interval, steady channel run, ABC run") {
  const WeightSequence W = make_weights_analytic(16);

  SUBCASE("t_end = 0 takes no steps") {
    const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
    const InitialData d = preset_shear(g);
    RunOptions opt;
    opt.S = 4;
    opt.weights = W;
    const RunResult r = run_until(make_state(g, d), 0.0, opt);
    CHECK(r.ok);
    CHECK(r.reports.empty());
    CHECK(r.state.time == 0.0);
  }

  SUBCASE("steady shear to t=1 in ten capped steps") {
    const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
    const InitialData d = preset_shear(g);
    RunOptions opt;
    opt.S = 8;
    opt.weights = W;
    opt.dt_max = 0.1; // the radius is infinite for this exact solution
    const RunResult r = run_until(make_state(g, d), 1.0, opt);
    REQUIRE(r.ok);
    REQUIRE(r.reports.size() == 10);
    CHECK(r.state.time == doctest::Approx(1.0));
    for (const StepReport& rep : r.reports) {
      CHECK(std::isinf(rep.radius_estimate));
      CHECK(rep.dt_taken == doctest::Approx(0.1));
      CHECK(std::abs(rep.residuals.energy_drift) <= 1e-8);
      CHECK(rep.residuals.cauchy <= 1e-8);
      CHECK(rep.residuals.boundary <= 1e-10);
      CHECK(static_cast<int>(rep.coefficient_norms.size()) == opt.S);
    }
    CHECK(linf_diff(r.state.velocity, d.v0) <= 1e-7);
  }

  SUBCASE("ABC to t=0.1 conserves energy and satisfies the invariants") {
    const LabelGrid g = make_periodic_grid(32, 32, 32, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
    const InitialData d = preset_abc(g);
    RunOptions opt;
    opt.S = 8;
    opt.cfl_fraction = 0.25;
    opt.weights = W;
    const RunResult r = run_until(make_state(g, d), 0.1, opt);
    REQUIRE(r.ok);
    REQUIRE(!r.reports.empty());
    CHECK(r.state.time == doctest::Approx(0.1));
    for (const StepReport& rep : r.reports) {
      CHECK(std::abs(rep.residuals.energy_drift) <= 1e-6);
      CHECK(rep.residuals.cauchy <= 1e-6);
      CHECK(rep.residuals.jacobian <= 1e-5);
      CHECK(rep.dt_taken <= 0.25 * rep.radius_estimate + 1e-15);
    }
  }
}

TEST_CASE("run_until: invalid options are rejected") {
  const LabelGrid g = make_channel_grid(8, 8, 17, 1.0, 1.0, 1.0);
  const InitialData d = preset_shear(g);
  RunOptions opt;
  opt.weights = make_weights_analytic(16);
  opt.cfl_fraction = 0.8;
  CHECK_THROWS_AS(run_until(make_state(g, d), 1.0, opt), std::invalid_argument);
}

TEST_CASE("truncation-order scaling of the residuals under t-halving") {
  const LabelGrid g = make_periodic_grid(16, 16, 16, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
  const InitialData d = preset_abc(g);
  const int S = 4;
  const TaylorSeries series = compute_coefficients(d.v0, d.omega0, S);

  const Real t1 = 0.02, t2 = 0.01;
  const Real c1 = cauchy_residual(series, d.omega0, t1);
  const Real c2 = cauchy_residual(series, d.omega0, t2);
  REQUIRE(c1 > 100 * 1e-12);
  CHECK(std::log2(c1 / c2) >= S - 0.5);

  const Real j1 = jacobian_residual(series, t1);
  const Real j2 = jacobian_residual(series, t2);
  REQUIRE(j1 > 100 * 1e-12);
  CHECK(std::log2(j1 / j2) >= S - 0.5);
}

TEST_CASE("full step pipeline is bit-identical across thread counts") {
  const LabelGrid g = make_periodic_grid(16, 16, 16, 2.0 * kPi, 2.0 * kPi, 2.0 * kPi);
  const InitialData d = preset_abc(g);
  RunOptions opt;
  opt.S = 6;
  opt.weights = make_weights_analytic(16);
  opt.dt_max = 0.05;

  set_num_threads(1);
  const RunResult r1 = run_until(make_state(g, d), 0.05, opt);
  set_num_threads(8);
  const RunResult r8 = run_until(make_state(g, d), 0.05, opt);
  set_num_threads(1);

  REQUIRE(r1.ok);
  REQUIRE(r8.ok);
  REQUIRE(r1.reports.size() == r8.reports.size());
  for (size_t i = 0; i < r1.reports.size(); ++i) {
    CHECK(r1.reports[i].radius_estimate == r8.reports[i].radius_estimate);
    CHECK(r1.reports[i].dt_taken == r8.reports[i].dt_taken);
    CHECK(r1.reports[i].residuals.cauchy == r8.reports[i].residuals.cauchy);
    CHECK(r1.reports[i].energy == r8.reports[i].energy);
    for (size_t s = 0; s < r1.reports[i].coefficient_norms.size(); ++s)
      CHECK(r1.reports[i].coefficient_norms[s] == r8.reports[i].coefficient_norms[s]);
  }
  CHECK((r1.state.velocity.x == r8.state.velocity.x).all());
  CHECK((r1.state.velocity.y == r8.state.velocity.y).all());
  CHECK((r1.state.velocity.z == r8.state.velocity.z).all());
}
