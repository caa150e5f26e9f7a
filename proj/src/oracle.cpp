#include "clg/oracle.hpp"

#include "clg/parallel.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace clg {

namespace {

Real param_or(const std::map<std::string, Real>& params, const std::string& key, Real fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

} // namespace

std::function<Vec3(const Vec3&)> steady_preset_velocity(
    const std::string& name, const std::map<std::string, Real>& params, const LabelGrid& grid) {
  if (name == "abc") {
    const Real A = param_or(params, "A", 1), B = param_or(params, "B", 1),
               C = param_or(params, "C", 1);
    return [=](const Vec3& p) {
      return Vec3(A * std::sin(p.z()) + C * std::cos(p.y()),
                  B * std::sin(p.x()) + A * std::cos(p.z()),
                  C * std::sin(p.y()) + B * std::cos(p.x()));
    };
  }
  if (name == "shear") {
    const Real U0 = param_or(params, "U0", 1);
    const Real Lz = grid.Lz;
    return [=](const Vec3& p) { return Vec3(U0 * std::sin(kPi * p.z() / Lz), 0.0, 0.0); };
  }
  if (name == "zero") {
    return [](const Vec3&) { return Vec3::Zero(); };
  }
  if (name == "channel-vortex")
    throw std::invalid_argument("oracle: preset 'channel-vortex' is not steady; "
                                "trajectory oracle would be invalid");
  throw std::invalid_argument("oracle: unknown preset '" + name + "'");
}

std::vector<Vec3> oracle_trajectories(const std::string& preset,
                                      const std::map<std::string, Real>& params,
                                      const LabelGrid& grid, const std::vector<Vec3>& labels,
                                      Real t, Real tol) {
  const auto vel = steady_preset_velocity(preset, params, grid);
  std::vector<Vec3> out(labels.size());
  if (t == 0) {
    out = labels;
    return out;
  }

  using State = std::array<Real, 3>;
  namespace ode = boost::numeric::odeint;
  const Real dt0 = std::copysign(std::min(std::abs(t), Real(0.01)), t);

  parallel_for(static_cast<Index>(labels.size()), [&](Index i) {
    auto rhs = [&](const State& x, State& dxdt, Real) {
      const Vec3 v = vel(Vec3(x[0], x[1], x[2]));
      dxdt = {v.x(), v.y(), v.z()};
    };
    State x = {labels[static_cast<size_t>(i)].x(), labels[static_cast<size_t>(i)].y(),
               labels[static_cast<size_t>(i)].z()};
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, x, Real(0), t, dt0);
    out[static_cast<size_t>(i)] = Vec3(x[0], x[1], x[2]);
  });
  return out;
}

} // namespace clg
