#pragma once

// Independent trajectory oracle.  The presets are steady Euler solutions, so
// particle paths solve the autonomous system dX/dt = v0(X) with the analytic
// v0; integrating that ODE to tight tolerance gives reference positions that
// share no code with the series recursion.

#include "clg/field.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace clg {

// Analytic velocity field of a steady preset ("abc", "shear", "zero").
// Throws std::invalid_argument for unknown names and for presets whose flow
// is not steady (channel-vortex), where the oracle would be invalid.
std::function<Vec3(const Vec3&)> steady_preset_velocity(
    const std::string& name, const std::map<std::string, Real>& params, const LabelGrid& grid);

// Adaptive embedded Runge-Kutta integration of each label to time t with
// local tolerance tol.
std::vector<Vec3> oracle_trajectories(const std::string& preset,
                                      const std::map<std::string, Real>& params,
                                      const LabelGrid& grid, const std::vector<Vec3>& labels,
                                      Real t, Real tol = 1e-12);

} // namespace clg
