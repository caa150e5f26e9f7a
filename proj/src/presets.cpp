#include "clg/presets.hpp"

#include "clg/operators.hpp"

#include <cmath>

namespace clg {

namespace {

template <class F>
InitialData from_formula(const LabelGrid& grid, F&& f) {
  InitialData d{VectorField(grid), VectorField(grid)};
  for (Index i = 0; i < grid.size(); ++i) {
    const Vec3 v = f(grid.pos(i));
    d.v0.x[i] = v.x();
    d.v0.y[i] = v.y();
    d.v0.z[i] = v.z();
  }
  d.omega0 = curl(d.v0);
  return d;
}

} // namespace

InitialData preset_abc(const LabelGrid& grid, Real A, Real B, Real C) {
  return from_formula(grid, [&](const Vec3& p) {
    return Vec3(A * std::sin(p.z()) + C * std::cos(p.y()),
                B * std::sin(p.x()) + A * std::cos(p.z()),
                C * std::sin(p.y()) + B * std::cos(p.x()));
  });
}

InitialData preset_shear(const LabelGrid& grid, Real U0) {
  return from_formula(grid, [&](const Vec3& p) {
    return Vec3(U0 * std::sin(kPi * p.z() / grid.Lz), 0.0, 0.0);
  });
}

InitialData preset_channel_vortex(const LabelGrid& grid, Real scale) {
  VectorField pot(grid);
  const Real amp = scale * grid.Lx / (2.0 * kPi);
  for (Index i = 0; i < grid.size(); ++i) {
    const Vec3 p = grid.pos(i);
    pot.y[i] = amp * std::sin(2.0 * kPi * p.x() / grid.Lx) * std::sin(kPi * p.z() / grid.Lz);
  }
  InitialData d{curl(pot), VectorField(grid)};
  d.omega0 = curl(d.v0);
  return d;
}

InitialData preset_zero(const LabelGrid& grid) {
  return InitialData{VectorField(grid), VectorField(grid)};
}

} // namespace clg
