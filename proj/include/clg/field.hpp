#pragma once

// Scalar and vector fields over a LabelGrid, plus the truncated time-Taylor
// series of the Lagrangian displacement.  Fields are value types wrapping flat
// Eigen arrays; free functions do the work.

#include "clg/grid.hpp"
#include "clg/parallel.hpp"
#include "clg/types.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace clg {

struct ScalarField {
  LabelGrid grid;
  ArrayXr v; // size grid.size(), x-fastest

  ScalarField() = default;
  explicit ScalarField(const LabelGrid& g) : grid(g), v(ArrayXr::Zero(g.size())) {}
  ScalarField(const LabelGrid& g, ArrayXr data) : grid(g), v(std::move(data)) {
    if (v.size() != grid.size())
      throw std::invalid_argument("ScalarField: data size mismatch");
  }
};

struct VectorField {
  LabelGrid grid;
  ArrayXr x, y, z; // components, each grid.size()

  VectorField() = default;
  explicit VectorField(const LabelGrid& g)
      : grid(g), x(ArrayXr::Zero(g.size())), y(ArrayXr::Zero(g.size())),
        z(ArrayXr::Zero(g.size())) {}

  const ArrayXr& comp(int c) const { return c == 0 ? x : (c == 1 ? y : z); }
  ArrayXr& comp(int c) { return c == 0 ? x : (c == 1 ? y : z); }
};

// Scalar data living only on the two channel walls (bottom z=0, top z=Lz),
// stored as nx*ny planes in the same x-fastest order as volume fields.
struct WallField {
  Index nx = 0, ny = 0;
  ArrayXr bottom, top;

  WallField() = default;
  WallField(Index nx_, Index ny_)
      : nx(nx_), ny(ny_), bottom(ArrayXr::Zero(nx_ * ny_)),
        top(ArrayXr::Zero(nx_ * ny_)) {}
};

// Truncated displacement series  xi(t,a) = sum_{s=1..order} coeff[s-1](a) t^s.
// coeff[0] equals the initial velocity field.
struct TaylorSeries {
  LabelGrid grid;
  int order = 0;
  Real base_time = 0;
  std::vector<VectorField> coeff;

  const VectorField& at_order(int s) const { return coeff.at(static_cast<size_t>(s - 1)); }
};

inline Real linf(const ScalarField& f) {
  return parallel_max(f.v.size(), [&](Index i) { return std::abs(f.v[i]); });
}

inline Real linf(const VectorField& u) {
  return parallel_max(u.x.size(), [&](Index i) {
    return std::max({std::abs(u.x[i]), std::abs(u.y[i]), std::abs(u.z[i])});
  });
}

// Kinetic energy 1/2 int |u|^2 dV (trapezoid weights in channel z).
inline Real energy(const VectorField& u) {
  const LabelGrid& g = u.grid;
  return Real(0.5) * parallel_sum(g.size(), [&](Index i) {
           const Real q = u.x[i] * u.x[i] + u.y[i] * u.y[i] + u.z[i] * u.z[i];
           return q * g.quad_weight(i);
         });
}

inline Real mean(const ScalarField& f) {
  const Real total = parallel_sum(f.v.size(), [&](Index i) {
    return f.v[i] * f.grid.quad_weight(i);
  });
  return total / f.grid.volume();
}

// Evaluates the truncated series and its time derivative at offset t from the
// series base time:  xi(t) = sum coeff_s t^s,  xi_dot(t) = sum s coeff_s t^{s-1}.
VectorField series_displacement(const TaylorSeries& T, Real t);
VectorField series_velocity(const TaylorSeries& T, Real t);

} // namespace clg
