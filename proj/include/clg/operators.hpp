#pragma once

// Discrete differential operators.  Periodic axes differentiate spectrally;
// the channel z axis uses 4th-order finite differences on the wall-to-wall
// node grid (centered 5-point interior, one-sided stencils at and next to the
// walls, generated by Fornberg's algorithm so the order is by construction).
// Mixed partials along different axes commute exactly, which makes curl(grad)
// and div(curl) vanish to rounding in both geometries.

#include "clg/fft.hpp"

#include <array>

namespace clg {

// Fornberg finite-difference weights: returns w such that
//   f^(order)(z0) ~= sum_j w[j] f(nodes[j]),
// exact for polynomials up to degree nodes.size()-1.
std::vector<Real> fd_weights(Real z0, const std::vector<Real>& nodes, int order);

// 4th-order z derivatives on the channel node grid (also valid on a periodic
// grid for testing, but production periodic code uses the spectral path).
ScalarField dz_fd(const ScalarField& f);
ScalarField dzz_fd(const ScalarField& f);

// All three first derivatives of f with a single forward transform.
std::array<ScalarField, 3> all_derivs(const ScalarField& f);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
VectorField curl(const VectorField& u);

// Jacobian tensor G(r,c) = d u_r / d x_c.
struct TensorField {
  LabelGrid grid;
  std::array<ArrayXr, 9> m;

  TensorField() = default;
  explicit TensorField(const LabelGrid& g) : grid(g) {
    for (auto& a : m) a = ArrayXr::Zero(g.size());
  }
  const ArrayXr& operator()(int r, int c) const { return m[static_cast<size_t>(3 * r + c)]; }
  ArrayXr& operator()(int r, int c) { return m[static_cast<size_t>(3 * r + c)]; }
};

TensorField jacobian(const VectorField& u);

} // namespace clg
