#pragma once

// Helmholtz–Hodge solves for the displacement coefficients:
//   Delta phi = div_data,    d_nu phi = neumann_data   (scalar potential)
//   Delta Phi = -curl_data,  Phi = 0 on walls          (vector potential)
//   xi = grad phi + curl Phi
// Periodic3D inverts the Laplacian spectrally with a zero-mean gauge.  The
// channel solves an independent two-point boundary value problem in z for
// every (kx, ky) Fourier mode: 4th-order finite-difference interior rows,
// derivative rows for Neumann data, identity rows for Dirichlet data, dense
// LU per mode.  The wall normal is the inward normal nu = grad S / |grad S|
// of the chart S = z (Lz - z), so the divergence-theorem compatibility reads
//   int_Omega div dV + oint_wall g dA = 0,
// and the k=0 Neumann mode is solved in bordered form with a Lagrange
// multiplier that absorbs (and measures) any residual incompatibility.

#include "clg/field.hpp"
#include "clg/types.hpp"

namespace clg {

struct HodgeProblem {
  ScalarField div_data;   // target divergence of xi^(s)
  VectorField curl_data;  // target curl of xi^(s)
  WallField neumann_data; // xi^(s) . nu on the walls (channel only)
  Geometry geometry = Geometry::Periodic3D;
};

// int_Omega div dV + oint g dA with the inward normal; identically 0 for
// Periodic3D.  Discretization error shows up here; hodge_reconstruct removes
// it by a constant shift of div_data.
Real compatibility_defect(const HodgeProblem& p);

// Zero-mean potential with Delta phi = rhs and d_nu phi = g on channel walls.
// Throws std::runtime_error when the k=0 channel mode is fed incompatible
// data (the bordered multiplier comes out far from zero).
ScalarField solve_neumann(const ScalarField& rhs, const WallField& g);
ScalarField solve_neumann(const ScalarField& rhs); // Periodic3D convenience

// Componentwise Delta Phi_c = rhs_c with Phi_c = 0 at the walls (channel) or
// the zero-mean gauge (periodic).
VectorField solve_dirichlet(const VectorField& rhs);

// grad phi + curl Phi for the (compatibility-projected) problem.  On
// Periodic3D the free k=0 mode of the result is set to `mean`.
VectorField hodge_reconstruct(const HodgeProblem& p, const Vec3& mean = Vec3::Zero());

// Reconstruction for data given as xi = potential + grad chi: the potential
// carries the whole curl datum (the measured curl of the result reproduces
// curl(potential) to rounding because curl(grad chi) vanishes identically on
// both geometries), and the scalar solve matches the divergence datum and
// the wall trace.  On the channel the gradient part is afterwards re-solved
// against the first-derivative stencils the diagnostics apply, which removes
// the O(h^4) disagreement with the wide second-derivative interior rows of
// solve_neumann while preserving the trace.
VectorField hodge_reconstruct_with_potential(const ScalarField& div_data,
                                             const VectorField& potential,
                                             const WallField& neumann_data,
                                             const Vec3& mean = Vec3::Zero());

} // namespace clg
