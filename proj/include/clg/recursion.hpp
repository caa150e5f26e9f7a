#pragma once

// Right-hand sides of the Lagrangian time-Taylor recursion and the residuals
// of the exact constraints.  With xi(t,a) = sum_s xi^(s) t^s the curl and
// divergence of each new coefficient are explicit bilinear/trilinear sums over
// lower-order coefficients:
//   curl xi^(s) = omega0 delta_{1s}
//                 - 1/2 sum_{k, 0<m<s} ((2m-s)/s) grad xi_k^(m) x grad xi_k^(s-m)
//   div  xi^(s) = sum_{i<j, 0<m<s} (d_i xi_j^(m) d_j xi_i^(s-m)
//                                   - d_i xi_i^(m) d_j xi_j^(s-m))
//                 - 1/6 sum_{l+m+n=s} eps_{ijk} eps_{abc}
//                       d_i xi_a^(l) d_j xi_b^(m) d_k xi_c^(n)
// The curl sum is evaluated as the discrete curl of the dealiased potential
// V_s (see curl_rhs_potential below), which represents the same bilinear sum
// via curl(a grad b) = grad a x grad b.  In div_rhs every pairwise product is
// dealiased before use; cubic terms dealias the inner pair before multiplying
// the third factor.

#include "clg/field.hpp"
#include "clg/types.hpp"

#include <vector>

namespace clg {

// View of the data feeding order s: the lower coefficients xi^(1)..xi^(s-1)
// and the initial vorticity (1/time units).
struct RecursionInput {
  int s;
  const std::vector<VectorField>& coeffs;
  const VectorField& omega0;
};

VectorField curl_rhs(const RecursionInput& in);
ScalarField div_rhs(const RecursionInput& in);

// The curl datum in potential form (s >= 2): the dealiased field
//   V_s = sum_{0<m<s} ((s-2m)/(2s)) sum_k xi_k^(m) grad xi_k^(s-m),
// whose discrete curl is exactly curl_rhs.  Solvers that take the rotational
// part of xi^(s) directly from V_s reproduce the curl datum to rounding.
VectorField curl_rhs_potential(const RecursionInput& in);

// sup-norm of sum_k grad Xdot_k x grad X_k - omega0 at time t, where
// X = a + xi(t,a) and Xdot is the series time derivative.
Real cauchy_residual(const TaylorSeries& T, const VectorField& omega0, Real t);

// sup-norm of det(grad X) - 1 at time t.
Real jacobian_residual(const TaylorSeries& T, Real t);

} // namespace clg
