#pragma once

// Approximate Holder norms ||f||_{m,gamma} = ||f||_m + max_{|alpha|<=m} [d^alpha f]_gamma.
// Sup norms are taken over grid nodes.  The seminorm is approximated over a
// deterministic pair set: all node pairs within a ball of 4 grid spacings
// (index-space radius) plus 512 seeded random long-range pairs.  The pair set
// depends only on the grid, so norms of different fields are comparable on the
// identical sample.

#include "clg/field.hpp"

namespace clg {

// Fixed seed for the long-range pair sample; changing it changes every frozen
// seminorm value in the tests, so treat it as part of the format.
inline constexpr std::uint64_t kHolderPairSeed = 0x9e3779b97f4a7c15ull;
inline constexpr int kHolderFarPairs = 512;
inline constexpr int kHolderBallRadius = 4;

// gamma-seminorm of a scalar field over the sampled pair set.
Real holder_seminorm(const ScalarField& f, Real gamma);

// Full C^{m,gamma} norm, m in {0,1}.  m=1 includes the three first
// derivatives (spectral / 4th-order FD as per geometry) in both the sup part
// and the seminorm part.
Real holder_norm(const ScalarField& f, int m, Real gamma);

// Vector fields: max over the three component norms.
Real holder_norm(const VectorField& u, int m, Real gamma);

} // namespace clg
