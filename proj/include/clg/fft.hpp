#pragma once

// Fourier-side representation of fields.  A Spectrum stores the full complex
// coefficient cube, normalized so that
//     f(x) = sum_k  c_k  exp(+i kappa . x),   kappa_d = 2 pi fold(k_d) / L_d.
// Periodic3D transforms all three axes; Channel transforms x,y only and keeps
// z as untransformed node planes.  Conjugate symmetry c(-k) = conj(c(k)) holds
// for spectra of real fields and is preserved by every routine here.

#include "clg/field.hpp"
#include "clg/grid.hpp"
#include "clg/types.hpp"

#include <vector>

namespace clg {

// Signed mode number for index k on an n-point axis: 0..n/2, then negative.
inline Index fold(Index k, Index n) { return k <= n / 2 ? k : k - n; }

// Largest |mode| kept by the 2/3 dealiasing rule on an n-point axis.
inline Index dealias_cutoff(Index n) { return n / 3; }

struct Spectrum {
  LabelGrid grid;
  std::vector<Complex> c; // full cube, idx = kx + nx*(ky + ny*kz)

  Spectrum() = default;
  explicit Spectrum(const LabelGrid& g)
      : grid(g), c(static_cast<size_t>(g.size()), Complex(0, 0)) {}

  Index idx(Index kx, Index ky, Index kz) const {
    return kx + grid.nx * (ky + grid.ny * kz);
  }

  // Physical wavenumber along an axis for coefficient index k.
  Real kappa(int axis, Index k) const {
    const Index n = axis == 0 ? grid.nx : (axis == 1 ? grid.ny : grid.nz);
    const Real L = axis == 0 ? grid.Lx : (axis == 1 ? grid.Ly : grid.Lz);
    return Real(2) * kPi * Real(fold(k, n)) / L;
  }
};

// Forward/backward transforms.  forward() normalizes by the product of the
// transformed axis lengths so coefficients are direct Fourier amplitudes.
Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

// 2/3-rule truncation on every spectral axis (x,y and, if periodic, z).
void dealias_inplace(Spectrum& s);
ScalarField dealias(const ScalarField& f);

// Pointwise product followed by dealiasing truncation.
ScalarField multiply_dealias(const ScalarField& a, const ScalarField& b);

// Derivative along a spectral axis: c_k -> i kappa c_k, Nyquist plane zeroed.
// axis 2 requires periodic z.
void derivative_inplace(Spectrum& s, int axis);

// Parseval helpers: physical sum of squares and its spectral counterpart
// N_transformed * sum |c|^2.
Real physical_sumsq(const ScalarField& f);
Real spectral_sumsq(const Spectrum& s);

} // namespace clg
