#pragma once

// Initial-condition presets.  Each returns the velocity v0 sampled on the
// grid together with omega0 = curl(v0) computed with the grid's own discrete
// operators, so the pair is exactly consistent with the recursion's notion of
// vorticity.  The channel vortex is built as the discrete curl of a
// streamfunction potential, which makes div v0 vanish to rounding (the x and
// z derivatives act on different axes and commute exactly).

#include "clg/field.hpp"

namespace clg {

struct InitialData {
  VectorField v0;
  VectorField omega0;
};

// (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x); a Beltrami field
// (curl v = v) on the 2pi-periodic box.
InitialData preset_abc(const LabelGrid& grid, Real A = 1, Real B = 1, Real C = 1);

// (U0 sin(pi z / Lz), 0, 0); a steady channel solution.
InitialData preset_shear(const LabelGrid& grid, Real U0 = 1);

// Discrete curl of (0, psi, 0) with psi = scale (Lx/2pi) sin(2pi x/Lx) sin(pi z/Lz);
// wall-normal component vanishes at z in {0, Lz}.
InitialData preset_channel_vortex(const LabelGrid& grid, Real scale = 1);

InitialData preset_zero(const LabelGrid& grid);

} // namespace clg
