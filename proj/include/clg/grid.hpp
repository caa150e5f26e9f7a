#pragma once

// Label-space grids.  Two geometries:
//  - Periodic3D: uniform grid on [0,Lx)x[0,Ly)x[0,Lz), all directions periodic,
//    node x_i = i*L/n, spectral differentiation in all three directions.
//  - Channel: periodic in x,y; z is a uniform node grid on [0,Lz] *including*
//    both walls, z_j = j*Lz/(nz-1), finite differences in z.
// Data layout everywhere: flat array, x fastest, idx = ix + nx*(iy + ny*iz).

#include "clg/types.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace clg {

enum class Geometry : std::uint8_t {
  Periodic3D = 0,
  Channel = 1,
};

struct LabelGrid {
  Geometry geometry = Geometry::Periodic3D;
  Index nx = 0, ny = 0, nz = 0;
  Real Lx = 0, Ly = 0, Lz = 0;

  Index size() const { return nx * ny * nz; }
  Index idx(Index ix, Index iy, Index iz) const { return ix + nx * (iy + ny * iz); }

  // Grid spacings.  dz is the node spacing: L/n for periodic z, L/(n-1) for
  // the wall-to-wall channel grid.
  Real dx() const { return Lx / Real(nx); }
  Real dy() const { return Ly / Real(ny); }
  Real dz() const {
    return geometry == Geometry::Periodic3D ? Lz / Real(nz) : Lz / Real(nz - 1);
  }

  Real x(Index ix) const { return Real(ix) * dx(); }
  Real y(Index iy) const { return Real(iy) * dy(); }
  Real z(Index iz) const { return Real(iz) * dz(); }

  Vec3 pos(Index i) const {
    const Index ix = i % nx;
    const Index iy = (i / nx) % ny;
    const Index iz = i / (nx * ny);
    return Vec3(x(ix), y(iy), z(iz));
  }

  bool periodic_in_z() const { return geometry == Geometry::Periodic3D; }

  // Flat indices of the wall nodes (channel: both z planes; periodic: none).
  std::vector<Index> wall_nodes() const {
    std::vector<Index> w;
    if (geometry != Geometry::Channel) return w;
    w.reserve(static_cast<size_t>(2 * nx * ny));
    for (Index iy = 0; iy < ny; ++iy)
      for (Index ix = 0; ix < nx; ++ix) w.push_back(idx(ix, iy, 0));
    for (Index iy = 0; iy < ny; ++iy)
      for (Index ix = 0; ix < nx; ++ix) w.push_back(idx(ix, iy, nz - 1));
    return w;
  }

  // Quadrature weight of node i for volume integrals (trapezoid in channel z).
  Real quad_weight(Index i) const {
    const Real base = dx() * dy() * dz();
    if (geometry == Geometry::Periodic3D) return base;
    const Index iz = i / (nx * ny);
    return (iz == 0 || iz == nz - 1) ? Real(0.5) * base : base;
  }

  Real volume() const { return Lx * Ly * Lz; }
};

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Throws std::invalid_argument on malformed grids (spectral directions must be
// powers of two; the channel needs at least 5 z nodes for the FD stencils).
inline void validate(const LabelGrid& g) {
  if (g.nx <= 0 || g.ny <= 0 || g.nz <= 0)
    throw std::invalid_argument("grid: dims must be positive");
  if (g.Lx <= 0 || g.Ly <= 0 || g.Lz <= 0)
    throw std::invalid_argument("grid: lengths must be positive");
  if (!is_power_of_two(g.nx) || !is_power_of_two(g.ny))
    throw std::invalid_argument("grid: nx, ny must be powers of two");
  if (g.geometry == Geometry::Periodic3D) {
    if (!is_power_of_two(g.nz))
      throw std::invalid_argument("grid: nz must be a power of two (periodic)");
  } else {
    if (g.nz < 5)
      throw std::invalid_argument("grid: channel needs nz >= 5");
  }
}

inline LabelGrid make_periodic_grid(Index nx, Index ny, Index nz,
                                    Real Lx, Real Ly, Real Lz) {
  LabelGrid g{Geometry::Periodic3D, nx, ny, nz, Lx, Ly, Lz};
  validate(g);
  return g;
}

inline LabelGrid make_channel_grid(Index nx, Index ny, Index nz,
                                   Real Lx, Real Ly, Real Lz) {
  LabelGrid g{Geometry::Channel, nx, ny, nz, Lx, Ly, Lz};
  validate(g);
  return g;
}

inline bool same_grid(const LabelGrid& a, const LabelGrid& b) {
  return a.geometry == b.geometry && a.nx == b.nx && a.ny == b.ny &&
         a.nz == b.nz && a.Lx == b.Lx && a.Ly == b.Ly && a.Lz == b.Lz;
}

} // namespace clg
