#include "clg/holder.hpp"

#include "clg/operators.hpp"
#include "clg/parallel.hpp"

#include <random>

namespace clg {

namespace {

struct BallOffset {
  Index ox, oy, oz;
  Real inv_dist_gamma; // 1 / |physical offset|^gamma
};

// Half-space index offsets within the sampling ball (one of each +/- pair).
std::vector<BallOffset> ball_offsets(const LabelGrid& g, Real gamma) {
  std::vector<BallOffset> offs;
  const int R = kHolderBallRadius;
  for (Index oz = -R; oz <= R; ++oz)
    for (Index oy = -R; oy <= R; ++oy)
      for (Index ox = -R; ox <= R; ++ox) {
        if (ox * ox + oy * oy + oz * oz == 0) continue;
        if (ox * ox + oy * oy + oz * oz > R * R) continue;
        // keep one representative of each {+o, -o} pair
        if (!(oz > 0 || (oz == 0 && oy > 0) || (oz == 0 && oy == 0 && ox > 0)))
          continue;
        const Real dx = Real(ox) * g.dx();
        const Real dy = Real(oy) * g.dy();
        const Real dz = Real(oz) * g.dz();
        const Real d = std::sqrt(dx * dx + dy * dy + dz * dz);
        offs.push_back({ox, oy, oz, std::pow(d, -gamma)});
      }
  return offs;
}

Real min_image(Real d, Real L) {
  d = std::abs(d);
  return std::min(d, L - d);
}

Real pair_distance(const LabelGrid& g, Index i, Index j) {
  const Vec3 p = g.pos(i), q = g.pos(j);
  const Real dx = min_image(p.x() - q.x(), g.Lx);
  const Real dy = min_image(p.y() - q.y(), g.Ly);
  const Real dz = g.periodic_in_z() ? min_image(p.z() - q.z(), g.Lz)
                                    : std::abs(p.z() - q.z());
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// The 512 seeded long-range pairs; depends only on the grid size.
std::vector<std::pair<Index, Index>> far_pairs(const LabelGrid& g) {
  std::mt19937_64 rng(kHolderPairSeed);
  std::uniform_int_distribution<Index> pick(0, g.size() - 1);
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(kHolderFarPairs);
  while (static_cast<int>(pairs.size()) < kHolderFarPairs) {
    const Index i = pick(rng);
    const Index j = pick(rng);
    if (i == j) continue;
    pairs.emplace_back(i, j);
  }
  return pairs;
}

} // namespace

Real holder_seminorm(const ScalarField& f, Real gamma) {
  if (!(gamma > 0 && gamma < 1))
    throw std::invalid_argument("holder_seminorm: need 0 < gamma < 1");
  const LabelGrid& g = f.grid;
  const auto offs = ball_offsets(g, gamma);
  const Index nx = g.nx, ny = g.ny, nz = g.nz;

  const Real near_max = parallel_max(g.size(), [&](Index i) {
    const Index ix = i % nx;
    const Index iy = (i / nx) % ny;
    const Index iz = i / (nx * ny);
    Real best = 0;
    for (const auto& o : offs) {
      Index jz = iz + o.oz;
      if (g.periodic_in_z()) {
        jz = (jz % nz + nz) % nz;
      } else if (jz < 0 || jz >= nz) {
        continue;
      }
      const Index jx = ((ix + o.ox) % nx + nx) % nx;
      const Index jy = ((iy + o.oy) % ny + ny) % ny;
      const Real diff = std::abs(f.v[i] - f.v[g.idx(jx, jy, jz)]);
      best = std::max(best, diff * o.inv_dist_gamma);
    }
    return best;
  });

  const auto fp = far_pairs(g);
  const Real far_max = parallel_max(static_cast<Index>(fp.size()), [&](Index k) {
    const auto [i, j] = fp[static_cast<size_t>(k)];
    const Real d = pair_distance(g, i, j);
    return std::abs(f.v[i] - f.v[j]) * std::pow(d, -gamma);
  });

  return std::max(near_max, far_max);
}

Real holder_norm(const ScalarField& f, int m, Real gamma) {
  if (m != 0 && m != 1) throw std::invalid_argument("holder_norm: m must be 0 or 1");
  Real sup = linf(f);
  Real sem = holder_seminorm(f, gamma);
  if (m == 1) {
    const auto d = all_derivs(f);
    for (const auto& df : d) {
      sup = std::max(sup, linf(df));
      sem = std::max(sem, holder_seminorm(df, gamma));
    }
  }
  return sup + sem;
}

Real holder_norm(const VectorField& u, int m, Real gamma) {
  Real best = 0;
  for (int c = 0; c < 3; ++c) {
    ScalarField comp(u.grid);
    comp.v = u.comp(c);
    best = std::max(best, holder_norm(comp, m, gamma));
  }
  return best;
}

} // namespace clg
