#include "clg/operators.hpp"

#include "clg/parallel.hpp"

namespace clg {

std::vector<Real> fd_weights(Real z0, const std::vector<Real>& nodes, int order) {
  const int n = static_cast<int>(nodes.size());
  if (order >= n)
    throw std::invalid_argument("fd_weights: need more nodes than derivative order");
  // Fornberg's recursive one-point weight generation; table[j][k] is the
  // weight of f(nodes[j]) in the k-th derivative at z0.
  std::vector<std::vector<Real>> c(static_cast<size_t>(n),
                                   std::vector<Real>(static_cast<size_t>(order + 1), 0));
  Real c1 = 1;
  Real c4 = nodes[0] - z0;
  c[0][0] = 1;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    Real c2 = 1;
    Real c5 = c4;
    c4 = nodes[static_cast<size_t>(i)] - z0;
    for (int j = 0; j < i; ++j) {
      const Real c3 = nodes[static_cast<size_t>(i)] - nodes[static_cast<size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[static_cast<size_t>(i)][static_cast<size_t>(k)] =
              c1 * (Real(k) * c[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)] -
                    c5 * c[static_cast<size_t>(i - 1)][static_cast<size_t>(k)]) / c2;
        c[static_cast<size_t>(i)][0] = -c1 * c5 * c[static_cast<size_t>(i - 1)][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[static_cast<size_t>(j)][static_cast<size_t>(k)] =
            (c4 * c[static_cast<size_t>(j)][static_cast<size_t>(k)] -
             Real(k) * c[static_cast<size_t>(j)][static_cast<size_t>(k - 1)]) / c3;
      c[static_cast<size_t>(j)][0] = c4 * c[static_cast<size_t>(j)][0] / c3;
    }
    c1 = c2;
  }
  std::vector<Real> w(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) w[static_cast<size_t>(j)] = c[static_cast<size_t>(j)][static_cast<size_t>(order)];
  return w;
}

namespace {

// Per-row stencil of a z-direction derivative on the channel node grid.
struct ZRow {
  Index first;            // first node index of the window
  std::vector<Real> w;    // weights over the window
};

// Builds all rows for the given derivative order at 4th accuracy order:
// 5-node windows for d/dz, 5-node centered / 6-node one-sided for d2/dz2.
std::vector<ZRow> build_z_rows(const LabelGrid& g, int order) {
  const Index n = g.nz;
  const Real h = g.dz();
  const Index width = (order == 1) ? 5 : 6;       // one-sided window width
  std::vector<ZRow> rows(static_cast<size_t>(n));
  for (Index j = 0; j < n; ++j) {
    Index first;
    Index m;
    if (j >= 2 && j <= n - 3) {
      first = j - 2;
      m = 5; // centered
    } else {
      m = width;
      first = (j < 2) ? 0 : n - width;
    }
    std::vector<Real> nodes(static_cast<size_t>(m));
    for (Index q = 0; q < m; ++q) nodes[static_cast<size_t>(q)] = Real(first + q) * h;
    rows[static_cast<size_t>(j)] = {first, fd_weights(Real(j) * h, nodes, order)};
  }
  return rows;
}

ScalarField apply_z_rows(const ScalarField& f, const std::vector<ZRow>& rows) {
  const LabelGrid& g = f.grid;
  ScalarField out(g);
  const Index plane = g.nx * g.ny;
  parallel_for(g.size(), [&](Index i) {
    const Index iz = i / plane;
    const Index col = i % plane;
    const ZRow& r = rows[static_cast<size_t>(iz)];
    Real acc = 0;
    for (size_t q = 0; q < r.w.size(); ++q)
      acc += r.w[q] * f.v[col + (r.first + static_cast<Index>(q)) * plane];
    out.v[i] = acc;
  });
  return out;
}

ScalarField spectral_deriv(const ScalarField& f, int axis) {
  Spectrum s = forward(f);
  derivative_inplace(s, axis);
  return inverse(s);
}

} // namespace

ScalarField dz_fd(const ScalarField& f) { return apply_z_rows(f, build_z_rows(f.grid, 1)); }
ScalarField dzz_fd(const ScalarField& f) { return apply_z_rows(f, build_z_rows(f.grid, 2)); }

std::array<ScalarField, 3> all_derivs(const ScalarField& f) {
  std::array<ScalarField, 3> d;
  Spectrum s = forward(f);
  for (int axis = 0; axis < 2; ++axis) {
    Spectrum t = s;
    derivative_inplace(t, axis);
    d[static_cast<size_t>(axis)] = inverse(t);
  }
  if (f.grid.periodic_in_z()) {
    Spectrum t = s;
    derivative_inplace(t, 2);
    d[2] = inverse(t);
  } else {
    d[2] = dz_fd(f);
  }
  return d;
}

VectorField gradient(const ScalarField& f) {
  auto d = all_derivs(f);
  VectorField g(f.grid);
  g.x = std::move(d[0].v);
  g.y = std::move(d[1].v);
  g.z = std::move(d[2].v);
  return g;
}

ScalarField divergence(const VectorField& u) {
  ScalarField out(u.grid);
  for (int c = 0; c < 3; ++c) {
    ScalarField comp(u.grid);
    comp.v = u.comp(c);
    ScalarField d = (c == 2 && !u.grid.periodic_in_z()) ? dz_fd(comp)
                                                        : spectral_deriv(comp, c);
    out.v += d.v;
  }
  return out;
}

VectorField curl(const VectorField& u) {
  TensorField G = jacobian(u);
  VectorField w(u.grid);
  w.x = G(2, 1) - G(1, 2);
  w.y = G(0, 2) - G(2, 0);
  w.z = G(1, 0) - G(0, 1);
  return w;
}

TensorField jacobian(const VectorField& u) {
  TensorField G(u.grid);
  for (int r = 0; r < 3; ++r) {
    ScalarField comp(u.grid);
    comp.v = u.comp(r);
    auto d = all_derivs(comp);
    for (int c = 0; c < 3; ++c) G(r, c) = std::move(d[static_cast<size_t>(c)].v);
  }
  return G;
}

} // namespace clg
