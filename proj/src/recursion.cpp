#include "clg/recursion.hpp"

#include "clg/fft.hpp"
#include "clg/operators.hpp"
#include "clg/parallel.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace clg {

namespace {

void validate_input(const RecursionInput& in) {
  if (in.s < 1) throw std::invalid_argument("recursion: order must be >= 1");
  if (static_cast<int>(in.coeffs.size()) != in.s - 1)
    throw std::invalid_argument("recursion: need exactly xi^(1..s-1)");
  for (const VectorField& f : in.coeffs)
    if (!same_grid(f.grid, in.omega0.grid))
      throw std::invalid_argument("recursion: mismatched grids");
}

// Dealiased pointwise product of two gradient components.
ArrayXr mul_dealias(const LabelGrid& g, const ArrayXr& a, const ArrayXr& b) {
  ScalarField p(g, (a * b).eval());
  return dealias(p).v;
}

// Signed permutations of (0,1,2) for the epsilon contractions.
struct Perm {
  int p[3];
  Real sign;
};
constexpr Perm kPerms[6] = {
    {{0, 1, 2}, 1.0},  {{1, 2, 0}, 1.0},  {{2, 0, 1}, 1.0},
    {{0, 2, 1}, -1.0}, {{2, 1, 0}, -1.0}, {{1, 0, 2}, -1.0}};

} // namespace

VectorField curl_rhs_potential(const RecursionInput& in) {
  validate_input(in);
  if (in.s < 2)
    throw std::invalid_argument("curl_rhs_potential: order must be >= 2");
  const LabelGrid& g = in.omega0.grid;

  std::vector<TensorField> J;
  J.reserve(in.coeffs.size());
  for (const VectorField& f : in.coeffs) J.push_back(jacobian(f));

  // V_s = sum_{0<m<s} (s-2m)/(2s) sum_k xi_k^(m) grad xi_k^(s-m).  Because
  // curl(a grad b) = grad a x grad b, the curl of V_s is the symmetrized
  // cross-product sum of the vorticity recursion, and stating the datum as an
  // explicit potential keeps it exactly inside the range of the discrete curl.
  const int s = in.s;
  VectorField V(g);
  for (int m = 1; m < s; ++m) {
    const Real w = Real(s - 2 * m) / Real(2 * s);
    if (w == 0.0) continue; // symmetrization factor vanishes (m = s/2)
    const VectorField& a = in.coeffs[static_cast<size_t>(m - 1)];
    const TensorField& B = J[static_cast<size_t>(s - m - 1)];
    for (int k = 0; k < 3; ++k) {
      V.x += w * (a.comp(k) * B(k, 0));
      V.y += w * (a.comp(k) * B(k, 1));
      V.z += w * (a.comp(k) * B(k, 2));
    }
  }
  ScalarField tmp(g);
  for (int c = 0; c < 3; ++c) {
    tmp.v = V.comp(c);
    V.comp(c) = dealias(tmp).v;
  }
  return V;
}

VectorField curl_rhs(const RecursionInput& in) {
  validate_input(in);
  if (in.s == 1) {
    VectorField out(in.omega0.grid);
    out.x = in.omega0.x;
    out.y = in.omega0.y;
    out.z = in.omega0.z;
    return out;
  }
  return curl(curl_rhs_potential(in));
}

ScalarField div_rhs(const RecursionInput& in) {
  validate_input(in);
  const LabelGrid& g = in.omega0.grid;
  ScalarField out(g);
  const int s = in.s;
  if (s == 1) return out;

  std::vector<TensorField> J;
  J.reserve(in.coeffs.size());
  for (const VectorField& f : in.coeffs) J.push_back(jacobian(f));

  // pair sum over i<j and 0<m<s
  for (int m = 1; m < s; ++m) {
    const TensorField& A = J[static_cast<size_t>(m - 1)];
    const TensorField& B = J[static_cast<size_t>(s - m - 1)];
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        out.v += mul_dealias(g, A(j, i), B(i, j)) - mul_dealias(g, A(i, i), B(j, j));
      }
    }
  }

  // cubic sum over l+m+n = s, each >= 1.  The epsilon contraction is symmetric
  // in (l,m,n), so iterate unordered triples weighted by their permutation
  // count.  Inner pairs are dealiased before the third factor multiplies in.
  for (int l = 1; l <= s - 2; ++l) {
    for (int m = l; m <= s - 1 - l; ++m) {
      const int n = s - l - m;
      if (n < m) break;
      Real mult;
      if (l == m && m == n) mult = 1.0;
      else if (l == m || m == n) mult = 3.0;
      else mult = 6.0;
      const TensorField& X = J[static_cast<size_t>(l - 1)];
      const TensorField& Y = J[static_cast<size_t>(m - 1)];
      const TensorField& Z = J[static_cast<size_t>(n - 1)];

      ArrayXr triple = ArrayXr::Zero(g.size());
      for (const Perm& rows : kPerms) {     // (a,b,c) over eps_{abc}
        for (const Perm& cols : kPerms) {   // (i,j,k) over eps_{ijk}
          const ArrayXr pair =
              mul_dealias(g, X(rows.p[0], cols.p[0]), Y(rows.p[1], cols.p[1]));
          triple += (rows.sign * cols.sign) *
                    mul_dealias(g, pair, Z(rows.p[2], cols.p[2]));
        }
      }
      out.v -= (mult / Real(6)) * triple;
    }
  }
  return out;
}

Real cauchy_residual(const TaylorSeries& T, const VectorField& omega0, Real t) {
  if (!same_grid(T.grid, omega0.grid))
    throw std::invalid_argument("cauchy_residual: mismatched grids");
  const LabelGrid& g = T.grid;
  const VectorField xi = series_displacement(T, t);
  const VectorField u = series_velocity(T, t);
  const TensorField Jx = jacobian(xi);
  const TensorField Ju = jacobian(u);

  // sum_k grad u_k x grad X_k = curl(u + 1/2 sum_k (u_k grad xi_k
  // - xi_k grad u_k)): assembling the invariant as the curl of this
  // antisymmetrized potential keeps it in the range of the discrete curl, so
  // the comparison with omega0 measures the series truncation instead of the
  // commutator of the product rule with the z stencils.
  VectorField P = u;
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 3; ++c) {
      P.comp(c) += Real(0.5) * (u.comp(k) * Jx(k, c) - xi.comp(k) * Ju(k, c));
    }
  }
  const VectorField w = curl(P);

  return parallel_max(g.size(), [&](Index i) {
    return std::max({std::abs(w.x[i] - omega0.x[i]),
                     std::abs(w.y[i] - omega0.y[i]),
                     std::abs(w.z[i] - omega0.z[i])});
  });
}

Real jacobian_residual(const TaylorSeries& T, Real t) {
  const VectorField xi = series_displacement(T, t);
  const TensorField J = jacobian(xi);
  const LabelGrid& g = T.grid;

  return parallel_max(g.size(), [&](Index i) {
    Real F[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) F[r][c] = J(r, c)[i] + (r == c ? 1.0 : 0.0);
    const Real det = F[0][0] * (F[1][1] * F[2][2] - F[1][2] * F[2][1]) -
                     F[0][1] * (F[1][0] * F[2][2] - F[1][2] * F[2][0]) +
                     F[0][2] * (F[1][0] * F[2][1] - F[1][1] * F[2][0]);
    return std::abs(det - 1.0);
  });
}

} // namespace clg
