#include "clg/hodge.hpp"

#include "clg/fft.hpp"
#include "clg/operators.hpp"
#include "clg/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace clg {

namespace {

// Width-5 derivative row at node j (exact through degree 4), mirroring the
// window conventions of the first-derivative operator.
void d1_row(Index n, Real h, Index j, Index& first, std::vector<Real>& w) {
  Index m = 5;
  if (j >= 2 && j <= n - 3) first = j - 2;
  else first = (j < 2) ? 0 : n - m;
  std::vector<Real> nodes(static_cast<size_t>(m));
  for (Index q = 0; q < m; ++q) nodes[static_cast<size_t>(q)] = Real(first + q) * h;
  w = fd_weights(Real(j) * h, nodes, 1);
}

// Second-derivative row: centered 5-node interior, one-sided 6-node next to
// the walls (same 4th-order layout as the dzz operator).
void d2_row(Index n, Real h, Index j, Index& first, std::vector<Real>& w) {
  Index m;
  if (j >= 2 && j <= n - 3) {
    first = j - 2;
    m = 5;
  } else {
    m = 6;
    first = (j < 2) ? 0 : n - m;
  }
  std::vector<Real> nodes(static_cast<size_t>(m));
  for (Index q = 0; q < m; ++q) nodes[static_cast<size_t>(q)] = Real(first + q) * h;
  w = fd_weights(Real(j) * h, nodes, 2);
}

void check_channel(const LabelGrid& g, const char* who) {
  if (g.nz < 6)
    throw std::invalid_argument(std::string(who) + ": channel solves need nz >= 6");
}

Real wall_max(const WallField& g) {
  Real m = 0;
  if (g.bottom.size() > 0) m = std::max(m, g.bottom.abs().maxCoeff());
  if (g.top.size() > 0) m = std::max(m, g.top.abs().maxCoeff());
  return m;
}

// Spectral inverse Laplacian with zero-mean gauge (periodic geometry).
ScalarField spectral_poisson(const ScalarField& rhs) {
  const LabelGrid& g = rhs.grid;
  Spectrum s = forward(rhs);
  const Real scale = 1.0 + rhs.v.abs().maxCoeff();
  const Real mean_mag = std::abs(s.c[0]);
  if (mean_mag > 1e-8 * scale)
    throw std::runtime_error("solve_neumann: periodic rhs has nonzero mean (incompatible)");
  parallel_for(g.size(), [&](Index i) {
    const Index kx = i % g.nx;
    const Index ky = (i / g.nx) % g.ny;
    const Index kz = i / (g.nx * g.ny);
    const Real k2 = s.kappa(0, kx) * s.kappa(0, kx) +
                    s.kappa(1, ky) * s.kappa(1, ky) +
                    s.kappa(2, kz) * s.kappa(2, kz);
    s.c[static_cast<size_t>(i)] =
        k2 == 0.0 ? Complex(0, 0) : -s.c[static_cast<size_t>(i)] / k2;
  });
  return inverse(s);
}

// Fourier transform of wall data in x,y: plane 0 = bottom, plane 1 = top.
void wall_spectra(const LabelGrid& g, const WallField& w,
                  std::vector<Complex>& bottom, std::vector<Complex>& top) {
  ScalarField tmp(g);
  const Index plane = g.nx * g.ny;
  for (Index i = 0; i < plane; ++i) {
    tmp.v[i] = w.bottom[i];
    tmp.v[i + plane] = w.top[i];
  }
  const Spectrum s = forward(tmp);
  bottom.assign(static_cast<size_t>(plane), Complex(0, 0));
  top.assign(static_cast<size_t>(plane), Complex(0, 0));
  for (Index i = 0; i < plane; ++i) {
    bottom[static_cast<size_t>(i)] = s.c[static_cast<size_t>(i)];
    top[static_cast<size_t>(i)] = s.c[static_cast<size_t>(i + plane)];
  }
}

// Dense 1D Helmholtz matrix (d2/dz2 - k2) with the requested boundary rows.
// neumann: derivative rows at both ends; otherwise identity (Dirichlet) rows.
Eigen::MatrixXd mode_matrix(const LabelGrid& g, Real k2, bool neumann) {
  const Index n = g.nz;
  const Real h = g.dz();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Index first;
  std::vector<Real> w;
  for (Index j = 1; j < n - 1; ++j) {
    d2_row(n, h, j, first, w);
    for (size_t q = 0; q < w.size(); ++q)
      A(j, first + static_cast<Index>(q)) = w[q];
    A(j, j) -= k2;
  }
  if (neumann) {
    d1_row(n, h, 0, first, w);
    for (size_t q = 0; q < w.size(); ++q) A(0, first + static_cast<Index>(q)) = w[q];
    d1_row(n, h, n - 1, first, w);
    for (size_t q = 0; q < w.size(); ++q)
      A(n - 1, first + static_cast<Index>(q)) = w[q];
  } else {
    A(0, 0) = 1.0;
    A(n - 1, n - 1) = 1.0;
  }
  return A;
}

} // namespace

Real compatibility_defect(const HodgeProblem& p) {
  if (p.geometry == Geometry::Periodic3D) {
    // torus: no boundary; the defect is the volume integral itself
    return parallel_sum(p.div_data.v.size(), [&](Index i) {
      return p.div_data.v[i] * p.div_data.grid.quad_weight(i);
    });
  }
  const LabelGrid& g = p.div_data.grid;
  const Real vol = parallel_sum(g.size(), [&](Index i) {
    return p.div_data.v[i] * g.quad_weight(i);
  });
  const Real dA = g.dx() * g.dy();
  const Real flux = (p.neumann_data.bottom.sum() + p.neumann_data.top.sum()) * dA;
  return vol + flux;
}

ScalarField solve_neumann(const ScalarField& rhs) {
  if (rhs.grid.geometry == Geometry::Periodic3D) return spectral_poisson(rhs);
  WallField zero(rhs.grid.nx, rhs.grid.ny);
  return solve_neumann(rhs, zero);
}

ScalarField solve_neumann(const ScalarField& rhs, const WallField& g) {
  const LabelGrid& grid = rhs.grid;
  if (grid.geometry == Geometry::Periodic3D) return spectral_poisson(rhs);
  check_channel(grid, "solve_neumann");
  if (g.nx != grid.nx || g.ny != grid.ny)
    throw std::invalid_argument("solve_neumann: wall data dims mismatch");

  const Index n = grid.nz;
  const Index plane = grid.nx * grid.ny;
  Spectrum s = forward(rhs);
  std::vector<Complex> gb, gt;
  wall_spectra(grid, g, gb, gt);

  const Real scale = 1.0 + rhs.v.abs().maxCoeff() + wall_max(g);
  Spectrum phi(grid);
  Real multiplier = 0.0;

  parallel_for(plane, [&](Index mode) {
    const Index kx = mode % grid.nx;
    const Index ky = mode / grid.nx;
    const Real k2 = s.kappa(0, kx) * s.kappa(0, kx) + s.kappa(1, ky) * s.kappa(1, ky);

    if (kx == 0 && ky == 0) {
      // Singular mean mode: bordered system with a Lagrange multiplier in the
      // PDE rows and a trapezoid zero-mean gauge row.
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
      M.topLeftCorner(n, n) = mode_matrix(grid, 0.0, true);
      for (Index j = 1; j < n - 1; ++j) M(j, n) = 1.0;
      for (Index j = 0; j < n; ++j)
        M(n, j) = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 1, 2);
      for (Index j = 1; j < n - 1; ++j) {
        const Complex v = s.c[s.idx(0, 0, j)];
        b(j, 0) = v.real();
        b(j, 1) = v.imag();
      }
      b(0, 0) = gb[0].real();
      b(0, 1) = gb[0].imag();
      b(n - 1, 0) = -gt[0].real();
      b(n - 1, 1) = -gt[0].imag();
      const Eigen::MatrixXd x = M.partialPivLu().solve(b);
      multiplier = std::hypot(x(n, 0), x(n, 1));
      for (Index j = 0; j < n; ++j)
        phi.c[phi.idx(0, 0, j)] = Complex(x(j, 0), x(j, 1));
      return;
    }

    Eigen::MatrixXd A = mode_matrix(grid, k2, true);
    Eigen::MatrixXd b(n, 2);
    for (Index j = 0; j < n; ++j) {
      const Complex v = s.c[s.idx(kx, ky, j)];
      b(j, 0) = v.real();
      b(j, 1) = v.imag();
    }
    b(0, 0) = gb[static_cast<size_t>(mode)].real();
    b(0, 1) = gb[static_cast<size_t>(mode)].imag();
    b(n - 1, 0) = -gt[static_cast<size_t>(mode)].real();
    b(n - 1, 1) = -gt[static_cast<size_t>(mode)].imag();
    const Eigen::MatrixXd x = A.partialPivLu().solve(b);
    for (Index j = 0; j < n; ++j)
      phi.c[phi.idx(kx, ky, j)] = Complex(x(j, 0), x(j, 1));
  });

  if (multiplier > 1e-3 * scale)
    throw std::runtime_error(
        "solve_neumann: k=0 mode incompatible (multiplier above tolerance)");
  return inverse(phi);
}

VectorField solve_dirichlet(const VectorField& rhs) {
  const LabelGrid& grid = rhs.grid;
  VectorField out(grid);

  if (grid.geometry == Geometry::Periodic3D) {
    for (int c = 0; c < 3; ++c) {
      ScalarField comp(grid);
      comp.v = rhs.comp(c);
      Spectrum s = forward(comp);
      parallel_for(grid.size(), [&](Index i) {
        const Index kx = i % grid.nx;
        const Index ky = (i / grid.nx) % grid.ny;
        const Index kz = i / (grid.nx * grid.ny);
        const Real k2 = s.kappa(0, kx) * s.kappa(0, kx) +
                        s.kappa(1, ky) * s.kappa(1, ky) +
                        s.kappa(2, kz) * s.kappa(2, kz);
        s.c[static_cast<size_t>(i)] =
            k2 == 0.0 ? Complex(0, 0) : s.c[static_cast<size_t>(i)] / (-k2);
      });
      out.comp(c) = inverse(s).v;
    }
    return out;
  }

  check_channel(grid, "solve_dirichlet");
  const Index n = grid.nz;
  const Index plane = grid.nx * grid.ny;
  std::array<Spectrum, 3> S;
  for (int c = 0; c < 3; ++c) {
    ScalarField comp(grid);
    comp.v = rhs.comp(c);
    S[static_cast<size_t>(c)] = forward(comp);
  }
  std::array<Spectrum, 3> P{Spectrum(grid), Spectrum(grid), Spectrum(grid)};

  parallel_for(plane, [&](Index mode) {
    const Index kx = mode % grid.nx;
    const Index ky = mode / grid.nx;
    const Real k2 = S[0].kappa(0, kx) * S[0].kappa(0, kx) +
                    S[0].kappa(1, ky) * S[0].kappa(1, ky);
    const Eigen::MatrixXd A = mode_matrix(grid, k2, false);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 6);
    for (int c = 0; c < 3; ++c) {
      for (Index j = 1; j < n - 1; ++j) {
        const Complex v = S[static_cast<size_t>(c)].c[S[0].idx(kx, ky, j)];
        b(j, 2 * c) = v.real();
        b(j, 2 * c + 1) = v.imag();
      }
    }
    const Eigen::MatrixXd x = A.partialPivLu().solve(b);
    for (int c = 0; c < 3; ++c)
      for (Index j = 0; j < n; ++j)
        P[static_cast<size_t>(c)].c[P[0].idx(kx, ky, j)] =
            Complex(x(j, 2 * c), x(j, 2 * c + 1));
  });

  for (int c = 0; c < 3; ++c) out.comp(c) = inverse(P[static_cast<size_t>(c)]).v;
  return out;
}

VectorField hodge_reconstruct(const HodgeProblem& p, const Vec3& mean) {
  const LabelGrid& g = p.div_data.grid;
  if (!same_grid(g, p.curl_data.grid))
    throw std::invalid_argument("hodge_reconstruct: mismatched grids");
  if (p.geometry != g.geometry)
    throw std::invalid_argument("hodge_reconstruct: geometry tag mismatch");

  ScalarField div_adj = p.div_data;
  ScalarField phi;
  if (g.geometry == Geometry::Channel) {
    const Real shift = compatibility_defect(p) / g.volume();
    div_adj.v -= shift;
    phi = solve_neumann(div_adj, p.neumann_data);
  } else {
    const Real shift = clg::mean(div_adj); // torus compatibility: zero-mean rhs
    div_adj.v -= shift;
    phi = solve_neumann(div_adj);
  }

  VectorField minus_curl(g);
  minus_curl.x = -p.curl_data.x;
  minus_curl.y = -p.curl_data.y;
  minus_curl.z = -p.curl_data.z;
  const VectorField Phi = solve_dirichlet(minus_curl);

  const VectorField gp = gradient(phi);
  const VectorField cp = curl(Phi);
  VectorField xi(g);
  xi.x = gp.x + cp.x;
  xi.y = gp.y + cp.y;
  xi.z = gp.z + cp.z;
  if (g.geometry == Geometry::Periodic3D) {
    xi.x += mean.x();
    xi.y += mean.y();
    xi.z += mean.z();
  }
  return xi;
}

namespace {

// Dense one-dimensional first-derivative matrix built from the shared
// width-5 rows; its square is exactly the operator the divergence diagnostic
// applies along z (two passes of the derivative stencil).
Eigen::MatrixXd d1_matrix(const LabelGrid& g) {
  const Index n = g.nz;
  const Real h = g.dz();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  Index first;
  std::vector<Real> w;
  for (Index j = 0; j < n; ++j) {
    d1_row(n, h, j, first, w);
    for (size_t q = 0; q < w.size(); ++q) D(j, first + static_cast<Index>(q)) = w[q];
  }
  return D;
}

// Re-solve the divergence against the operator the diagnostics measure.  The
// main Neumann solve runs on wide second-derivative interior rows, which
// differ from two passes of the first-derivative rows by O(h^4), and its
// boundary rows enforce the trace rather than the equation, so the measured
// defect concentrates near the walls.  Each sweep removes it with the widest
// family of corrections that leaves both the measured curl and the wall
// trace untouched, per transverse mode:
//   k != 0:  grad(dphi) with both derivative traces of dphi pinned to zero,
//            plus a constant transverse vector (its measured divergence is a
//            constant z-profile, its measured curl cancels exactly);
//   k == 0:  a pure z-profile in the z component vanishing at the walls
//            (x,y-independent, hence measured-curl-free), whose measured
//            divergence D1 w reaches the wall rows that z-gradients with
//            pinned traces cannot.
// Every mode solves a least-squares problem over that family against all nz
// rows of the measured operator; what remains afterwards is the component of
// the datum outside the range of any admissible correction.
void match_measured_divergence(VectorField& xi, const ScalarField& target) {
  const LabelGrid& g = target.grid;
  const Index n = g.nz;
  const Index plane = g.nx * g.ny;
  const Real tol = 1e-12 * std::max(Real(1), linf(target));
  const Eigen::MatrixXd D1 = d1_matrix(g);
  const Eigen::MatrixXd D1SQ = D1 * D1;

  // Basis of z-potentials whose derivative rows at both walls vanish.
  Eigen::MatrixXd trace_rows(2, n);
  trace_rows.row(0) = D1.row(0);
  trace_rows.row(1) = D1.row(n - 1);
  const Eigen::MatrixXd Z =
      Eigen::FullPivLU<Eigen::MatrixXd>(trace_rows).kernel(); // n x (n-2)

  Real prev = std::numeric_limits<Real>::infinity();
  for (int sweep = 0; sweep < 4; ++sweep) {
    ScalarField defect(g);
    defect.v = divergence(xi).v - target.v;
    const Real dn = linf(defect);
    // the leftover after a sweep is the unreachable component, so a stalled
    // defect cannot improve further
    if (dn <= tol || dn >= 0.5 * prev) break;
    prev = dn;

    Spectrum d = forward(defect);
    Spectrum cx(g), cy(g), cz(g);
    parallel_for(plane, [&](Index mode) {
      const Index kx = mode % g.nx;
      const Index ky = mode / g.nx;
      const bool nyqx = (g.nx % 2 == 0) && (kx == g.nx / 2);
      const bool nyqy = (g.ny % 2 == 0) && (ky == g.ny / 2);
      const Real kxe = nyqx ? 0.0 : d.kappa(0, kx);
      const Real kye = nyqy ? 0.0 : d.kappa(1, ky);
      const Real k2 = kxe * kxe + kye * kye;

      Eigen::MatrixXd rhs(n, 2);
      for (Index j = 0; j < n; ++j) {
        const Complex v = d.c[d.idx(kx, ky, j)];
        rhs(j, 0) = v.real();
        rhs(j, 1) = v.imag();
      }

      if (k2 == 0.0) {
        const Eigen::MatrixXd B = D1.middleCols(1, n - 2);
        const Eigen::MatrixXd y = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(B).solve(rhs);
        for (Index j = 0; j < n; ++j) {
          cx.c[cx.idx(kx, ky, j)] = Complex(0, 0);
          cy.c[cy.idx(kx, ky, j)] = Complex(0, 0);
          const bool wall = (j == 0 || j == n - 1);
          cz.c[cz.idx(kx, ky, j)] =
              wall ? Complex(0, 0) : Complex(y(j - 1, 0), y(j - 1, 1));
        }
        return;
      }

      Eigen::MatrixXd A = D1SQ;
      for (Index j = 0; j < n; ++j) A(j, j) -= k2;
      Eigen::MatrixXd B(n, n - 1);
      B.leftCols(n - 2) = A * Z;
      B.col(n - 2).setOnes();
      const Eigen::MatrixXd y = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(B).solve(rhs);

      const Eigen::VectorXd fre = Z * y.col(0).head(n - 2);
      const Eigen::VectorXd fim = Z * y.col(1).head(n - 2);
      const Real gre = y(n - 2, 0);
      const Real gim = y(n - 2, 1);
      // constant transverse parts alpha, beta with i(kx alpha + ky beta) = gamma
      // and kx beta = ky alpha (curl-free split along the mode direction)
      const Real are = kxe * gim / k2, aim = -kxe * gre / k2;
      const Real bre = kye * gim / k2, bim = -kye * gre / k2;
      Eigen::VectorXd wre = D1 * fre;
      Eigen::VectorXd wim = D1 * fim;
      wre(0) = wim(0) = wre(n - 1) = wim(n - 1) = 0.0; // exact trace pinning
      for (Index j = 0; j < n; ++j) {
        cx.c[cx.idx(kx, ky, j)] =
            Complex(-kxe * fim[j] + are, kxe * fre[j] + aim);
        cy.c[cy.idx(kx, ky, j)] =
            Complex(-kye * fim[j] + bre, kye * fre[j] + bim);
        cz.c[cz.idx(kx, ky, j)] = Complex(wre[j], wim[j]);
      }
    });

    VectorField c(g);
    c.x = inverse(cx).v;
    c.y = inverse(cy).v;
    c.z = inverse(cz).v;
    xi.x -= c.x;
    xi.y -= c.y;
    xi.z -= c.z;
  }
}

} // namespace

VectorField hodge_reconstruct_with_potential(const ScalarField& div_data,
                                             const VectorField& potential,
                                             const WallField& neumann_data,
                                             const Vec3& mean) {
  const LabelGrid& g = div_data.grid;
  if (!same_grid(g, potential.grid))
    throw std::invalid_argument("hodge_reconstruct_with_potential: mismatched grids");

  ScalarField rhs(g);
  rhs.v = div_data.v - divergence(potential).v;
  VectorField xi = potential;

  if (g.geometry == Geometry::Channel) {
    // The scalar solve carries whatever normal trace the potential misses
    // (inward-normal convention on both walls).
    const Index plane = g.nx * g.ny;
    WallField w(g.nx, g.ny);
    for (Index i = 0; i < plane; ++i) {
      w.bottom[i] = neumann_data.bottom[i] - potential.z[i];
      w.top[i] = neumann_data.top[i] + potential.z[i + plane * (g.nz - 1)];
    }
    const HodgeProblem compat{rhs, VectorField(g), w, g.geometry};
    rhs.v -= compatibility_defect(compat) / g.volume();
    const VectorField gp = gradient(solve_neumann(rhs, w));
    xi.x += gp.x;
    xi.y += gp.y;
    xi.z += gp.z;
    match_measured_divergence(xi, div_data);
  } else {
    rhs.v -= clg::mean(rhs); // torus compatibility: zero-mean rhs
    const VectorField gp = gradient(solve_neumann(rhs));
    xi.x += gp.x;
    xi.y += gp.y;
    xi.z += gp.z;
    // the gradient part is mean-free, so pin the requested mean directly
    xi.x += mean.x() - xi.x.mean();
    xi.y += mean.y() - xi.y.mean();
    xi.z += mean.z() - xi.z.mean();
  }
  return xi;
}

} // namespace clg
