#include "clg/resample.hpp"

#include "clg/fft.hpp"
#include "clg/parallel.hpp"

#include <Eigen/LU>

namespace clg {

namespace {

// Populated mode box of a set of spectra: largest |folded k| per axis with a
// nonzero coefficient in any component.  Dealiased fields give a small box.
struct ModeBox {
  Index Kx = 0, Ky = 0, Kz = 0;
};

ModeBox scan_box(const std::array<Spectrum, 3>& s, bool z_spectral) {
  const LabelGrid& g = s[0].grid;
  ModeBox b;
  for (const auto& sp : s) {
    for (Index kz = 0; kz < g.nz; ++kz)
      for (Index ky = 0; ky < g.ny; ++ky)
        for (Index kx = 0; kx < g.nx; ++kx) {
          if (sp.c[static_cast<size_t>(sp.idx(kx, ky, kz))] == Complex(0, 0)) continue;
          b.Kx = std::max(b.Kx, std::abs(fold(kx, g.nx)));
          b.Ky = std::max(b.Ky, std::abs(fold(ky, g.ny)));
          if (z_spectral) b.Kz = std::max(b.Kz, std::abs(fold(kz, g.nz)));
        }
  }
  return b;
}

// Phase table e^{i 2 pi k x / L} for k = 0..K via multiplicative recurrence.
void phase_table(Real x, Real L, Index K, std::vector<Complex>& E) {
  E.resize(static_cast<size_t>(K + 1));
  const Real ang = Real(2) * kPi * x / L;
  const Complex base(std::cos(ang), std::sin(ang));
  Complex cur(1, 0);
  for (Index k = 0; k <= K; ++k) {
    E[static_cast<size_t>(k)] = cur;
    cur *= base;
  }
}

// Not-a-knot cubic spline matrix for curvatures M on an n-node uniform grid:
// interior rows M_{j-1}+4M_j+M_{j+1} = 6 d2f/h^2, corner rows force the third
// derivative continuous across the first/last interior knots.
Eigen::PartialPivLU<Eigen::MatrixXd> spline_lu(Index n) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  A(0, 0) = 1; A(0, 1) = -2; A(0, 2) = 1;
  for (Index j = 1; j < n - 1; ++j) {
    A(j, j - 1) = 1; A(j, j) = 4; A(j, j + 1) = 1;
  }
  A(n - 1, n - 3) = 1; A(n - 1, n - 2) = -2; A(n - 1, n - 1) = 1;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(A);
}

} // namespace

struct FieldEvaluator::Impl {
  LabelGrid grid;
  ModeBox box;

  // Periodic: coefficients over the reduced box, x-weight folded in,
  // laid out [comp][ (kzi*(2Kz+1… see index()) ], split re/im for speed.
  std::array<std::vector<Real>, 3> re, im;

  // Channel: per-mode complex spline coefficients a+bu+cu^2+du^3 per interval,
  // laid out [comp][ ((kzi? no: interval fastest …)) ]; see cidx().
  std::array<std::vector<Complex>, 3> sp_a, sp_b, sp_c, sp_d;

  Index X() const { return box.Kx + 1; }
  Index Y() const { return 2 * box.Ky + 1; }
  Index Z() const { return grid.periodic_in_z() ? 2 * box.Kz + 1 : 1; }

  size_t index(Index kxi, Index kyi, Index kzi) const {
    return static_cast<size_t>(kxi + X() * (kyi + Y() * kzi));
  }
  // channel: mode (kxi,kyi), interval j
  size_t cidx(Index kxi, Index kyi, Index j) const {
    return static_cast<size_t>(kxi + X() * (kyi + Y() * j));
  }

  void build(const VectorField& u);
  Vec3 eval(const Vec3& p) const;
};

void FieldEvaluator::Impl::build(const VectorField& u) {
  grid = u.grid;
  std::array<Spectrum, 3> s;
  for (int c = 0; c < 3; ++c) {
    ScalarField f(grid);
    f.v = u.comp(c);
    s[static_cast<size_t>(c)] = forward(f);
  }
  box = scan_box(s, grid.periodic_in_z());

  auto weight_x = [&](Index kx) {
    return (kx == 0 || 2 * kx == grid.nx) ? Real(1) : Real(2);
  };
  auto mod = [](Index k, Index n) { return (k % n + n) % n; };

  if (grid.periodic_in_z()) {
    const size_t total = static_cast<size_t>(X() * Y() * Z());
    for (int c = 0; c < 3; ++c) {
      re[static_cast<size_t>(c)].assign(total, 0);
      im[static_cast<size_t>(c)].assign(total, 0);
    }
    for (Index kzi = 0; kzi < Z(); ++kzi)
      for (Index kyi = 0; kyi < Y(); ++kyi)
        for (Index kxi = 0; kxi < X(); ++kxi) {
          const Index ky = kyi - box.Ky, kz = kzi - box.Kz;
          for (int c = 0; c < 3; ++c) {
            const Complex v =
                s[static_cast<size_t>(c)].c[static_cast<size_t>(s[static_cast<size_t>(c)].idx(
                    mod(kxi, grid.nx), mod(ky, grid.ny), mod(kz, grid.nz)))] *
                weight_x(kxi);
            re[static_cast<size_t>(c)][index(kxi, kyi, kzi)] = v.real();
            im[static_cast<size_t>(c)][index(kxi, kyi, kzi)] = v.imag();
          }
        }
  } else {
    const Index n = grid.nz;
    const Real h = grid.dz();
    const auto lu = spline_lu(n);
    const size_t total = static_cast<size_t>(X() * Y() * (n - 1));
    for (int c = 0; c < 3; ++c) {
      sp_a[static_cast<size_t>(c)].assign(total, Complex(0, 0));
      sp_b[static_cast<size_t>(c)].assign(total, Complex(0, 0));
      sp_c[static_cast<size_t>(c)].assign(total, Complex(0, 0));
      sp_d[static_cast<size_t>(c)].assign(total, Complex(0, 0));
    }
    Eigen::VectorXd rhs_re(n), rhs_im(n), f_re(n), f_im(n);
    for (Index kyi = 0; kyi < Y(); ++kyi)
      for (Index kxi = 0; kxi < X(); ++kxi) {
        const Index ky = kyi - box.Ky;
        for (int c = 0; c < 3; ++c) {
          const Spectrum& sp = s[static_cast<size_t>(c)];
          const Real w = weight_x(kxi);
          for (Index j = 0; j < n; ++j) {
            const Complex v =
                sp.c[static_cast<size_t>(sp.idx(mod(kxi, grid.nx), mod(ky, grid.ny), j))] * w;
            f_re[j] = v.real();
            f_im[j] = v.imag();
          }
          rhs_re.setZero();
          rhs_im.setZero();
          for (Index j = 1; j < n - 1; ++j) {
            rhs_re[j] = Real(6) * (f_re[j - 1] - 2 * f_re[j] + f_re[j + 1]) / (h * h);
            rhs_im[j] = Real(6) * (f_im[j - 1] - 2 * f_im[j] + f_im[j + 1]) / (h * h);
          }
          const Eigen::VectorXd M_re = lu.solve(rhs_re);
          const Eigen::VectorXd M_im = lu.solve(rhs_im);
          for (Index j = 0; j < n - 1; ++j) {
            const Complex fj(f_re[j], f_im[j]);
            const Complex fj1(f_re[j + 1], f_im[j + 1]);
            const Complex Mj(M_re[j], M_im[j]);
            const Complex Mj1(M_re[j + 1], M_im[j + 1]);
            const size_t q = cidx(kxi, kyi, j);
            sp_a[static_cast<size_t>(c)][q] = fj;
            sp_b[static_cast<size_t>(c)][q] =
                (fj1 - fj) / h - h * (Real(2) * Mj + Mj1) / Real(6);
            sp_c[static_cast<size_t>(c)][q] = Mj / Real(2);
            sp_d[static_cast<size_t>(c)][q] = (Mj1 - Mj) / (Real(6) * h);
          }
        }
      }
  }
}

Vec3 FieldEvaluator::Impl::eval(const Vec3& p) const {
  thread_local std::vector<Complex> Ex, Eyp, Ezp;
  phase_table(p.x(), grid.Lx, box.Kx, Ex);
  phase_table(p.y(), grid.Ly, box.Ky, Eyp);

  if (grid.periodic_in_z()) {
    phase_table(p.z(), grid.Lz, box.Kz, Ezp);
    Real acc[3] = {0, 0, 0};
    for (Index kzi = 0; kzi < Z(); ++kzi) {
      const Index kz = kzi - box.Kz;
      const Complex ez = kz >= 0 ? Ezp[static_cast<size_t>(kz)]
                                 : std::conj(Ezp[static_cast<size_t>(-kz)]);
      for (Index kyi = 0; kyi < Y(); ++kyi) {
        const Index ky = kyi - box.Ky;
        const Complex ey = ky >= 0 ? Eyp[static_cast<size_t>(ky)]
                                   : std::conj(Eyp[static_cast<size_t>(-ky)]);
        const Complex pyz = ey * ez;
        const size_t base = index(0, kyi, kzi);
        for (int c = 0; c < 3; ++c) {
          const Real* cr = re[static_cast<size_t>(c)].data() + base;
          const Real* ci = im[static_cast<size_t>(c)].data() + base;
          Real sr = 0, si = 0;
          for (Index kx = 0; kx <= box.Kx; ++kx) {
            const Complex& ex = Ex[static_cast<size_t>(kx)];
            const Real xr = ex.real(), xi = ex.imag();
            sr += cr[kx] * xr - ci[kx] * xi;
            si += cr[kx] * xi + ci[kx] * xr;
          }
          acc[c] += pyz.real() * sr - pyz.imag() * si;
        }
      }
    }
    return Vec3(acc[0], acc[1], acc[2]);
  }

  // channel: locate the z interval, evaluate per-mode cubics
  const Index n = grid.nz;
  const Real h = grid.dz();
  Index j = static_cast<Index>(std::floor(p.z() / h));
  j = std::max<Index>(0, std::min<Index>(n - 2, j));
  const Real u = p.z() - Real(j) * h;

  Real acc[3] = {0, 0, 0};
  for (Index kyi = 0; kyi < Y(); ++kyi) {
    const Index ky = kyi - box.Ky;
    const Complex ey = ky >= 0 ? Eyp[static_cast<size_t>(ky)]
                               : std::conj(Eyp[static_cast<size_t>(-ky)]);
    for (Index kxi = 0; kxi < X(); ++kxi) {
      const Complex phase = Ex[static_cast<size_t>(kxi)] * ey;
      const size_t q = cidx(kxi, kyi, j);
      for (int c = 0; c < 3; ++c) {
        const size_t cc = static_cast<size_t>(c);
        const Complex val =
            sp_a[cc][q] + u * (sp_b[cc][q] + u * (sp_c[cc][q] + u * sp_d[cc][q]));
        acc[c] += (phase * val).real();
      }
    }
  }
  return Vec3(acc[0], acc[1], acc[2]);
}

FieldEvaluator::FieldEvaluator(const VectorField& u) : impl_(new Impl) { impl_->build(u); }
FieldEvaluator::~FieldEvaluator() = default;
FieldEvaluator::FieldEvaluator(FieldEvaluator&&) noexcept = default;
FieldEvaluator& FieldEvaluator::operator=(FieldEvaluator&&) noexcept = default;

Vec3 FieldEvaluator::eval(const Vec3& p) const { return impl_->eval(p); }
const LabelGrid& FieldEvaluator::grid() const { return impl_->grid; }

std::vector<Vec3> resample(const VectorField& u, const std::vector<Vec3>& points) {
  const LabelGrid& g = u.grid;
  if (!g.periodic_in_z()) {
    for (const auto& p : points) {
      if (p.z() < -1e-12 || p.z() > g.Lz + 1e-12)
        throw std::invalid_argument("resample: point outside channel domain");
    }
  }
  FieldEvaluator ev(u);
  std::vector<Vec3> out(points.size());
  parallel_for(static_cast<Index>(points.size()), [&](Index i) {
    Vec3 p = points[static_cast<size_t>(i)];
    if (!g.periodic_in_z())
      p.z() = std::min(std::max(p.z(), Real(0)), g.Lz);
    out[static_cast<size_t>(i)] = ev.eval(p);
  });
  return out;
}

} // namespace clg
