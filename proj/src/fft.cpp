#include "clg/fft.hpp"

#include "clg/parallel.hpp"

#include <unsupported/Eigen/FFT>

namespace clg {

namespace {

// One FFT engine (and its cached plans) per worker thread.
Eigen::FFT<Real>& engine() {
  thread_local Eigen::FFT<Real> fft(Eigen::default_fft_impl<Real>(),
                                    Eigen::FFT<Real>::Unscaled);
  return fft;
}

// Transforms every line along `axis`, in place.  dir=+1 forward (with 1/n
// normalization), dir=-1 inverse (unscaled).  Lines are independent, so the
// parallel loop is deterministic.
void transform_axis(std::vector<Complex>& c, const LabelGrid& g, int axis, int dir) {
  const Index nx = g.nx, ny = g.ny, nz = g.nz;
  const Index n = axis == 0 ? nx : (axis == 1 ? ny : nz);
  const Index stride = axis == 0 ? 1 : (axis == 1 ? nx : nx * ny);
  const Index n_lines = g.size() / n;

  parallel_for(n_lines, [&](Index line) {
    // Map line ordinal to the base index of that line.
    Index base;
    if (axis == 0) {
      base = line * nx;
    } else if (axis == 1) {
      const Index ix = line % nx;
      const Index iz = line / nx;
      base = ix + nx * ny * iz;
    } else {
      base = line; // (ix, iy) plane index, stride nx*ny upward
    }

    std::vector<Complex> buf(static_cast<size_t>(n)), out(static_cast<size_t>(n));
    for (Index j = 0; j < n; ++j) buf[static_cast<size_t>(j)] = c[base + j * stride];
    if (dir > 0) {
      engine().fwd(out, buf);
      const Real scale = Real(1) / Real(n);
      for (auto& v : out) v *= scale;
    } else {
      engine().inv(out, buf);
    }
    for (Index j = 0; j < n; ++j) c[base + j * stride] = out[static_cast<size_t>(j)];
  });
}

Index axis_n(const LabelGrid& g, int axis) {
  return axis == 0 ? g.nx : (axis == 1 ? g.ny : g.nz);
}

} // namespace

Spectrum forward(const ScalarField& f) {
  Spectrum s(f.grid);
  const Index n = f.grid.size();
  for (Index i = 0; i < n; ++i) s.c[static_cast<size_t>(i)] = Complex(f.v[i], 0);
  transform_axis(s.c, f.grid, 0, +1);
  transform_axis(s.c, f.grid, 1, +1);
  if (f.grid.periodic_in_z()) transform_axis(s.c, f.grid, 2, +1);
  return s;
}

ScalarField inverse(const Spectrum& s) {
  std::vector<Complex> c = s.c;
  transform_axis(c, s.grid, 0, -1);
  transform_axis(c, s.grid, 1, -1);
  if (s.grid.periodic_in_z()) transform_axis(c, s.grid, 2, -1);
  ScalarField f(s.grid);
  const Index n = s.grid.size();
  for (Index i = 0; i < n; ++i) f.v[i] = c[static_cast<size_t>(i)].real();
  return f;
}

void dealias_inplace(Spectrum& s) {
  const LabelGrid& g = s.grid;
  const Index cx = dealias_cutoff(g.nx);
  const Index cy = dealias_cutoff(g.ny);
  const Index cz = g.periodic_in_z() ? dealias_cutoff(g.nz) : g.nz; // z untouched in channel
  parallel_for(g.size(), [&](Index i) {
    const Index kx = i % g.nx;
    const Index ky = (i / g.nx) % g.ny;
    const Index kz = i / (g.nx * g.ny);
    const bool cut = std::abs(fold(kx, g.nx)) > cx ||
                     std::abs(fold(ky, g.ny)) > cy ||
                     (g.periodic_in_z() && std::abs(fold(kz, g.nz)) > cz);
    if (cut) s.c[static_cast<size_t>(i)] = Complex(0, 0);
  });
}

ScalarField dealias(const ScalarField& f) {
  Spectrum s = forward(f);
  dealias_inplace(s);
  return inverse(s);
}

ScalarField multiply_dealias(const ScalarField& a, const ScalarField& b) {
  ScalarField p(a.grid);
  p.v = a.v * b.v;
  return dealias(p);
}

void derivative_inplace(Spectrum& s, int axis) {
  const LabelGrid& g = s.grid;
  if (axis == 2 && !g.periodic_in_z())
    throw std::invalid_argument("derivative_inplace: z axis is not spectral in channel");
  const Index n = axis_n(g, axis);
  parallel_for(g.size(), [&](Index i) {
    Index k;
    if (axis == 0) k = i % g.nx;
    else if (axis == 1) k = (i / g.nx) % g.ny;
    else k = i / (g.nx * g.ny);
    // Nyquist mode has no well-defined odd derivative on a real grid; zero it.
    if (n % 2 == 0 && k == n / 2) {
      s.c[static_cast<size_t>(i)] = Complex(0, 0);
    } else {
      const Real kap = s.kappa(axis, k);
      s.c[static_cast<size_t>(i)] *= Complex(0, kap);
    }
  });
}

Real physical_sumsq(const ScalarField& f) {
  return parallel_sum(f.v.size(), [&](Index i) { return f.v[i] * f.v[i]; });
}

Real spectral_sumsq(const Spectrum& s) {
  const LabelGrid& g = s.grid;
  const Real n_transformed =
      Real(g.nx) * Real(g.ny) * (g.periodic_in_z() ? Real(g.nz) : Real(1));
  const Real sum = parallel_sum(static_cast<Index>(s.c.size()), [&](Index i) {
    return std::norm(s.c[static_cast<size_t>(i)]);
  });
  return n_transformed * sum;
}

} // namespace clg
