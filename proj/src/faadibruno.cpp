#include "clg/faadibruno.hpp"

#include "clg/parallel.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace clg {

namespace {

constexpr int kMaxOrder = 16;

const Real kFactorial[kMaxOrder + 1] = {
    1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0,
    362880.0, 3628800.0, 39916800.0, 479001600.0, 6227020800.0,
    87178291200.0, 1307674368000.0, 20922789888000.0};

Real int_pow(Real x, int n) {
  Real r = 1.0;
  for (int j = 0; j < n; ++j) r *= x;
  return r;
}

// Assign k_1..k_i in lexicographic order given the fixed lengths.
void gen_kvecs(const std::vector<int>& lengths, size_t j, MultiIndex rem_beta,
               int rem_s, std::vector<MultiIndex>& cur,
               std::vector<PartitionTerm>& out) {
  if (j == lengths.size()) {
    if (rem_beta.abs() == 0 && rem_s == 0) out.push_back({lengths, cur});
    return;
  }
  const int l = lengths[j];
  for (int k0 = 0; k0 <= rem_beta[0]; ++k0) {
    for (int k1 = 0; k1 <= rem_beta[1]; ++k1) {
      for (int k2 = 0; k2 <= rem_beta[2]; ++k2) {
        const int n = k0 + k1 + k2;
        if (n < 1 || n * l > rem_s) continue;
        cur[j] = MultiIndex{{k0, k1, k2}};
        gen_kvecs(lengths, j + 1,
                  MultiIndex{{rem_beta[0] - k0, rem_beta[1] - k1, rem_beta[2] - k2}},
                  rem_s - n * l, cur, out);
      }
    }
  }
}

void gen_lengths(int s, const MultiIndex& beta, int i, size_t j, int next,
                 int used, std::vector<int>& lengths,
                 std::vector<PartitionTerm>& out) {
  if (j == static_cast<size_t>(i)) {
    std::vector<MultiIndex> cur(static_cast<size_t>(i));
    gen_kvecs(lengths, 0, beta, s, cur, out);
    return;
  }
  // each remaining slot contributes at least its length once
  for (int l = next; l <= s; ++l) {
    const int remaining = i - static_cast<int>(j) - 1;
    if (used + l + remaining * (l + 1) > s) break;
    lengths[j] = l;
    gen_lengths(s, beta, i, j + 1, l + 1, used + l, lengths, out);
  }
}

std::vector<PartitionTerm> enumerate_partitions(int s, const MultiIndex& beta) {
  std::vector<PartitionTerm> out;
  const int b = beta.abs();
  if (b < 1 || b > s) return out;
  for (int i = 1; i <= s; ++i) {
    if (i > b) break; // need i nonzero k_j summing to beta
    std::vector<int> lengths(static_cast<size_t>(i));
    gen_lengths(s, beta, i, 0, 1, 0, lengths, out);
  }
  return out;
}

uint32_t cache_key(int s, const MultiIndex& beta) {
  return static_cast<uint32_t>(s) | (static_cast<uint32_t>(beta[0]) << 5) |
         (static_cast<uint32_t>(beta[1]) << 10) |
         (static_cast<uint32_t>(beta[2]) << 15);
}

std::shared_mutex g_partition_mutex;
std::unordered_map<uint32_t, std::unique_ptr<std::vector<PartitionTerm>>>
    g_partition_cache;

} // namespace

Real PartitionTerm::factorial_denominator() const {
  Real d = 1.0;
  for (const MultiIndex& k : kvecs)
    d *= kFactorial[k[0]] * kFactorial[k[1]] * kFactorial[k[2]];
  return d;
}

int PartitionTerm::degree() const {
  int d = 0;
  for (const MultiIndex& k : kvecs) d += k.abs();
  return d;
}

const std::vector<PartitionTerm>& partitions(int s, const MultiIndex& beta) {
  if (s < 1 || s > kMaxOrder)
    throw std::invalid_argument("partitions: order s out of range [1,16]");
  if (beta[0] < 0 || beta[1] < 0 || beta[2] < 0 || beta.abs() > kMaxOrder)
    throw std::invalid_argument("partitions: bad multi-index beta");

  const uint32_t key = cache_key(s, beta);
  {
    std::shared_lock lock(g_partition_mutex);
    auto it = g_partition_cache.find(key);
    if (it != g_partition_cache.end()) return *it->second;
  }
  auto fresh = std::make_unique<std::vector<PartitionTerm>>(
      enumerate_partitions(s, beta));
  std::unique_lock lock(g_partition_mutex);
  auto [it, inserted] = g_partition_cache.emplace(key, std::move(fresh));
  (void)inserted; // on a race the first writer wins; contents are identical
  return *it->second;
}

Vec3 BoundaryChart::grad(const Vec3& p) const {
  return Vec3(deriv(p, MultiIndex{{1, 0, 0}}), deriv(p, MultiIndex{{0, 1, 0}}),
              deriv(p, MultiIndex{{0, 0, 1}}));
}

Vec3 BoundaryChart::normal(const Vec3& p) const {
  const Vec3 g = grad(p);
  const Real n = g.norm();
  if (n == 0.0)
    throw std::runtime_error("BoundaryChart::normal: degenerate gradient");
  return g / n;
}

Real ChannelChart::value(const Vec3& p) const { return p.z() * (Lz_ - p.z()); }

Real ChannelChart::deriv(const Vec3& p, const MultiIndex& beta) const {
  if (beta[0] != 0 || beta[1] != 0) return 0.0;
  switch (beta[2]) {
    case 0: return value(p);
    case 1: return Lz_ - 2.0 * p.z();
    case 2: return -2.0;
    default: return 0.0;
  }
}

Real composition_coefficient(int s, const std::vector<Vec3>& coeff_vectors,
                             const BoundaryChart& chart, const Vec3& a,
                             int min_abs_beta, int max_abs_beta) {
  if (s < 1 || s > kMaxOrder)
    throw std::invalid_argument("composition_coefficient: order out of range");
  const int top = std::min(max_abs_beta, s);
  if (chart.max_deriv_order() >= 0 && top > chart.max_deriv_order())
    throw std::invalid_argument(
        "composition_coefficient: chart derivatives unavailable at this order");

  Real total = 0.0;
  MultiIndex beta;
  for (int b0 = 0; b0 <= top; ++b0) {
    for (int b1 = 0; b1 + b0 <= top; ++b1) {
      for (int b2 = std::max(0, min_abs_beta - b0 - b1); b2 + b1 + b0 <= top;
           ++b2) {
        if (b0 + b1 + b2 < min_abs_beta) continue;
        beta = MultiIndex{{b0, b1, b2}};
        const Real d = chart.deriv(a, beta);
        if (d == 0.0) continue;
        Real block = 0.0;
        for (const PartitionTerm& term : partitions(s, beta)) {
          Real prod = 1.0;
          for (size_t j = 0; j < term.lengths.size(); ++j) {
            const size_t l = static_cast<size_t>(term.lengths[j]);
            if (l > coeff_vectors.size())
              throw std::logic_error(
                  "composition_coefficient: missing Taylor coefficient");
            const Vec3& xi = coeff_vectors[l - 1];
            const MultiIndex& k = term.kvecs[j];
            for (int c = 0; c < 3; ++c)
              if (k[c] > 0)
                prod *= int_pow(xi[c], k[c]) / kFactorial[k[c]];
          }
          block += prod;
        }
        total += d * block;
      }
    }
  }
  return total;
}

WallField boundary_normal_rhs(int s, const std::vector<VectorField>& coeffs,
                              const BoundaryChart& chart, const LabelGrid& grid) {
  if (grid.geometry != Geometry::Channel)
    throw std::invalid_argument("boundary_normal_rhs: channel geometry required");
  if (s < 1 || s > kMaxOrder)
    throw std::invalid_argument("boundary_normal_rhs: order out of range");
  if (static_cast<int>(coeffs.size()) < s - 1)
    throw std::invalid_argument("boundary_normal_rhs: need xi^(1..s-1)");
  if (chart.max_deriv_order() >= 0 && s > chart.max_deriv_order())
    throw std::invalid_argument(
        "boundary_normal_rhs: chart derivatives unavailable up to order s");

  WallField out;
  out.nx = grid.nx;
  out.ny = grid.ny;
  const Index nwall = grid.nx * grid.ny;
  out.bottom = ArrayXr::Zero(nwall);
  out.top = ArrayXr::Zero(nwall);
  if (s == 1) return out; // no |beta| > 1 contributions yet

  // warm the partition cache serially so worker threads only read
  for (int b0 = 0; b0 <= s; ++b0)
    for (int b1 = 0; b1 + b0 <= s; ++b1)
      for (int b2 = std::max(0, 2 - b0 - b1); b2 + b1 + b0 <= s; ++b2)
        partitions(s, MultiIndex{{b0, b1, b2}});

  parallel_for(2 * nwall, [&](Index w) {
    const bool top_wall = w >= nwall;
    const Index plane = top_wall ? w - nwall : w;
    const Index ix = plane % grid.nx;
    const Index iy = plane / grid.nx;
    const Index iz = top_wall ? grid.nz - 1 : 0;
    const Index node = grid.idx(ix, iy, iz);
    const Vec3 a = grid.pos(node);

    std::vector<Vec3> vecs(static_cast<size_t>(s - 1));
    for (int m = 1; m < s; ++m) {
      const VectorField& f = coeffs[static_cast<size_t>(m - 1)];
      vecs[static_cast<size_t>(m - 1)] = Vec3(f.x[node], f.y[node], f.z[node]);
    }
    const Real rhs = -composition_coefficient(s, vecs, chart, a, 2, s);
    const Real g = rhs / chart.grad(a).norm();
    (top_wall ? out.top : out.bottom)[plane] = g;
  });
  return out;
}

Real boundary_residual(const TaylorSeries& T, const BoundaryChart& chart, Real t) {
  const LabelGrid& grid = T.grid;
  if (grid.geometry != Geometry::Channel) return 0.0;

  const Index nwall = grid.nx * grid.ny;
  return parallel_max(2 * nwall, [&](Index w) {
    const bool top_wall = w >= nwall;
    const Index plane = top_wall ? w - nwall : w;
    const Index ix = plane % grid.nx;
    const Index iy = plane / grid.nx;
    const Index iz = top_wall ? grid.nz - 1 : 0;
    const Index node = grid.idx(ix, iy, iz);

    Vec3 xi = Vec3::Zero();
    for (int s = T.order; s >= 1; --s) {
      const VectorField& c = T.at_order(s);
      xi = (xi + Vec3(c.x[node], c.y[node], c.z[node])) * t;
    }
    const Vec3 a = grid.pos(node);
    return std::abs(chart.value(a + xi));
  });
}

} // namespace clg
