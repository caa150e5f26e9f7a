#include "clg/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clg {

namespace {

void check_kmax(int kmax) {
  if (kmax < 2) throw std::invalid_argument("weights: kmax must be >= 2");
}

// All partitions of k into parts >= 1, non-increasing; calls visit(parts).
template <class V>
void for_each_partition(int k, std::vector<int>& parts, int max_part, V&& visit) {
  if (k == 0) {
    visit(parts);
    return;
  }
  for (int p = std::min(k, max_part); p >= 1; --p) {
    parts.push_back(p);
    for_each_partition(k - p, parts, p, visit);
    parts.pop_back();
  }
}

} // namespace

WeightSequence make_weights_analytic(int kmax) {
  check_kmax(kmax);
  WeightSequence W;
  W.kind = WeightKind::Analytic;
  W.kmax = kmax;
  W.values.assign(static_cast<size_t>(kmax + 1), Real(1));
  return W;
}

WeightSequence make_weights_gevrey(Real r, int kmax) {
  check_kmax(kmax);
  if (!(r > 0)) throw std::invalid_argument("weights: Gevrey r must be positive");
  WeightSequence W;
  W.kind = WeightKind::Gevrey;
  W.gevrey_r = r;
  W.kmax = kmax;
  W.values.resize(static_cast<size_t>(kmax + 1));
  Real log_fact = 0; // log k!
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) log_fact += std::log(Real(k));
    W.values[static_cast<size_t>(k)] = std::exp(r * log_fact);
  }
  return W;
}

WeightSequence make_weights_custom(std::vector<Real> values) {
  if (values.size() < 3) throw std::invalid_argument("weights: need M_0..M_2 at least");
  for (Real v : values)
    if (!(v > 0)) throw std::invalid_argument("weights: all M_k must be positive");
  WeightSequence W;
  W.kind = WeightKind::Custom;
  W.kmax = static_cast<int>(values.size()) - 1;
  W.values = std::move(values);
  return W;
}

ClassReport check_class_properties(const WeightSequence& W) {
  const auto& M = W.values;
  const int kmax = W.kmax;
  const Real tol = 1e-12;
  ClassReport rep;
  rep.tested_up_to = kmax;

  // (i) differentiation stability: fitted C_d makes M_{k+1} <= C_d^k M_k hold
  // by construction; the k=0 step M_1 <= C_d M_0 is folded in as k=1.
  Real cd = M[1] / M[0];
  for (int k = 1; k + 1 <= kmax; ++k)
    cd = std::max(cd, std::pow(M[static_cast<size_t>(k + 1)] / M[static_cast<size_t>(k)],
                               Real(1) / Real(k)));
  rep.C_d = cd;
  rep.diff_stable = true;

  // (ii) log-superlinearity: M_k M_l <= M_0 M_{k+l} for all k+l <= kmax.
  rep.log_superlinear = true;
  for (int k = 0; k <= kmax && rep.log_superlinear; ++k)
    for (int l = 0; k + l <= kmax; ++l)
      if (M[static_cast<size_t>(k)] * M[static_cast<size_t>(l)] >
          M[0] * M[static_cast<size_t>(k + l)] * (1 + tol)) {
        rep.log_superlinear = false;
        break;
      }

  // (iii) FdB stability: C_FdB = max over k and partitions k = a_1+..+a_l of
  // (M_l prod_i M_{a_i} / M_k)^{1/k}; stable iff the fit is <= 1.
  Real cf = 0;
  for (int k = 1; k <= kmax; ++k) {
    std::vector<int> parts;
    for_each_partition(k, parts, k, [&](const std::vector<int>& alpha) {
      const int l = static_cast<int>(alpha.size());
      Real prod = M[static_cast<size_t>(l)];
      for (int a : alpha) prod *= M[static_cast<size_t>(a)];
      cf = std::max(cf, std::pow(prod / M[static_cast<size_t>(k)], Real(1) / Real(k)));
    });
  }
  rep.C_FdB = cf;
  rep.fdb_stable = cf <= 1 + tol;
  return rep;
}

DenjoyCarlemanReport denjoy_carleman(const WeightSequence& W) {
  if (W.kmax < 8) throw std::invalid_argument("denjoy_carleman: kmax must be >= 8");
  DenjoyCarlemanReport rep;
  for (int k = 0; k < W.kmax; ++k)
    rep.partial_sum += W.values[static_cast<size_t>(k)] / W.values[static_cast<size_t>(k + 1)];
  switch (W.kind) {
    case WeightKind::Analytic:
      rep.verdict = DCVerdict::QuasiAnalytic; // ratio = 1, sum diverges
      break;
    case WeightKind::Gevrey:
      // ratio = (k+1)^{-r}: converges iff r > 1
      rep.verdict = W.gevrey_r > 1 ? DCVerdict::NonQuasiAnalytic : DCVerdict::QuasiAnalytic;
      break;
    case WeightKind::Custom:
      rep.verdict = DCVerdict::Inconclusive; // finite prefix cannot decide
      break;
  }
  return rep;
}

const char* to_string(DCVerdict v) {
  switch (v) {
    case DCVerdict::QuasiAnalytic: return "QuasiAnalytic";
    case DCVerdict::NonQuasiAnalytic: return "NonQuasiAnalytic";
    default: return "Inconclusive";
  }
}

namespace {

void check_constants(const EstimateConstants& c) {
  if (!(c.C_a > 0 && c.M_0 > 0 && c.M_1 > 0 && c.C_DN > 0 && c.C_daS > 0 &&
        c.C_Sad > 0 && c.omega0_norm > 0))
    throw std::invalid_argument("radius_from_cubic: all constants must be positive");
}

} // namespace

Real cubic_Q(const EstimateConstants& c, Real zeta, Real Gamma) {
  const Real A = c.C_a * c.M_0;
  return Real(6) * A * A * zeta * zeta * zeta + Real(7.5) * A * zeta * zeta -
         zeta / c.C_DN + Gamma;
}

Real cubic_discriminant(const EstimateConstants& c, Real Gamma) {
  // Three-real-roots criterion of the monic depressed form of Q: the first
  // term is -4p^3, the second 27q^2 (q collects the Gamma dependence).
  const Real A = c.C_a * c.M_0;
  const Real c0 = Real(1) / c.C_DN;
  const Real first = std::pow(Real(25) / 8 + c0, 3) / (Real(54) * std::pow(A, 6));
  const Real s = (Real(5) / 72) * (Real(25) / 12 + c0) / A + Gamma / 6;
  return first - Real(27) * s * s / std::pow(A, 4);
}

Real zeta2_root(const EstimateConstants& c, Real Gamma) {
  const Real A = c.C_a * c.M_0;
  const Real c0 = Real(1) / c.C_DN;
  // monic form zeta^3 + p1 zeta^2 + p2 zeta + p3
  const Real p1 = Real(5) / (4 * A);
  const Real p2 = -c0 / (6 * A * A);
  const Real p3 = Gamma / (6 * A * A);
  // depressed: y^3 + p y + q with zeta = y - p1/3
  const Real p = p2 - p1 * p1 / 3;
  const Real q = (2 * p1 * p1 * p1 - 9 * p1 * p2 + 27 * p3) / 27;

  const Real disc = -4 * p * p * p - 27 * q * q;
  std::vector<Real> roots;
  if (disc >= -1e-30) {
    // three real roots (possibly a collision): trigonometric formula
    const Real m = 2 * std::sqrt(-p / 3);
    Real arg = 3 * q / (p * m);
    arg = std::max(Real(-1), std::min(Real(1), arg));
    const Real theta = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos((theta - 2 * kPi * Real(k)) / 3) - p1 / 3);
  } else {
    throw std::runtime_error("zeta2_root: no three-real-root regime (Gamma beyond critical)");
  }

  // keep nonnegative roots; Gamma=0 legitimately yields zeta2 = 0
  std::vector<Real> pos;
  for (Real r : roots)
    if (r >= -1e-14) pos.push_back(std::max(r, Real(0)));
  if (pos.empty()) throw std::runtime_error("zeta2_root: no nonnegative root");
  std::sort(pos.begin(), pos.end());
  Real z = pos.front();

  // polish by bisection-safe Newton steps away from the double-root collision
  for (int it = 0; it < 3; ++it) {
    const Real f = cubic_Q(c, z, Gamma);
    const Real df = 18 * A * A * z * z + 15 * A * z - c0;
    if (std::abs(df) < 1e-12) break;
    const Real step = f / df;
    if (std::abs(step) > 0.1 * (1 + std::abs(z))) break;
    z -= step;
  }
  return std::max(z, Real(0));
}

RadiusReport radius_from_cubic(const EstimateConstants& c) {
  check_constants(c);
  if (cubic_discriminant(c, 0) <= 0)
    throw std::runtime_error("radius_from_cubic: discriminant not positive at Gamma=0 "
                             "(degenerate constants)");

  // bracket the sign change of the discriminant by doubling, then bisect
  Real lo = 0, hi = 1e-8;
  int guard = 0;
  while (cubic_discriminant(c, hi) > 0) {
    lo = hi;
    hi *= 2;
    if (++guard > 1000)
      throw std::runtime_error("radius_from_cubic: no positive Gamma_c found");
  }
  while (hi - lo > 1e-12) {
    const Real mid = Real(0.5) * (lo + hi);
    (cubic_discriminant(c, mid) > 0 ? lo : hi) = mid;
  }

  RadiusReport rep;
  rep.gamma_c = Real(0.5) * (lo + hi);
  rep.zeta2_at_gamma_c = zeta2_root(c, lo); // stay on the three-root side
  rep.t_c = rep.gamma_c * c.M_1 / c.omega0_norm;

  // t_Sad: the time at which zeta_2 would reach the chart-saddle level C_Sad,
  // i.e. Gamma_Sad = -Q(C_Sad; Gamma=0).  If zeta_2 never reaches C_Sad before
  // the root collision, the constraint never binds.
  if (c.C_Sad <= rep.zeta2_at_gamma_c * (1 + 1e-12)) {
    const Real gamma_sad = -cubic_Q(c, c.C_Sad, Real(0));
    rep.t_Sad = gamma_sad * c.M_1 / c.omega0_norm;
  } else {
    rep.t_Sad = std::numeric_limits<Real>::infinity();
  }
  rep.T = std::min(rep.t_c, rep.t_Sad);
  return rep;
}

Real generating_function(const std::vector<Real>& norms, const WeightSequence& W, Real t) {
  if (t < 0) throw std::invalid_argument("generating_function: t must be >= 0");
  const int S = static_cast<int>(norms.size());
  if (W.kmax < S)
    throw std::invalid_argument("generating_function: weight sequence shorter than norms");
  Real acc = 0;
  Real tp = 1;
  for (int s = 1; s <= S; ++s) {
    tp *= t;
    acc += norms[static_cast<size_t>(s - 1)] * tp / W.values[static_cast<size_t>(s)];
  }
  return acc;
}

} // namespace clg
