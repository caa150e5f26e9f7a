#pragma once

// Ultradifferentiable weight-sequence machinery: the normalized weights M_k
// defining a class, the three structural properties (differentiation
// stability, log-superlinearity, FdB-stability) with fitted constants, the
// Denjoy-Carleman quasi-analyticity test, the generating function of the
// displacement series, and the cubic-polynomial convergence-radius estimate
//   Q(zeta) = 6 C_a^2 M_0^2 zeta^3 + (15/2) C_a M_0 zeta^2 - zeta/C_DN + Gamma.

#include "clg/types.hpp"

#include <limits>
#include <string>
#include <vector>

namespace clg {

enum class WeightKind { Analytic, Gevrey, Custom };

struct WeightSequence {
  WeightKind kind = WeightKind::Analytic;
  Real gevrey_r = 0;        // only meaningful for Gevrey
  std::vector<Real> values; // M_0 .. M_kmax, all positive
  int kmax = 0;
};

WeightSequence make_weights_analytic(int kmax);
WeightSequence make_weights_gevrey(Real r, int kmax);
WeightSequence make_weights_custom(std::vector<Real> values);

struct ClassReport {
  bool diff_stable = false;
  Real C_d = 0; // fitted: max over k>=1 of (M_{k+1}/M_k)^{1/k}, with M_1/M_0 as k=1
  bool log_superlinear = false;
  bool fdb_stable = false;
  Real C_FdB = 0; // fitted: max over partitions of (M_l prod M_alpha / M_k)^{1/k}
  int tested_up_to = 0;
};

ClassReport check_class_properties(const WeightSequence& W);

enum class DCVerdict { QuasiAnalytic, NonQuasiAnalytic, Inconclusive };

struct DenjoyCarlemanReport {
  Real partial_sum = 0; // sum_{k<kmax} M_k / M_{k+1}
  DCVerdict verdict = DCVerdict::Inconclusive;
};

DenjoyCarlemanReport denjoy_carleman(const WeightSequence& W);

const char* to_string(DCVerdict v);

struct EstimateConstants {
  Real C_a = 1;         // Holder-algebra constant
  Real M_0 = 1;
  Real M_1 = 1;
  Real C_DN = 1;        // Dirichlet/Neumann Schauder constant
  Real C_daS = 1;       // composite boundary-chart constant
  Real C_Sad = 1;       // composite chart-saddle constant
  Real omega0_norm = 1; // ||omega_0||_{0,gamma}
};

struct RadiusReport {
  Real gamma_c = 0;
  Real zeta2_at_gamma_c = 0;
  Real t_c = 0;
  Real t_Sad = std::numeric_limits<Real>::infinity();
  Real T = 0;
};

// The cubic and its three-real-roots discriminant as functions of Gamma.
Real cubic_Q(const EstimateConstants& c, Real zeta, Real Gamma);
Real cubic_discriminant(const EstimateConstants& c, Real Gamma);

// Smaller positive root of Q(., Gamma); requires Gamma in [0, Gamma_c].
Real zeta2_root(const EstimateConstants& c, Real Gamma);

// Critical Gamma where the two positive roots collide, the associated times,
// and the radius bound T = min(t_Sad, t_c).  Throws on degenerate constants.
RadiusReport radius_from_cubic(const EstimateConstants& c);

// zeta(t) = sum_{s=1..S} norms[s-1] t^s / M_s  (norms indexed from s=1).
Real generating_function(const std::vector<Real>& norms, const WeightSequence& W, Real t);

} // namespace clg
