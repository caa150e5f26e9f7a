#pragma once

// Faa di Bruno combinatorics for the boundary-invariance constraint
// S(X(t,a)) = 0.  The t^s Taylor coefficient of S(a + xi(t,a)) is
//   sum_{1<=|beta|<=s} d^beta S(a) sum_i sum_{P_i(s,beta)}
//       prod_j prod_c (xi_c^{(l_j)})^{k_jc} / k_jc!
// where P_i(s,beta) collects strictly increasing lengths l_1<..<l_i and
// nonzero multi-indices k_j with sum k_j = beta and sum |k_j| l_j = s.
// Moving the |beta|=1 block to the left-hand side turns the s-th coefficient
// into the Neumann datum for xi^(s).

#include "clg/field.hpp"
#include "clg/types.hpp"

#include <array>
#include <memory>
#include <vector>

namespace clg {

struct MultiIndex {
  std::array<int, 3> k{0, 0, 0};

  int abs() const { return k[0] + k[1] + k[2]; }
  int operator[](int c) const { return k[static_cast<size_t>(c)]; }
  int& operator[](int c) { return k[static_cast<size_t>(c)]; }
  bool operator==(const MultiIndex& o) const { return k == o.k; }
};

struct PartitionTerm {
  std::vector<int> lengths;      // l_1 < ... < l_i
  std::vector<MultiIndex> kvecs; // k_1 .. k_i, each |k_j| >= 1

  // prod_j k_j1! k_j2! k_j3!
  Real factorial_denominator() const;
  // total polynomial degree sum_j |k_j| (= |beta|)
  int degree() const;
};

// Complete duplicate-free enumeration of U_i P_i(s,beta), lexicographic in
// (i, lengths, k-vectors).  Cached process-wide; the reference stays valid.
const std::vector<PartitionTerm>& partitions(int s, const MultiIndex& beta);

// Boundary-defining map S with analytic partial derivatives.  A negative
// max_deriv_order means every order is available in closed form (polynomial
// charts: higher derivatives are known-zero).
class BoundaryChart {
 public:
  virtual ~BoundaryChart() = default;
  virtual Real value(const Vec3& p) const = 0;
  virtual Real deriv(const Vec3& p, const MultiIndex& beta) const = 0;
  virtual int max_deriv_order() const = 0;

  Vec3 grad(const Vec3& p) const;
  Vec3 normal(const Vec3& p) const; // grad / |grad|_2
};

// Flat channel chart S(x,y,z) = z (Lz - z); d^beta S = 0 for |beta| >= 3.
class ChannelChart final : public BoundaryChart {
 public:
  explicit ChannelChart(Real Lz) : Lz_(Lz) {}
  Real value(const Vec3& p) const override;
  Real deriv(const Vec3& p, const MultiIndex& beta) const override;
  int max_deriv_order() const override { return -1; }

 private:
  Real Lz_;
};

// t^s coefficient of S(a + xi(t)), restricted to |beta| in
// [min_abs_beta, max_abs_beta].  coeff_vectors[m-1] = xi^{(m)}(a); every
// partition term references lengths <= coeff_vectors.size().
Real composition_coefficient(int s, const std::vector<Vec3>& coeff_vectors,
                             const BoundaryChart& chart, const Vec3& a,
                             int min_abs_beta, int max_abs_beta);

// Neumann datum g^(s) = xi^(s) . nu on the two channel walls:
//   g = -(1/|grad S|) sum_{1<|beta|<=s} d^beta S * (partition sums).
// coeffs holds xi^(1)..xi^(s-1).
WallField boundary_normal_rhs(int s, const std::vector<VectorField>& coeffs,
                              const BoundaryChart& chart, const LabelGrid& grid);

// max over wall nodes of |S(a + xi(t,a))| for the truncated series.
Real boundary_residual(const TaylorSeries& T, const BoundaryChart& chart, Real t);

} // namespace clg
