#pragma once

// Off-grid evaluation of vector fields.
//  - Periodic3D: exact trigonometric evaluation of the (conjugate-reduced)
//    Fourier series, restricted to the populated mode box.
//  - Channel: trigonometric in x,y; per-mode not-a-knot cubic spline in z.
// The evaluator is built once per field and is then safe for concurrent reads.

#include "clg/field.hpp"
#include "clg/types.hpp"

#include <memory>
#include <vector>

namespace clg {

class FieldEvaluator {
 public:
  explicit FieldEvaluator(const VectorField& u);
  ~FieldEvaluator();
  FieldEvaluator(FieldEvaluator&&) noexcept;
  FieldEvaluator& operator=(FieldEvaluator&&) noexcept;

  Vec3 eval(const Vec3& p) const;
  const LabelGrid& grid() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Evaluates u at each point.  Channel z coordinates may exceed [0,Lz] by at
// most 1e-12 (they are clamped); periodic coordinates wrap.
std::vector<Vec3> resample(const VectorField& u, const std::vector<Vec3>& points);

} // namespace clg
