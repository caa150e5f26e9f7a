#include "clg/field.hpp"

namespace clg {

// Horner evaluation in t keeps the per-node arithmetic order fixed, so results
// are independent of thread count.
VectorField series_displacement(const TaylorSeries& T, Real t) {
  VectorField out(T.grid);
  const Index n = T.grid.size();
  for (int c = 0; c < 3; ++c) {
    ArrayXr& dst = out.comp(c);
    parallel_for(n, [&](Index i) {
      Real acc = 0;
      for (int s = T.order; s >= 1; --s)
        acc = acc * t + T.at_order(s).comp(c)[i];
      dst[i] = acc * t;
    });
  }
  return out;
}

VectorField series_velocity(const TaylorSeries& T, Real t) {
  VectorField out(T.grid);
  const Index n = T.grid.size();
  for (int c = 0; c < 3; ++c) {
    ArrayXr& dst = out.comp(c);
    parallel_for(n, [&](Index i) {
      Real acc = 0;
      for (int s = T.order; s >= 1; --s)
        acc = acc * t + Real(s) * T.at_order(s).comp(c)[i];
      dst[i] = acc;
    });
  }
  return out;
}

} // namespace clg
