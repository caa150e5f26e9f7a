#pragma once

// CLGF field snapshots.  Fixed 64-byte header followed by little-endian f64
// node data in x-fastest order, one block per component:
//   offset  0: magic "CLGF"
//   offset  4: version  (u32, currently 1)
//   offset  8: geometry (u8: 0 periodic3d, 1 channel)
//   offset  9: dims     (3 x u32)
//   offset 21: lengths  (3 x f64)
//   offset 45: ncomp    (u8: 1 scalar, 3 vector)
//   offset 46: zero padding to 64
// Round-trips are bit-identical; readers validate magic, version, and sizes.

#include "clg/field.hpp"

#include <stdexcept>
#include <string>

namespace clg {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_snapshot(const std::string& path, const ScalarField& f);
void write_snapshot(const std::string& path, const VectorField& u);

ScalarField read_scalar_snapshot(const std::string& path);
VectorField read_vector_snapshot(const std::string& path);

// Peeks at the header only.
struct SnapshotInfo {
  Geometry geometry;
  Index dims[3];
  Real lengths[3];
  int ncomp;
};
SnapshotInfo read_snapshot_info(const std::string& path);

} // namespace clg
