#include "clg/snapshot.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace clg {

namespace {

constexpr size_t kHeaderSize = 64;
constexpr uint32_t kVersion = 1;

// This code assumes a little-endian host (the only supported platform); the
// on-disk format is little-endian by definition.

std::array<char, kHeaderSize> make_header(const LabelGrid& g, uint8_t ncomp) {
  std::array<char, kHeaderSize> h{};
  std::memcpy(h.data(), "CLGF", 4);
  std::memcpy(h.data() + 4, &kVersion, 4);
  h[8] = g.geometry == Geometry::Periodic3D ? 0 : 1;
  const uint32_t dims[3] = {static_cast<uint32_t>(g.nx), static_cast<uint32_t>(g.ny),
                            static_cast<uint32_t>(g.nz)};
  std::memcpy(h.data() + 9, dims, 12);
  const double lengths[3] = {g.Lx, g.Ly, g.Lz};
  std::memcpy(h.data() + 21, lengths, 24);
  h[45] = static_cast<char>(ncomp);
  return h;
}

void write_file(const std::string& path, const LabelGrid& g, uint8_t ncomp,
                const ArrayXr* comps) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("snapshot: cannot open '" + path + "' for writing");
  const auto header = make_header(g, ncomp);
  out.write(header.data(), kHeaderSize);
  for (int c = 0; c < ncomp; ++c)
    out.write(reinterpret_cast<const char*>(comps[c].data()),
              static_cast<std::streamsize>(sizeof(Real)) * comps[c].size());
  out.flush();
  if (!out) throw IoError("snapshot: write to '" + path + "' failed");
}

struct Parsed {
  SnapshotInfo info;
  std::ifstream stream;
};

Parsed open_and_parse(const std::string& path) {
  Parsed p;
  p.stream.open(path, std::ios::binary);
  if (!p.stream) throw IoError("snapshot: cannot open '" + path + "'");
  std::array<char, kHeaderSize> h{};
  p.stream.read(h.data(), kHeaderSize);
  if (p.stream.gcount() != static_cast<std::streamsize>(kHeaderSize))
    throw IoError("snapshot: '" + path + "' is truncated (no header)");
  if (std::memcmp(h.data(), "CLGF", 4) != 0)
    throw IoError("snapshot: '" + path + "' has a bad magic number");
  uint32_t version = 0;
  std::memcpy(&version, h.data() + 4, 4);
  if (version != kVersion)
    throw IoError("snapshot: '" + path + "' has unsupported version " + std::to_string(version));
  const uint8_t geom = static_cast<uint8_t>(h[8]);
  if (geom > 1) throw IoError("snapshot: '" + path + "' has an unknown geometry code");
  p.info.geometry = geom == 0 ? Geometry::Periodic3D : Geometry::Channel;
  uint32_t dims[3];
  std::memcpy(dims, h.data() + 9, 12);
  double lengths[3];
  std::memcpy(lengths, h.data() + 21, 24);
  for (int a = 0; a < 3; ++a) {
    p.info.dims[a] = static_cast<Index>(dims[a]);
    p.info.lengths[a] = lengths[a];
  }
  p.info.ncomp = static_cast<int>(static_cast<uint8_t>(h[45]));
  if (p.info.ncomp != 1 && p.info.ncomp != 3)
    throw IoError("snapshot: '" + path + "' has unsupported component count " +
                  std::to_string(p.info.ncomp));
  return p;
}

LabelGrid grid_from_info(const SnapshotInfo& info) {
  if (info.geometry == Geometry::Periodic3D)
    return make_periodic_grid(info.dims[0], info.dims[1], info.dims[2], info.lengths[0],
                              info.lengths[1], info.lengths[2]);
  return make_channel_grid(info.dims[0], info.dims[1], info.dims[2], info.lengths[0],
                           info.lengths[1], info.lengths[2]);
}

void read_block(std::ifstream& in, const std::string& path, ArrayXr& dst, Index n) {
  dst.resize(n);
  in.read(reinterpret_cast<char*>(dst.data()),
          static_cast<std::streamsize>(sizeof(Real)) * n);
  if (in.gcount() != static_cast<std::streamsize>(sizeof(Real) * static_cast<size_t>(n)))
    throw IoError("snapshot: '" + path + "' is truncated (short data block)");
}

} // namespace

void write_snapshot(const std::string& path, const ScalarField& f) {
  write_file(path, f.grid, 1, &f.v);
}

void write_snapshot(const std::string& path, const VectorField& u) {
  const ArrayXr comps[3] = {u.x, u.y, u.z};
  write_file(path, u.grid, 3, comps);
}

ScalarField read_scalar_snapshot(const std::string& path) {
  Parsed p = open_and_parse(path);
  if (p.info.ncomp != 1)
    throw IoError("snapshot: '" + path + "' holds a vector field, expected scalar");
  ScalarField f(grid_from_info(p.info));
  read_block(p.stream, path, f.v, f.grid.size());
  return f;
}

VectorField read_vector_snapshot(const std::string& path) {
  Parsed p = open_and_parse(path);
  if (p.info.ncomp != 3)
    throw IoError("snapshot: '" + path + "' holds a scalar field, expected vector");
  VectorField u(grid_from_info(p.info));
  read_block(p.stream, path, u.x, u.grid.size());
  read_block(p.stream, path, u.y, u.grid.size());
  read_block(p.stream, path, u.z, u.grid.size());
  return u;
}

SnapshotInfo read_snapshot_info(const std::string& path) { return open_and_parse(path).info; }

} // namespace clg
