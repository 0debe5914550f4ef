#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "cqnls/field.hpp"

namespace cqnls {

// on-disk field snapshot: fixed header (magic "CQNLS", version, d, m, L, t,
// variable tag, u2_mean, beta, flags) + interleaved re/im binary64
// little-endian payload in row-major axis order, each section followed by a
// CRC32 of its bytes
struct SnapshotFile {
  int d = 3;
  int m = 0;
  double L = 0;
  double t = 0;
  std::string tag = "v";  // "psi" or "v"
  double u2_mean = 0;
  double beta = 0;
  std::uint32_t flags = 0;
  std::vector<cplx> data;
};

void write_snapshot(const std::string& path, const SnapshotFile& s);
SnapshotFile read_snapshot(const std::string& path);

std::uint32_t crc32_bytes(const void* data, std::size_t n, std::uint32_t seed = 0);

}  // namespace cqnls
