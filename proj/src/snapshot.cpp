#include "cqnls/snapshot.hpp"

#include <cstring>
#include <fstream>

#include "cqnls/errors.hpp"

namespace cqnls {

std::uint32_t crc32_bytes(const void* data, std::size_t n, std::uint32_t seed) {
  static std::uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      table[i] = c;
    }
    init = true;
  }
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

namespace {

constexpr char kMagic[5] = {'C', 'Q', 'N', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

struct Header {
  char magic[5];
  std::uint8_t tag;  // 0 = psi, 1 = v
  std::uint16_t pad = 0;
  std::uint32_t version;
  std::uint32_t d;
  std::uint32_t m;
  std::uint32_t flags;
  double L;
  double t;
  double u2_mean;
  double beta;
};
static_assert(sizeof(Header) == 56, "header layout must be packed and stable");

}  // namespace

void write_snapshot(const std::string& path, const SnapshotFile& s) {
  if (s.tag != "psi" && s.tag != "v")
    throw SnapshotFormatError("snapshot: tag must be 'psi' or 'v'");
  std::size_t n = 1;
  for (int a = 0; a < s.d; ++a) n *= static_cast<std::size_t>(s.m);
  if (s.data.size() != n)
    throw SnapshotFormatError("snapshot: payload size does not match m^d");

  Header h{};
  std::memcpy(h.magic, kMagic, 5);
  h.tag = s.tag == "psi" ? 0 : 1;
  h.version = kVersion;
  h.d = static_cast<std::uint32_t>(s.d);
  h.m = static_cast<std::uint32_t>(s.m);
  h.flags = s.flags;
  h.L = s.L;
  h.t = s.t;
  h.u2_mean = s.u2_mean;
  h.beta = s.beta;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw SnapshotFormatError("snapshot: cannot open '" + path + "' for writing");
  std::uint32_t hcrc = crc32_bytes(&h, sizeof(h));
  f.write(reinterpret_cast<const char*>(&h), sizeof(h));
  f.write(reinterpret_cast<const char*>(&hcrc), 4);
  const char* payload = reinterpret_cast<const char*>(s.data.data());
  std::size_t bytes = s.data.size() * sizeof(cplx);
  f.write(payload, static_cast<std::streamsize>(bytes));
  std::uint32_t pcrc = crc32_bytes(payload, bytes);
  f.write(reinterpret_cast<const char*>(&pcrc), 4);
  if (!f) throw SnapshotFormatError("snapshot: short write to '" + path + "'");
}

SnapshotFile read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SnapshotFormatError("snapshot: cannot open '" + path + "'");
  Header h{};
  std::uint32_t hcrc = 0;
  f.read(reinterpret_cast<char*>(&h), sizeof(h));
  f.read(reinterpret_cast<char*>(&hcrc), 4);
  if (!f) throw SnapshotFormatError("snapshot: truncated header in '" + path + "'");
  if (std::memcmp(h.magic, kMagic, 5) != 0)
    throw SnapshotFormatError("snapshot: bad magic in '" + path + "'");
  if (crc32_bytes(&h, sizeof(h)) != hcrc)
    throw SnapshotFormatError("snapshot: header checksum mismatch in '" + path + "'");
  if (h.version != kVersion)
    throw SnapshotFormatError("snapshot: unsupported format version");
  if (h.d < 1 || h.d > 3 || h.m < 2)
    throw SnapshotFormatError("snapshot: invalid dimensions");

  SnapshotFile s;
  s.d = static_cast<int>(h.d);
  s.m = static_cast<int>(h.m);
  s.L = h.L;
  s.t = h.t;
  s.tag = h.tag == 0 ? "psi" : "v";
  s.u2_mean = h.u2_mean;
  s.beta = h.beta;
  s.flags = h.flags;
  std::size_t n = 1;
  for (int a = 0; a < s.d; ++a) n *= static_cast<std::size_t>(s.m);
  s.data.resize(n);
  std::size_t bytes = n * sizeof(cplx);
  f.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(bytes));
  std::uint32_t pcrc = 0;
  f.read(reinterpret_cast<char*>(&pcrc), 4);
  if (!f) throw SnapshotFormatError("snapshot: truncated payload in '" + path + "'");
  if (crc32_bytes(s.data.data(), bytes) != pcrc)
    throw SnapshotFormatError("snapshot: payload checksum mismatch in '" + path + "'");
  return s;
}

}  // namespace cqnls
