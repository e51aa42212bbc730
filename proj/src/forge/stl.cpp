#include "forge/stl.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_map>

namespace forge {

namespace {

constexpr std::size_t kHeaderBytes = 80;
constexpr std::size_t kTriangleBytes = 50;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f32(std::vector<unsigned char>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B185EBCA87ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<unsigned char> encode_stl(const TriMesh& mesh) {
  validate_indices(mesh);
  std::vector<unsigned char> out(kHeaderBytes, 0);
  out.reserve(kHeaderBytes + 4 + kTriangleBytes * mesh.faces.size());
  const char banner[] = "forge binary STL";
  std::memcpy(out.data(), banner, sizeof(banner) - 1);
  put_u32(out, static_cast<std::uint32_t>(mesh.faces.size()));
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    Vec3 n = (b - a).cross(c - a);
    const double len = n.norm();
    n = len > 0.0 ? Vec3(n / len) : Vec3(Vec3::Zero());
    for (int k = 0; k < 3; ++k) put_f32(out, static_cast<float>(n[k]));
    for (const Vec3* v : {&a, &b, &c})
      for (int k = 0; k < 3; ++k) put_f32(out, static_cast<float>((*v)[k]));
    out.push_back(0);
    out.push_back(0);
  }
  return out;
}

void write_stl(const TriMesh& mesh, const std::string& path) {
  const auto bytes = encode_stl(mesh);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

TriMesh decode_stl(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes + 4)
    fail(ErrorKind::Parse, "STL truncated at byte " + std::to_string(bytes.size()) + ": header needs 84 bytes");
  const std::uint32_t count = get_u32(bytes.data() + kHeaderBytes);
  const std::size_t expected = kHeaderBytes + 4 + kTriangleBytes * static_cast<std::size_t>(count);
  if (bytes.size() < expected) {
    const std::size_t tri = (bytes.size() - kHeaderBytes - 4) / kTriangleBytes;
    fail(ErrorKind::Parse, "STL truncated at byte " + std::to_string(bytes.size()) + ": triangle " +
                               std::to_string(tri) + " of " + std::to_string(count) + " starts at byte " +
                               std::to_string(kHeaderBytes + 4 + tri * kTriangleBytes));
  }
  if (bytes.size() > expected)
    fail(ErrorKind::Parse, "STL has " + std::to_string(bytes.size() - expected) + " trailing bytes after byte " +
                               std::to_string(expected));

  TriMesh mesh;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> cells;
  auto weld = [&](const Vec3& p) -> std::uint32_t {
    const CellKey base{static_cast<std::int64_t>(std::floor(p[0] / kWeldTolerance)),
                       static_cast<std::int64_t>(std::floor(p[1] / kWeldTolerance)),
                       static_cast<std::int64_t>(std::floor(p[2] / kWeldTolerance))};
    for (std::int64_t dz = -1; dz <= 1; ++dz)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          const auto it = cells.find({base.x + dx, base.y + dy, base.z + dz});
          if (it == cells.end()) continue;
          for (auto v : it->second)
            if ((mesh.vertices[v] - p).norm() <= kWeldTolerance) return v;
        }
    const auto id = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    cells[base].push_back(id);
    return id;
  };

  mesh.faces.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::size_t offset = kHeaderBytes + 4 + kTriangleBytes * t;
    const unsigned char* rec = bytes.data() + offset;
    Face face{};
    for (int v = 0; v < 3; ++v) {
      const unsigned char* q = rec + 12 + 12 * v;
      const Vec3 p(get_f32(q), get_f32(q + 4), get_f32(q + 8));
      if (!p.allFinite()) fail(ErrorKind::Parse, "non-finite vertex at byte " + std::to_string(offset + 12 + 12 * v));
      face[v] = weld(p);
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
      fail(ErrorKind::Parse, "degenerate triangle at byte " + std::to_string(offset));
    mesh.faces.push_back(face);
  }
  return mesh;
}

TriMesh read_stl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_stl(bytes);
}

}  // namespace forge
