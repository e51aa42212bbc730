#pragma once

#include "forge/trimesh.hpp"

#include <string>
#include <vector>

namespace forge {

inline constexpr double kWeldTolerance = 1e-7;

// Binary STL: 80-byte header, uint32 triangle count, then per triangle a float32
// normal, three float32 vertices and a zero uint16 attribute (little-endian).
std::vector<unsigned char> encode_stl(const TriMesh& mesh);
void write_stl(const TriMesh& mesh, const std::string& path);

// Decodes and re-welds coincident vertices (within kWeldTolerance). Malformed
// input raises Error(Parse) citing the byte offset.
TriMesh decode_stl(const std::vector<unsigned char>& bytes);
TriMesh read_stl(const std::string& path);

}  // namespace forge
