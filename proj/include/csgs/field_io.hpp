#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "csgs/grid.hpp"

namespace csgs {

// Binary field file, all integers and floats little-endian:
//
//   offset  size  content
//   0       4     magic "CSGS"
//   4       4     format version (u32, currently 1)
//   8       4     dim (u32)
//   12      4     nodes per dimension n (u32)
//   16      8     half width L (f64)
//   24      1     boundary (u8: 0 periodic, 1 dirichlet)
//   25      8n^d  u, row-major, last axis fastest
//   ...     8n^d  v
inline constexpr std::uint32_t kFieldFormatVersion = 1;
inline constexpr std::size_t kFieldHeaderBytes = 25;

struct FieldFile {
    int dim = 0;
    int points = 0;
    double half_width = 0.0;
    Boundary boundary = Boundary::periodic;
    FieldPair field;
};

void write_field(const FieldPair& fp, const Grid& grid, const std::filesystem::path& path);
FieldFile read_field(const std::filesystem::path& path);
/// Reads and checks that the file was written on a grid with the same dim, n, L and boundary.
FieldPair read_field(const std::filesystem::path& path, const Grid& grid);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace csgs
