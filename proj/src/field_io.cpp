#include "csgs/field_io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "csgs/errors.hpp"

namespace csgs {

namespace {

void put_u32(std::string& out, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t x = 0;
    for (int i = 3; i >= 0; --i) x = (x << 8) | p[i];
    return x;
}

double get_f64(const unsigned char* p) {
    std::uint64_t x = 0;
    for (int i = 7; i >= 0; --i) x = (x << 8) | p[i];
    return std::bit_cast<double>(x);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError(fmt::format("cannot open '{}' for writing", tmp.string()));
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw FormatError(fmt::format("write to '{}' failed", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

void write_field(const FieldPair& fp, const Grid& grid, const std::filesystem::path& path) {
    grid.check_conforms(fp);
    std::string out;
    out.reserve(kFieldHeaderBytes + 16 * grid.size());
    out += "CSGS";
    put_u32(out, kFieldFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(grid.dim()));
    put_u32(out, static_cast<std::uint32_t>(grid.points_per_dim()));
    put_f64(out, grid.spec().half_width);
    out.push_back(static_cast<char>(grid.periodic() ? 0 : 1));
    for (double x : fp.u) put_f64(out, x);
    for (double x : fp.v) put_f64(out, x);
    write_file_atomic(path, out);
}

FieldFile read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(fmt::format("cannot open field file '{}'", path.string()));
    const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());

    if (raw.size() < 4 || std::memcmp(p, "CSGS", 4) != 0) {
        std::string shown;
        for (std::size_t i = 0; i < std::min<std::size_t>(4, raw.size()); ++i) shown += fmt::format("{:02x}", p[i]);
        throw FormatError(fmt::format("bad magic: first 4 bytes are 0x{} (expected \"CSGS\")", shown));
    }
    if (raw.size() < kFieldHeaderBytes)
        throw FormatError(fmt::format("header short: expected {} bytes, got {}", kFieldHeaderBytes, raw.size()));
    const std::uint32_t version = get_u32(p + 4);
    if (version != kFieldFormatVersion)
        throw FormatError(fmt::format("unsupported field file version {} (expected {})", version, kFieldFormatVersion));

    FieldFile f;
    f.dim = static_cast<int>(get_u32(p + 8));
    f.points = static_cast<int>(get_u32(p + 12));
    f.half_width = get_f64(p + 16);
    const unsigned char b = p[24];
    if (b > 1) throw FormatError(fmt::format("unknown boundary code {}", b));
    f.boundary = b == 0 ? Boundary::periodic : Boundary::dirichlet;
    if (f.dim < 1 || f.dim > 3 || f.points < 1)
        throw FormatError(fmt::format("invalid header: dim={}, n={}", f.dim, f.points));

    std::size_t count = 1;
    for (int a = 0; a < f.dim; ++a) count *= static_cast<std::size_t>(f.points);
    const std::size_t expected = 2 * count * 8;
    const std::size_t have = raw.size() - kFieldHeaderBytes;
    if (have < expected)
        throw FormatError(fmt::format("payload short: expected 2*n^d*8 = {} bytes, got {}", expected, have));
    if (have > expected)
        throw FormatError(fmt::format("payload long: expected 2*n^d*8 = {} bytes, got {}", expected, have));

    f.field.u.resize(count);
    f.field.v.resize(count);
    const unsigned char* data = p + kFieldHeaderBytes;
    for (std::size_t k = 0; k < count; ++k) f.field.u[k] = get_f64(data + 8 * k);
    for (std::size_t k = 0; k < count; ++k) f.field.v[k] = get_f64(data + 8 * (count + k));
    return f;
}

FieldPair read_field(const std::filesystem::path& path, const Grid& grid) {
    FieldFile f = read_field(path);
    const auto& s = grid.spec();
    if (f.dim != s.dim || f.points != s.points || f.half_width != s.half_width || f.boundary != s.boundary)
        throw GridMismatch(fmt::format("field file '{}' (dim={}, n={}, L={}, {}) does not match the grid (dim={}, n={}, L={}, {})",
                                       path.string(), f.dim, f.points, f.half_width, to_string(f.boundary), s.dim,
                                       s.points, s.half_width, to_string(s.boundary)));
    return std::move(f.field);
}

}  // namespace csgs
