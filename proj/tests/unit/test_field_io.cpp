#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "csgs/errors.hpp"
#include "csgs/field_io.hpp"
#include "helpers.hpp"

using namespace csgs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "csgs_unit";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("field files round-trip bit-exactly") {
    std::mt19937_64 rng(31);
    const Grid grid({2, 2.5, 12, Boundary::dirichlet, LaplacianMode::fd2});
    auto fp = test::random_pair(grid, rng, -1e3, 1e3);
    fp.u[5] = -0.0;
    fp.v[7] = 5e-324;
    const auto path = scratch("roundtrip.field");
    write_field(fp, grid, path);
    CHECK(fs::file_size(path) == kFieldHeaderBytes + 2 * grid.size() * 8);

    const auto back = read_field(path, grid);
    REQUIRE(back.u.size() == fp.u.size());
    CHECK(std::memcmp(back.u.data(), fp.u.data(), fp.u.size() * 8) == 0);
    CHECK(std::memcmp(back.v.data(), fp.v.data(), fp.v.size() * 8) == 0);

    const auto file = read_field(path);
    CHECK(file.dim == 2);
    CHECK(file.points == 12);
    CHECK(file.half_width == 2.5);
    CHECK(file.boundary == Boundary::dirichlet);
}

TEST_CASE("header layout is little-endian") {
    const Grid grid({1, 1.0, 8});
    const FieldPair fp{GridFunction(8, 1.0), GridFunction(8, 2.0)};
    const auto path = scratch("layout.field");
    write_field(fp, grid, path);
    const auto raw = slurp(path);
    CHECK(raw.substr(0, 4) == "CSGS");
    CHECK(static_cast<unsigned char>(raw[4]) == 1);
    CHECK(static_cast<unsigned char>(raw[8]) == 1);
    CHECK(static_cast<unsigned char>(raw[12]) == 8);
    CHECK(static_cast<unsigned char>(raw[23]) == 0x3f);  // 1.0 = 0x3ff0000000000000
    CHECK(static_cast<unsigned char>(raw[24]) == 0);
}

TEST_CASE("malformed field files are rejected with specific messages") {
    const Grid grid({1, 1.0, 8});
    const FieldPair fp{GridFunction(8, 1.0), GridFunction(8, 2.0)};
    const auto good = scratch("good.field");
    write_field(fp, grid, good);
    const auto raw = slurp(good);
    const auto bad = scratch("bad.field");

    dump(bad, raw.substr(0, raw.size() - 8));
    CHECK_THROWS_WITH_AS(read_field(bad), "payload short: expected 2*n^d*8 = 128 bytes, got 120", FormatError);

    dump(bad, raw + "x");
    CHECK_THROWS_WITH_AS(read_field(bad), doctest::Contains("payload long"), FormatError);

    std::string wrong = raw;
    wrong.replace(0, 4, "ABCD");
    dump(bad, wrong);
    CHECK_THROWS_WITH_AS(read_field(bad), doctest::Contains("bad magic: first 4 bytes are 0x41424344"), FormatError);

    std::string version = raw;
    version[4] = 2;
    dump(bad, version);
    CHECK_THROWS_WITH_AS(read_field(bad), doctest::Contains("unsupported field file version 2"), FormatError);

    dump(bad, raw.substr(0, 10));
    CHECK_THROWS_AS(read_field(bad), FormatError);

    CHECK_THROWS_AS(read_field(scratch("missing.field")), FormatError);
}

TEST_CASE("reading onto a different grid fails") {
    const Grid grid({1, 1.0, 8});
    const auto path = scratch("grid.field");
    write_field({GridFunction(8, 1.0), GridFunction(8, 2.0)}, grid, path);
    CHECK_THROWS_AS(read_field(path, Grid({1, 2.0, 8})), GridMismatch);
    CHECK_THROWS_AS(read_field(path, Grid({1, 1.0, 8, Boundary::dirichlet, LaplacianMode::fd2})), GridMismatch);
}
