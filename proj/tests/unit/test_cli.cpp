#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "csgs/cli.hpp"

using namespace csgs;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return (fs::path(CSGS_CONFIG_DIR) / name).string(); }

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "csgs_cli" / name;
    fs::remove_all(dir);
    return dir;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("validate on the radial model pair succeeds") {
    const auto dir = fresh_dir("validate");
    const auto r = run({"validate", "--config", config("model_pair.ini"), "--out", dir.string()});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir / "validation.csv"));
    CHECK(read_all(dir / "validation.csv").rfind("id,pass,", 0) == 0);
}

TEST_CASE("a zero-budget solve exits with the convergence code") {
    const auto dir = fresh_dir("budget0");
    const auto r = run({"solve", "--config", config("solve_budget0.ini"), "--out", dir.string()});
    CHECK(r.code == kExitNotConverged);
    std::istringstream trace(read_all(dir / "trace.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(trace, line)) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("an empty sweep is a config error naming the key") {
    const auto r = run({"sweep", "--config", config("sweep_empty.ini"), "--out", fresh_dir("empty").string()});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("[sweep] mu_values") != std::string::npos);
}

TEST_CASE("argument errors") {
    CHECK(run({"solve"}).code == kExitConfigError);
    CHECK(run({}).code == kExitConfigError);
    CHECK(run({"frobnicate", "--config", config("model_pair.ini")}).code == kExitConfigError);
    CHECK(run({"validate", "--config", "/nonexistent.ini"}).code == kExitConfigError);
    CHECK(run({"solve", "--config", config("solve_budget0.ini"), "--seed", "x"}).code == kExitConfigError);
}

TEST_CASE("--seed overrides the configured seed") {
    const auto a = fresh_dir("seed_a"), b = fresh_dir("seed_b"), c = fresh_dir("seed_c");
    const auto cfg = config("solve_1d.ini");
    REQUIRE(run({"solve", "--config", cfg, "--out", a.string(), "--seed", "11"}).code == kExitOk);
    REQUIRE(run({"solve", "--config", cfg, "--out", b.string(), "--seed", "11"}).code == kExitOk);
    REQUIRE(run({"solve", "--config", cfg, "--out", c.string(), "--seed", "12"}).code == kExitOk);
    CHECK(read_all(a / "trace.csv") == read_all(b / "trace.csv"));
    CHECK(read_all(a / "trace.csv") != read_all(c / "trace.csv"));
    CHECK(fs::file_size(a / "ground_state.field") == fs::file_size(c / "ground_state.field"));
}
