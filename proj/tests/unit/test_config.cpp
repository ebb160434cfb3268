#include <doctest.h>

#include <string>

#include "csgs/config.hpp"
#include "csgs/errors.hpp"

using namespace csgs;

namespace {

const std::string kMinimal = R"(
[grid]
dim = 2
half_width = 3.5
points = 24

[problem]
p = 4
q = 5
)";

std::string with(const std::string& extra) { return kMinimal + extra; }

}  // namespace

TEST_CASE("minimal config picks up defaults") {
    const auto cfg = parse_config(kMinimal);
    CHECK(cfg.grid.dim == 2);
    CHECK(cfg.grid.half_width == 3.5);
    CHECK(cfg.grid.points == 24);
    CHECK(cfg.grid.boundary == Boundary::periodic);
    CHECK(cfg.problem.dim == 2);
    CHECK(cfg.problem.p == 4.0);
    CHECK(cfg.problem.q == 5.0);
    CHECK(cfg.problem.mu == 1.0);
    CHECK(cfg.mode == ValidationMode::periodic);
    CHECK_FALSE(cfg.reference);
    CHECK(cfg.mu_values.empty());
    CHECK(cfg.output_dir == "out");
}

TEST_CASE("parse and serialize are idempotent") {
    const auto full = with(R"(
# comment line
[potentials]
V1 = gaussian 2 -0.5 1
V2 = cosine 1.5 0.25
lambda = constant 0.3
delta = 0.75
mode = periodic-strict

[reference]
V1 = constant 2
V2 = constant 1.5
lambda = constant 0.3

[solver]
max_iters = 250
grad_tol = 1e-7
init = random
seed = 17

[sweep]
mu_values = 0, 0.5, 2
cold_start_check = true
sobolev_constant = 5.1

[compare]
margin = 0.01

[output]
dir = results
)");
    const auto a = parse_config(full);
    CHECK(a.delta == 0.75);
    CHECK(a.mode == ValidationMode::periodic_strict);
    REQUIRE(a.reference);
    CHECK(a.solver.max_iters == 250);
    CHECK(a.solver.seed == 17);
    CHECK(a.solver.init == InitKind::random);
    CHECK(a.mu_values == std::vector<double>{0.0, 0.5, 2.0});
    CHECK(a.cold_start_check);
    CHECK(a.sobolev_constant == 5.1);
    CHECK(a.compare_margin == 0.01);
    CHECK(a.output_dir == "results");

    const auto once = serialize_config(a);
    const auto b = parse_config(once);
    CHECK(serialize_config(b) == once);
    CHECK(b.mu_values == a.mu_values);
    CHECK(b.solver.grad_tol == a.solver.grad_tol);
    CHECK(serialize_config(parse_config(kMinimal)) == serialize_config(parse_config(serialize_config(parse_config(kMinimal)))));
}

TEST_CASE("unknown keys and sections are named") {
    CHECK_THROWS_WITH_AS(parse_config(with("[solver]\nmax_iter = 3\n")), "[solver] max_iter: unknown key", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("[solvers]\nmax_iters = 3\n")), "[solvers]: unknown section", ConfigError);
}

TEST_CASE("bad values name the key") {
    CHECK_THROWS_WITH_AS(parse_config(with("[solver]\ngrad_tol = abc\n")), doctest::Contains("[solver] grad_tol"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("[potentials]\ndelta = 1.5\n")), doctest::Contains("[potentials] delta"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("[potentials]\nV1 = wobbly 3\n")), doctest::Contains("[potentials] V1"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("[sweep]\nmu_values = 2, 1\n")), doctest::Contains("[sweep] mu_values"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("[sweep]\nmu_values = -1\n")), doctest::Contains("[sweep] mu_values"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(with("[solver]\ninit = file\n")), doctest::Contains("[solver] init_file"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[grid]\ndim = 2\nhalf_width = 1\npoints = 8\n"),
                         "[problem]: missing required section", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[grid]\ndim = 2\nhalf_width = 1\npoints = 8\n[problem]\nq = 4\n"),
                         doctest::Contains("[problem] p"), ConfigError);
    CHECK_THROWS_AS(parse_config(with("[reference]\nV1 = constant 1\n")), ConfigError);
}

TEST_CASE("an empty mu list parses") {
    const auto cfg = parse_config(with("[sweep]\nmu_values =\n"));
    CHECK(cfg.mu_values.empty());
}

TEST_CASE("config errors derive from FormatError") {
    CHECK_THROWS_AS(parse_config("[grid\n"), FormatError);
    CHECK_THROWS_AS(load_config("/nonexistent/path.ini"), ConfigError);
}
