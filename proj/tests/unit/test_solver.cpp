#include <doctest.h>

#include <cmath>
#include <random>

#include "csgs/errors.hpp"
#include "csgs/solver.hpp"
#include "helpers.hpp"

using namespace csgs;

namespace {

const Grid& grid_1d() {
    static const Grid g({1, 4.0, 128});
    return g;
}

FieldPair bump_at(const Grid& grid, double centre) {
    FieldPair fp{GridFunction(grid.size()), GridFunction(grid.size())};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double x = grid.node(k)[0] - centre;
        const double L = grid.spec().half_width;
        if (x < -L) x += 2 * L;
        if (x >= L) x -= 2 * L;
        fp.u[k] = std::exp(-x * x);
        fp.v[k] = 0.8 * std::exp(-x * x);
    }
    return fp;
}

}  // namespace

TEST_CASE("SolveOptions validation") {
    SolveOptions o;
    CHECK_NOTHROW(o.validate());
    o.armijo_factor = 1.0;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
    o = {};
    o.grad_tol = 0.0;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
    o = {};
    o.max_iters = -1;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
    CHECK(parse_init_kind(to_string(InitKind::random)) == InitKind::random);
    CHECK_THROWS_AS(parse_init_kind("zeros"), InvalidArgument);
}

TEST_CASE("initial fields are positive and reproducible") {
    const auto& g = grid_1d();
    SolveOptions o;
    o.init = InitKind::random;
    o.seed = 5;
    const auto a = initial_field(g, o), b = initial_field(g, o);
    CHECK(a.u == b.u);
    o.seed = 6;
    CHECK(initial_field(g, o).u != a.u);
    for (double x : a.u) CHECK(x > 0.0);
}

TEST_CASE("decoupled system reproduces the scalar ground state 4/3") {
    // With λ = 0 and p = q = 4 the ground state is a single sech profile,
    // u = √2 sech x solving −u'' + u = u³, with energy ∫u⁴/4 = 4/3.
    const Grid grid({1, 8.0, 256});
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.0);
    const auto r = minimize_ground_state(ps, {1, 4, 4, 1}, grid, {});
    CHECK(r.converged);
    CHECK(r.energy == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("subcritical ground state: convergence, seeds, refinement") {
    const auto& grid = grid_1d();
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.3);
    const ProblemSpec spec{1, 4, 4, 1};
    SolveOptions o;
    o.init = InitKind::random;
    std::vector<double> energies;
    SolveReport last;
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        o.seed = seed;
        last = minimize_ground_state(ps, spec, grid, o);
        CHECK(last.converged);
        CHECK(last.grad_norm <= o.grad_tol);
        CHECK(last.energy > 0.0);
        energies.push_back(last.energy);

        for (std::size_t i = 1; i < last.trace.size(); ++i) CHECK(last.trace[i].energy <= last.trace[i - 1].energy);
        CHECK(std::abs(nehari_value(last.field, ps, spec, grid)) <= 1e-8 * std::max(1.0, last.quad));
        const double norm = energy_norms(last.field, ps, grid).total();
        CHECK(last.energy >= (0.5 - 1.0 / spec.p) * (1 - ps.delta) * norm - 1e-9);
    }
    for (double e : energies) CHECK(std::abs(e - energies[0]) <= 1e-6 * energies[0]);

    const auto refined = nonneg_refine(last, ps, spec, grid, o);
    CHECK(std::abs(refined.energy - last.energy) <= 1e-10 * std::max(1.0, last.energy));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(refined.field.u[k] > 0.0);
        CHECK(refined.field.v[k] > 0.0);
    }
}

TEST_CASE("a mixed-sign field loses energy under the nonnegative refinement") {
    const auto& grid = grid_1d();
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.3);
    const ProblemSpec spec{1, 4, 4, 1};
    const auto good = minimize_ground_state(ps, spec, grid, {});
    FieldPair mixed = good.field;
    for (auto& x : mixed.v) x = -x;
    SolveReport start;
    start.field = nehari_project(mixed, ps, spec, grid).first;
    start.energy = energy(start.field, ps, spec, grid).total;
    CHECK(start.energy > good.energy);
    const auto refined = nonneg_refine(start, ps, spec, grid, {});
    CHECK(refined.energy < start.energy);
    CHECK(refined.energy == doctest::Approx(good.energy).epsilon(1e-9));
}

TEST_CASE("zero budget returns the projected start") {
    const auto& grid = grid_1d();
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.3);
    SolveOptions o;
    o.max_iters = 0;
    const auto r = minimize_ground_state(ps, {1, 4, 4, 1}, grid, o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 0);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].energy == r.energy);
    CHECK_THROWS_AS(minimize_ground_state(ps, {2, 4, 4, 1}, grid, o), GridMismatch);
    o.init = InitKind::file;
    CHECK_THROWS_AS(minimize_ground_state(ps, {1, 4, 4, 1}, grid, o), InvalidArgument);
}

TEST_CASE("translated and sign-flipped starts reach the same energy") {
    const auto& grid = grid_1d();
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.3);
    const ProblemSpec spec{1, 4, 4, 1};
    SolveOptions o;
    o.init = InitKind::file;
    const auto centred = bump_at(grid, 0.0);
    const auto base = minimize_ground_state(ps, spec, grid, o, &centred);

    const std::vector<int> z{2};
    const auto shifted = translate_lattice(centred, z, grid);
    CHECK(minimize_ground_state(ps, spec, grid, o, &shifted).energy == doctest::Approx(base.energy).epsilon(1e-8));

    FieldPair flipped = centred;
    for (auto& x : flipped.u) x = -x;
    for (auto& x : flipped.v) x = -x;
    CHECK(minimize_ground_state(ps, spec, grid, o, &flipped).energy == doctest::Approx(base.energy).epsilon(1e-8));
}

TEST_CASE("recentering only for lattice-invariant potentials") {
    const auto& grid = grid_1d();
    const ProblemSpec spec{1, 4, 4, 1};
    SolveOptions o;
    o.init = InitKind::file;
    o.recenter_every = 1;
    const auto off = bump_at(grid, 2.0);

    const auto periodic = test::constant_set(grid, 1.0, 1.0, 0.3);
    const auto r = minimize_ground_state(periodic, spec, grid, o, &off);
    CHECK(r.recenters_applied >= 1);
    CHECK(r.converged);

    const auto asym = sample_potentials({PotentialDef::gaussian_perturbed(1.0, -0.2, 1.0), PotentialDef::constant(1.0),
                                         PotentialDef::constant(0.3)},
                                        0.5, grid);
    CHECK(minimize_ground_state(asym, spec, grid, o, &off).recenters_applied == 0);
}

TEST_CASE("subcritical sweep decreases in mu and agrees with cold starts") {
    const auto& grid = grid_1d();
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.3);
    SweepOptions so;
    so.cold_start_check = true;
    const auto s = sweep_mu(ps, {1, 4, 4, 1}, grid, {0.0, 1.0, 2.0, 4.0, 8.0}, {}, so);
    REQUIRE(s.energies.size() == 5);
    CHECK_FALSE(s.threshold);
    CHECK_FALSE(s.mu0_estimate);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(s.converged[i]);
        CHECK(s.errors[i].empty());
        CHECK(s.energies[i] == doctest::Approx(s.cold_energies[i]).epsilon(1e-8));
        if (i > 0) CHECK(s.energies[i] < s.energies[i - 1]);
    }
}

TEST_CASE("sweep input checks") {
    const auto& grid = grid_1d();
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.3);
    CHECK_THROWS_WITH_AS(sweep_mu(ps, {1, 4, 4, 1}, grid, {}, {}), "mu_values must be non-empty", InvalidArgument);
    CHECK_THROWS_AS(sweep_mu(ps, {1, 4, 4, 1}, grid, {1.0, 1.0}, {}), InvalidArgument);
    CHECK_THROWS_AS(sweep_mu(ps, {1, 4, 4, 1}, grid, {-1.0, 1.0}, {}), InvalidArgument);
}

TEST_CASE("sweep thresholds appear only in the critical-q regime") {
    const Grid grid({3, 3.0, 12});
    const auto ps = test::constant_set(grid, 1.0, 1.0, 0.3);
    SweepOptions so;
    so.sobolev_constant = 5.0;
    SolveOptions o;
    o.max_iters = 3;
    const auto s = sweep_mu(ps, {3, 4, 6, 1}, grid, {1.0}, o, so);
    REQUIRE(s.threshold);
    CHECK(*s.threshold == doctest::Approx(std::pow(5.0, 1.5) / 3.0));
    CHECK_FALSE(sweep_mu(ps, {3, 4, 5, 1}, grid, {1.0}, o, so).threshold);
}

TEST_CASE("periodic versus asymptotic comparison") {
    const Grid grid({1, 4.0, 128});
    const auto periodic = test::constant_set(grid, 2.0, 2.0, 0.4);
    const auto asym = sample_potentials({PotentialDef::gaussian_perturbed(2.0, -0.5, 1.0),
                                         PotentialDef::gaussian_perturbed(2.0, -0.5, 1.0),
                                         PotentialDef::gaussian_perturbed(0.4, 0.1, 1.0)},
                                        0.5, grid);
    const ProblemSpec spec{1, 4, 4, 1};
    const auto rp = minimize_ground_state(periodic, spec, grid, {});
    const auto ra = minimize_ground_state(asym, spec, grid, {});
    const auto c = compare_energies(rp, ra);
    CHECK(c.pass);
    CHECK(c.gap > 1e-9);
    CHECK_FALSE(compare_energies(rp, rp).pass);
    CHECK(compare_energies(rp, rp).gap == 0.0);
    const auto swapped = compare_energies(ra, rp);
    CHECK_FALSE(swapped.pass);
    CHECK(swapped.gap < 0.0);
    CHECK_FALSE(compare_energies(rp, ra, c.gap + 1.0).pass);

    auto other = rp;
    other.grid_hash = "different";
    CHECK_THROWS_AS(compare_energies(other, ra), GridMismatch);
    other = rp;
    other.spec_hash = "different";
    CHECK_THROWS_AS(compare_energies(other, ra), InvalidArgument);
}
