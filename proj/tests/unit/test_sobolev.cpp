#include <doctest.h>

#include <cmath>
#include <numbers>

#include "csgs/errors.hpp"
#include "csgs/solver.hpp"

using namespace csgs;

TEST_CASE("Sobolev quotient of a Gaussian matches the closed form") {
    // u = exp(−|x|²): ∫|∇u|² = 3(π/2)^{3/2}, (∫u⁶)^{1/3} = (π/6)^{1/2}.
    const Grid grid({3, 6.0, 48});
    GridFunction u(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        u[k] = std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    }
    const double pi = std::numbers::pi;
    const double expect = 3.0 * std::pow(pi / 2, 1.5) / std::sqrt(pi / 6);
    CHECK(sobolev_quotient(u, grid) == doctest::Approx(expect).epsilon(1e-10));

    GridFunction twice = u;
    for (auto& x : twice) x *= 2.0;
    CHECK(std::abs(sobolev_quotient(twice, grid) - sobolev_quotient(u, grid)) <= 1e-12 * sobolev_quotient(u, grid));
}

TEST_CASE("bubble sampling and estimator preconditions") {
    const Grid flat({2, 4.0, 16});
    CHECK_THROWS_AS(sample_bubble(flat), InvalidArgument);
    CHECK_THROWS_AS(estimate_sobolev_constant(flat), InvalidArgument);
    const Grid grid({3, 4.0, 16});
    const auto b = sample_bubble(grid);
    const std::size_t centre = grid.flat_index({8, 8, 8});
    CHECK(b[centre] == doctest::Approx(std::pow(3.0, 0.25)));
    CHECK_THROWS_AS(sobolev_quotient(GridFunction(grid.size(), 0.0), grid), ZeroField);
}

TEST_CASE("descent lowers the quotient and stays in the ball") {
    const Grid grid({3, 4.0, 16});
    SobolevOptions o;
    o.max_iters = 200;
    const auto est = estimate_sobolev_constant(grid, o);
    CHECK(std::isfinite(est.optimized_quotient));
    CHECK(est.optimized_quotient > 0.0);
    CHECK(est.optimized_quotient <= est.bubble_quotient);
    CHECK(est.converged);
    CHECK(lp_norm_pow(est.minimizer, 6.0, grid) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sobolev_quotient(est.minimizer, grid) == doctest::Approx(est.optimized_quotient).epsilon(1e-12));
    const double rho = grid.spec().half_width - 2 * grid.spacing();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] >= rho * rho) CHECK(est.minimizer[k] == 0.0);
    }

    o.max_iters = 0;
    const auto none = estimate_sobolev_constant(grid, o);
    CHECK_FALSE(none.converged);
    CHECK(none.optimized_quotient == doctest::Approx(none.bubble_quotient).epsilon(1e-12));
}
