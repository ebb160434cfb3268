#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "csgs/errors.hpp"
#include "csgs/grid.hpp"
#include "helpers.hpp"

using namespace csgs;

namespace {

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace

TEST_CASE("GridSpec validation names the violated constraint") {
    CHECK_THROWS_WITH_AS(GridSpec({1, 4.0, 63}).validate(), "n must be even (got 63)", InvalidArgument);
    CHECK_THROWS_AS(GridSpec({4, 4.0, 64}).validate(), InvalidArgument);
    CHECK_THROWS_AS(GridSpec({1, 0.0, 64}).validate(), InvalidArgument);
    CHECK_THROWS_AS(GridSpec({1, 4.0, 6}).validate(), InvalidArgument);
    CHECK_THROWS_AS(GridSpec({1, 4.0, 64, Boundary::dirichlet, LaplacianMode::spectral}).validate(), InvalidArgument);
    CHECK_NOTHROW(GridSpec({1, 4.0, 64, Boundary::dirichlet, LaplacianMode::fd2}).validate());
}

TEST_CASE("node coordinates, spacing and quadrature weights") {
    const Grid g({2, 3.0, 12});
    CHECK(g.size() == 144);
    CHECK(g.spacing() == doctest::Approx(0.5));
    CHECK(g.node(0)[0] == -3.0);
    CHECK(g.node(0)[1] == -3.0);
    CHECK(g.node(1)[1] == doctest::Approx(-2.5));
    CHECK(g.node(12)[0] == doctest::Approx(-2.5));
    CHECK(g.flat_index(g.node_index(77)) == 77);
    const GridFunction one(g.size(), 1.0);
    CHECK(g.integrate(one) == doctest::Approx(36.0).epsilon(1e-15));
}

TEST_CASE("Dirichlet grids pin the lower faces and drop their weight") {
    const Grid g({2, 1.0, 8, Boundary::dirichlet, LaplacianMode::fd2});
    int pinned = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_pinned(k)) {
            ++pinned;
            CHECK(g.weights()[k] == 0.0);
        }
    }
    CHECK(pinned == 15);
}

TEST_CASE("spectral Laplacian is exact on resolved Fourier modes") {
    const Grid g({3, 2.0, 16});
    GridFunction f(g.size()), expect(g.size());
    const double k1 = std::numbers::pi * 2 / 2.0, k2 = std::numbers::pi * 3 / 2.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.node(k);
        f[k] = std::sin(k1 * x[0]) * std::cos(k2 * x[2]) + 0.5;
        expect[k] = -(k1 * k1 + k2 * k2) * std::sin(k1 * x[0]) * std::cos(k2 * x[2]);
    }
    CHECK(max_abs_diff(g.laplacian(f), expect) < 1e-11);
}

TEST_CASE("second-order stencil matches its symbol on a periodic mode") {
    const Grid g({1, 4.0, 64, Boundary::periodic, LaplacianMode::fd2});
    const double kx = std::numbers::pi * 5 / 4.0, h = g.spacing();
    GridFunction f(g.size()), expect(g.size());
    const double symbol = 4.0 / (h * h) * std::pow(std::sin(kx * h / 2), 2);
    for (std::size_t k = 0; k < g.size(); ++k) {
        f[k] = std::cos(kx * g.node(k)[0]);
        expect[k] = -symbol * f[k];
    }
    CHECK(max_abs_diff(g.laplacian(f), expect) < 1e-12);
}

TEST_CASE("stencil Laplacian converges at second order") {
    auto error = [](int n) {
        const Grid g({1, 3.0, n, Boundary::dirichlet, LaplacianMode::fd2});
        GridFunction f(g.size());
        double err = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) f[k] = std::exp(-g.node(k)[0] * g.node(k)[0] * 2.0);
        for (std::size_t k = 0; k < g.size(); ++k) f[k] = g.is_pinned(k) ? 0.0 : f[k];
        const auto lf = g.laplacian(f);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.is_pinned(k)) continue;
            const double x = g.node(k)[0];
            err = std::max(err, std::abs(lf[k] - (16 * x * x - 4) * std::exp(-2 * x * x)));
        }
        return err;
    };
    const double e1 = error(64), e2 = error(128);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("solve_shifted inverts -Laplacian + shift") {
    std::mt19937_64 rng(5);
    for (auto spec : {GridSpec{2, 3.0, 16}, GridSpec{2, 3.0, 16, Boundary::periodic, LaplacianMode::fd2},
                      GridSpec{2, 3.0, 16, Boundary::dirichlet, LaplacianMode::fd2}}) {
        const Grid g(spec);
        const auto f = test::random_function(g, rng);
        const auto x = g.solve_shifted(f, 0.7);
        const auto lx = g.laplacian(x);
        GridFunction back(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) back[k] = g.is_pinned(k) ? 0.0 : -lx[k] + 0.7 * x[k];
        CHECK(max_abs_diff(back, f) < 1e-8);
    }
    const Grid g({1, 2.0, 16});
    CHECK_THROWS_AS(g.solve_shifted(GridFunction(16, 1.0), 0.0), InvalidArgument);
}

TEST_CASE("lattice translation is a node permutation and preserves norms bit-exactly") {
    std::mt19937_64 rng(9);
    const Grid g({2, 2.0, 16});
    REQUIRE(g.nodes_per_unit() == 4);
    const auto fp = test::random_pair(g, rng);
    const std::vector<int> z{1, -3};
    const auto t = translate_lattice(fp, z, g);
    for (double p : {2.0, 3.0, 4.0, 6.0, 2.5}) {
        CHECK(lp_norm_pow(t.u, p, g) == lp_norm_pow(fp.u, p, g));
        CHECK(lp_norm_pow(t.v, p, g) == lp_norm_pow(fp.v, p, g));
    }
    // g(x) = f(x + z)
    const std::size_t k = g.flat_index({3, 5, 0});
    CHECK(t.u[k] == fp.u[g.flat_index({7, 9, 0})]);
    const std::vector<int> back{-1, 3};
    const auto round = translate_lattice(t, back, g);
    CHECK(round.u == fp.u);
    CHECK(round.v == fp.v);
}

TEST_CASE("lattice translation preconditions") {
    const Grid dir({1, 2.0, 16, Boundary::dirichlet, LaplacianMode::fd2});
    const std::vector<int> z{1};
    CHECK_THROWS_AS(translate_lattice(GridFunction(16, 0.0), z, dir), InvalidArgument);
    const Grid odd({1, 2.5, 16});
    CHECK(odd.nodes_per_unit() == 0);
    CHECK_THROWS_AS(translate_lattice(GridFunction(16, 0.0), z, odd), InvalidArgument);
    const Grid g({1, 2.0, 16});
    const std::vector<int> zz{1, 1};
    CHECK_THROWS_AS(translate_lattice(GridFunction(16, 0.0), zz, g), InvalidArgument);
}

TEST_CASE("lp norms match closed forms for a Gaussian") {
    const Grid g({1, 8.0, 256});
    GridFunction f(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) f[k] = std::exp(-g.node(k)[0] * g.node(k)[0]);
    for (double p : {2.0, 3.0, 4.0, 6.0}) CHECK(lp_norm_pow(f, p, g) == doctest::Approx(std::sqrt(std::numbers::pi / p)).epsilon(1e-13));
}

TEST_CASE("functions on a different grid are rejected") {
    const Grid g({1, 2.0, 16});
    CHECK_THROWS_AS(g.check_conforms(GridFunction(15, 0.0)), GridMismatch);
    CHECK_THROWS_AS(g.laplacian(GridFunction(32, 0.0)), GridMismatch);
}
