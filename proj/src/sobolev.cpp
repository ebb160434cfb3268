#include <cmath>
#include <algorithm>

#include "csgs/errors.hpp"
#include "csgs/solver.hpp"

namespace csgs {

GridFunction sample_bubble(const Grid& grid) {
    if (grid.dim() != 3) throw InvalidArgument("the Aubin-Talenti bubble is sampled on d = 3 grids only");
    const double amp = std::pow(3.0, 0.25);
    GridFunction u(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.is_pinned(k)) continue;
        const auto x = grid.node(k);
        u[k] = amp / std::sqrt(1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    }
    return u;
}

double sobolev_quotient(std::span<const double> u, const Grid& grid) {
    grid.check_conforms(u);
    const auto lu = grid.laplacian(u);
    const double grad = grid.integrate_expr([&](std::size_t k) { return -u[k] * lu[k]; });
    const double m6 = lp_norm_pow(u, 6.0, grid);
    if (!(m6 > 0.0)) throw ZeroField();
    return grad / std::cbrt(m6);
}

SobolevEstimate estimate_sobolev_constant(const Grid& grid, const SobolevOptions& opts) {
    if (grid.dim() != 3) throw InvalidArgument("the sharp Sobolev constant is estimated on d = 3 grids only");

    // Functions vanish outside the ball of radius ρ inscribed in the box.
    const double rho = grid.spec().half_width - 2.0 * grid.spacing();
    std::vector<char> inside(grid.size(), 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        inside[k] = !grid.is_pinned(k) && x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < rho * rho;
    }
    auto mask = [&](GridFunction& f) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!inside[k]) f[k] = 0.0;
        }
    };

    SobolevEstimate est;
    GridFunction u = sample_bubble(grid);
    const double edge = std::pow(3.0, 0.25) / std::sqrt(1.0 + rho * rho);
    for (auto& x : u) x = std::max(x - edge, 0.0);
    mask(u);
    est.bubble_quotient = sobolev_quotient(u, grid);

    // Normalize ‖u‖₆ = 1; then the L² gradient of the quotient is 2(−Δu − R u⁵).
    auto normalize = [&](GridFunction& f) {
        const double s = std::pow(lp_norm_pow(f, 6.0, grid), -1.0 / 6.0);
        for (auto& x : f) x *= s;
    };
    normalize(u);
    double r = sobolev_quotient(u, grid);
    double alpha = 1.0;
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        const auto lu = grid.laplacian(u);
        GridFunction g(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double u2 = u[k] * u[k];
            g[k] = inside[k] ? 2.0 * (-lu[k] - r * u2 * u2 * u[k]) : 0.0;
        }
        GridFunction dir = grid.solve_shifted(g, 1.0);
        mask(dir);
        const double slope = grid.integrate_expr([&](std::size_t k) { return g[k] * dir[k]; });
        if (!(slope > 0.0)) {
            est.converged = true;
            break;
        }

        bool accepted = false;
        GridFunction trial;
        double r_trial = r;
        for (int bt = 0; bt < 60; ++bt, alpha *= opts.armijo_factor) {
            trial = u;
            for (std::size_t k = 0; k < grid.size(); ++k) trial[k] -= alpha * dir[k];
            normalize(trial);
            r_trial = sobolev_quotient(trial, grid);
            if (r_trial <= r - opts.armijo_c * alpha * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            est.converged = true;
            break;
        }
        const double decrease = (r - r_trial) / r;
        u = std::move(trial);
        r = r_trial;
        alpha = std::min(1.0, alpha / opts.armijo_factor);
        if (decrease < opts.rel_tol) {
            est.converged = true;
            ++it;
            break;
        }
    }
    est.iterations = it;
    est.optimized_quotient = r;
    est.minimizer = std::move(u);
    return est;
}

}  // namespace csgs
