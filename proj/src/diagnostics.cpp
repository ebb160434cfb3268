#include "csgs/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "csgs/errors.hpp"
#include "csgs/solver.hpp"

namespace csgs {

namespace {

void require_doubly_critical(const ProblemSpec& spec, const Grid& grid) {
    if (grid.dim() != 3 || spec.dim != 3) throw InvalidArgument("Pohozaev diagnostics require d = 3");
    if (spec.p != 6.0 || spec.q != 6.0)
        throw InvalidArgument(fmt::format("Pohozaev diagnostics require p = q = 6 (got p={}, q={})", spec.p, spec.q));
}

}  // namespace

double coupled_potential_form(const FieldPair& fp, const PotentialSet& ps, const Grid& grid) {
    grid.check_conforms(fp);
    return grid.integrate_expr([&](std::size_t k) {
        const double u = fp.u[k];
        const double v = fp.v[k];
        return ps.V1[k] * u * u + ps.V2[k] * v * v - 2.0 * ps.lambda[k] * u * v;
    });
}

PohozaevReport pohozaev_residual(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec,
                                 const Grid& grid) {
    require_doubly_critical(spec, grid);
    grid.check_conforms(fp);
    const auto& u = fp.u;
    const auto& v = fp.v;

    PohozaevReport rep;
    const auto lu = grid.laplacian(u);
    const auto lv = grid.laplacian(v);
    rep.lhs = grid.integrate_expr([&](std::size_t k) { return -u[k] * lu[k] - v[k] * lv[k]; });

    bool a1 = true;
    bool a2 = true;
    bool a3 = true;
    const auto r1 = sample_radial_derivative(ps.defs[0], grid, false, &a1);
    const auto r2 = sample_radial_derivative(ps.defs[1], grid, false, &a2);
    const auto rl = sample_radial_derivative(ps.defs[2], grid, false, &a3);
    rep.radial_path = a1 && a2 && a3 ? "analytic" : "finite-difference";

    auto& t = rep.terms;
    t.mu_u_crit = spec.mu == 0.0 ? 0.0 : spec.mu * lp_norm_pow(u, 6.0, grid);
    t.v_crit = lp_norm_pow(v, 6.0, grid);
    t.coupling = 6.0 * grid.integrate_expr([&](std::size_t k) { return ps.lambda[k] * u[k] * v[k]; });
    t.radial_lambda = 2.0 * grid.integrate_expr([&](std::size_t k) { return rl[k] * u[k] * v[k]; });
    t.potential = -3.0 * grid.integrate_expr([&](std::size_t k) { return ps.V1[k] * u[k] * u[k] + ps.V2[k] * v[k] * v[k]; });
    t.radial_potential = -grid.integrate_expr([&](std::size_t k) { return r1[k] * u[k] * u[k] + r2[k] * v[k] * v[k]; });
    rep.rhs = t.sum();
    rep.residual = std::abs(rep.lhs - rep.rhs);
    rep.relative = rep.residual / std::max(1.0, std::abs(rep.lhs));

    rep.grad_norm = gradient_norm(energy_gradient(fp, ps, spec, grid), grid);
    rep.critical_point = rep.grad_norm <= 1e-3;

    const double shell = 0.8 * grid.spec().half_width;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        const double inf_norm = std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
        if (inf_norm >= shell) rep.shell_magnitude = std::max({rep.shell_magnitude, std::abs(u[k]), std::abs(v[k])});
    }
    return rep;
}

NonexistenceReport nonexistence_certificate(const FieldPair& candidate, const PotentialSet& ps,
                                            const ValidationReport& validation, const ProblemSpec& spec,
                                            const Grid& grid) {
    require_doubly_critical(spec, grid);
    grid.check_conforms(candidate);
    if (validation.mode != ValidationMode::nonexistence || !validation.overall)
        throw InvalidArgument("nonexistence certificate requires a passing nonexistence-mode validation");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.is_pinned(k)) continue;
        if (!(candidate.u[k] > 0.0) || !(candidate.v[k] > 0.0)) {
            const auto x = grid.node(k);
            throw InvalidArgument(fmt::format("candidate is not positive at node ({}, {}, {}): u={}, v={}", x[0], x[1],
                                              x[2], candidate.u[k], candidate.v[k]));
        }
    }
    const auto& u = candidate.u;
    const auto& v = candidate.v;
    const auto r1 = sample_radial_derivative(ps.defs[0], grid, false, nullptr);
    const auto r2 = sample_radial_derivative(ps.defs[1], grid, false, nullptr);
    const auto rl = sample_radial_derivative(ps.defs[2], grid, false, nullptr);

    NonexistenceReport rep;
    rep.q_form = coupled_potential_form(candidate, ps, grid);
    rep.pohozaev_side = grid.integrate_expr([&](std::size_t k) {
        return rl[k] * u[k] * v[k] - 0.5 * (r1[k] * u[k] * u[k] + r2[k] * v[k] * v[k]);
    });
    rep.margin = rep.q_form - rep.pohozaev_side;

    const double scale = grid.integrate_expr([&](std::size_t k) {
        return std::abs(ps.V1[k]) * u[k] * u[k] + std::abs(ps.V2[k]) * v[k] * v[k] + 2.0 * std::abs(ps.lambda[k] * u[k] * v[k]);
    });
    rep.q_nonnegative = rep.q_form >= -1e-12 * scale;
    rep.pohozaev_nonpositive = rep.pohozaev_side <= 1e-12 * std::max(1.0, std::abs(rep.pohozaev_side));

    rep.amgm_term = grid.integrate_expr([&](std::size_t k) {
        return ps.V1[k] * u[k] * u[k] - 2.0 * std::sqrt(ps.V1[k] * ps.V2[k]) * u[k] * v[k] + ps.V2[k] * v[k] * v[k];
    });
    rep.scaled_term = grid.integrate_expr([&](std::size_t k) {
        return ps.V1[k] * u[k] * u[k] + ps.V2[k] * v[k] * v[k] - 2.0 / ps.delta * ps.lambda[k] * u[k] * v[k];
    });
    const double lam_uv = grid.integrate_expr([&](std::size_t k) { return ps.lambda[k] * u[k] * v[k]; });
    rep.strict_gap = (2.0 / ps.delta - 2.0) * lam_uv;

    bool pos = false;
    bool neg = false;
    for (double l : ps.lambda) {
        pos = pos || l > 0.0;
        neg = neg || l < 0.0;
    }
    rep.lambda_sign = pos && neg ? 2 : pos ? 1 : neg ? -1 : 0;
    return rep;
}

}  // namespace csgs
