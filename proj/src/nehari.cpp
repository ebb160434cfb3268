#include "csgs/nehari.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "csgs/errors.hpp"

namespace csgs {

FiberingCoefficients fibering_coefficients(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec,
                                           const Grid& grid) {
    grid.check_conforms(fp);
    FiberingCoefficients c;
    c.quad = quadratic_form(fp, ps, grid);
    c.a = spec.mu == 0.0 ? 0.0 : spec.mu * lp_norm_pow(fp.u, spec.p, grid);
    c.b = lp_norm_pow(fp.v, spec.q, grid);
    return c;
}

FiberingDiagnostics solve_fibering(const FiberingCoefficients& c, double p, double q) {
    if (!(c.a + c.b > 0.0))
        throw DegenerateNonlinearity(
            "mu*|u|_p^p + |v|_q^q vanishes; the fibering map has no interior maximum (e.g. mu = 0 and v = 0)");
    if (!(c.quad > 0.0))
        throw NonpositiveQuadraticForm(fmt::format(
            "quadratic form B = {:.6g} is not positive; potentials violate the coupling bound", c.quad));

    const double tol = 1e-12 * std::max(1.0, c.quad);
    auto phi = [&](double t) { return std::pow(t, p - 2.0) * c.a + std::pow(t, q - 2.0) * c.b - c.quad; };
    auto dphi = [&](double t) {
        return (p - 2.0) * std::pow(t, p - 3.0) * c.a + (q - 2.0) * std::pow(t, q - 3.0) * c.b;
    };

    FiberingDiagnostics d;
    d.quad = c.quad;
    double lo = 1.0;
    double hi = 1.0;
    double f_one = phi(1.0);
    int iters = 0;
    // φ is strictly increasing on (0, ∞): expand geometrically towards the sign change.
    if (f_one < 0.0) {
        while (phi(hi) < 0.0) {
            lo = hi;
            hi *= 4.0;
            if (++iters > 2000 || !std::isfinite(hi)) throw ConvergenceFailure("fibering bracket expansion overflowed");
        }
    } else if (f_one > 0.0) {
        while (phi(lo) > 0.0) {
            hi = lo;
            lo *= 0.25;
            if (++iters > 2000 || lo == 0.0) throw ConvergenceFailure("fibering bracket expansion underflowed");
        }
    }
    d.t_lo = lo;
    d.t_hi = hi;

    double t = f_one == 0.0 ? 1.0 : 0.5 * (lo + hi);
    double f = phi(t);
    while (std::abs(f) > tol) {
        if (++iters > 500) throw ConvergenceFailure("fibering scale did not converge");
        if (f < 0.0) lo = t; else hi = t;
        const double slope = dphi(t);
        double next = t - f / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (next == t) break;
        t = next;
        f = phi(t);
    }
    d.t_mu = t;
    d.residual = std::abs(f);
    d.iterations = iters;
    d.g_at_t = 0.5 * t * t * c.quad - std::pow(t, p) / p * c.a - std::pow(t, q) / q * c.b;
    if (d.t_lo == d.t_hi) {
        d.t_lo = std::min(d.t_lo, t);
        d.t_hi = std::max(d.t_hi, t);
    }
    return d;
}

FiberingDiagnostics fibering_scale(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec,
                                   const Grid& grid) {
    grid.check_conforms(fp);
    const auto nonzero = [](double x) { return x != 0.0; };
    if (std::none_of(fp.u.begin(), fp.u.end(), nonzero) && std::none_of(fp.v.begin(), fp.v.end(), nonzero))
        throw ZeroField();
    return solve_fibering(fibering_coefficients(fp, ps, spec, grid), spec.p, spec.q);
}

std::pair<FieldPair, FiberingDiagnostics> nehari_project(const FieldPair& fp, const PotentialSet& ps,
                                                         const ProblemSpec& spec, const Grid& grid) {
    auto diag = fibering_scale(fp, ps, spec, grid);
    FieldPair out = fp;
    for (auto& x : out.u) x *= diag.t_mu;
    for (auto& x : out.v) x *= diag.t_mu;
    return {std::move(out), diag};
}

}  // namespace csgs
