#include "csgs/functional.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "csgs/errors.hpp"

namespace csgs {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical_q: return "critical-q";
        case Regime::critical_both: return "critical-both";
    }
    return "?";
}

double critical_exponent(int dim) {
    if (dim <= 2) return std::numeric_limits<double>::infinity();
    return 2.0 * dim / (dim - 2.0);
}

void ProblemSpec::validate() const {
    if (dim < 1 || dim > 3) throw InvalidArgument(fmt::format("dim must be 1, 2 or 3 (got {})", dim));
    if (!std::isfinite(p) || !std::isfinite(q)) throw InvalidArgument("p and q must be finite");
    if (!(p > 2.0)) throw InvalidArgument(fmt::format("p must exceed 2 (got {})", p));
    if (!(q >= p)) throw InvalidArgument(fmt::format("q must be at least p (got p={}, q={})", p, q));
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidArgument(fmt::format("mu must be a finite number >= 0 (got {})", mu));
    if (dim == 3 && q > critical_exponent(3))
        throw InvalidArgument(fmt::format("q must not exceed the critical exponent 6 in d=3 (got {})", q));
}

Regime ProblemSpec::regime() const {
    if (dim != 3 || q != 6.0) return Regime::subcritical;
    return p == 6.0 ? Regime::critical_both : Regime::critical_q;
}

double signed_power(double x, double r) {
    if (x == 0.0) return 0.0;
    if (r == 3.0) return x * x * x;
    if (r == 5.0) {
        const double x2 = x * x;
        return x2 * x2 * x;
    }
    if (r == 2.0) return x * std::abs(x);
    return std::copysign(std::exp(r * std::log(std::abs(x))), x);
}

namespace {

void check_inputs(const FieldPair& fp, const PotentialSet& ps, const Grid& grid) {
    grid.check_conforms(fp);
    grid.check_conforms(ps.V1, "V1");
    grid.check_conforms(ps.V2, "V2");
    grid.check_conforms(ps.lambda, "lambda");
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw NonFiniteValue(fmt::format("{} is not finite", what));
}

}  // namespace

EnergyNorms energy_norms(const FieldPair& fp, const PotentialSet& ps, const Grid& grid) {
    check_inputs(fp, ps, grid);
    const auto lu = grid.laplacian(fp.u);
    const auto lv = grid.laplacian(fp.v);
    const auto& u = fp.u;
    const auto& v = fp.v;
    EnergyNorms n;
    n.u = grid.integrate_expr([&](std::size_t k) { return -u[k] * lu[k] + ps.V1[k] * u[k] * u[k]; });
    n.v = grid.integrate_expr([&](std::size_t k) { return -v[k] * lv[k] + ps.V2[k] * v[k] * v[k]; });
    return n;
}

double quadratic_form(const FieldPair& fp, const PotentialSet& ps, const Grid& grid) {
    check_inputs(fp, ps, grid);
    const auto lu = grid.laplacian(fp.u);
    const auto lv = grid.laplacian(fp.v);
    const auto& u = fp.u;
    const auto& v = fp.v;
    return grid.integrate_expr([&](std::size_t k) {
        return -u[k] * lu[k] - v[k] * lv[k] + ps.V1[k] * u[k] * u[k] + ps.V2[k] * v[k] * v[k] -
               2.0 * ps.lambda[k] * u[k] * v[k];
    });
}

EnergyBreakdown energy(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid) {
    EnergyBreakdown e;
    e.quad = quadratic_form(fp, ps, grid);
    e.coupling = grid.integrate_expr([&](std::size_t k) { return 2.0 * ps.lambda[k] * fp.u[k] * fp.v[k]; });
    e.pterm = spec.mu == 0.0 ? 0.0 : spec.mu / spec.p * lp_norm_pow(fp.u, spec.p, grid);
    e.qterm = lp_norm_pow(fp.v, spec.q, grid) / spec.q;
    e.total = 0.5 * e.quad - e.pterm - e.qterm;
    require_finite(e.total, "energy");
    return e;
}

FieldPair energy_gradient(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid) {
    check_inputs(fp, ps, grid);
    const auto lu = grid.laplacian(fp.u);
    const auto lv = grid.laplacian(fp.v);
    FieldPair g{GridFunction(grid.size()), GridFunction(grid.size())};
    const double rp = spec.p - 1.0;
    const double rq = spec.q - 1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.is_pinned(k)) {
            g.u[k] = 0.0;
            g.v[k] = 0.0;
            continue;
        }
        const double u = fp.u[k];
        const double v = fp.v[k];
        g.u[k] = -lu[k] + ps.V1[k] * u - spec.mu * signed_power(u, rp) - ps.lambda[k] * v;
        g.v[k] = -lv[k] + ps.V2[k] * v - signed_power(v, rq) - ps.lambda[k] * u;
        if (!std::isfinite(g.u[k]) || !std::isfinite(g.v[k]))
            throw NonFiniteValue(fmt::format("energy gradient is not finite at node {}", k));
    }
    return g;
}

double nehari_value(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid) {
    const double b = quadratic_form(fp, ps, grid);
    const double up = spec.mu == 0.0 ? 0.0 : spec.mu * lp_norm_pow(fp.u, spec.p, grid);
    const double vq = lp_norm_pow(fp.v, spec.q, grid);
    const double j = b - up - vq;
    require_finite(j, "Nehari functional");
    return j;
}

double pair_dot(const FieldPair& a, const FieldPair& b, const Grid& grid) {
    grid.check_conforms(a);
    grid.check_conforms(b);
    return grid.integrate_expr([&](std::size_t k) { return a.u[k] * b.u[k] + a.v[k] * b.v[k]; });
}

}  // namespace csgs
