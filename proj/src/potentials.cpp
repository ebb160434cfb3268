#include "csgs/potentials.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "csgs/errors.hpp"

namespace csgs {

namespace {

double norm2(const NodeCoord& x, int dim) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
    return r2;
}

void require_finite(std::initializer_list<double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument(fmt::format("{} parameters must be finite", what));
    }
}

}  // namespace

PotentialDef PotentialDef::constant(double c) {
    require_finite({c}, "constant");
    PotentialDef d;
    d.kind_ = Kind::constant;
    d.params_ = {c, 0.0, 0.0};
    return d;
}

PotentialDef PotentialDef::cosine_lattice(double a, double b) {
    require_finite({a, b}, "cosine");
    PotentialDef d;
    d.kind_ = Kind::cosine_lattice;
    d.params_ = {a, b, 0.0};
    return d;
}

PotentialDef PotentialDef::gaussian_perturbed(double base, double amp, double sigma) {
    require_finite({base, amp, sigma}, "gaussian");
    if (!(sigma > 0.0)) throw InvalidArgument(fmt::format("gaussian sigma must be positive (got {})", sigma));
    PotentialDef d;
    d.kind_ = Kind::gaussian_perturbed;
    d.params_ = {base, amp, sigma};
    return d;
}

PotentialDef PotentialDef::radial_quadratic(double c) {
    require_finite({c}, "quadratic");
    PotentialDef d;
    d.kind_ = Kind::radial_quadratic;
    d.params_ = {c, 0.0, 0.0};
    return d;
}

PotentialDef PotentialDef::callback(Fn value, Fn radial) {
    if (!value) throw InvalidArgument("callback potential needs a value function");
    PotentialDef d;
    d.kind_ = Kind::callback;
    d.value_fn_ = std::move(value);
    d.radial_fn_ = std::move(radial);
    return d;
}

PotentialDef PotentialDef::parse(const std::string& text) {
    std::istringstream in(text);
    std::string kind;
    in >> kind;
    std::vector<double> args;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw InvalidArgument(fmt::format("potential '{}': '{}' is not a number", text, tok));
        args.push_back(v);
    }
    auto expect = [&](std::size_t count, const char* usage) {
        if (args.size() != count) throw InvalidArgument(fmt::format("potential '{}': expected '{}'", text, usage));
    };
    if (kind == "constant") {
        expect(1, "constant <c>");
        return constant(args[0]);
    }
    if (kind == "cosine") {
        expect(2, "cosine <a> <b>");
        return cosine_lattice(args[0], args[1]);
    }
    if (kind == "gaussian") {
        expect(3, "gaussian <base> <amp> <sigma>");
        return gaussian_perturbed(args[0], args[1], args[2]);
    }
    if (kind == "quadratic") {
        expect(1, "quadratic <c>");
        return radial_quadratic(args[0]);
    }
    throw InvalidArgument(
        fmt::format("potential '{}': unknown kind '{}' (expected constant|cosine|gaussian|quadratic)", text, kind));
}

std::string PotentialDef::to_string() const {
    const auto& p = params_;
    switch (kind_) {
        case Kind::constant: return fmt::format("constant {:.17g}", p[0]);
        case Kind::cosine_lattice: return fmt::format("cosine {:.17g} {:.17g}", p[0], p[1]);
        case Kind::gaussian_perturbed: return fmt::format("gaussian {:.17g} {:.17g} {:.17g}", p[0], p[1], p[2]);
        case Kind::radial_quadratic: return fmt::format("quadratic {:.17g}", p[0]);
        case Kind::callback: break;
    }
    throw InvalidArgument("callback potentials cannot be serialized");
}

double PotentialDef::value(const NodeCoord& x, int dim) const {
    const auto& p = params_;
    switch (kind_) {
        case Kind::constant: return p[0];
        case Kind::cosine_lattice: {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) s += std::cos(2.0 * std::numbers::pi * x[static_cast<std::size_t>(a)]);
            return p[0] + p[1] * s;
        }
        case Kind::gaussian_perturbed: return p[0] + p[1] * std::exp(-norm2(x, dim) / (p[2] * p[2]));
        case Kind::radial_quadratic: return p[0] * norm2(x, dim);
        case Kind::callback: return value_fn_(x);
    }
    return 0.0;
}

std::optional<double> PotentialDef::radial_derivative(const NodeCoord& x, int dim) const {
    const auto& p = params_;
    switch (kind_) {
        case Kind::constant: return 0.0;
        case Kind::cosine_lattice: {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) {
                const double xa = x[static_cast<std::size_t>(a)];
                s += xa * std::sin(2.0 * std::numbers::pi * xa);
            }
            return -2.0 * std::numbers::pi * p[1] * s;
        }
        case Kind::gaussian_perturbed: {
            const double r2 = norm2(x, dim);
            const double s2 = p[2] * p[2];
            return -2.0 * p[1] * r2 / s2 * std::exp(-r2 / s2);
        }
        case Kind::radial_quadratic: return 2.0 * p[0] * norm2(x, dim);
        case Kind::callback:
            if (radial_fn_) return radial_fn_(x);
            return std::nullopt;
    }
    return std::nullopt;
}

double PotentialDef::radial_derivative_fd(const NodeCoord& x, int dim, double step) const {
    double total = 0.0;
    for (int a = 0; a < dim; ++a) {
        const auto ax = static_cast<std::size_t>(a);
        if (x[ax] == 0.0) continue;
        auto at = [&](double offset) {
            NodeCoord y = x;
            y[ax] += offset;
            return value(y, dim);
        };
        const double d =
            (-at(2.0 * step) + 8.0 * at(step) - 8.0 * at(-step) + at(-2.0 * step)) / (12.0 * step);
        total += x[ax] * d;
    }
    return total;
}

PotentialSet sample_potentials(const std::array<PotentialDef, 3>& defs, double delta, const Grid& grid) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument(fmt::format("delta must lie in (0,1) (got {})", delta));
    PotentialSet ps;
    ps.defs = defs;
    ps.delta = delta;
    ps.periodic_flag = std::all_of(defs.begin(), defs.end(), [](const PotentialDef& d) { return d.lattice_periodic(); });
    const char* names[3] = {"V1", "V2", "lambda"};
    GridFunction* targets[3] = {&ps.V1, &ps.V2, &ps.lambda};
    for (int i = 0; i < 3; ++i) {
        auto& out = *targets[i];
        out.resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto x = grid.node(k);
            out[k] = defs[static_cast<std::size_t>(i)].value(x, grid.dim());
            if (!std::isfinite(out[k]))
                throw NonFiniteValue(fmt::format("{} is not finite at x=({}, {}, {})", names[i], x[0], x[1], x[2]));
        }
    }
    return ps;
}

std::string to_string(ValidationMode m) {
    switch (m) {
        case ValidationMode::periodic: return "periodic";
        case ValidationMode::periodic_strict: return "periodic-strict";
        case ValidationMode::asymptotic: return "asymptotic";
        case ValidationMode::asymptotic_strict: return "asymptotic-strict";
        case ValidationMode::nonexistence: return "nonexistence";
    }
    return "?";
}

ValidationMode parse_validation_mode(const std::string& s) {
    for (auto m : {ValidationMode::periodic, ValidationMode::periodic_strict, ValidationMode::asymptotic,
                   ValidationMode::asymptotic_strict, ValidationMode::nonexistence}) {
        if (to_string(m) == s) return m;
    }
    throw InvalidArgument(fmt::format(
        "unknown validation mode '{}' (expected periodic|periodic-strict|asymptotic|asymptotic-strict|nonexistence)", s));
}

const AssumptionCheck* ValidationReport::find(const std::string& id) const {
    for (const auto& c : checks) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

GridFunction sample_radial_derivative(const PotentialDef& def, const Grid& grid, bool force_fd, bool* analytic) {
    GridFunction out(grid.size());
    bool all_analytic = true;
    const double step = 0.5 * grid.spacing();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        std::optional<double> r;
        if (!force_fd) r = def.radial_derivative(x, grid.dim());
        if (!r) {
            all_analytic = false;
            r = def.radial_derivative_fd(x, grid.dim(), step);
        }
        out[k] = *r;
    }
    if (analytic != nullptr) *analytic = all_analytic;
    return out;
}

namespace {

double max_abs(std::span<const double> f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

// Tracks the node where `excess` is largest; pass = no positive excess.
struct WorstTracker {
    double excess = -std::numeric_limits<double>::infinity();
    std::size_t node = 0;
    double value = 0.0;
    double bound = 0.0;
    void offer(double e, std::size_t k, double v, double b) {
        if (e > excess) {
            excess = e;
            node = k;
            value = v;
            bound = b;
        }
    }
    AssumptionCheck finish(std::string id, bool pass, const Grid& grid, std::string detail) const {
        AssumptionCheck c;
        c.id = std::move(id);
        c.pass = pass;
        c.worst_value = value;
        c.bound = bound;
        if (grid.size() > 0) c.worst_node = grid.node(node);
        c.detail = std::move(detail);
        return c;
    }
};

AssumptionCheck check_coupling(const PotentialSet& ps, const Grid& grid, bool strict, const std::string& id) {
    WorstTracker t;
    bool pass = true;
    bool positive = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.is_pinned(k)) continue;
        const double bound = ps.delta * std::sqrt(std::max(ps.V1[k], 0.0) * std::max(ps.V2[k], 0.0));
        const double lam = ps.lambda[k];
        const double e = std::abs(lam) - bound;
        if (std::abs(lam) > bound * (1.0 + 1e-14)) pass = false;
        if (strict && !(lam > 0.0)) {
            positive = false;
            t.offer(std::numeric_limits<double>::max(), k, lam, 0.0);
        }
        t.offer(e, k, strict ? lam : std::abs(lam), bound);
    }
    std::string detail = strict ? "0 < lambda <= delta*sqrt(V1*V2)" : "|lambda| <= delta*sqrt(V1*V2)";
    if (!positive) detail += "; lambda not strictly positive";
    return t.finish(id, pass && positive, grid, detail);
}

AssumptionCheck check_periodicity(const PotentialSet& ps, const Grid& grid) {
    const int m = grid.nodes_per_unit();
    if (!grid.periodic() || m == 0 || m >= grid.points_per_dim())
        throw InvalidArgument(fmt::format("grid (n={}, L={}) does not resolve period 1", grid.points_per_dim(),
                                          grid.spec().half_width));
    WorstTracker t;
    bool pass = true;
    const GridFunction* fields[3] = {&ps.V1, &ps.V2, &ps.lambda};
    for (const auto* f : fields) {
        const double scale = std::max(1.0, max_abs(*f));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            for (int a = 0; a < grid.dim(); ++a) {
                auto idx = grid.node_index(k);
                auto& i = idx[static_cast<std::size_t>(a)];
                if (i + m >= grid.points_per_dim()) continue;
                i += m;
                const double diff = std::abs((*f)[grid.flat_index(idx)] - (*f)[k]);
                if (diff > 1e-12 * scale) pass = false;
                t.offer(diff, k, diff, 1e-12 * scale);
            }
        }
    }
    return t.finish("V1", pass, grid, "samples at x and x+e_i agree");
}

AssumptionCheck check_nonneg_and_nu(const PotentialSet& ps, const Grid& grid, const std::string& id,
                                    const std::optional<double>& nu1, const std::optional<double>& nu2) {
    WorstTracker t;
    bool pass = true;
    for (const auto* f : {&ps.V1, &ps.V2}) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (grid.is_pinned(k)) continue;
            if ((*f)[k] < 0.0) pass = false;
            t.offer(-(*f)[k], k, (*f)[k], 0.0);
        }
    }
    std::string detail = "V_i >= 0";
    if (nu1 && nu2) {
        detail += fmt::format("; nu1={:.10g}, nu2={:.10g} > 0", *nu1, *nu2);
        if (!(*nu1 > 1e-10) || !(*nu2 > 1e-10)) {
            pass = false;
            detail += " violated";
        }
    }
    return t.finish(id, pass, grid, detail);
}

AssumptionCheck check_asymptotic_order(const PotentialSet& ps, const PotentialSet& ref, const Grid& grid,
                                       const ValidationOptions& opts) {
    WorstTracker t;
    bool order_ok = true;
    // V_i < V_{i,o} and λ_o < λ, strictly, at every node.
    auto offer_order = [&](double smaller, double larger, std::size_t k) {
        const double e = smaller - larger;
        if (!(e < 0.0)) order_ok = false;
        t.offer(e, k, smaller, larger);
    };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.is_pinned(k)) continue;
        offer_order(ps.V1[k], ref.V1[k], k);
        offer_order(ps.V2[k], ref.V2[k], k);
        offer_order(ref.lambda[k], ps.lambda[k], k);
    }
    double tail = 0.0;
    const double shell = opts.shell_fraction * grid.spec().half_width;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        double inf_norm = 0.0;
        for (int a = 0; a < grid.dim(); ++a) inf_norm = std::max(inf_norm, std::abs(x[static_cast<std::size_t>(a)]));
        if (inf_norm < shell) continue;
        tail = std::max({tail, std::abs(ref.V1[k] - ps.V1[k]), std::abs(ref.V2[k] - ps.V2[k]),
                         std::abs(ps.lambda[k] - ref.lambda[k])});
    }
    const bool tail_ok = tail <= opts.tail_tol;
    auto c = t.finish("V4", order_ok && tail_ok, grid,
                      fmt::format("strict ordering {}; outer-shell deviation {:.3e} (tol {:.3e})",
                                  order_ok ? "holds" : "violated", tail, opts.tail_tol));
    return c;
}

}  // namespace

ValidationReport validate_assumptions(const PotentialSet& ps, ValidationMode mode, const PotentialSet* reference,
                                      const Grid& grid, const ValidationOptions& opts) {
    grid.check_conforms(ps.V1, "V1");
    grid.check_conforms(ps.V2, "V2");
    grid.check_conforms(ps.lambda, "lambda");
    const bool asymptotic = mode == ValidationMode::asymptotic || mode == ValidationMode::asymptotic_strict;
    if (asymptotic) {
        if (reference == nullptr) throw InvalidArgument("asymptotic validation requires a periodic reference set");
        grid.check_conforms(reference->V1, "reference V1");
        grid.check_conforms(reference->V2, "reference V2");
        grid.check_conforms(reference->lambda, "reference lambda");
    }

    ValidationReport rep;
    rep.mode = mode;

    auto spectrum = [&]() {
        if (!opts.estimate_spectrum) return;
        const bool nonneg = std::all_of(ps.V1.begin(), ps.V1.end(), [](double x) { return x >= 0.0; }) &&
                            std::all_of(ps.V2.begin(), ps.V2.end(), [](double x) { return x >= 0.0; });
        if (!nonneg) return;
        const auto [n1, n2] = estimate_nu(ps, grid, opts.nu);
        rep.nu1 = n1;
        rep.nu2 = n2;
    };

    switch (mode) {
        case ValidationMode::periodic:
        case ValidationMode::periodic_strict:
            rep.checks.push_back(check_periodicity(ps, grid));
            spectrum();
            rep.checks.push_back(check_nonneg_and_nu(ps, grid, "V2", rep.nu1, rep.nu2));
            rep.checks.push_back(check_coupling(ps, grid, false, "V3"));
            if (mode == ValidationMode::periodic_strict) rep.checks.push_back(check_coupling(ps, grid, true, "V3'"));
            break;
        case ValidationMode::asymptotic:
        case ValidationMode::asymptotic_strict:
            rep.checks.push_back(check_asymptotic_order(ps, *reference, grid, opts));
            spectrum();
            rep.checks.push_back(check_nonneg_and_nu(ps, grid, "V5", rep.nu1, rep.nu2));
            rep.checks.push_back(check_coupling(ps, grid, false, "V6"));
            if (mode == ValidationMode::asymptotic_strict) rep.checks.push_back(check_coupling(ps, grid, true, "V6'"));
            break;
        case ValidationMode::nonexistence: {
            rep.checks.push_back(check_coupling(ps, grid, false, "V6"));
            bool analytic = true;
            bool a1 = true;
            bool a2 = true;
            bool a3 = true;
            const auto r1 = sample_radial_derivative(ps.defs[0], grid, opts.force_finite_differences, &a1);
            const auto r2 = sample_radial_derivative(ps.defs[1], grid, opts.force_finite_differences, &a2);
            const auto rl = sample_radial_derivative(ps.defs[2], grid, opts.force_finite_differences, &a3);
            analytic = a1 && a2 && a3;
            rep.radial_path = analytic ? "analytic" : "finite-difference";

            const double tol_v = 1e-10 * std::max({1.0, max_abs(ps.V1), max_abs(ps.V2)});
            WorstTracker t7;
            bool pass7 = true;
            double c7 = 0.0;
            for (int i = 0; i < 2; ++i) {
                const auto& V = i == 0 ? ps.V1 : ps.V2;
                const auto& r = i == 0 ? r1 : r2;
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    if (V[k] < 0.0 || r[k] < -tol_v) {
                        pass7 = false;
                        t7.offer(std::numeric_limits<double>::max(), k, r[k], 0.0);
                    }
                    if (V[k] > 0.0) {
                        c7 = std::max(c7, r[k] / V[k]);
                        t7.offer(r[k] / V[k], k, r[k], V[k]);
                    } else if (std::abs(r[k]) > tol_v) {
                        pass7 = false;
                        t7.offer(std::numeric_limits<double>::max(), k, r[k], 0.0);
                    }
                }
            }
            auto chk7 = t7.finish("V7", pass7, grid, fmt::format("0 <= <grad V_i, x> <= C V_i with C = {:.12g}", c7));
            if (pass7) chk7.bound *= c7;
            rep.checks.push_back(chk7);

            const double tol_l = 1e-10 * std::max(1.0, max_abs(ps.lambda));
            WorstTracker t8;
            bool pass8 = true;
            double c8 = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double lam = ps.lambda[k];
                if (rl[k] > tol_l) {
                    pass8 = false;
                    t8.offer(std::numeric_limits<double>::max(), k, rl[k], 0.0);
                }
                if (lam != 0.0) {
                    const double ratio = std::abs(rl[k]) / std::abs(lam);
                    c8 = std::max(c8, ratio);
                    t8.offer(ratio, k, std::abs(rl[k]), std::abs(lam));
                } else if (std::abs(rl[k]) > tol_l) {
                    pass8 = false;
                    t8.offer(std::numeric_limits<double>::max(), k, rl[k], 0.0);
                }
            }
            auto chk8 = t8.finish(
                "V8", pass8, grid, fmt::format("<grad lambda, x> <= 0 and |<grad lambda, x>| <= C |lambda| with C = {:.12g}", c8));
            if (pass8) chk8.bound *= c8;
            rep.checks.push_back(chk8);
            rep.radial_constant = std::max(c7, c8);
            break;
        }
    }
    rep.overall = std::all_of(rep.checks.begin(), rep.checks.end(), [](const AssumptionCheck& c) { return c.pass; });
    return rep;
}

double estimate_nu(std::span<const double> potential, const Grid& grid, const NuOptions& opts) {
    grid.check_conforms(potential, "potential");
    const std::size_t n = grid.size();
    const double s = opts.shift;

    auto mask = [&](GridFunction& f) {
        for (std::size_t k = 0; k < n; ++k) {
            if (grid.is_pinned(k)) f[k] = 0.0;
        }
    };
    auto apply_a = [&](const GridFunction& x) {
        GridFunction y = grid.laplacian(x);
        for (std::size_t k = 0; k < n; ++k) y[k] = grid.is_pinned(k) ? 0.0 : potential[k] * x[k] - y[k];
        return y;
    };
    auto dot = [&](const GridFunction& a, const GridFunction& b) {
        return grid.integrate_expr([&](std::size_t k) { return a[k] * b[k]; });
    };
    double vmean = 0.0;
    for (double v : potential) vmean += v;
    vmean /= static_cast<double>(n);

    // Preconditioned CG on (A + s) x = b; the FFT-diagonal (−Δ + s + mean V) preconditions periodic grids.
    auto solve = [&](const GridFunction& b) {
        GridFunction x(n, 0.0);
        GridFunction r = b;
        auto precond = [&](const GridFunction& rr) {
            if (grid.periodic()) return grid.solve_shifted(rr, s + std::max(vmean, 0.0));
            return rr;
        };
        GridFunction z = precond(r);
        GridFunction p = z;
        double rz = dot(r, z);
        const double bnorm = std::sqrt(dot(b, b));
        for (int it = 0; it < 20000; ++it) {
            if (std::sqrt(dot(r, r)) <= 1e-14 * bnorm) break;
            GridFunction ap = apply_a(p);
            for (std::size_t k = 0; k < n; ++k) ap[k] += s * p[k];
            const double alpha = rz / dot(p, ap);
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            z = precond(r);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        }
        return x;
    };

    GridFunction x(n, 1.0);
    mask(x);
    double norm = std::sqrt(dot(x, x));
    for (auto& xi : x) xi /= norm;
    double rho = dot(x, apply_a(x));
    for (int it = 0; it < opts.max_iters; ++it) {
        GridFunction y = solve(x);
        mask(y);
        norm = std::sqrt(dot(y, y));
        for (std::size_t k = 0; k < n; ++k) x[k] = y[k] / norm;
        const double next = dot(x, apply_a(x));
        const double change = std::abs(next - rho);
        rho = next;
        if (change <= 1e-3 * opts.tolerance * std::max(1.0, std::abs(rho))) return rho;
    }
    throw ConvergenceFailure(fmt::format("inverse iteration for nu did not converge in {} iterations", opts.max_iters));
}

std::pair<double, double> estimate_nu(const PotentialSet& ps, const Grid& grid, const NuOptions& opts) {
    return {estimate_nu(ps.V1, grid, opts), estimate_nu(ps.V2, grid, opts)};
}

}  // namespace csgs
