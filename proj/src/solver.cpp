#include "csgs/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "csgs/errors.hpp"

namespace csgs {

std::string to_string(InitKind k) {
    switch (k) {
        case InitKind::gaussian_bump: return "gaussian-bump";
        case InitKind::random: return "random";
        case InitKind::file: return "file";
    }
    return "?";
}

InitKind parse_init_kind(const std::string& s) {
    if (s == "gaussian-bump") return InitKind::gaussian_bump;
    if (s == "random") return InitKind::random;
    if (s == "file") return InitKind::file;
    throw InvalidArgument(fmt::format("unknown init '{}' (expected gaussian-bump|random|file)", s));
}

void SolveOptions::validate() const {
    if (max_iters < 0) throw InvalidArgument(fmt::format("max_iters must be >= 0 (got {})", max_iters));
    if (!(grad_tol > 0.0)) throw InvalidArgument(fmt::format("grad_tol must be positive (got {})", grad_tol));
    if (!(step0 > 0.0)) throw InvalidArgument(fmt::format("step0 must be positive (got {})", step0));
    if (!(armijo_factor > 0.0 && armijo_factor < 1.0))
        throw InvalidArgument(fmt::format("armijo_factor must lie in (0,1) (got {})", armijo_factor));
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
        throw InvalidArgument(fmt::format("armijo_c must lie in (0,1) (got {})", armijo_c));
    if (recenter_every < 0) throw InvalidArgument(fmt::format("recenter_every must be >= 0 (got {})", recenter_every));
}

double gradient_norm(const FieldPair& g, const Grid& grid) { return std::sqrt(pair_dot(g, g, grid)); }

namespace {

// FNV-1a over raw bytes.
class Hasher {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ull;
        }
    }
    template <class T>
    void value(const T& x) { bytes(&x, sizeof(T)); }
    void doubles(std::span<const double> xs) { bytes(xs.data(), xs.size_bytes()); }
    std::string hex() const { return fmt::format("{:016x}", h_); }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace

std::string hash_grid(const Grid& grid) {
    Hasher h;
    const auto& s = grid.spec();
    h.value(s.dim);
    h.value(s.half_width);
    h.value(s.points);
    h.value(static_cast<int>(s.boundary));
    h.value(static_cast<int>(s.laplacian));
    return h.hex();
}

std::string hash_spec(const ProblemSpec& spec) {
    Hasher h;
    h.value(spec.dim);
    h.value(spec.p);
    h.value(spec.q);
    h.value(spec.mu);
    return h.hex();
}

std::string hash_potentials(const PotentialSet& ps) {
    Hasher h;
    h.doubles(ps.V1);
    h.doubles(ps.V2);
    h.doubles(ps.lambda);
    h.value(ps.delta);
    return h.hex();
}

FieldPair initial_field(const Grid& grid, const SolveOptions& opts) {
    const double width = grid.spec().half_width / 4.0;
    FieldPair fp{GridFunction(grid.size()), GridFunction(grid.size())};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.is_pinned(k)) continue;
        const auto x = grid.node(k);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        fp.u[k] = std::exp(-r2 / (width * width));
        fp.v[k] = opts.init == InitKind::random ? fp.u[k] : 0.5 * fp.u[k];
    }
    if (opts.init == InitKind::random) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> noise(-0.5, 0.5);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            fp.u[k] *= 1.0 + noise(rng);
            fp.v[k] *= 1.0 + noise(rng);
        }
    }
    return fp;
}

namespace {

// The problem is invariant under unit lattice steps along every axis.
bool lattice_invariant(const PotentialSet& ps, const Grid& grid) {
    if (!grid.periodic() || grid.nodes_per_unit() == 0) return false;
    for (int a = 0; a < grid.dim(); ++a) {
        std::vector<int> z(static_cast<std::size_t>(grid.dim()), 0);
        z[static_cast<std::size_t>(a)] = 1;
        for (const auto* f : {&ps.V1, &ps.V2, &ps.lambda}) {
            const auto shifted = translate_lattice(*f, z, grid);
            for (std::size_t k = 0; k < f->size(); ++k) {
                if (std::abs(shifted[k] - (*f)[k]) > 1e-12 * std::max(1.0, std::abs((*f)[k]))) return false;
            }
        }
    }
    return true;
}

// Integer lattice vector taking the densest node nearest the origin.
std::vector<int> recenter_shift(const FieldPair& fp, const Grid& grid) {
    std::size_t best = 0;
    double best_density = -1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double rho = fp.u[k] * fp.u[k] + fp.v[k] * fp.v[k];
        if (rho > best_density) {
            best_density = rho;
            best = k;
        }
    }
    const auto x = grid.node(best);
    std::vector<int> z(static_cast<std::size_t>(grid.dim()));
    for (int a = 0; a < grid.dim(); ++a) z[static_cast<std::size_t>(a)] = static_cast<int>(std::lround(x[static_cast<std::size_t>(a)]));
    return z;
}

double mean_or(std::span<const double> f, double fallback) {
    double s = 0.0;
    for (double x : f) s += x;
    s /= static_cast<double>(f.size());
    return s > 1e-3 ? s : fallback;
}

}  // namespace

SolveReport minimize_ground_state(const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid,
                                  const SolveOptions& opts, const FieldPair* initial) {
    spec.validate();
    opts.validate();
    if (spec.dim != grid.dim())
        throw GridMismatch(fmt::format("problem dimension {} differs from grid dimension {}", spec.dim, grid.dim()));
    if (opts.init == InitKind::file && initial == nullptr)
        throw InvalidArgument("init = file requires an initial field");

    SolveReport rep;
    rep.grid_hash = hash_grid(grid);
    rep.spec_hash = hash_spec(spec);
    rep.potential_hash = hash_potentials(ps);

    FieldPair start = initial != nullptr ? *initial : initial_field(grid, opts);
    grid.check_conforms(start);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.is_pinned(k)) start.u[k] = start.v[k] = 0.0;
    }

    auto [x, diag] = nehari_project(start, ps, spec, grid);
    double e = energy(x, ps, spec, grid).total;
    FieldPair g = energy_gradient(x, ps, spec, grid);
    double gn = gradient_norm(g, grid);
    rep.trace.push_back({0, e, gn});

    const double shift_u = mean_or(ps.V1, 1.0);
    const double shift_v = mean_or(ps.V2, 1.0);
    const bool can_recenter = opts.recenter_every > 0 && lattice_invariant(ps, grid);
    double alpha = opts.step0;
    int it = 0;
    for (; it < opts.max_iters && gn > opts.grad_tol; ++it) {
        FieldPair dir{grid.solve_shifted(g.u, shift_u), grid.solve_shifted(g.v, shift_v)};
        const double slope = pair_dot(g, dir, grid);
        const double reference = std::min(e, rep.trace.back().energy);

        bool accepted = false;
        FieldPair trial;
        double e_trial = 0.0;
        for (int bt = 0; bt < 80; ++bt, alpha *= opts.armijo_factor) {
            FieldPair y = x;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                y.u[k] -= alpha * dir.u[k];
                y.v[k] -= alpha * dir.v[k];
            }
            try {
                trial = nehari_project(y, ps, spec, grid).first;
            } catch (const DegenerateNonlinearity&) {
                continue;
            } catch (const ZeroField&) {
                continue;
            }
            e_trial = energy(trial, ps, spec, grid).total;
            if (e_trial <= reference - opts.armijo_c * alpha * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            rep.failure = fmt::format("line search stalled at iteration {} (grad_norm {:.3e})", it + 1, gn);
            break;
        }

        x = std::move(trial);
        e = e_trial;
        g = energy_gradient(x, ps, spec, grid);
        gn = gradient_norm(g, grid);
        rep.trace.push_back({it + 1, e, gn});
        alpha = std::min(opts.step0, alpha / opts.armijo_factor);

        if (can_recenter && (it + 1) % opts.recenter_every == 0) {
            const auto z = recenter_shift(x, grid);
            if (std::any_of(z.begin(), z.end(), [](int s) { return s != 0; })) {
                x = translate_lattice(x, z, grid);
                e = energy(x, ps, spec, grid).total;
                g = energy_gradient(x, ps, spec, grid);
                gn = gradient_norm(g, grid);
                ++rep.recenters_applied;
            }
        }
    }

    rep.iterations = it;
    rep.field = std::move(x);
    rep.energy = e;
    rep.grad_norm = gn;
    rep.quad = quadratic_form(rep.field, ps, grid);
    rep.converged = gn <= opts.grad_tol;
    return rep;
}

SolveReport nonneg_refine(const SolveReport& report, const PotentialSet& ps, const ProblemSpec& spec,
                          const Grid& grid, const SolveOptions& opts, int polish_iters) {
    grid.check_conforms(report.field);
    auto absolute = [](FieldPair fp) {
        for (auto& x : fp.u) x = std::abs(x);
        for (auto& x : fp.v) x = std::abs(x);
        return fp;
    };
    FieldPair start = absolute(report.field);

    SolveOptions polish = opts;
    polish.max_iters = polish_iters;
    polish.init = InitKind::file;
    SolveReport out = minimize_ground_state(ps, spec, grid, polish, &start);

    const bool negative = std::any_of(out.field.u.begin(), out.field.u.end(), [](double x) { return x < 0.0; }) ||
                          std::any_of(out.field.v.begin(), out.field.v.end(), [](double x) { return x < 0.0; });
    if (negative) {
        out.field = nehari_project(absolute(out.field), ps, spec, grid).first;
        out.energy = energy(out.field, ps, spec, grid).total;
        const auto g = energy_gradient(out.field, ps, spec, grid);
        out.grad_norm = gradient_norm(g, grid);
        out.quad = quadratic_form(out.field, ps, grid);
        out.converged = out.grad_norm <= opts.grad_tol;
    }
    out.iterations += report.iterations;
    out.recenters_applied += report.recenters_applied;
    return out;
}

MuSweep sweep_mu(const PotentialSet& ps, const ProblemSpec& spec_template, const Grid& grid,
                 const std::vector<double>& mu_values, const SolveOptions& opts, const SweepOptions& sweep) {
    if (mu_values.empty()) throw InvalidArgument("mu_values must be non-empty");
    for (std::size_t i = 0; i < mu_values.size(); ++i) {
        if (!(mu_values[i] >= 0.0)) throw InvalidArgument(fmt::format("mu_values[{}] must be >= 0", i));
        if (i > 0 && !(mu_values[i] > mu_values[i - 1]))
            throw InvalidArgument("mu_values must be strictly increasing");
    }
    spec_template.validate();

    MuSweep out;
    out.mu_values = mu_values;
    if (spec_template.regime() == Regime::critical_q) {
        out.sobolev_constant = sweep.sobolev_constant;
        if (!out.sobolev_constant) {
            out.sobolev_constant = estimate_sobolev_constant(build_grid(sweep.sobolev_grid), sweep.sobolev).optimized_quotient;
        }
        const double n = spec_template.dim;
        out.threshold = std::pow(*out.sobolev_constant, n / 2.0) / n;
    }

    auto attempt = [&](const ProblemSpec& spec, const SolveOptions& o, const FieldPair* init,
                       std::string& err) -> std::optional<SolveReport> {
        try {
            SolveReport r = minimize_ground_state(ps, spec, grid, o, init);
            if (!r.failure.empty()) err = r.failure;
            return r;
        } catch (const Error& ex) {
            err = ex.what();
            return std::nullopt;
        }
    };

    std::optional<FieldPair> warm;
    for (double mu : mu_values) {
        ProblemSpec spec = spec_template;
        spec.mu = mu;

        // Continuation alone cannot leave a branch once it is no longer the lowest,
        // so every μ is also solved from a fresh start and the lower energy is kept.
        SolveOptions fresh_opts = opts;
        if (fresh_opts.init == InitKind::file) fresh_opts.init = InitKind::gaussian_bump;
        std::string fresh_err;
        std::optional<SolveReport> best = attempt(spec, fresh_opts, nullptr, fresh_err);
        std::string best_err = fresh_err;
        std::string start = "fresh";
        if (warm) {
            SolveOptions o = opts;
            o.init = InitKind::file;
            std::string warm_err;
            auto r = attempt(spec, o, &*warm, warm_err);
            if (r && (!best || r->energy <= best->energy)) {
                best = std::move(r);
                best_err = warm_err;
                start = "warm";
            }
        }

        out.energies.push_back(best ? best->energy : std::nan(""));
        out.converged.push_back(best && best->converged);
        out.errors.push_back(best_err);
        out.starts.push_back(best ? start : "");
        if (best) warm = best->field;

        if (sweep.cold_start_check) {
            SolveOptions o = opts;
            o.init = sweep.cold_init;
            o.seed = opts.seed + 1;
            std::string ignored;
            auto r = attempt(spec, o, nullptr, ignored);
            out.cold_energies.push_back(r ? r->energy : std::nan(""));
        }
        const double c = out.energies.back();
        if (out.threshold && !out.mu0_estimate && std::isfinite(c) && c < *out.threshold) out.mu0_estimate = mu;
    }
    return out;
}

ComparisonReport compare_energies(const SolveReport& periodic, const SolveReport& asymptotic, double margin) {
    if (periodic.grid_hash != asymptotic.grid_hash) throw GridMismatch("compared reports live on different grids");
    if (periodic.spec_hash != asymptotic.spec_hash) throw InvalidArgument("compared reports use different problem specs");
    ComparisonReport c;
    c.c_periodic = periodic.energy;
    c.c_asymptotic = asymptotic.energy;
    c.gap = periodic.energy - asymptotic.energy;
    c.margin = margin;
    c.pass = c.gap > margin + 1e-9;
    return c;
}

}  // namespace csgs
