#include "csgs/cli.hpp"

#include <CLI11.hpp>
#include <fmt/ostream.h>

#include <cmath>
#include <ostream>

#include "csgs/config.hpp"
#include "csgs/diagnostics.hpp"
#include "csgs/errors.hpp"
#include "csgs/field_io.hpp"
#include "csgs/report_csv.hpp"

namespace csgs {

namespace {

struct Context {
    RunConfig cfg;
    std::filesystem::path out_dir;
    std::ostream& out;
};

// Raised when an assumption check fails; carries the exit code 2.
struct ValidationFailed {
    std::string message;
};

std::string node_text(const NodeCoord& x, int dim) {
    std::string s = "(";
    for (int a = 0; a < dim; ++a) s += fmt::format("{}{:.6g}", a ? ", " : "", x[static_cast<std::size_t>(a)]);
    return s + ")";
}

void print_validation(const ValidationReport& r, int dim, std::ostream& out) {
    fmt::print(out, "validation mode {}: {}\n", to_string(r.mode), r.overall ? "pass" : "FAIL");
    for (const auto& c : r.checks) {
        fmt::print(out, "  ({}) {}  worst {} vs bound {} at {}  {}\n", c.id, c.pass ? "pass" : "FAIL",
                   format_double(c.worst_value), format_double(c.bound), node_text(c.worst_node, dim), c.detail);
    }
    if (r.nu1) fmt::print(out, "  nu1 = {}, nu2 = {}\n", format_double(*r.nu1), format_double(*r.nu2));
    if (r.radial_constant) fmt::print(out, "  C = {} ({})\n", format_double(*r.radial_constant), r.radial_path);
}

ValidationReport require_valid(const Context& ctx, const PotentialSet& ps, ValidationMode mode,
                               const PotentialSet* reference, const Grid& grid, const std::string& file) {
    ValidationReport r = validate_assumptions(ps, mode, reference, grid, ctx.cfg.validation);
    write_report_csv(r, ctx.out_dir / file);
    print_validation(r, grid.dim(), ctx.out);
    if (!r.overall) {
        for (const auto& c : r.checks) {
            if (!c.pass)
                throw ValidationFailed{fmt::format("assumption ({}) fails at node {}: {}", c.id,
                                                   node_text(c.worst_node, grid.dim()), c.detail)};
        }
        throw ValidationFailed{"assumption check failed"};
    }
    return r;
}

std::optional<PotentialSet> reference_set(const RunConfig& cfg, const Grid& grid) {
    if (!cfg.reference) return std::nullopt;
    return sample_potentials(cfg.reference->defs, cfg.reference->delta, grid);
}

void print_solve(const SolveReport& r, const char* label, std::ostream& out) {
    fmt::print(out, "{}: c = {}  grad_norm = {}  iterations = {}  converged = {}{}\n", label, format_double(r.energy),
               format_double(r.grad_norm), r.iterations, r.converged ? "true" : "false",
               r.failure.empty() ? "" : "  (" + r.failure + ")");
}

int cmd_validate(Context& ctx) {
    const Grid grid(ctx.cfg.grid);
    const PotentialSet ps = sample_potentials(ctx.cfg.potentials, ctx.cfg.delta, grid);
    const auto ref = reference_set(ctx.cfg, grid);
    require_valid(ctx, ps, ctx.cfg.mode, ref ? &*ref : nullptr, grid, "validation.csv");
    return kExitOk;
}

int cmd_solve(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const Grid grid(cfg.grid);
    const PotentialSet ps = sample_potentials(cfg.potentials, cfg.delta, grid);
    const auto ref = reference_set(cfg, grid);
    require_valid(ctx, ps, cfg.mode, ref ? &*ref : nullptr, grid, "validation.csv");

    std::optional<FieldPair> initial;
    if (cfg.solver.init == InitKind::file) initial = read_field(cfg.init_file, grid);
    const SolveReport r = minimize_ground_state(ps, cfg.problem, grid, cfg.solver, initial ? &*initial : nullptr);
    write_report_csv(r, ctx.out_dir / "trace.csv");
    write_field(r.field, grid, ctx.out_dir / "ground_state.field");
    print_solve(r, "solve", ctx.out);
    return r.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.mu_values.empty()) throw ConfigError("[sweep] mu_values: mu_values must be non-empty");
    const Grid grid(cfg.grid);
    const PotentialSet ps = sample_potentials(cfg.potentials, cfg.delta, grid);
    const auto ref = reference_set(cfg, grid);
    require_valid(ctx, ps, cfg.mode, ref ? &*ref : nullptr, grid, "validation.csv");

    SweepOptions so;
    so.sobolev_constant = cfg.sobolev_constant;
    so.sobolev_grid = GridSpec{3, cfg.sobolev_half_width, cfg.sobolev_points, Boundary::periodic, LaplacianMode::spectral};
    so.sobolev = cfg.sobolev;
    so.cold_start_check = cfg.cold_start_check;
    const MuSweep s = sweep_mu(ps, cfg.problem, grid, cfg.mu_values, cfg.solver, so);
    write_report_csv(s, ctx.out_dir / "sweep.csv");

    bool all = true;
    for (std::size_t i = 0; i < s.mu_values.size(); ++i) {
        fmt::print(ctx.out, "mu = {}  c = {}  converged = {}{}{}\n", format_double(s.mu_values[i]),
                   format_double(s.energies[i]), s.converged[i] ? "true" : "false",
                   s.cold_energies.empty() ? "" : "  cold c = " + format_double(s.cold_energies[i]),
                   s.errors[i].empty() ? "" : "  (" + s.errors[i] + ")");
        all = all && s.converged[i];
    }
    if (s.threshold) {
        fmt::print(ctx.out, "S = {}  threshold S^(N/2)/N = {}\n", format_double(*s.sobolev_constant),
                   format_double(*s.threshold));
        if (s.mu0_estimate)
            fmt::print(ctx.out, "first mu below threshold: {}\n", format_double(*s.mu0_estimate));
        else
            fmt::print(ctx.out, "no mu below threshold\n");
    }
    return all ? kExitOk : kExitNotConverged;
}

int cmd_compare(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.reference) throw ConfigError("[reference]: required by compare (the periodic partner potentials)");
    const Grid grid(cfg.grid);
    const PotentialSet asym = sample_potentials(cfg.potentials, cfg.delta, grid);
    const PotentialSet periodic = sample_potentials(cfg.reference->defs, cfg.reference->delta, grid);
    require_valid(ctx, periodic, ValidationMode::periodic, nullptr, grid, "validation_reference.csv");
    require_valid(ctx, asym, ValidationMode::asymptotic, &periodic, grid, "validation.csv");

    const SolveReport rp = minimize_ground_state(periodic, cfg.problem, grid, cfg.solver);
    const SolveReport ra = minimize_ground_state(asym, cfg.problem, grid, cfg.solver);
    print_solve(rp, "periodic", ctx.out);
    print_solve(ra, "asymptotic", ctx.out);
    write_report_csv(rp, ctx.out_dir / "trace_periodic.csv");
    write_report_csv(ra, ctx.out_dir / "trace_asymptotic.csv");
    if (!rp.converged || !ra.converged) return kExitNotConverged;

    const ComparisonReport c = compare_energies(rp, ra, cfg.compare_margin);
    write_report_csv(c, ctx.out_dir / "comparison.csv");
    fmt::print(ctx.out, "gap = {}  margin = {}  {}\n", format_double(c.gap), format_double(c.margin),
               c.pass ? "pass" : "FAIL");
    return c.pass ? kExitOk : kExitValidationFailure;
}

int cmd_pohozaev(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const Grid grid(cfg.grid);
    const PotentialSet ps = sample_potentials(cfg.potentials, cfg.delta, grid);
    FieldPair fp;
    if (cfg.pohozaev_field.empty()) {
        fp = FieldPair{GridFunction(grid.size(), 0.0), sample_bubble(grid)};
        fmt::print(ctx.out, "candidate: Aubin-Talenti bubble in v, u = 0\n");
    } else {
        fp = read_field(cfg.pohozaev_field, grid);
        fmt::print(ctx.out, "candidate: {}\n", cfg.pohozaev_field);
    }
    const PohozaevReport r = pohozaev_residual(fp, ps, cfg.problem, grid);
    write_report_csv(r, ctx.out_dir / "pohozaev.csv");
    fmt::print(ctx.out, "lhs = {}  rhs = {}  residual = {}  relative = {}\n", format_double(r.lhs), format_double(r.rhs),
               format_double(r.residual), format_double(r.relative));
    fmt::print(ctx.out, "grad_norm = {}  critical point: {}  shell magnitude = {}\n", format_double(r.grad_norm),
               r.critical_point ? "yes" : "no", format_double(r.shell_magnitude));

    if (cfg.mode == ValidationMode::nonexistence) {
        const ValidationReport v = require_valid(ctx, ps, cfg.mode, nullptr, grid, "validation.csv");
        try {
            const NonexistenceReport n = nonexistence_certificate(fp, ps, v, cfg.problem, grid);
            write_report_csv(n, ctx.out_dir / "nonexistence.csv");
            fmt::print(ctx.out, "Q = {}  pohozaev side = {}  margin = {}\n", format_double(n.q_form),
                       format_double(n.pohozaev_side), format_double(n.margin));
        } catch (const InvalidArgument& e) {
            fmt::print(ctx.out, "no nonexistence certificate: {}\n", e.what());
        }
    }
    return kExitOk;
}

int cmd_sobolev(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const GridSpec spec{3, cfg.sobolev_half_width, cfg.sobolev_points, Boundary::periodic, LaplacianMode::spectral};
    const SobolevEstimate est = estimate_sobolev_constant(Grid(spec), cfg.sobolev);
    write_file_atomic(ctx.out_dir / "sobolev.csv", sobolev_csv(est, spec));
    fmt::print(ctx.out, "bubble quotient = {}  optimized quotient = {}  iterations = {}  converged = {}\n",
               format_double(est.bubble_quotient), format_double(est.optimized_quotient), est.iterations,
               est.converged ? "true" : "false");
    return est.converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ground states of linearly coupled Schrodinger systems", "csgs"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;

    using Handler = int (*)(Context&);
    const std::vector<std::tuple<const char*, const char*, Handler>> commands{
        {"validate", "check the potential assumptions", cmd_validate},
        {"solve", "minimize the energy on the Nehari manifold", cmd_solve},
        {"sweep", "solve along a list of mu values", cmd_sweep},
        {"compare", "compare periodic and asymptotically periodic ground-state energies", cmd_compare},
        {"pohozaev", "evaluate the Pohozaev residual of a field", cmd_pohozaev},
        {"sobolev", "estimate the sharp Sobolev constant in d = 3", cmd_sobolev},
    };
    Handler handler = nullptr;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run configuration (INI)")->required();
        sub->add_option("--out", out_dir, "output directory (default: [output] dir, else ./out)");
        sub->add_option("--seed", seed, "override [solver] seed");
        sub->callback([&handler, fn = fn] { handler = fn; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitConfigError;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (seed) cfg.solver.seed = *seed;
        Context ctx{std::move(cfg), {}, out};
        ctx.out_dir = out_dir.empty() ? std::filesystem::path(ctx.cfg.output_dir) : std::filesystem::path(out_dir);
        std::filesystem::create_directories(ctx.out_dir);
        return handler(ctx);
    } catch (const ValidationFailed& e) {
        fmt::print(err, "validation failure: {}\n", e.message);
        return kExitValidationFailure;
    } catch (const NonpositiveQuadraticForm& e) {
        fmt::print(err, "validation failure: {}\n", e.what());
        return kExitValidationFailure;
    } catch (const ConvergenceFailure& e) {
        fmt::print(err, "not converged: {}\n", e.what());
        return kExitNotConverged;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitConfigError;
    }
}

}  // namespace csgs
