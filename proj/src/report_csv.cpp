#include "csgs/report_csv.hpp"

#include <fmt/format.h>

#include <cmath>

#include "csgs/field_io.hpp"

namespace csgs {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string trace_csv(const SolveReport& report) {
    std::string out = "iter,energy,grad_norm\n";
    for (const auto& t : report.trace)
        out += fmt::format("{},{},{}\n", t.iter, format_double(t.energy), format_double(t.grad_norm));
    return out;
}

std::string sweep_csv(const MuSweep& sweep) {
    std::string out = "mu,c,threshold,below_threshold\n";
    for (std::size_t i = 0; i < sweep.mu_values.size(); ++i) {
        const double c = sweep.energies[i];
        std::string threshold;
        std::string below;
        if (sweep.threshold) {
            threshold = format_double(*sweep.threshold);
            below = flag(std::isfinite(c) && c < *sweep.threshold);
        }
        out += fmt::format("{},{},{},{}\n", format_double(sweep.mu_values[i]), format_double(c), threshold, below);
    }
    return out;
}

std::string validation_csv(const ValidationReport& report) {
    std::string out = "id,pass,worst_value,bound,x,y,z,detail\n";
    for (const auto& c : report.checks) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", c.id, flag(c.pass), format_double(c.worst_value),
                           format_double(c.bound), format_double(c.worst_node[0]), format_double(c.worst_node[1]),
                           format_double(c.worst_node[2]), quote(c.detail));
    }
    return out;
}

std::string comparison_csv(const ComparisonReport& r) {
    return fmt::format("c_periodic,c_asymptotic,gap,margin,pass\n{},{},{},{},{}\n", format_double(r.c_periodic),
                       format_double(r.c_asymptotic), format_double(r.gap), format_double(r.margin), flag(r.pass));
}

std::string pohozaev_csv(const PohozaevReport& r) {
    std::string out = "quantity,value\n";
    auto row = [&](const char* name, double v) { out += fmt::format("{},{}\n", name, format_double(v)); };
    row("lhs", r.lhs);
    row("rhs", r.rhs);
    row("residual", r.residual);
    row("relative", r.relative);
    row("mu_u_crit", r.terms.mu_u_crit);
    row("v_crit", r.terms.v_crit);
    row("coupling", r.terms.coupling);
    row("radial_lambda", r.terms.radial_lambda);
    row("potential", r.terms.potential);
    row("radial_potential", r.terms.radial_potential);
    row("grad_norm", r.grad_norm);
    row("shell_magnitude", r.shell_magnitude);
    out += fmt::format("critical_point,{}\n", flag(r.critical_point));
    return out;
}

std::string nonexistence_csv(const NonexistenceReport& r) {
    std::string out = "quantity,value\n";
    auto row = [&](const char* name, double v) { out += fmt::format("{},{}\n", name, format_double(v)); };
    row("q_form", r.q_form);
    row("pohozaev_side", r.pohozaev_side);
    row("margin", r.margin);
    row("amgm_term", r.amgm_term);
    row("scaled_term", r.scaled_term);
    row("strict_gap", r.strict_gap);
    out += fmt::format("q_nonnegative,{}\npohozaev_nonpositive,{}\nlambda_sign,{}\n", flag(r.q_nonnegative),
                       flag(r.pohozaev_nonpositive), r.lambda_sign);
    return out;
}

std::string sobolev_csv(const SobolevEstimate& est, const GridSpec& grid) {
    return fmt::format("n,L,bubble_quotient,optimized_quotient,iterations,converged\n{},{},{},{},{},{}\n", grid.points,
                       format_double(grid.half_width), format_double(est.bubble_quotient),
                       format_double(est.optimized_quotient), est.iterations, flag(est.converged));
}

void write_report_csv(const SolveReport& r, const std::filesystem::path& path) { write_file_atomic(path, trace_csv(r)); }
void write_report_csv(const MuSweep& s, const std::filesystem::path& path) { write_file_atomic(path, sweep_csv(s)); }
void write_report_csv(const ValidationReport& r, const std::filesystem::path& path) {
    write_file_atomic(path, validation_csv(r));
}
void write_report_csv(const ComparisonReport& r, const std::filesystem::path& path) {
    write_file_atomic(path, comparison_csv(r));
}
void write_report_csv(const PohozaevReport& r, const std::filesystem::path& path) {
    write_file_atomic(path, pohozaev_csv(r));
}
void write_report_csv(const NonexistenceReport& r, const std::filesystem::path& path) {
    write_file_atomic(path, nonexistence_csv(r));
}

}  // namespace csgs
