#pragma once

#include "csgs/functional.hpp"
#include "csgs/potentials.hpp"

namespace csgs {

/// Itemized right-hand side of the Pohozaev identity (d = 3, p = q = 6).
struct PohozaevTerms {
    double mu_u_crit = 0.0;       // μ∫|u|^6
    double v_crit = 0.0;          // ∫|v|^6
    double coupling = 0.0;        // 6∫λuv
    double radial_lambda = 0.0;   // 2∫⟨∇λ,x⟩uv
    double potential = 0.0;       // −3∫(V1u² + V2v²)
    double radial_potential = 0.0;  // −∫(⟨∇V1,x⟩u² + ⟨∇V2,x⟩v²)
    double sum() const { return mu_u_crit + v_crit + coupling + radial_lambda + potential + radial_potential; }
};

struct PohozaevReport {
    double lhs = 0.0;  // ∫(|∇u|² + |∇v|²)
    double rhs = 0.0;
    double residual = 0.0;
    double relative = 0.0;  // residual / max(1, |lhs|)
    PohozaevTerms terms;
    double grad_norm = 0.0;      // ‖I′(u,v)‖ in L²
    bool critical_point = true;  // grad_norm ≤ 1e−3
    double shell_magnitude = 0.0;  // max |u|,|v| on nodes with |x|∞ ≥ 0.8L
    std::string radial_path;
};

PohozaevReport pohozaev_residual(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec,
                                 const Grid& grid);

struct NonexistenceReport {
    double q_form = 0.0;          // Q = ∫(V1u² + V2v² − 2λuv), ≥ 0 under the coupling bound
    double pohozaev_side = 0.0;   // ∫⟨∇λ,x⟩uv − ½∫(⟨∇V1,x⟩u² + ⟨∇V2,x⟩v²), ≤ 0 under the radial bounds
    double margin = 0.0;          // q_form − pohozaev_side; a solution would need 0
    bool q_nonnegative = true;
    bool pohozaev_nonpositive = true;
    double amgm_term = 0.0;       // ∫(V1u² − 2√(V1V2)uv + V2v²)
    double scaled_term = 0.0;     // ∫(V1u² + V2v² − (2/δ)λuv)
    double strict_gap = 0.0;      // q_form − scaled_term = (2/δ − 2)∫λuv
    int lambda_sign = 0;          // +1, −1, 0 (λ ≡ 0) or 2 (mixed)
};

/// Evaluates the sign constraints that rule out positive solutions for a supplied positive candidate.
/// Requires a passing nonexistence-mode validation of `ps`.
NonexistenceReport nonexistence_certificate(const FieldPair& candidate, const PotentialSet& ps,
                                            const ValidationReport& validation, const ProblemSpec& spec,
                                            const Grid& grid);

/// ∫(V1u² + V2v² − 2λuv).
double coupled_potential_form(const FieldPair& fp, const PotentialSet& ps, const Grid& grid);

}  // namespace csgs
