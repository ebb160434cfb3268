#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csgs/functional.hpp"
#include "csgs/nehari.hpp"

namespace csgs {

enum class InitKind { gaussian_bump, random, file };
std::string to_string(InitKind k);
InitKind parse_init_kind(const std::string& s);

struct SolveOptions {
    int max_iters = 5000;
    double grad_tol = 1e-6;  // on the L² norm of the energy gradient
    double step0 = 1.0;
    double armijo_factor = 0.5;
    double armijo_c = 1e-4;
    int recenter_every = 50;  // 0 disables lattice recentering
    std::uint64_t seed = 0;
    InitKind init = InitKind::gaussian_bump;

    void validate() const;
    bool operator==(const SolveOptions&) const = default;
};

struct TraceEntry {
    int iter = 0;
    double energy = 0.0;
    double grad_norm = 0.0;
};

struct SolveReport {
    FieldPair field;
    double energy = 0.0;
    double grad_norm = 0.0;
    double quad = 0.0;  // B(field)
    int iterations = 0;
    std::vector<TraceEntry> trace;
    int recenters_applied = 0;
    bool converged = false;
    /// Set when the run stopped early (degenerate projection, stalled line search).
    std::string failure;
    std::string spec_hash;
    std::string potential_hash;
    std::string grid_hash;
};

/// Starting pair for InitKind::gaussian_bump / random; both components positive.
/// The bump is exp(−|x|²/(L/4)²) in u and half of it in v. The random start puts the
/// full bump in both components and multiplies every node by 1 + U(−½, ½).
FieldPair initial_field(const Grid& grid, const SolveOptions& opts);

/// Minimizes I over the Nehari manifold by preconditioned projected gradient descent.
/// `initial` overrides opts.init (InitKind::file requires it).
SolveReport minimize_ground_state(const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid,
                                  const SolveOptions& opts, const FieldPair* initial = nullptr);

/// Projects (|u|, |v|) onto the manifold and polishes it with a short descent run.
SolveReport nonneg_refine(const SolveReport& report, const PotentialSet& ps, const ProblemSpec& spec,
                          const Grid& grid, const SolveOptions& opts = {}, int polish_iters = 200);

/// L² norm of an energy gradient pair.
double gradient_norm(const FieldPair& g, const Grid& grid);

std::string hash_grid(const Grid& grid);
std::string hash_spec(const ProblemSpec& spec);
std::string hash_potentials(const PotentialSet& ps);

// ---------------------------------------------------------------- Sobolev --

struct SobolevOptions {
    int max_iters = 400;
    double rel_tol = 1e-10;  // on the relative decrease of the quotient per step
    double armijo_factor = 0.5;
    double armijo_c = 1e-4;
};

struct SobolevEstimate {
    double bubble_quotient = 0.0;     // ‖∇U‖²/‖U‖₆² at the sampled bubble
    double optimized_quotient = 0.0;  // minimal quotient reached by descent
    int iterations = 0;
    bool converged = false;
    GridFunction minimizer;
};

/// Aubin–Talenti bubble 3^{1/4} (1 + |x|²)^{−1/2} sampled on a d = 3 grid.
GridFunction sample_bubble(const Grid& grid);

/// ‖∇u‖₂² / ‖u‖₆² with the gradient part from ∫u(−Δu).
double sobolev_quotient(std::span<const double> u, const Grid& grid);

/// Descends the quotient over functions supported in the ball of radius L − 2h,
/// starting from the bubble shifted down to vanish on that sphere.
SobolevEstimate estimate_sobolev_constant(const Grid& grid, const SobolevOptions& opts = {});

// ------------------------------------------------------------------ sweeps --

struct SweepOptions {
    /// S for the threshold S^{N/2}/N; estimated on `sobolev_grid` when absent.
    std::optional<double> sobolev_constant;
    GridSpec sobolev_grid{3, 8.0, 64, Boundary::periodic, LaplacianMode::spectral};
    SobolevOptions sobolev;
    /// Also solve every μ independently from a `cold_init` start.
    bool cold_start_check = false;
    InitKind cold_init = InitKind::random;
};

struct MuSweep {
    std::vector<double> mu_values;
    std::vector<double> energies;
    std::vector<bool> converged;
    std::vector<std::string> errors;       // empty string when the solve succeeded
    std::vector<std::string> starts;       // "warm" or "fresh": which start gave the kept energy
    std::vector<double> cold_energies;     // filled when cold_start_check
    std::optional<double> threshold;       // S^{N/2}/N in the critical-q regime
    std::optional<double> sobolev_constant;
    std::optional<double> mu0_estimate;    // first μ with c(μ) < threshold
};

/// Each μ is solved from the previous minimizer and from a fresh start; the lower energy is kept.
MuSweep sweep_mu(const PotentialSet& ps, const ProblemSpec& spec_template, const Grid& grid,
                 const std::vector<double>& mu_values, const SolveOptions& opts, const SweepOptions& sweep = {});

// -------------------------------------------------------------- comparison --

struct ComparisonReport {
    double c_periodic = 0.0;
    double c_asymptotic = 0.0;
    double gap = 0.0;  // c_periodic − c_asymptotic
    double margin = 0.0;
    bool pass = false;
};

/// Checks c_asymptotic < c_periodic − margin, with 1e−9 slack.
ComparisonReport compare_energies(const SolveReport& periodic, const SolveReport& asymptotic, double margin = 0.0);

}  // namespace csgs
