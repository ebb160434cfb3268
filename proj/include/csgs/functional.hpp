#pragma once

#include <string>

#include "csgs/grid.hpp"
#include "csgs/potentials.hpp"

namespace csgs {

enum class Regime { subcritical, critical_q, critical_both };
std::string to_string(Regime r);

/// Exponents and coupling parameter of the system
///   −Δu + V1 u = μ|u|^{p−2}u + λ v,   −Δv + V2 v = |v|^{q−2}v + λ u.
struct ProblemSpec {
    int dim = 1;
    double p = 4.0;
    double q = 4.0;
    double mu = 1.0;

    /// 2 < p ≤ q, μ ≥ 0; in d = 3 also q ≤ 6.
    void validate() const;
    Regime regime() const;
    bool operator==(const ProblemSpec&) const = default;
};

/// 2d/(d−2) for d ≥ 3; +∞ otherwise.
double critical_exponent(int dim);

struct EnergyBreakdown {
    double quad = 0.0;      // B(u,v) = ‖(u,v)‖²_E − 2∫λuv
    double coupling = 0.0;  // 2∫λuv
    double pterm = 0.0;     // (μ/p)‖u‖_p^p
    double qterm = 0.0;     // (1/q)‖v‖_q^q
    double total = 0.0;     // quad/2 − pterm − qterm
};

/// ‖u‖²_{E1} and ‖v‖²_{E2}, gradient parts via ∫u(−Δu).
struct EnergyNorms {
    double u = 0.0;
    double v = 0.0;
    double total() const { return u + v; }
};

EnergyNorms energy_norms(const FieldPair& fp, const PotentialSet& ps, const Grid& grid);

double quadratic_form(const FieldPair& fp, const PotentialSet& ps, const Grid& grid);

EnergyBreakdown energy(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid);

/// L²-representative of I′: pairing with (φ, ψ) under the grid quadrature gives the directional derivative.
FieldPair energy_gradient(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid);

/// J(u,v) = ⟨I′(u,v), (u,v)⟩ = B − μ‖u‖_p^p − ‖v‖_q^q.
double nehari_value(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec, const Grid& grid);

/// sign(x)|x|^{r}, with 0 ↦ 0.
double signed_power(double x, double r);

/// Inner product Σ w (a.u b.u + a.v b.v).
double pair_dot(const FieldPair& a, const FieldPair& b, const Grid& grid);

}  // namespace csgs
