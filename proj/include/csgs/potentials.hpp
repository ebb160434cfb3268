#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "csgs/grid.hpp"

namespace csgs {

// Analytic potential definition, evaluated pointwise.
//
//   constant            c
//   cosine-lattice      a + b Σ_i cos(2π x_i)
//   gaussian-perturbed  base + amp exp(−|x|²/σ²)
//   radial-quadratic    c |x|²
//   user callback       value(x), optional radial derivative ⟨∇f(x), x⟩
class PotentialDef {
public:
    enum class Kind { constant, cosine_lattice, gaussian_perturbed, radial_quadratic, callback };
    using Fn = std::function<double(const NodeCoord&)>;

    static PotentialDef constant(double c);
    static PotentialDef cosine_lattice(double a, double b);
    static PotentialDef gaussian_perturbed(double base, double amp, double sigma);
    static PotentialDef radial_quadratic(double c);
    static PotentialDef callback(Fn value, Fn radial = {});

    /// Parses the config-file form, e.g. "gaussian 2 -0.5 1".
    static PotentialDef parse(const std::string& text);
    /// Inverse of parse; callbacks have no textual form and throw.
    std::string to_string() const;

    Kind kind() const { return kind_; }
    const std::array<double, 3>& params() const { return params_; }

    double value(const NodeCoord& x, int dim) const;
    /// ⟨∇f(x), x⟩ from the closed form or the supplied callback, if any.
    std::optional<double> radial_derivative(const NodeCoord& x, int dim) const;
    /// Fourth-order central differences of value() with step `step`.
    double radial_derivative_fd(const NodeCoord& x, int dim, double step) const;
    /// 1-periodic in every coordinate by construction.
    bool lattice_periodic() const { return kind_ == Kind::constant || kind_ == Kind::cosine_lattice; }

private:
    Kind kind_ = Kind::constant;
    std::array<double, 3> params_{};
    Fn value_fn_;
    Fn radial_fn_;
};

/// Sampled (V1, V2, λ) together with their definitions and the coupling constant δ.
struct PotentialSet {
    GridFunction V1;
    GridFunction V2;
    GridFunction lambda;
    std::array<PotentialDef, 3> defs;
    double delta = 0.5;
    bool periodic_flag = false;
};

PotentialSet sample_potentials(const std::array<PotentialDef, 3>& defs, double delta, const Grid& grid);

enum class ValidationMode { periodic, periodic_strict, asymptotic, asymptotic_strict, nonexistence };
std::string to_string(ValidationMode m);
ValidationMode parse_validation_mode(const std::string& s);

struct NuOptions {
    int max_iters = 500;
    double tolerance = 1e-8;  // on successive eigenvalue estimates
    double shift = 1e-2;
};

struct ValidationOptions {
    double tail_tol = 1e-2;
    double shell_fraction = 0.8;
    bool estimate_spectrum = true;
    /// Differentiate value() even when a closed-form radial derivative exists.
    bool force_finite_differences = false;
    NuOptions nu;
};

struct AssumptionCheck {
    std::string id;  // "V1", "V3'", "V7", ...
    bool pass = true;
    double worst_value = 0.0;  // offending quantity at the worst node
    double bound = 0.0;        // the bound it was compared against
    NodeCoord worst_node{0.0, 0.0, 0.0};
    std::string detail;
};

struct ValidationReport {
    ValidationMode mode = ValidationMode::periodic;
    std::vector<AssumptionCheck> checks;
    std::optional<double> nu1;
    std::optional<double> nu2;
    /// Smallest admissible C in (V7)/(V8), nonexistence mode only.
    std::optional<double> radial_constant;
    /// "analytic" or "finite-difference" for the radial derivatives used.
    std::string radial_path;
    bool overall = true;

    const AssumptionCheck* find(const std::string& id) const;
};

ValidationReport validate_assumptions(const PotentialSet& ps, ValidationMode mode, const PotentialSet* reference,
                                      const Grid& grid, const ValidationOptions& opts = {});

/// Smallest eigenvalues of −Δ + V1 and −Δ + V2 on the grid (inverse iteration).
std::pair<double, double> estimate_nu(const PotentialSet& ps, const Grid& grid, const NuOptions& opts = {});
double estimate_nu(std::span<const double> potential, const Grid& grid, const NuOptions& opts = {});

/// ⟨∇f, x⟩ sampled on the grid; sets *analytic to whether closed forms were used everywhere.
GridFunction sample_radial_derivative(const PotentialDef& def, const Grid& grid, bool force_fd, bool* analytic);

}  // namespace csgs
