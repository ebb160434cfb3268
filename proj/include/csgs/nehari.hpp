#pragma once

#include <utility>

#include "csgs/functional.hpp"

namespace csgs {

struct FiberingDiagnostics {
    double t_mu = 1.0;
    double g_at_t = 0.0;  // I(t u, t v)
    double t_lo = 1.0;
    double t_hi = 1.0;
    int iterations = 0;
    double residual = 0.0;  // |φ(t_mu)|
    double quad = 0.0;      // B(u, v) of the unscaled input
};

/// The three scalars that determine the fibering map g(t) = I(tu, tv):
///   g(t) = (t²/2) B − (t^p/p) a − (t^q/q) b,  a = μ‖u‖_p^p, b = ‖v‖_q^q.
struct FiberingCoefficients {
    double quad = 0.0;
    double a = 0.0;
    double b = 0.0;
};

FiberingCoefficients fibering_coefficients(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec,
                                           const Grid& grid);

/// Unique positive root of φ(t) = t^{p−2} a + t^{q−2} b − B.
FiberingDiagnostics solve_fibering(const FiberingCoefficients& c, double p, double q);

FiberingDiagnostics fibering_scale(const FieldPair& fp, const PotentialSet& ps, const ProblemSpec& spec,
                                   const Grid& grid);

/// (t_μ u, t_μ v), the point where the ray through (u, v) meets the Nehari manifold.
std::pair<FieldPair, FiberingDiagnostics> nehari_project(const FieldPair& fp, const PotentialSet& ps,
                                                         const ProblemSpec& spec, const Grid& grid);

}  // namespace csgs
