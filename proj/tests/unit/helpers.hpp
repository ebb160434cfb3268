#pragma once

#include <random>

#include "csgs/grid.hpp"
#include "csgs/potentials.hpp"

namespace csgs::test {

inline GridFunction random_function(const Grid& grid, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    GridFunction f(grid.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = grid.is_pinned(k) ? 0.0 : d(rng);
    return f;
}

inline FieldPair random_pair(const Grid& grid, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    return {random_function(grid, rng, lo, hi), random_function(grid, rng, lo, hi)};
}

// Smooth random field: a few random Fourier modes under a Gaussian envelope.
inline FieldPair smooth_pair(const Grid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    FieldPair fp{GridFunction(grid.size()), GridFunction(grid.size())};
    const double L = grid.spec().half_width;
    for (auto* f : {&fp.u, &fp.v}) {
        double c[4];
        for (auto& x : c) x = d(rng);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (grid.is_pinned(k)) {
                (*f)[k] = 0.0;
                continue;
            }
            const auto x = grid.node(k);
            double r2 = 0.0, s = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                r2 += x[a] * x[a];
                s += x[a];
            }
            (*f)[k] = std::exp(-4.0 * r2 / (L * L)) * (1.0 + 0.5 * c[0] + c[1] * std::sin(s) + c[2] * std::cos(2.0 * s) +
                                                       0.3 * c[3] * std::sin(3.0 * s));
        }
    }
    return fp;
}

inline PotentialSet constant_set(const Grid& grid, double v1, double v2, double lambda, double delta = 0.5) {
    return sample_potentials({PotentialDef::constant(v1), PotentialDef::constant(v2), PotentialDef::constant(lambda)},
                             delta, grid);
}

}  // namespace csgs::test
