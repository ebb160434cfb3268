#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "csgs/exact_sum.hpp"

namespace csgs {

enum class Boundary { periodic, dirichlet };
enum class LaplacianMode { spectral, fd2 };

std::string to_string(Boundary b);
std::string to_string(LaplacianMode m);
Boundary parse_boundary(const std::string& s);
LaplacianMode parse_laplacian_mode(const std::string& s);

/// Truncated box [-L, L)^d sampled with n nodes per axis.
struct GridSpec {
    int dim = 1;
    double half_width = 1.0;
    int points = 64;
    Boundary boundary = Boundary::periodic;
    LaplacianMode laplacian = LaplacianMode::spectral;

    /// Throws InvalidArgument naming the violated constraint.
    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

/// Real-valued samples on every node, row-major with the last axis fastest.
using GridFunction = std::vector<double>;

/// The unknown pair (u, v).
struct FieldPair {
    GridFunction u;
    GridFunction v;
};

using NodeCoord = std::array<double, 3>;

namespace detail {
struct FftPlans;
}

// Uniform tensor grid. Periodic grids use the rectangle rule (weight h^d at
// every node). Dirichlet grids pin every node with a coordinate equal to -L
// to zero and give it weight 0; together with the implied zero at +L this is
// the trapezoid rule for fields vanishing on the boundary.
//
// Grids are cheap to copy; copies share the FFT plans.
class Grid {
public:
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    int points_per_dim() const { return spec_.points; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return size_; }
    const std::vector<double>& weights() const { return weights_; }
    bool periodic() const { return spec_.boundary == Boundary::periodic; }

    NodeCoord node(std::size_t k) const;
    std::array<int, 3> node_index(std::size_t k) const;
    std::size_t flat_index(const std::array<int, 3>& idx) const;
    /// True for nodes pinned to zero by the Dirichlet boundary.
    bool is_pinned(std::size_t k) const { return pinned_[k] != 0; }

    /// Σ_k w_k f_k, correctly rounded (independent of node order).
    double integrate(std::span<const double> f) const;

    /// Σ_k w_k term(k) for a per-node expression, correctly rounded.
    template <class Term>
    double integrate_expr(Term&& term) const {
        ExactAccumulator acc;
        for (std::size_t k = 0; k < size_; ++k) {
            if (weights_[k] != 0.0) acc.add(weights_[k] * term(k));
        }
        return acc.result();
    }

    /// Δf (spectral multiplier −|k|² or second-order stencil).
    GridFunction laplacian(std::span<const double> f) const;

    /// Solves (−Δ + shift) x = f; shift > 0. FFT-diagonal on periodic grids,
    /// conjugate gradients on Dirichlet grids.
    GridFunction solve_shifted(std::span<const double> f, double shift) const;

    /// Nodes per unit length when the grid resolves integer lattice steps, otherwise 0.
    int nodes_per_unit() const { return nodes_per_unit_; }

    void check_conforms(std::span<const double> f, const char* what = "grid function") const;
    void check_conforms(const FieldPair& fp) const;

private:
    GridFunction fd2_laplacian(std::span<const double> f) const;
    GridFunction apply_symbol(std::span<const double> f, const std::vector<double>& symbol) const;

    GridSpec spec_;
    double spacing_ = 0.0;
    std::size_t size_ = 0;
    int nodes_per_unit_ = 0;
    std::vector<double> weights_;
    std::vector<char> pinned_;
    std::vector<double> k2_;       // −Δ symbol on the half spectrum (periodic only)
    std::shared_ptr<detail::FftPlans> plans_;
};

Grid build_grid(const GridSpec& spec);

/// Integer lattice translation g(x) = f(x + z); periodic grids only.
GridFunction translate_lattice(std::span<const double> f, std::span<const int> shift, const Grid& grid);
FieldPair translate_lattice(const FieldPair& fp, std::span<const int> shift, const Grid& grid);

/// Sum over nodes of w_k |f_k|^p.
double lp_norm_pow(std::span<const double> f, double p, const Grid& grid);

}  // namespace csgs
