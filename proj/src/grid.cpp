#include "csgs/grid.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "csgs/errors.hpp"

namespace csgs {

std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "dirichlet"; }
std::string to_string(LaplacianMode m) { return m == LaplacianMode::spectral ? "spectral" : "fd2"; }

Boundary parse_boundary(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "dirichlet") return Boundary::dirichlet;
    throw InvalidArgument(fmt::format("unknown boundary '{}' (expected periodic|dirichlet)", s));
}

LaplacianMode parse_laplacian_mode(const std::string& s) {
    if (s == "spectral") return LaplacianMode::spectral;
    if (s == "fd2") return LaplacianMode::fd2;
    throw InvalidArgument(fmt::format("unknown laplacian mode '{}' (expected spectral|fd2)", s));
}

void GridSpec::validate() const {
    if (dim < 1 || dim > 3) throw InvalidArgument(fmt::format("dim must be 1, 2 or 3 (got {})", dim));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw InvalidArgument(fmt::format("half_width must be positive (got {})", half_width));
    if (points < 8) throw InvalidArgument(fmt::format("points must be at least 8 (got {})", points));
    if (points % 2 != 0) throw InvalidArgument(fmt::format("n must be even (got {})", points));
    if (laplacian == LaplacianMode::spectral && boundary != Boundary::periodic)
        throw InvalidArgument("spectral laplacian requires periodic boundary");
}

namespace detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::size_t real_size = 0;
    std::size_t complex_size = 0;

    FftPlans(int dim, int n) {
        std::array<int, 3> dims{n, n, n};
        real_size = 1;
        for (int a = 0; a < dim; ++a) real_size *= static_cast<std::size_t>(n);
        complex_size = real_size / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);

        double* in = fftw_alloc_real(real_size);
        fftw_complex* out = fftw_alloc_complex(complex_size);
        {
            std::lock_guard lock(planner_mutex());
            forward = fftw_plan_dft_r2c(dim, dims.data(), in, out, FFTW_ESTIMATE);
            backward = fftw_plan_dft_c2r(dim, dims.data(), out, in, FFTW_ESTIMATE);
        }
        fftw_free(in);
        fftw_free(out);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
    ~FftPlans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
};

}  // namespace detail

Grid::Grid(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    const int n = spec_.points;
    const int d = spec_.dim;
    spacing_ = 2.0 * spec_.half_width / n;
    size_ = 1;
    for (int a = 0; a < d; ++a) size_ *= static_cast<std::size_t>(n);

    const double per_unit = n / (2.0 * spec_.half_width);
    const double rounded = std::round(per_unit);
    if (rounded >= 1.0 && std::abs(per_unit - rounded) < 1e-9 * per_unit) nodes_per_unit_ = static_cast<int>(rounded);

    const double cell = std::pow(spacing_, d);
    weights_.assign(size_, cell);
    pinned_.assign(size_, 0);
    if (spec_.boundary == Boundary::dirichlet) {
        for (std::size_t k = 0; k < size_; ++k) {
            const auto idx = node_index(k);
            for (int a = 0; a < d; ++a) {
                if (idx[a] == 0) pinned_[k] = 1;
            }
            if (pinned_[k]) weights_[k] = 0.0;
        }
        return;
    }

    plans_ = std::make_shared<detail::FftPlans>(d, n);
    // Symbol of −Δ on the r2c half spectrum; angular wavenumbers 2πm/(2L).
    const std::size_t half = static_cast<std::size_t>(n / 2 + 1);
    k2_.assign(plans_->complex_size, 0.0);
    auto symbol_1d = [&](int m) {
        const int mm = m <= n / 2 ? m : m - n;
        const double k = std::numbers::pi * mm / spec_.half_width;
        if (spec_.laplacian == LaplacianMode::spectral) return k * k;
        const double s = std::sin(0.5 * k * spacing_);
        return 4.0 * s * s / (spacing_ * spacing_);
    };
    std::vector<double> sym(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) sym[static_cast<std::size_t>(m)] = symbol_1d(m);
    for (std::size_t c = 0; c < plans_->complex_size; ++c) {
        std::size_t rest = c;
        double total = sym[rest % half];
        rest /= half;
        for (int a = 0; a + 1 < d; ++a) {
            total += sym[rest % static_cast<std::size_t>(n)];
            rest /= static_cast<std::size_t>(n);
        }
        k2_[c] = total;
    }
}

Grid build_grid(const GridSpec& spec) { return Grid(spec); }

std::array<int, 3> Grid::node_index(std::size_t k) const {
    std::array<int, 3> idx{0, 0, 0};
    const auto n = static_cast<std::size_t>(spec_.points);
    for (int a = spec_.dim - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(k % n);
        k /= n;
    }
    return idx;
}

std::size_t Grid::flat_index(const std::array<int, 3>& idx) const {
    std::size_t k = 0;
    for (int a = 0; a < spec_.dim; ++a) k = k * static_cast<std::size_t>(spec_.points) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
    return k;
}

NodeCoord Grid::node(std::size_t k) const {
    const auto idx = node_index(k);
    NodeCoord x{0.0, 0.0, 0.0};
    for (int a = 0; a < spec_.dim; ++a) x[static_cast<std::size_t>(a)] = -spec_.half_width + idx[static_cast<std::size_t>(a)] * spacing_;
    return x;
}

void Grid::check_conforms(std::span<const double> f, const char* what) const {
    if (f.size() != size_)
        throw GridMismatch(fmt::format("{} has {} samples, grid has {} nodes", what, f.size(), size_));
}

void Grid::check_conforms(const FieldPair& fp) const {
    check_conforms(fp.u, "u");
    check_conforms(fp.v, "v");
}

double Grid::integrate(std::span<const double> f) const {
    check_conforms(f);
    return integrate_expr([&](std::size_t k) { return f[k]; });
}

GridFunction Grid::apply_symbol(std::span<const double> f, const std::vector<double>& symbol) const {
    const std::size_t nc = plans_->complex_size;
    double* in = fftw_alloc_real(size_);
    fftw_complex* spec = fftw_alloc_complex(nc);
    std::copy(f.begin(), f.end(), in);
    fftw_execute_dft_r2c(plans_->forward, in, spec);
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t c = 0; c < nc; ++c) {
        const double m = symbol[c] * scale;
        spec[c][0] *= m;
        spec[c][1] *= m;
    }
    fftw_execute_dft_c2r(plans_->backward, spec, in);
    GridFunction out(in, in + size_);
    fftw_free(in);
    fftw_free(spec);
    return out;
}

GridFunction Grid::fd2_laplacian(std::span<const double> f) const {
    const int n = spec_.points;
    const int d = spec_.dim;
    const double inv_h2 = 1.0 / (spacing_ * spacing_);
    const bool per = periodic();
    GridFunction out(size_, 0.0);

    std::array<std::size_t, 3> stride{1, 1, 1};
    for (int a = d - 2; a >= 0; --a) stride[static_cast<std::size_t>(a)] = stride[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(n);

    auto value = [&](std::size_t k) { return pinned_[k] ? 0.0 : f[k]; };
    for (std::size_t k = 0; k < size_; ++k) {
        if (pinned_[k]) continue;
        const auto idx = node_index(k);
        const double centre = value(k);
        double acc = 0.0;
        for (int a = 0; a < d; ++a) {
            const auto s = stride[static_cast<std::size_t>(a)];
            const int i = idx[static_cast<std::size_t>(a)];
            double left = 0.0;
            double right = 0.0;
            if (per) {
                left = f[i == 0 ? k + s * static_cast<std::size_t>(n - 1) : k - s];
                right = f[i == n - 1 ? k - s * static_cast<std::size_t>(n - 1) : k + s];
            } else {
                left = value(k - s);  // i ≥ 1 here; index 0 is pinned
                right = i == n - 1 ? 0.0 : value(k + s);
            }
            acc += left - 2.0 * centre + right;
        }
        out[k] = acc * inv_h2;
    }
    return out;
}

GridFunction Grid::laplacian(std::span<const double> f) const {
    check_conforms(f);
    if (spec_.laplacian == LaplacianMode::fd2) return fd2_laplacian(f);
    std::vector<double> minus_k2(k2_.size());
    std::transform(k2_.begin(), k2_.end(), minus_k2.begin(), [](double k2) { return -k2; });
    return apply_symbol(f, minus_k2);
}

GridFunction Grid::solve_shifted(std::span<const double> f, double shift) const {
    check_conforms(f);
    if (!(shift > 0.0)) throw InvalidArgument("solve_shifted requires a positive shift");
    if (periodic()) {
        std::vector<double> inv(k2_.size());
        std::transform(k2_.begin(), k2_.end(), inv.begin(), [shift](double k2) { return 1.0 / (k2 + shift); });
        return apply_symbol(f, inv);
    }

    // Conjugate gradients on the unpinned nodes; the operator is SPD there.
    auto apply = [&](const GridFunction& x) {
        GridFunction y = fd2_laplacian(x);
        for (std::size_t k = 0; k < size_; ++k) y[k] = pinned_[k] ? 0.0 : shift * x[k] - y[k];
        return y;
    };
    auto dot = [&](const GridFunction& a, const GridFunction& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < size_; ++k) s += a[k] * b[k];
        return s;
    };
    GridFunction x(size_, 0.0);
    GridFunction r(f.begin(), f.end());
    for (std::size_t k = 0; k < size_; ++k) {
        if (pinned_[k]) r[k] = 0.0;
    }
    GridFunction p = r;
    double rr = dot(r, r);
    const double target = 1e-26 * std::max(rr, 1e-300);
    const std::size_t max_iter = 20 * static_cast<std::size_t>(spec_.points) * static_cast<std::size_t>(spec_.dim) + 100;
    for (std::size_t it = 0; it < max_iter && rr > target; ++it) {
        const GridFunction ap = apply(p);
        const double alpha = rr / dot(p, ap);
        for (std::size_t k = 0; k < size_; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < size_; ++k) p[k] = r[k] + beta * p[k];
    }
    if (rr > 1e-16 * std::max(dot(GridFunction(f.begin(), f.end()), GridFunction(f.begin(), f.end())), 1e-300))
        throw ConvergenceFailure("conjugate gradients did not converge in solve_shifted");
    return x;
}

GridFunction translate_lattice(std::span<const double> f, std::span<const int> shift, const Grid& grid) {
    grid.check_conforms(f);
    if (!grid.periodic()) throw InvalidArgument("lattice translation requires a periodic grid");
    if (static_cast<int>(shift.size()) != grid.dim())
        throw InvalidArgument(fmt::format("shift has {} components, grid dimension is {}", shift.size(), grid.dim()));
    const int per_unit = grid.nodes_per_unit();
    if (per_unit == 0)
        throw InvalidArgument(fmt::format("grid with n={} and L={} has a non-integral number of nodes per unit length",
                                          grid.points_per_dim(), grid.spec().half_width));
    const int n = grid.points_per_dim();
    std::array<int, 3> node_shift{0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
        const long long s = static_cast<long long>(shift[static_cast<std::size_t>(a)]) * per_unit;
        node_shift[static_cast<std::size_t>(a)] = static_cast<int>(((s % n) + n) % n);
    }
    GridFunction out(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        auto idx = grid.node_index(k);
        for (int a = 0; a < grid.dim(); ++a) {
            auto& i = idx[static_cast<std::size_t>(a)];
            i = (i + node_shift[static_cast<std::size_t>(a)]) % n;
        }
        out[k] = f[grid.flat_index(idx)];
    }
    return out;
}

FieldPair translate_lattice(const FieldPair& fp, std::span<const int> shift, const Grid& grid) {
    return {translate_lattice(fp.u, shift, grid), translate_lattice(fp.v, shift, grid)};
}

double lp_norm_pow(std::span<const double> f, double p, const Grid& grid) {
    grid.check_conforms(f);
    if (p == 2.0) return grid.integrate_expr([&](std::size_t k) { return f[k] * f[k]; });
    if (p == 4.0) return grid.integrate_expr([&](std::size_t k) { const double s = f[k] * f[k]; return s * s; });
    if (p == 6.0) return grid.integrate_expr([&](std::size_t k) { const double s = f[k] * f[k]; return s * s * s; });
    return grid.integrate_expr([&](std::size_t k) { return f[k] == 0.0 ? 0.0 : std::pow(std::abs(f[k]), p); });
}

}  // namespace csgs
