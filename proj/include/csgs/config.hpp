#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csgs/functional.hpp"
#include "csgs/grid.hpp"
#include "csgs/potentials.hpp"
#include "csgs/solver.hpp"

namespace csgs {

// Run configuration, one INI file per run:
//
//   [grid]        dim, half_width, points, boundary, laplacian
//   [problem]     p, q, mu
//   [potentials]  V1, V2, lambda, delta, mode, tail_tol, shell_fraction,
//                 estimate_nu, finite_differences
//   [reference]   V1, V2, lambda, delta          (optional; periodic partner)
//   [solver]      max_iters, grad_tol, step0, armijo_factor, armijo_c,
//                 recenter_every, seed, init, init_file
//   [sweep]       mu_values, cold_start_check, sobolev_constant
//   [sobolev]     half_width, points, max_iters, rel_tol
//   [compare]     margin
//   [pohozaev]    field
//   [output]      dir
//
// Every section except [grid] and [problem] may be omitted.
struct ReferencePotentials {
    std::array<PotentialDef, 3> defs;
    double delta = 0.5;
};

struct RunConfig {
    GridSpec grid;
    ProblemSpec problem;

    std::array<PotentialDef, 3> potentials{PotentialDef::constant(1.0), PotentialDef::constant(1.0),
                                           PotentialDef::constant(0.0)};
    double delta = 0.5;
    ValidationMode mode = ValidationMode::periodic;
    ValidationOptions validation;
    std::optional<ReferencePotentials> reference;

    SolveOptions solver;
    std::string init_file;

    std::vector<double> mu_values;
    bool cold_start_check = false;
    std::optional<double> sobolev_constant;

    double sobolev_half_width = 8.0;
    int sobolev_points = 64;
    SobolevOptions sobolev;

    double compare_margin = 0.0;
    std::string pohozaev_field;  // empty: substitute the bubble
    std::string output_dir = "out";
};

/// Parses and range-checks a config; errors name the offending "[section] key".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical form: every key written, floats with 17 significant digits.
std::string serialize_config(const RunConfig& cfg);

}  // namespace csgs
