#pragma once

#include <filesystem>
#include <string>

#include "csgs/diagnostics.hpp"
#include "csgs/potentials.hpp"
#include "csgs/solver.hpp"

namespace csgs {

/// Shortest-safe round-trip form: 17 significant digits.
std::string format_double(double x);

// Every writer emits a header row; floats use format_double.
std::string trace_csv(const SolveReport& report);           // iter,energy,grad_norm
std::string sweep_csv(const MuSweep& sweep);                // mu,c,threshold,below_threshold
std::string validation_csv(const ValidationReport& report); // id,pass,worst_value,bound,x,y,z,detail
std::string comparison_csv(const ComparisonReport& report); // c_periodic,c_asymptotic,gap,margin,pass
std::string pohozaev_csv(const PohozaevReport& report);     // quantity,value
std::string nonexistence_csv(const NonexistenceReport& report);  // quantity,value
std::string sobolev_csv(const SobolevEstimate& est, const GridSpec& grid);

void write_report_csv(const SolveReport& report, const std::filesystem::path& path);
void write_report_csv(const MuSweep& sweep, const std::filesystem::path& path);
void write_report_csv(const ValidationReport& report, const std::filesystem::path& path);
void write_report_csv(const ComparisonReport& report, const std::filesystem::path& path);
void write_report_csv(const PohozaevReport& report, const std::filesystem::path& path);
void write_report_csv(const NonexistenceReport& report, const std::filesystem::path& path);

}  // namespace csgs
