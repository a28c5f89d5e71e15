#pragma once

// Serialization of results. CSV files always start with a header row, use
// '.' as the decimal separator and print doubles in shortest round-trip
// form, independent of the process locale.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "popeq/analysis.hpp"
#include "popeq/equilibrium.hpp"
#include "popeq/model.hpp"
#include "popeq/simulate.hpp"
#include "popeq/stationary.hpp"
#include "popeq/stein.hpp"

namespace popeq {

std::string format_double(double x);

nlohmann::json to_json(const EquilibriumInfo& info);
nlohmann::json to_json(const AssumptionReport& report);
nlohmann::json to_json(const StationaryDiagnostics& diag);
nlohmann::json to_json(const SteinBoundReport& report);
nlohmann::json to_json(const LogLogFit& fit);
nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json summary_json(const OccupationEstimate& est);

/// "state,probability" rows.
std::string lattice_csv(const LatticeDist& dist);
std::string convergence_csv(const ConvergenceReport& report);
inline constexpr const char* kConvergenceCsvHeader =
    "n,c,v_c,centre,tv_to_centred_poisson,kolmogorov,shift_tv,mean_abs_dev,second_moment_in,"
    "tail_mass,first_moment_out,second_diff_stein,boundary_mass,residual_norm,window_states";
/// Two columns, ln n and ln metric, for rows with a positive metric.
std::string plotdata(const ConvergenceReport& report, const std::string& metric);

/// Writes through a temporary file in the same directory and renames it
/// into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace popeq
