#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simopo/config.hpp"

namespace simopo {

inline constexpr const char* kVersion = "1.0.0";

/// One row of a scan table. S12 is empty for near-field scans.
struct ScanRow {
  std::string variable;
  double physical = 0.0;
  double scaled = 0.0;
  double v_minus = 1.0;
  double v_plus = 1.0;
  std::optional<double> s12;
  double pump = 0.0;  ///< pump ratio r of the row
};

struct ScanTable {
  std::string physical_unit;
  std::string scaled_unit;
  std::vector<ScanRow> rows;
};

/// Computes the table of a scan scenario (nearfield-scan, farfield-duan-scan,
/// epr-report) without touching the filesystem.
ScanTable compute_scan(const ScenarioConfig& config);

/// Pump ratios the scenario will use: absolute amplitudes are converted with
/// r = A lambda_max / plane_wave_gain. Throws AboveThresholdError for r >= 1.
std::vector<double> resolve_pump_ratios(const ScenarioConfig& config, const ModeDecomposition& decomp, double gain);

struct ScenarioResult {
  std::vector<std::filesystem::path> outputs;  ///< data files, summary last
  std::filesystem::path summary;
};

/// Runs one scenario and writes its outputs into config.output_path. Files are
/// staged under temporary names and renamed once everything succeeded; on any
/// error the staged files are removed and the exception propagates.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Process exit code for an exception from the library: 2 config, 3 domain, 4 numerical.
int exit_code_for(const std::exception& error);

}  // namespace simopo
