#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "simopo/detection.hpp"
#include "simopo/grid.hpp"
#include "simopo/modes.hpp"
#include "simopo/physics.hpp"

namespace simopo {

enum class ScenarioKind {
  CoherenceReport,
  SelfImagingCheck,
  KernelDump,
  ModesReport,
  NearfieldScan,
  FarfieldDuanScan,
  EprReport
};

enum class ScanVariable { None, Position, Radius, Separation };
enum class OutputFormat { Csv, Json };
enum class PairGeometry { SplitDisk, PixelPair };

std::string to_string(ScenarioKind kind);
std::string to_string(ScanVariable variable);
std::string to_string(OutputFormat format);

/// Accepts "nearfield-scan", "nearfield-scan(radius)" and the like. The
/// variant, if present, is returned through `variable`. Throws UsageError.
ScenarioKind parse_scenario(const std::string& text, ScanVariable* variable = nullptr);

struct ScanSpec {
  ScanVariable variable = ScanVariable::None;
  double start = 0.0;  ///< SI: meters (position grids) or 1/m (wavevector grids)
  double stop = 0.0;
  int steps = 0;       ///< ignored for radius scans, which step one pixel shell at a time
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::CoherenceReport;
  PhysicalParams physical;
  bool pump_flat = false;
  /// Pump strengths. With absolute amplitudes, 1 is the plane-wave threshold;
  /// otherwise the values are ratios r to the threshold of the kernel itself.
  std::vector<double> pump_values{0.3, 0.6, 0.9};
  bool pump_absolute = true;

  Dimensionality dimensionality = Dimensionality::One;
  Space space = Space::Position;
  double extent = 0.0;
  int points_per_axis = 256;
  bool thin_crystal = false;

  ScanSpec scan;

  LocalOscillator lo = LocalOscillator::flat();
  std::optional<double> pixel_size;  ///< defaults to one grid pixel
  PairGeometry pair_geometry = PairGeometry::SplitDisk;
  std::optional<double> detector_radius;
  std::optional<double> detector_center;
  std::optional<double> phase;  ///< empty: scan the phase

  std::optional<std::array<double, 3>> cavity_focals;
  std::optional<double> focal_length;

  FormulaMode formula_mode = FormulaMode::Paper;
  double analysis_frequency = 0.0;
  int spectrum_head = 10;
  double threshold_fraction = 0.10;
  int hermite_gauss_orders = 6;

  std::filesystem::path output_path = ".";
  OutputFormat format = OutputFormat::Csv;
  int threads = 1;

  TransverseGrid grid() const;
  /// Throws ConfigError (line 0) when a scenario's required fields are absent.
  void validate() const;
};

/// Parses the key = value format. '#' starts a comment; blank lines are
/// ignored; keys carry section prefixes (physical., pump., grid., kernel.,
/// scan., detection., cavity., modes., output.). Lengths accept nm, um, µm,
/// mm, cm, m and the multiples wp, lcoh; wavevectors accept 1/m, 1/mm, 1/um,
/// /wp, /lcoh and lcohf (= 1/w_p). Throws ConfigError with the offending line.
/// A nonempty `scenario` (from the command line) overrides the file's key and
/// must agree with it when both are present.
ScenarioConfig parse_config(std::istream& in, const std::string& scenario = {});
ScenarioConfig load_config(const std::filesystem::path& path, const std::string& scenario = {});

}  // namespace simopo
