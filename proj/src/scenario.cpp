#include "simopo/scenario.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <memory>
#include <system_error>

#include "json.hpp"
#include "simopo/detection.hpp"
#include "simopo/errors.hpp"
#include "simopo/kernels.hpp"
#include "simopo/modes.hpp"
#include "simopo/parallel.hpp"
#include "simopo/serialization.hpp"
#include "simopo/special_functions.hpp"

namespace simopo {

namespace {

using nlohmann::ordered_json;

constexpr int kPhaseSamples = 64;
constexpr double kRangeSlack = 1e-12;

struct Model {
  PhysicalParams params;
  PumpProfile pump;
  TransverseGrid grid;
  KernelMatrix kernel;
  ModeDecomposition decomp;
  double gain;
  std::vector<double> ratios;
};

PumpProfile make_pump(const ScenarioConfig& cfg) {
  return cfg.pump_flat ? PumpProfile::flat(1.0) : PumpProfile::gaussian(cfg.physical.pump_waist, 1.0);
}

Model build_model(const ScenarioConfig& cfg) {
  const PhysicalParams params = cfg.physical;
  params.validate_for_noise();
  const PumpProfile pump = make_pump(cfg);
  const TransverseGrid grid = cfg.grid();
  const KernelOptions options{cfg.thin_crystal, cfg.threads};
  KernelMatrix kernel = grid.space() == Space::Position ? build_near_field_kernel(grid, params, pump, options)
                                                        : build_far_field_kernel(grid, params, pump, options);
  ModeDecomposition decomp = eigendecompose(kernel);
  const double gain = plane_wave_gain(params, grid.dimensionality(), cfg.thin_crystal);
  std::vector<double> ratios = resolve_pump_ratios(cfg, decomp, gain);
  return {params, pump, grid, std::move(kernel), std::move(decomp), gain, std::move(ratios)};
}

std::vector<double> linspace(double start, double stop, int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    out[static_cast<std::size_t>(i)] = i + 1 == steps ? stop : start + (stop - start) * i / (steps - 1);
  }
  return out;
}

std::vector<double> shells_in_range(const TransverseGrid& grid, double start, double stop) {
  std::vector<double> out;
  for (double r : radial_shells(grid)) {
    if (r >= start * (1.0 - kRangeSlack) && r <= stop * (1.0 + kRangeSlack)) out.push_back(r);
  }
  if (out.empty()) throw UsageError("the radius range contains no pixel shell");
  return out;
}

// Far-field plane coordinate for a wavevector, or the wavevector itself.
double far_physical(const ScenarioConfig& cfg, double q) {
  if (!cfg.focal_length) return q;
  return q * cfg.physical.wavelength_signal * *cfg.focal_length / (2.0 * kPi);
}

std::string far_physical_unit(const ScenarioConfig& cfg) { return cfg.focal_length ? "m" : "1/m"; }

double far_scale(const ScenarioConfig& cfg) {
  return cfg.pump_flat ? coherence_length(cfg.physical) : cfg.physical.pump_waist;
}

std::string far_scaled_unit(const ScenarioConfig& cfg) { return cfg.pump_flat ? "1/l_coh" : "l_cohf"; }

struct PairResult {
  double v_minus, v_plus, s12;
};

PairResult evaluate_pair(const ScenarioConfig& cfg, const QuadratureCovariance& cov, const Detector& a,
                         const Detector& b) {
  const double phase = cfg.phase ? *cfg.phase : duan_minimum(cov, a, b, kPhaseSamples).phase;
  const double v_minus = epr_spectra(cov, a, b, phase).v_minus;
  const double v_plus = epr_spectra(cov, a, b, phase + 0.5 * kPi).v_plus;
  return {v_minus, v_plus, duan_separability(cov, a, b, phase)};
}

ScanTable near_scan(const ScenarioConfig& cfg, const Model& m) {
  ScanTable table;
  table.physical_unit = "m";
  const double lcoh = coherence_length(m.params);
  const bool by_waist = !cfg.pump_flat && (cfg.scan.variable == ScanVariable::Position || cfg.thin_crystal);
  const double scale = by_waist ? cfg.physical.pump_waist : lcoh;
  table.scaled_unit = by_waist ? "w_p" : "l_coh";
  const double squeezed = cfg.phase.value_or(0.5 * kPi);
  const double pixel = cfg.pixel_size.value_or(m.grid.spacing());

  std::vector<double> points;
  if (cfg.scan.variable == ScanVariable::Position) {
    points = linspace(cfg.scan.start, cfg.scan.stop, cfg.scan.steps);
  } else {
    points = shells_in_range(m.grid, cfg.scan.start, cfg.scan.stop);
  }
  const std::string name = to_string(cfg.scan.variable);
  for (double r : m.ratios) {
    const QuadratureCovariance cov = output_covariance(m.decomp, r, cfg.formula_mode, cfg.analysis_frequency);
    std::vector<ScanRow> rows(points.size());
    parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
      const bool position = cfg.scan.variable == ScanVariable::Position;
      const Point center = nearest_pixel_center(m.grid, {points[i], 0.0});
      const Detector det = position ? detectors::pixel(m.grid, center, pixel, cfg.lo)
                                    : detectors::disk(m.grid, points[i], cfg.lo);
      const double value = position ? center.x : pixel_equivalent_radius(det);
      rows[i] = {name, value, value / scale, homodyne_variance(cov, det, squeezed),
                 homodyne_variance(cov, det, squeezed + 0.5 * kPi), std::nullopt, r};
    });
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  return table;
}

std::pair<Detector, Detector> report_pair(const ScenarioConfig& cfg, const TransverseGrid& grid) {
  if (cfg.pair_geometry == PairGeometry::SplitDisk) return detectors::split_disk_pair(grid, *cfg.detector_radius, cfg.lo);
  return detectors::symmetric_pixel_pair(grid, nearest_pixel_center(grid, {*cfg.detector_center, 0.0}),
                                         cfg.pixel_size.value_or(grid.spacing()), cfg.lo);
}

ScanTable far_scan(const ScenarioConfig& cfg, const Model& m) {
  ScanTable table;
  table.physical_unit = far_physical_unit(cfg);
  table.scaled_unit = far_scaled_unit(cfg);
  const double scale = far_scale(cfg);
  const double pixel = cfg.pixel_size.value_or(m.grid.spacing());

  std::vector<double> points;
  if (cfg.scan.variable == ScanVariable::Radius) {
    points = shells_in_range(m.grid, cfg.scan.start, cfg.scan.stop);
  } else {
    points = linspace(cfg.scan.start, cfg.scan.stop, cfg.scan.steps);
  }
  const std::string name = to_string(cfg.scan.variable);
  for (double r : m.ratios) {
    const QuadratureCovariance cov = output_covariance(m.decomp, r, cfg.formula_mode, cfg.analysis_frequency);
    std::vector<ScanRow> rows(points.size());
    parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
      const auto [a, b] = cfg.scan.variable == ScanVariable::Radius
                              ? detectors::split_disk_pair(m.grid, points[i], cfg.lo)
                              : detectors::symmetric_pixel_pair(
                                    m.grid, nearest_pixel_center(m.grid, {points[i], 0.0}), pixel, cfg.lo);
      double q = nearest_pixel_center(m.grid, {points[i], 0.0}).x;
      if (cfg.scan.variable == ScanVariable::Radius) {
        const Detector both{m.grid, a.weights + b.weights, "pair"};
        q = pixel_equivalent_radius(both);
      }
      const PairResult res = evaluate_pair(cfg, cov, a, b);
      rows[i] = {name, far_physical(cfg, q), q * scale, res.v_minus, res.v_plus, res.s12, r};
    });
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  return table;
}

ScanTable epr_table(const ScenarioConfig& cfg, const Model& m) {
  ScanTable table{"rad", "pi", {}};
  const auto [a, b] = report_pair(cfg, m.grid);
  for (double r : m.ratios) {
    const QuadratureCovariance cov = output_covariance(m.decomp, r, cfg.formula_mode, cfg.analysis_frequency);
    std::vector<ScanRow> rows(kPhaseSamples);
    parallel_for(rows.size(), cfg.threads, [&](std::size_t k) {
      const double phase = kPi * static_cast<double>(k) / kPhaseSamples;
      rows[k] = {"phase",
                 phase,
                 static_cast<double>(k) / kPhaseSamples,
                 epr_spectra(cov, a, b, phase).v_minus,
                 epr_spectra(cov, a, b, phase + 0.5 * kPi).v_plus,
                 duan_separability(cov, a, b, phase),
                 r};
    });
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  return table;
}

ScanTable scan_for(const ScenarioConfig& cfg, const Model& m) {
  switch (cfg.scenario) {
    case ScenarioKind::NearfieldScan: return near_scan(cfg, m);
    case ScenarioKind::FarfieldDuanScan: return far_scan(cfg, m);
    case ScenarioKind::EprReport: return epr_table(cfg, m);
    default: throw UsageError(fmt::format("'{}' is not a scan scenario", to_string(cfg.scenario)));
  }
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

void write_scan_csv(const ScanTable& table, std::ostream& out) {
  out << "scan_variable,value_in_physical_units,value_in_scaled_units,V_minus,V_plus,S12,pump\n";
  for (const ScanRow& row : table.rows) {
    out << fmt::format("{},{},{},{},{},{},{}\n", row.variable, g17(row.physical), g17(row.scaled), g17(row.v_minus),
                       g17(row.v_plus), row.s12 ? g17(*row.s12) : std::string(), g17(row.pump));
  }
}

ordered_json scan_json(const ScanTable& table) {
  ordered_json rows = ordered_json::array();
  for (const ScanRow& row : table.rows) {
    rows.push_back({row.variable, row.physical, row.scaled, row.v_minus, row.v_plus,
                    row.s12 ? ordered_json(*row.s12) : ordered_json(nullptr), row.pump});
  }
  return {{"physical_unit", table.physical_unit},
          {"scaled_unit", table.scaled_unit},
          {"columns",
           {"scan_variable", "value_in_physical_units", "value_in_scaled_units", "V_minus", "V_plus", "S12", "pump"}},
          {"rows", rows}};
}

std::string scan_stem(const ScenarioConfig& cfg) {
  switch (cfg.scenario) {
    case ScenarioKind::NearfieldScan: return "nearfield_scan_" + to_string(cfg.scan.variable);
    case ScenarioKind::FarfieldDuanScan: return "farfield_duan_scan_" + to_string(cfg.scan.variable);
    default: return "epr_report";
  }
}

// Writes into hidden staging files and renames them on commit.
class StagedOutputs {
 public:
  explicit StagedOutputs(std::filesystem::path dir) : dir_(std::move(dir)) {}
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;

  ~StagedOutputs() {
    if (committed_) return;
    for (auto& f : files_) {
      f.stream.reset();
      std::error_code ec;
      std::filesystem::remove(f.staged, ec);
    }
  }

  std::ostream& open(const std::string& name, bool binary = false) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw DataError(fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
    File f{dir_ / name, dir_ / ("." + name + ".partial"), nullptr};
    f.stream = std::make_unique<std::ofstream>(f.staged, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!*f.stream) throw DataError(fmt::format("cannot open '{}' for writing", f.staged.string()));
    files_.push_back(std::move(f));
    return *files_.back().stream;
  }

  std::vector<std::filesystem::path> commit() {
    for (auto& f : files_) {
      f.stream->flush();
      if (!*f.stream) throw DataError(fmt::format("failed writing '{}'", f.final_path.string()));
      f.stream.reset();
    }
    std::vector<std::filesystem::path> out;
    for (auto& f : files_) {
      std::error_code ec;
      std::filesystem::rename(f.staged, f.final_path, ec);
      if (ec) {
        // Undo what was already published so no partial set remains.
        for (const auto& done : out) std::filesystem::remove(done, ec);
        throw DataError(fmt::format("cannot move '{}' into place: {}", f.final_path.string(), ec.message()));
      }
      out.push_back(f.final_path);
    }
    committed_ = true;
    return out;
  }

 private:
  struct File {
    std::filesystem::path final_path;
    std::filesystem::path staged;
    std::unique_ptr<std::ofstream> stream;
  };
  std::filesystem::path dir_;
  std::vector<File> files_;
  bool committed_ = false;
};

ordered_json grid_json(const TransverseGrid& grid) {
  return {{"dimensionality", dimension_count(grid.dimensionality())},
          {"space", to_string(grid.space())},
          {"extent", grid.extent()},
          {"points_per_axis", grid.points_per_axis()},
          {"spacing", grid.spacing()}};
}

ordered_json base_summary(const ScenarioConfig& cfg, const Model& m) {
  ordered_json s;
  s["schema_version"] = 1;
  s["scenario"] = to_string(cfg.scenario);
  if (cfg.scan.variable != ScanVariable::None) s["scan_variable"] = to_string(cfg.scan.variable);
  s["l_coh"] = coherence_length(m.params);
  if (cfg.focal_length && !cfg.pump_flat) s["l_cohf"] = far_field_coherence_length(m.params, *cfg.focal_length);
  if (!cfg.pump_flat) {
    s["b_1d"] = mode_count_b(m.params, Dimensionality::One);
    s["b_2d"] = mode_count_b(m.params, Dimensionality::Two);
  } else {
    s["b_1d"] = nullptr;
    s["b_2d"] = nullptr;
  }
  s["kappa"] = cooperativity(m.decomp);
  s["significant_mode_count"] = significant_mode_count(m.decomp, cfg.threshold_fraction);
  s["threshold_fraction"] = cfg.threshold_fraction;
  ordered_json head = ordered_json::array();
  const auto count = std::min<Eigen::Index>(cfg.spectrum_head, m.decomp.eigenvalues.size());
  for (Eigen::Index k = 0; k < count; ++k) head.push_back(m.decomp.eigenvalues(k));
  s["spectrum_head"] = head;
  s["lambda_max"] = m.decomp.lambda_max;
  s["plane_wave_gain"] = m.gain;
  s["kernel_id"] = m.kernel.id;
  s["kernel_space"] = to_string(m.kernel.space);
  s["thin_crystal"] = cfg.thin_crystal;
  s["grid"] = grid_json(m.grid);
  s["physical"] = {{"wavelength", m.params.wavelength_signal},
                   {"crystal_length", m.params.crystal_length},
                   {"refractive_index", m.params.refractive_index},
                   {"pump_profile", cfg.pump_flat ? "flat" : "gaussian"},
                   {"pump_waist", cfg.pump_flat ? ordered_json(nullptr) : ordered_json(m.params.pump_waist)}};
  s["pump"] = {{"input", cfg.pump_absolute ? "amplitude" : "ratio"},
               {"values", cfg.pump_values},
               {"ratios", m.ratios}};
  s["formula_mode"] = to_string(cfg.formula_mode);
  s["analysis_frequency"] = cfg.analysis_frequency;
  return s;
}

ordered_json hermite_gauss_json(const ScenarioConfig& cfg, const Model& m) {
  ordered_json out = ordered_json::array();
  if (m.grid.dimensionality() != Dimensionality::One || m.grid.space() != Space::Position || cfg.pump_flat) return out;
  const auto count = std::min<Eigen::Index>(cfg.hermite_gauss_orders, m.decomp.eigenvalues.size());
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto index = static_cast<std::size_t>(k);
    const WaistFit fit = optimize_hermite_gauss_waist(m.decomp, index, static_cast<int>(k), m.params.pump_waist);
    out.push_back({{"mode", k},
                   {"lambda", m.decomp.eigenvalues(k)},
                   {"parity", mode_parity(m.decomp, index)},
                   {"order", k},
                   {"waist", fit.waist},
                   {"waist_over_pump_waist", fit.waist / m.params.pump_waist},
                   {"overlap", fit.overlap}});
  }
  return out;
}

void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, double>>& values) {
  out << "quantity,value\n";
  for (const auto& [k, v] : values) out << k << ',' << g17(v) << '\n';
}

ordered_json key_values_json(const std::vector<std::pair<std::string, double>>& values) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : values) out[k] = v;
  return out;
}

}  // namespace

std::vector<double> resolve_pump_ratios(const ScenarioConfig& config, const ModeDecomposition& decomp, double gain) {
  std::vector<double> out;
  for (double v : config.pump_values) {
    const double r = config.pump_absolute ? v * pump_ratio_from_amplitude(decomp, gain) : v;
    if (!(r < 1.0)) {
      throw AboveThresholdError(fmt::format("pump {} {} gives r = {:.6g}, at or above threshold",
                                            config.pump_absolute ? "amplitude" : "ratio", v, r));
    }
    out.push_back(r);
  }
  return out;
}

ScanTable compute_scan(const ScenarioConfig& config) {
  config.validate();
  const Model m = build_model(config);
  return scan_for(config, m);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  const Model m = build_model(cfg);
  ordered_json summary = base_summary(cfg, m);
  StagedOutputs staged(cfg.output_path);
  const bool csv = cfg.format == OutputFormat::Csv;
  std::vector<std::string> names;
  auto open = [&](const std::string& name, bool binary = false) -> std::ostream& {
    names.push_back(name);
    return staged.open(name, binary);
  };

  switch (cfg.scenario) {
    case ScenarioKind::CoherenceReport: {
      std::vector<std::pair<std::string, double>> values{{"l_coh", coherence_length(m.params)},
                                                         {"kappa", cooperativity(m.decomp)},
                                                         {"significant_mode_count",
                                                          static_cast<double>(significant_mode_count(
                                                              m.decomp, cfg.threshold_fraction))},
                                                         {"lambda_max", m.decomp.lambda_max}};
      if (!cfg.pump_flat) {
        values.insert(values.begin() + 1, {{"b_1d", mode_count_b(m.params, Dimensionality::One)},
                                           {"b_2d", mode_count_b(m.params, Dimensionality::Two)}});
      }
      if (cfg.focal_length && !cfg.pump_flat) {
        values.emplace_back("l_cohf", far_field_coherence_length(m.params, *cfg.focal_length));
      }
      if (csv) write_key_values(open("coherence_report.csv"), values);
      else open("coherence_report.json") << key_values_json(values).dump(2) << '\n';
      break;
    }
    case ScenarioKind::SelfImagingCheck: {
      const auto& f = *cfg.cavity_focals;
      const SelfImagingCavity cav = self_imaging_distances(f[0], f[1], f[2]);
      const std::vector<std::pair<std::string, double>> values{
          {"f1", f[0]},    {"f2", f[1]},    {"f3", f[2]},    {"c12", cav.c12}, {"c23", cav.c23},
          {"c31", cav.c31}, {"d12", cav.d12}, {"d23", cav.d23}, {"d31", cav.d31},
          {"identity_deviation", cav.identity_deviation}};
      summary["cavity"] = key_values_json(values);
      summary["cavity"]["identity_check"] = "pass";
      if (csv) write_key_values(open("selfimaging_check.csv"), values);
      else open("selfimaging_check.json") << key_values_json(values).dump(2) << '\n';
      break;
    }
    case ScenarioKind::KernelDump: {
      write_kernel_binary(m.kernel, open("kernel.bin", true));
      if (csv) {
        write_kernel_csv(m.kernel, open("kernel.csv"));
      } else {
        ordered_json rows = ordered_json::array();
        for (Eigen::Index i = 0; i < m.kernel.entries.rows(); ++i) {
          std::vector<double> row(static_cast<std::size_t>(m.kernel.entries.cols()));
          for (Eigen::Index j = 0; j < m.kernel.entries.cols(); ++j) row[static_cast<std::size_t>(j)] = m.kernel.entries(i, j);
          rows.push_back(row);
        }
        open("kernel.json") << ordered_json{{"id", m.kernel.id}, {"grid", grid_json(m.grid)}, {"entries", rows}}.dump()
                            << '\n';
      }
      break;
    }
    case ScenarioKind::ModesReport: {
      write_decomposition_binary(m.decomp, open("modes.bin", true));
      ordered_json per_pump = ordered_json::array();
      for (std::size_t p = 0; p < m.ratios.size(); ++p) {
        const ModeVariances var = mode_variances(m.decomp, m.ratios[p], cfg.formula_mode, cfg.analysis_frequency);
        const std::string name = fmt::format("modes_pump{}.{}", p, csv ? "csv" : "json");
        if (csv) {
          write_modes_csv(m.decomp, var, open(name));
        } else {
          std::vector<double> lambda(m.decomp.eigenvalues.data(),
                                     m.decomp.eigenvalues.data() + m.decomp.eigenvalues.size());
          std::vector<double> minus(var.variance_minus.data(), var.variance_minus.data() + var.variance_minus.size());
          std::vector<double> plus(var.variance_plus.data(), var.variance_plus.data() + var.variance_plus.size());
          open(name) << ordered_json{{"pump_ratio", m.ratios[p]},
                                     {"lambda", lambda},
                                     {"variance_minus", minus},
                                     {"variance_plus", plus}}
                            .dump()
                     << '\n';
        }
        per_pump.push_back({{"file", name}, {"pump_ratio", m.ratios[p]}});
      }
      summary["mode_files"] = per_pump;
      summary["hermite_gauss"] = hermite_gauss_json(cfg, m);
      break;
    }
    case ScenarioKind::NearfieldScan:
    case ScenarioKind::FarfieldDuanScan:
    case ScenarioKind::EprReport: {
      const ScanTable table = scan_for(cfg, m);
      summary["scan"] = {{"physical_unit", table.physical_unit},
                         {"scaled_unit", table.scaled_unit},
                         {"rows", table.rows.size()}};
      const std::string stem = scan_stem(cfg);
      if (csv) write_scan_csv(table, open(stem + ".csv"));
      else open(stem + ".json") << scan_json(table).dump(2) << '\n';
      break;
    }
  }

  names.emplace_back("summary.json");
  summary["outputs"] = names;
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  summary["runtime"] = {{"version", kVersion},
                        {"threads", cfg.threads},
                        {"eigen_version", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                                      EIGEN_MINOR_VERSION)},
                        {"elapsed_seconds", elapsed}};
  staged.open("summary.json") << summary.dump(2) << '\n';

  ScenarioResult result;
  result.outputs = staged.commit();
  result.summary = result.outputs.back();
  return result;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const DomainError*>(&error)) return 3;
  if (dynamic_cast<const NumericalError*>(&error)) return 4;
  return 4;
}

}  // namespace simopo
