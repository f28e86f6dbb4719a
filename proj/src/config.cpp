#include "simopo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <map>

#include "simopo/errors.hpp"
#include "simopo/special_functions.hpp"

namespace simopo {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

enum class Quantity { Length, Wavevector };

std::string trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r");
  return std::string(text.substr(begin, end - begin + 1));
}

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  return text;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "scenario",           "formula_mode",          "analysis_frequency",   "threads",
      "physical.wavelength", "physical.crystal_length", "physical.refractive_index", "physical.detuning",
      "pump.profile",       "pump.waist",            "pump.amplitudes",      "pump.ratios",
      "grid.dimensionality", "grid.space",           "grid.extent",          "grid.points",
      "kernel.thin_crystal", "scan.variable",        "scan.start",           "scan.stop",
      "scan.steps",         "detection.lo",          "detection.lo_waist",   "detection.pixel_size",
      "detection.geometry", "detection.radius",      "detection.center",     "detection.phase",
      "cavity.f1",          "cavity.f2",             "cavity.f3",            "cavity.focal_length",
      "modes.head",         "modes.threshold_fraction", "modes.hermite_gauss", "output.path",
      "output.format"};
  return keys;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }
  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(line(key), fmt::format("{}: {}", key, message));
  }

  double number(const std::string& key, const std::string& text) const {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) fail(key, fmt::format("'{}' is not a number", text));
    return value;
  }

  double real(const std::string& key) const { return number(key, trim(raw(key))); }

  int integer(const std::string& key) const {
    const std::string text = trim(raw(key));
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail(key, fmt::format("'{}' is not an integer", text));
    return value;
  }

  bool boolean(const std::string& key) const {
    const std::string text = lower(trim(raw(key)));
    if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
    if (text == "false" || text == "no" || text == "0" || text == "off") return false;
    fail(key, fmt::format("'{}' is not a boolean", text));
  }

  std::string word(const std::string& key) const { return lower(trim(raw(key))); }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::string_view rest = raw(key);
    while (true) {
      const auto comma = rest.find(',');
      out.push_back(number(key, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
};

struct Scales {
  double wavelength = 0.0;
  double pump_waist = 0.0;  // 0 for a flat pump
  double coherence = 0.0;
  std::optional<double> focal;
};

// Splits "300um", "300 um" or "8 wp" into number and lowercase unit.
std::pair<std::string, std::string> split_unit(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-';
    const bool exponent = (c == 'e' || c == 'E') && i > 0 && i + 1 < text.size() &&
                          (std::isdigit(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '-' ||
                           text[i + 1] == '+');
    if (!numeric && !exponent) break;
    ++i;
  }
  std::string unit = trim(text.substr(i));
  if (unit.rfind("\xc2\xb5", 0) == 0) unit = "u" + unit.substr(2);  // micro sign
  return {trim(text.substr(0, i)), lower(unit)};
}

double quantity(const Reader& r, const std::string& key, Quantity kind, const Scales& s) {
  auto [number_text, unit] = split_unit(trim(r.raw(key)));
  const double value = r.number(key, number_text);
  auto need_waist = [&] {
    if (!(s.pump_waist > 0.0)) r.fail(key, "unit 'wp' needs a Gaussian pump with pump.waist");
    return s.pump_waist;
  };
  auto need_focal = [&] {
    if (!s.focal) r.fail(key, fmt::format("unit '{}' needs cavity.focal_length", unit));
    return *s.focal;
  };
  static const std::map<std::string, double> lengths{{"", 1.0},     {"m", 1.0},     {"cm", 1e-2},
                                                     {"mm", 1e-3},  {"um", 1e-6},   {"nm", 1e-9}};
  static const std::map<std::string, double> inverse{{"", 1.0},    {"1/m", 1.0},  {"/m", 1.0},  {"1/mm", 1e3},
                                                     {"/mm", 1e3}, {"1/um", 1e6}, {"/um", 1e6}};
  if (kind == Quantity::Length) {
    if (auto it = lengths.find(unit); it != lengths.end()) return value * it->second;
    if (unit == "wp") return value * need_waist();
    if (unit == "lcoh") return value * s.coherence;
    if (unit == "lcohf") {
      // Far-field plane length; also needs the waist.
      return value * s.wavelength * need_focal() / (2.0 * kPi * need_waist());
    }
    r.fail(key, fmt::format("unknown length unit '{}'", unit));
  }
  if (auto it = inverse.find(unit); it != inverse.end()) return value * it->second;
  if (unit == "/wp" || unit == "lcohf") return value / need_waist();
  if (unit == "/lcoh") return value / s.coherence;
  if (auto it = lengths.find(unit); it != lengths.end() && !unit.empty()) {
    // Position in the Fourier plane of the lens: q = 2 pi x / (lambda f).
    return 2.0 * kPi * value * it->second / (s.wavelength * need_focal());
  }
  r.fail(key, fmt::format("unknown wavevector unit '{}'", unit));
}

bool scenario_is_far_field(ScenarioKind kind) {
  return kind == ScenarioKind::FarfieldDuanScan || kind == ScenarioKind::EprReport;
}

void set_variant(ScanVariable* out, ScanVariable value) {
  if (out) *out = value;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::CoherenceReport: return "coherence-report";
    case ScenarioKind::SelfImagingCheck: return "selfimaging-check";
    case ScenarioKind::KernelDump: return "kernel-dump";
    case ScenarioKind::ModesReport: return "modes-report";
    case ScenarioKind::NearfieldScan: return "nearfield-scan";
    case ScenarioKind::FarfieldDuanScan: return "farfield-duan-scan";
    case ScenarioKind::EprReport: return "epr-report";
  }
  return "unknown";
}

std::string to_string(ScanVariable variable) {
  switch (variable) {
    case ScanVariable::None: return "none";
    case ScanVariable::Position: return "position";
    case ScanVariable::Radius: return "radius";
    case ScanVariable::Separation: return "separation";
  }
  return "unknown";
}

std::string to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "json"; }

ScenarioKind parse_scenario(const std::string& text, ScanVariable* variable) {
  std::string name = lower(trim(text));
  set_variant(variable, ScanVariable::None);
  if (const auto open = name.find('('); open != std::string::npos) {
    if (name.back() != ')') throw UsageError(fmt::format("malformed scenario '{}'", text));
    const std::string variant = name.substr(open + 1, name.size() - open - 2);
    name = name.substr(0, open);
    if (variant == "position") set_variant(variable, ScanVariable::Position);
    else if (variant == "radius") set_variant(variable, ScanVariable::Radius);
    else if (variant == "separation") set_variant(variable, ScanVariable::Separation);
    else throw UsageError(fmt::format("unknown scan variant '{}'", variant));
  }
  for (auto kind : {ScenarioKind::CoherenceReport, ScenarioKind::SelfImagingCheck, ScenarioKind::KernelDump,
                    ScenarioKind::ModesReport, ScenarioKind::NearfieldScan, ScenarioKind::FarfieldDuanScan,
                    ScenarioKind::EprReport}) {
    if (name == to_string(kind)) return kind;
  }
  throw UsageError(fmt::format("unknown scenario '{}'", text));
}

TransverseGrid ScenarioConfig::grid() const { return TransverseGrid(dimensionality, extent, points_per_axis, space); }

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(0, message);
  };
  require(!pump_values.empty(), "at least one pump value is required");
  for (double v : pump_values) require(v >= 0.0 && std::isfinite(v), "pump values must be finite and >= 0");
  require(extent > 0.0, "grid.extent must be positive");
  require(points_per_axis >= 2, "grid.points must be >= 2");
  require(threads >= 1, "threads must be >= 1");
  require(spectrum_head >= 1, "modes.head must be >= 1");
  require(threshold_fraction > 0.0 && threshold_fraction < 1.0, "modes.threshold_fraction must lie in (0, 1)");
  if (scenario == ScenarioKind::SelfImagingCheck) require(cavity_focals.has_value(), "selfimaging-check needs cavity.f1, cavity.f2 and cavity.f3");
  const bool far = scenario_is_far_field(scenario);
  if (far) require(space == Space::Wavevector, "far-field scenarios need grid.space = wavevector");
  if (scenario == ScenarioKind::NearfieldScan) require(space == Space::Position, "nearfield-scan needs grid.space = position");
  if (scenario == ScenarioKind::NearfieldScan || scenario == ScenarioKind::FarfieldDuanScan) {
    require(scan.variable != ScanVariable::None, "scan scenarios need scan.variable or a scenario variant");
    require(scan.stop > scan.start, "scan range must have positive length (scan.stop > scan.start)");
    if (scan.variable != ScanVariable::Radius) require(scan.steps >= 2, "scan.steps must be >= 2");
    if (scenario == ScenarioKind::NearfieldScan) {
      require(scan.variable == ScanVariable::Position || scan.variable == ScanVariable::Radius,
              "nearfield-scan supports position and radius");
    } else {
      require(scan.variable == ScanVariable::Radius || scan.variable == ScanVariable::Separation,
              "farfield-duan-scan supports radius and separation");
    }
  }
  if (scenario == ScenarioKind::EprReport) {
    require(detector_radius.has_value() || pair_geometry == PairGeometry::PixelPair,
            "epr-report with split disks needs detection.radius");
    require(pair_geometry == PairGeometry::SplitDisk || detector_center.has_value(),
            "epr-report with a pixel pair needs detection.center");
  }
}

ScenarioConfig parse_config(std::istream& in, const std::string& scenario) {
  std::map<std::string, Entry> entries;
  std::string text;
  int line_number = 0;
  while (std::getline(in, text)) {
    ++line_number;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    const std::string line = trim(text);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_number, fmt::format("expected key = value, got '{}'", line));
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_number, "empty key");
    if (value.empty()) throw ConfigError(line_number, fmt::format("{}: empty value", key));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(line_number, fmt::format("unknown key '{}'", key));
    }
    if (entries.count(key)) {
      throw ConfigError(line_number, fmt::format("duplicate key '{}' (first on line {})", key, entries[key].line));
    }
    entries[key] = {value, line_number};
  }
  if (in.bad()) throw ConfigError(line_number, "read error");

  const Reader r(std::move(entries));
  ScenarioConfig cfg;
  Scales scales;

  if (r.has("scenario")) {
    ScanVariable variant = ScanVariable::None;
    try {
      cfg.scenario = parse_scenario(r.raw("scenario"), &variant);
    } catch (const UsageError& e) {
      r.fail("scenario", e.what());
    }
    cfg.scan.variable = variant;
  }
  if (!scenario.empty()) {
    ScanVariable variant = ScanVariable::None;
    ScenarioKind kind;
    try {
      kind = parse_scenario(scenario, &variant);
    } catch (const UsageError& e) {
      throw ConfigError(0, e.what());
    }
    if (r.has("scenario") && kind != cfg.scenario) {
      r.fail("scenario", fmt::format("config is for '{}', but '{}' was requested", to_string(cfg.scenario),
                                     to_string(kind)));
    }
    if (variant != ScanVariable::None) {
      if (cfg.scan.variable != ScanVariable::None && cfg.scan.variable != variant) {
        r.fail("scenario", "scan variant disagrees with the requested scenario");
      }
      cfg.scan.variable = variant;
    }
    cfg.scenario = kind;
  } else if (!r.has("scenario")) {
    throw ConfigError(0, "no scenario given (config key 'scenario' or command line)");
  }

  // Physical parameters first: they set the length scales for the unit multiples.
  if (r.has("physical.wavelength")) cfg.physical.wavelength_signal = quantity(r, "physical.wavelength", Quantity::Length, scales);
  if (r.has("physical.crystal_length")) cfg.physical.crystal_length = quantity(r, "physical.crystal_length", Quantity::Length, scales);
  if (r.has("physical.refractive_index")) cfg.physical.refractive_index = r.real("physical.refractive_index");
  if (r.has("physical.detuning")) cfg.physical.detuning = r.real("physical.detuning");
  try {
    cfg.physical.validate();
  } catch (const DomainError& e) {
    throw ConfigError(r.line("physical.wavelength"), std::string("physical parameters: ") + e.what());
  }
  scales.wavelength = cfg.physical.wavelength_signal;
  scales.coherence = coherence_length(cfg.physical);

  if (r.has("pump.profile")) {
    const std::string profile = r.word("pump.profile");
    if (profile == "flat") cfg.pump_flat = true;
    else if (profile != "gaussian") r.fail("pump.profile", "expected gaussian or flat");
  }
  if (r.has("pump.waist")) {
    if (cfg.pump_flat) r.fail("pump.waist", "a flat pump has no waist");
    cfg.physical.pump_waist = quantity(r, "pump.waist", Quantity::Length, scales);
    if (!(cfg.physical.pump_waist > 0.0)) r.fail("pump.waist", "must be positive");
  }
  scales.pump_waist = cfg.pump_flat ? 0.0 : cfg.physical.pump_waist;
  if (r.has("pump.amplitudes") && r.has("pump.ratios")) r.fail("pump.ratios", "give pump.amplitudes or pump.ratios, not both");
  if (r.has("pump.amplitudes")) cfg.pump_values = r.list("pump.amplitudes");
  if (r.has("pump.ratios")) {
    cfg.pump_values = r.list("pump.ratios");
    cfg.pump_absolute = false;
  }
  for (const char* key : {"pump.amplitudes", "pump.ratios"}) {
    if (!r.has(key)) continue;
    for (double v : cfg.pump_values) {
      if (v < 0.0) r.fail(key, "values must be >= 0");
    }
  }

  if (r.has("cavity.focal_length")) {
    cfg.focal_length = quantity(r, "cavity.focal_length", Quantity::Length, scales);
    if (!(*cfg.focal_length > 0.0)) r.fail("cavity.focal_length", "must be positive");
    scales.focal = cfg.focal_length;
  }
  const bool any_focal = r.has("cavity.f1") || r.has("cavity.f2") || r.has("cavity.f3");
  if (any_focal) {
    std::array<double, 3> f{};
    const std::array<const char*, 3> keys{"cavity.f1", "cavity.f2", "cavity.f3"};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!r.has(keys[i])) {
        const int where = std::max({r.line("cavity.f1"), r.line("cavity.f2"), r.line("cavity.f3")});
        throw ConfigError(where, fmt::format("{} is required with the other focal lengths", keys[i]));
      }
      f[i] = quantity(r, keys[i], Quantity::Length, scales);
      if (!(f[i] > 0.0)) r.fail(keys[i], "must be positive");
    }
    cfg.cavity_focals = f;
  }

  if (r.has("grid.dimensionality")) {
    const std::string d = r.word("grid.dimensionality");
    if (d == "1" || d == "1d") cfg.dimensionality = Dimensionality::One;
    else if (d == "2" || d == "2d") cfg.dimensionality = Dimensionality::Two;
    else r.fail("grid.dimensionality", "expected 1 or 2");
  }
  cfg.space = scenario_is_far_field(cfg.scenario) ? Space::Wavevector : Space::Position;
  if (r.has("grid.space")) {
    const std::string s = r.word("grid.space");
    if (s == "position" || s == "near_field") cfg.space = Space::Position;
    else if (s == "wavevector" || s == "far_field") cfg.space = Space::Wavevector;
    else r.fail("grid.space", "expected position or wavevector");
  }
  const Quantity grid_quantity = cfg.space == Space::Position ? Quantity::Length : Quantity::Wavevector;
  if (r.has("grid.points")) {
    cfg.points_per_axis = r.integer("grid.points");
    if (cfg.points_per_axis < 2) r.fail("grid.points", "must be >= 2");
  }
  if (r.has("grid.extent")) {
    cfg.extent = quantity(r, "grid.extent", grid_quantity, scales);
    if (!(cfg.extent > 0.0)) r.fail("grid.extent", "must be positive");
  } else if (!cfg.pump_flat) {
    cfg.extent = cfg.space == Space::Position ? 8.0 * cfg.physical.pump_waist : 40.0 / cfg.physical.pump_waist;
  } else {
    throw ConfigError(0, "grid.extent is required for a flat pump");
  }
  if (r.has("kernel.thin_crystal")) cfg.thin_crystal = r.boolean("kernel.thin_crystal");

  if (r.has("scan.variable")) {
    const std::string v = r.word("scan.variable");
    ScanVariable parsed = ScanVariable::None;
    if (v == "position") parsed = ScanVariable::Position;
    else if (v == "radius") parsed = ScanVariable::Radius;
    else if (v == "separation") parsed = ScanVariable::Separation;
    else r.fail("scan.variable", "expected position, radius or separation");
    if (cfg.scan.variable != ScanVariable::None && cfg.scan.variable != parsed) {
      r.fail("scan.variable", "disagrees with the scenario variant");
    }
    cfg.scan.variable = parsed;
  }
  if (r.has("scan.start")) cfg.scan.start = quantity(r, "scan.start", grid_quantity, scales);
  if (r.has("scan.stop")) cfg.scan.stop = quantity(r, "scan.stop", grid_quantity, scales);
  if (r.has("scan.steps")) cfg.scan.steps = r.integer("scan.steps");
  if (r.has("scan.stop") && !(cfg.scan.stop > cfg.scan.start)) {
    r.fail("scan.stop", "scan range must have positive length");
  }

  if (r.has("detection.lo")) {
    const std::string lo = r.word("detection.lo");
    if (lo == "flat") cfg.lo = LocalOscillator::flat();
    else if (lo == "odd_flat") cfg.lo = LocalOscillator::odd_flat();
    else if (lo == "gaussian") {
      if (!r.has("detection.lo_waist")) r.fail("detection.lo", "a Gaussian local oscillator needs detection.lo_waist");
      cfg.lo = LocalOscillator::gaussian(quantity(r, "detection.lo_waist", grid_quantity, scales));
    } else {
      r.fail("detection.lo", "expected flat, gaussian or odd_flat");
    }
  }
  if (r.has("detection.pixel_size")) {
    cfg.pixel_size = quantity(r, "detection.pixel_size", grid_quantity, scales);
    if (!(*cfg.pixel_size > 0.0)) r.fail("detection.pixel_size", "must be positive");
  }
  if (r.has("detection.geometry")) {
    const std::string g = r.word("detection.geometry");
    if (g == "split_disk") cfg.pair_geometry = PairGeometry::SplitDisk;
    else if (g == "pixel_pair") cfg.pair_geometry = PairGeometry::PixelPair;
    else r.fail("detection.geometry", "expected split_disk or pixel_pair");
  }
  if (r.has("detection.radius")) cfg.detector_radius = quantity(r, "detection.radius", grid_quantity, scales);
  if (r.has("detection.center")) cfg.detector_center = quantity(r, "detection.center", grid_quantity, scales);
  if (r.has("detection.phase")) {
    if (r.word("detection.phase") != "scan") cfg.phase = r.real("detection.phase");
  }

  if (r.has("formula_mode")) {
    try {
      cfg.formula_mode = parse_formula_mode(r.word("formula_mode"));
    } catch (const UsageError& e) {
      r.fail("formula_mode", e.what());
    }
  }
  if (r.has("analysis_frequency")) {
    cfg.analysis_frequency = r.real("analysis_frequency");
    if (cfg.formula_mode != FormulaMode::TransferFunction && cfg.analysis_frequency != 0.0) {
      r.fail("analysis_frequency", "a nonzero analysis frequency needs formula_mode = transfer_function");
    }
  }
  if (r.has("threads")) cfg.threads = r.integer("threads");
  if (r.has("modes.head")) cfg.spectrum_head = r.integer("modes.head");
  if (r.has("modes.threshold_fraction")) cfg.threshold_fraction = r.real("modes.threshold_fraction");
  if (r.has("modes.hermite_gauss")) cfg.hermite_gauss_orders = r.integer("modes.hermite_gauss");
  if (cfg.hermite_gauss_orders < 0) r.fail("modes.hermite_gauss", "must be >= 0");
  if (r.has("output.path")) cfg.output_path = trim(r.raw("output.path"));
  if (r.has("output.format")) {
    const std::string f = r.word("output.format");
    if (f == "csv") cfg.format = OutputFormat::Csv;
    else if (f == "json") cfg.format = OutputFormat::Json;
    else r.fail("output.format", "expected csv or json");
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::string& scenario) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, fmt::format("cannot open config '{}'", path.string()));
  return parse_config(in, scenario);
}

}  // namespace simopo
