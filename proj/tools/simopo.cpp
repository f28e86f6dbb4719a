#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <string>

#include "simopo/config.hpp"
#include "simopo/errors.hpp"
#include "simopo/scenario.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("simopo");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SIMOPO_LOG")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "warn") spdlog::set_level(spdlog::level::warn);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring SIMOPO_LOG='{}' (expected error, warn, info or debug)", level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Multimode squeezing and entanglement of a below-threshold self-imaging OPO"};
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::string format;
  int threads = 0;
  app.add_option("scenario", scenario,
                 "coherence-report | selfimaging-check | kernel-dump | modes-report | "
                 "nearfield-scan[(position|radius)] | farfield-duan-scan[(radius|separation)] | epr-report")
      ->required();
  app.add_option("--config", config_path, "key = value configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.path)");
  app.add_option("--format", format, "csv or json (overrides output.format)")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker threads (default 1)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    simopo::ScenarioConfig config = simopo::load_config(config_path, scenario);
    if (!out_dir.empty()) config.output_path = out_dir;
    if (!format.empty()) config.format = format == "json" ? simopo::OutputFormat::Json : simopo::OutputFormat::Csv;
    if (threads > 0) config.threads = threads;
    config.validate();

    spdlog::info("scenario {} on {}", simopo::to_string(config.scenario), config.grid().describe());
    const simopo::ScenarioResult result = simopo::run_scenario(config);
    for (const auto& path : result.outputs) spdlog::info("wrote {}", path.string());
    std::cout << result.summary.string() << '\n';
    return 0;
  } catch (const simopo::ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return simopo::exit_code_for(e);
  } catch (const simopo::Error& e) {
    spdlog::error("{}", e.what());
    return simopo::exit_code_for(e);
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 4;
  }
}
