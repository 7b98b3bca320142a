#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "finsler/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finsler curvature toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, backend;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  const std::pair<const char*, const char*> commands[] = {
      {"tensors", "Write the geometric objects at each sample point"},
      {"verify", "Check identity suites and report residuals"},
      {"classify", "Decide constant, scalar or generic curvature"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_path, "Report path (overrides config output)");
    sub->add_option("--samples", samples, "Number of sample points");
    sub->add_option("--seed", seed, "Sampling seed");
    sub->add_option("--backend", backend, "Derivative backend")->check(CLI::IsMember({"jet", "fd"}));
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : finsler::exit_code::config_error;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  finsler::RunConfig config;
  try {
    config = finsler::load_config(config_path);
    if (samples) config.sampling.count = *samples;
    if (seed) config.sampling.seed = *seed;
    if (!backend.empty()) config.backend = finsler::parse_backend(backend);
    if (threads) config.threads = *threads;
    if (!out_path.empty()) config.output = out_path;
    finsler::validate(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return finsler::exit_code_for(e);
  }

  // Without an output path, verify and tensors stream the report to stdout;
  // classify keeps stdout for its verdict line.
  std::ofstream file;
  std::ostringstream discard;
  std::ostream* report = &std::cout;
  if (!config.output.empty()) {
    file.open(config.output, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write report to '" << config.output << "'\n";
      return finsler::exit_code::config_error;
    }
    report = &file;
  } else if (command == "classify") {
    report = &discard;
  }
  return finsler::run_command(command, config, *report, std::cout, std::cerr);
}
