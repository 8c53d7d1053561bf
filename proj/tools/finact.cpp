// finact: command-line front end for the fin actuator toolkit.
//
//   finact <analyze|simulate|freqtable|control|design|sweep> --config <path> --out <dir>
//          [--format csv|json] [--no-meta]

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "finact/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace finact::cli;

  CLI::App app{"Magnetically actuated fin: equilibria, simulation, control and sizing"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format;
  bool no_meta = false;

  const std::pair<const char*, const char*> commands[] = {
      {"analyze", "Find and classify fixed points (JSON report)"},
      {"simulate", "Integrate the unactuated plant from initial conditions (trajectory files)"},
      {"freqtable", "Build the amplitude -> natural frequency table"},
      {"control", "Run PID tracking of the reference orbit (trajectories + effort summary)"},
      {"design", "Component report: magnet constant, stiffness, damping range, coil turns"},
      {"sweep", "Asymmetry or damping sweep table"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Scenario file (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", format, "Trajectory/table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--no-meta", no_meta, "Omit the timestamp block from JSON reports");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const Scenario scenario = load_scenario(config_path);
    OutputOptions opt;
    opt.out_dir = out_dir;
    opt.format = format.empty() ? scenario.format : format;
    opt.meta = !no_meta;
    for (const auto& path : run_command(command, scenario, opt)) std::cout << path.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "finact " << command << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}
