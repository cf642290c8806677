#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "carleman/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Carleman estimate and coefficient-inversion audits for i q_t + a Lap q + b q = 0 on a strip"};
  std::string command, config_path, out_dir;
  int jobs = 1;
  app.add_option("command", command, "command to run")->required()->check(CLI::IsMember(carleman::command_names()));
  app.add_option("--config", config_path, "TOML run configuration")->required();
  app.add_option("--jobs", jobs, "worker threads for sweep points")->check(CLI::Range(1, 256));
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const carleman::RunConfig config = carleman::load_config(config_path);
    const carleman::AuditReport report = carleman::run_command(command, config, {jobs});
    const auto paths = carleman::emit_report(report, config, out_dir.empty() ? config.run.out : out_dir);
    for (const auto& m : report.messages) std::cerr << command << ": " << m << "\n";
    for (const auto& p : paths) std::cout << p.string() << "\n";
    for (const auto& [k, v] : report.pass.items()) std::cout << k << ": " << (v.get<bool>() ? "pass" : "fail") << "\n";
    return report.exit_code;
  } catch (const carleman::Error& e) {
    std::cerr << command << ": error: " << e.what() << "\n";
    return carleman::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << command << ": error: " << e.what() << "\n";
    return 3;
  }
}
