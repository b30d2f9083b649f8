#include "gdrom/errors.hpp"
#include "gdrom/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum ExitCode { ok = 0, failure = 1, config_error = 2, numerical_failure = 3, io_error = 4 };

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "gdrom: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grad-div stabilized, nudged POD reduced-order models for Navier-Stokes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "gdrom-out";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"fom-run", "Full-order run: snapshots, reference fields and QoI"},
      {"pod-build", "POD basis and eigenvalues from the snapshots"},
      {"rom-run", "Reduced-order run of the configured variant"},
      {"diagnose", "Error report of the ROM run against the reference"},
      {"sweep", "Nudging parameter grid over the configured variants"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Artifact directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const gdrom::PipelineConfig cfg = gdrom::parse_config(config_path);
    gdrom::StageResult r;
    if (command == "fom-run")
      r = gdrom::fom_run(cfg, out_dir);
    else if (command == "pod-build")
      r = gdrom::pod_build(cfg, out_dir);
    else if (command == "rom-run")
      r = gdrom::rom_run(cfg, out_dir);
    else if (command == "diagnose")
      r = gdrom::diagnose(cfg, out_dir);
    else
      r = gdrom::sweep(cfg, out_dir, gdrom::worker_threads());
    std::cout << r.command << ": wrote " << r.outputs.size() << " files to " << r.directory.string() << " in "
              << r.wall_seconds << " s\n";
    if (command == "diagnose" || command == "sweep") {
      std::ifstream table(r.directory / gdrom::artifact::table);
      std::cout << table.rdbuf();
    }
    return ok;
  } catch (const gdrom::ConfigError& e) {
    return report("config error", e, config_error);
  } catch (const gdrom::IoError& e) {
    return report("I/O error", e, io_error);
  } catch (const gdrom::ParseError& e) {
    return report("I/O error", e, io_error);
  } catch (const gdrom::SolverError& e) {
    return report("numerical failure", e, numerical_failure);
  } catch (const gdrom::InsufficientData& e) {
    return report("numerical failure", e, numerical_failure);
  } catch (const gdrom::GeometryError& e) {
    return report("config error", e, config_error);
  } catch (const std::invalid_argument& e) {
    return report("invalid input", e, config_error);
  } catch (const std::exception& e) {
    return report("error", e, failure);
  }
}
