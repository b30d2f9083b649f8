#pragma once

#include "gdrom/fom.hpp"
#include "gdrom/nudging.hpp"
#include "gdrom/rom.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gdrom {

/// Full-order run.  `mesh` is "unit-square" (structured, nx * nx cells) or a
/// mesh file path.
struct FomSection {
  std::string mesh = "unit-square";
  int nx = 24;
  real nu = 1e-3;
  real dt = 0.01;
  real t_end = 4.0;
  FomScheme scheme = FomScheme::bdf2_semi_implicit;
  std::string boundary = "no-slip";  // no-slip | channel
  real u_max = 1.5;
  real height = 0.41;
  std::string forcing = "gyres";  // none | gyres
  real forcing_amplitude = 3.0;
  real forcing_period = 1.0;
  real snap_start = 3.0;
  real snap_end = 4.0;
  int stride = 1;

  bool operator==(const FomSection&) const = default;
};

struct PodSection {
  int l = 6;
  bool centered = false;
  real drop_tol = 1e-10;
  /// Leading fraction of the snapshot window used for the basis.
  real fraction = 1.0;

  bool operator==(const PodSection&) const = default;
};

struct NudgingSection {
  InterpKind kind = InterpKind::nodal;
  /// Coarse cells per fine cell edge on a generated mesh (H = ratio h).
  int ratio = 4;
  /// Coarse mesh file; required when the fine mesh is a file.
  std::string coarse_mesh;

  bool operator==(const NudgingSection&) const = default;
};

struct RomSection {
  RomVariant variant = RomVariant::grad_div_da_rom;
  RomScheme scheme = RomScheme::bdf2;
  int l = 0;  // 0: all modes of the basis
  real mu = 0.01;
  real beta = 500.0;
  real t_start = 3.0;
  real t_end = 4.0;
  std::string initial = "auto";  // auto | zero | projection

  bool operator==(const RomSection&) const = default;
};

struct AnalysisSection {
  /// Levels within this time after the ROM start are left out of the norms.
  real skip = 0.05;
  real diameter = 0.1;
  real mean_velocity = 1.0;

  bool operator==(const AnalysisSection&) const = default;
};

struct SweepSection {
  std::vector<real> betas{10.0, 100.0, 500.0};
  std::vector<RomVariant> variants{RomVariant::da_rom, RomVariant::grad_div_da_rom};

  bool operator==(const SweepSection&) const = default;
};

struct PipelineConfig {
  std::string profile = "desk";
  FomSection fom;
  PodSection pod;
  NudgingSection nudging;
  RomSection rom;
  AnalysisSection analysis;
  SweepSection sweep;

  bool operator==(const PipelineConfig&) const = default;

  bool generated_mesh() const { return fom.mesh == "unit-square"; }
  /// Number of modes the online stage uses.
  int rom_size() const { return rom.l > 0 ? rom.l : pod.l; }
};

/// desk, re100-full, re100-inaccurate, re1000-full, re1000-inaccurate.
const std::vector<std::string>& profile_names();
PipelineConfig profile_defaults(const std::string& name);

/// Parses INI text.  The optional top-level `profile` key selects the
/// defaults; relative paths are resolved against base_dir.  Throws
/// ConfigError with the offending key.
PipelineConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig parse_config(const std::filesystem::path& path);

/// Every key of the resolved configuration, in INI form.
std::string serialize_config(const PipelineConfig& cfg);

/// Consistency checks across sections; parse_config calls it.
void validate(const PipelineConfig& cfg);

/// Full-order settings; the forcing and boundary data are instantiated.
FomConfig make_fom_config(const PipelineConfig& cfg);
Forcing make_forcing(const PipelineConfig& cfg);
Mesh make_mesh(const PipelineConfig& cfg);
Mesh make_coarse_mesh(const PipelineConfig& cfg);

}  // namespace gdrom
