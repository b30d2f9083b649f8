#pragma once

#include "gdrom/analysis.hpp"
#include "gdrom/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gdrom {

/// Fine discretization built from the configuration.
struct Problem {
  explicit Problem(const PipelineConfig& cfg);

  FemSpaces spaces;
  FomOperators ops;
};

CoarseInterp make_interp(const PipelineConfig& cfg, const FemSpaces& spaces);

/// Artifact file names inside an output directory.
namespace artifact {
inline constexpr const char* snapshots = "snapshots.bin";
inline constexpr const char* reference = "reference.bin";
inline constexpr const char* fom_qoi = "fom_qoi.csv";
inline constexpr const char* basis = "basis.bin";
inline constexpr const char* eigenvalues = "eigenvalues.csv";
inline constexpr const char* rom_dir = "rom";
inline constexpr const char* sweep_dir = "sweep";
inline constexpr const char* trajectory = "trajectory.csv";
inline constexpr const char* rom_qoi = "qoi.csv";
inline constexpr const char* report = "report.csv";
inline constexpr const char* errors = "errors.csv";
inline constexpr const char* table = "table.txt";
}  // namespace artifact

/// Reference fields with t >= rom.t_start, and the snapshots of the window.
struct FomArtifacts {
  SnapshotSet snapshots;
  SnapshotSet reference;
  QoISeries qoi;
};

FomArtifacts compute_fom(const PipelineConfig& cfg, const Problem& problem);

/// Basis from the leading pod.fraction of the snapshot window.
PodBasis compute_basis(const PipelineConfig& cfg, const Problem& problem, const SnapshotSet& snapshots);

struct OnlineRun {
  RomVariant variant = RomVariant::grad_div_da_rom;
  RomScheme scheme = RomScheme::bdf2;
  real mu = 0.0;
  real beta = 0.0;
};

OnlineRun configured_run(const PipelineConfig& cfg);

struct OnlineResult {
  RomTrajectory trajectory;
  QoISeries qoi;
};

/// Runs the ROM from the first reference time to rom.t_end.  The initial
/// state is zero for nudged variants and the projected reference otherwise,
/// unless rom.initial says otherwise.  Observations are replayed periodically.
OnlineResult compute_online(const PipelineConfig& cfg, const Problem& problem, const PodBasis& basis,
                            const CoarseInterp& interp, const SnapshotSet& observations,
                            const SnapshotSet& reference, const OnlineRun& run);

ReportOptions report_options(const PipelineConfig& cfg, const SnapshotSet& reference);

ErrorReport compute_report(const PipelineConfig& cfg, const Problem& problem, const PodBasis& basis,
                           const OnlineResult& online, const SnapshotSet& reference,
                           const QoISeries& reference_qoi);

struct StageResult {
  std::string command;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> outputs;
  double wall_seconds = 0.0;
};

StageResult fom_run(const PipelineConfig& cfg, const std::filesystem::path& out);
StageResult pod_build(const PipelineConfig& cfg, const std::filesystem::path& out);
StageResult rom_run(const PipelineConfig& cfg, const std::filesystem::path& out);
StageResult diagnose(const PipelineConfig& cfg, const std::filesystem::path& out);
/// One run directory per (variant, beta) plus a comparison table.
StageResult sweep(const PipelineConfig& cfg, const std::filesystem::path& out, int threads);

/// GDROM_THREADS, else the hardware concurrency.
int worker_threads();

/// 64-bit FNV-1a digest of a file's bytes.
std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace gdrom
