#pragma once

#include "gdrom/qoi.hpp"
#include "gdrom/rom.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gdrom {

/// Least-squares fit of log e_n against n over the pre-floor segment: from
/// n = 0 up to the first step whose error drops below 3 x floor, where floor
/// is the median of the last 20% of the series.  At least two points are used.
struct DecayFit {
  bool valid = false;  // false when the series has no positive entries to fit
  real slope = 0.0;    // per step, natural log
  real ratio = 0.0;    // exp(slope)
  real floor = 0.0;
  Index first = 0;
  Index last = 0;
};

DecayFit fit_decay(std::span<const real> errors);

/// |max X - max X_ref| over samples with t >= t_from.
struct QoIDeviation {
  real e_kin = 0.0;
  real c_d = 0.0;
  real c_l = 0.0;
};

QoIDeviation max_deviation(const QoISeries& series, const QoISeries& reference, real t_from);

/// QoI of a reduced trajectory.  Energies come from reduced variables; drag
/// and lift need reconstruction and are left zero without an evaluator.  The
/// initial level has no history and is skipped.
QoISeries rom_qoi(const RomTrajectory& traj, const PodBasis& basis, const DragLiftEvaluator* drag_lift, real nu);

struct ErrorReport {
  std::vector<real> t;
  std::vector<real> error;             // ||u_l^n - u^n||_0
  std::vector<real> projection_error;  // ||u_l^n - P_l u^n||_0
  std::vector<real> best;              // ||u^n - P_l u^n||_0
  real mean_square = 0.0;              // (1/N) sum ||u_l^n - u^n||^2
  real l2l2 = 0.0;                     // sqrt(mean_square)
  real projection_l2l2 = 0.0;
  std::optional<QoIDeviation> qoi;
  DecayFit decay;                      // fit of projection_error
};

struct ReportOptions {
  /// Levels before this time are left out of the aggregate norms and the QoI maxima.
  real t_from = -std::numeric_limits<real>::infinity();
};

/// Each trajectory level is compared with the reference snapshot nearest in
/// time; levels farther than half a snapshot step from every reference time
/// are dropped.  Throws invalid_argument if nothing overlaps.
ErrorReport error_report(const RomTrajectory& traj, const SnapshotSet& reference, const PodBasis& basis,
                         const SparseMatrix& mass, const ReportOptions& options = {});

void attach_qoi(ErrorReport& report, const QoISeries& rom, const QoISeries& reference, const ReportOptions& options);

/// `metric,value` rows.
void write_report_csv(const std::filesystem::path& path, const ErrorReport& report);
/// `t,error,projection_error,best` rows.
void write_error_series_csv(const std::filesystem::path& path, const ErrorReport& report);
void write_qoi_csv(const std::filesystem::path& path, const QoISeries& qoi);
void write_trajectory_csv(const std::filesystem::path& path, const RomTrajectory& traj);
void write_eigenvalues_csv(const std::filesystem::path& path, const VectorX& eigenvalues);

QoISeries read_qoi_csv(const std::filesystem::path& path);
RomTrajectory read_trajectory_csv(const std::filesystem::path& path);

/// Text table with one row per labelled report: l2(L2) error and QoI maxima deviations.
std::string format_report_table(const std::vector<std::pair<std::string, ErrorReport>>& rows);

}  // namespace gdrom
