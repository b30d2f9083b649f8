#include "gdrom/analysis.hpp"

#include "gdrom/csv.hpp"
#include "gdrom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace gdrom {

DecayFit fit_decay(std::span<const real> errors) {
  DecayFit fit;
  const auto n = static_cast<Index>(errors.size());
  if (n < 2 || errors[0] <= 0.0 || errors[1] <= 0.0) return fit;
  const Index tail = std::max<Index>(1, n / 5);
  std::vector<real> last(errors.end() - tail, errors.end());
  std::nth_element(last.begin(), last.begin() + tail / 2, last.end());
  fit.floor = last[tail / 2];

  Index end = 1;
  while (end + 1 < n && errors[end + 1] > 0.0 && errors[end + 1] >= 3.0 * fit.floor) ++end;

  real sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<real>(end + 1);
  for (Index i = 0; i <= end; ++i) {
    const auto x = static_cast<real>(i);
    const real y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.valid = true;
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.ratio = std::exp(fit.slope);
  fit.first = 0;
  fit.last = end;
  return fit;
}

namespace {

real max_from(const std::vector<real>& t, const std::vector<real>& v, real t_from) {
  real best = -std::numeric_limits<real>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_from) best = std::max(best, v[i]);
  return best;
}

}  // namespace

QoIDeviation max_deviation(const QoISeries& series, const QoISeries& reference, real t_from) {
  auto dev = [&](const std::vector<real>& a, const std::vector<real>& b) {
    const real ma = max_from(series.t, a, t_from), mb = max_from(reference.t, b, t_from);
    if (!std::isfinite(ma) || !std::isfinite(mb)) throw std::invalid_argument("max_deviation: empty window");
    return std::abs(ma - mb);
  };
  return {dev(series.e_kin, reference.e_kin), dev(series.c_d, reference.c_d), dev(series.c_l, reference.c_l)};
}

QoISeries rom_qoi(const RomTrajectory& traj, const PodBasis& basis, const DragLiftEvaluator* drag_lift, real nu) {
  QoISeries q;
  VelocityField prev = drag_lift ? reconstruct(basis, traj.a.col(0)) : VelocityField{};
  for (Index n = 1; n < traj.size(); ++n) {
    DragLift dl{0.0, 0.0};
    if (drag_lift) {
      VelocityField u = reconstruct(basis, traj.a.col(n));
      dl = (*drag_lift)(u, prev, traj.t[n] - traj.t[n - 1], nu);
      prev = std::move(u);
    }
    q.push(traj.t[n], traj.e_kin[n], dl.drag, dl.lift);
  }
  return q;
}

ErrorReport error_report(const RomTrajectory& traj, const SnapshotSet& reference, const PodBasis& basis,
                         const SparseMatrix& mass, const ReportOptions& options) {
  if (reference.count() == 0) throw std::invalid_argument("error_report: empty reference");
  if (reference.n_dofs() != basis.n_dofs()) throw std::invalid_argument("error_report: reference on another space");
  ErrorReport r;
  real sum = 0.0, proj_sum = 0.0, scale = 0.0;
  Index counted = 0;
  for (Index n = 0; n < traj.size(); ++n) {
    const real t = traj.t[n];
    const real pos = reference.count() > 1 ? (t - reference.t_first) / reference.dt : 0.0;
    const auto j = static_cast<Index>(std::llround(pos));
    if (j < 0 || j >= reference.count()) continue;
    if (std::abs(reference.time(j) - t) > 0.5 * reference.dt + 1e-9 * reference.dt) continue;
    const VelocityField& u = reference.data.col(j);
    const VectorX a_ref = project(basis, mass, u);
    const VectorX a = traj.a.col(n);
    const VectorX full = reconstruct(basis, a) - u;
    const VectorX best = reconstruct(basis, a_ref) - u;
    scale = std::max(scale, std::sqrt(u.dot(mass * u)));
    r.t.push_back(t);
    r.error.push_back(std::sqrt(std::max(0.0, full.dot(mass * full))));
    r.projection_error.push_back((a - a_ref).norm());
    r.best.push_back(std::sqrt(std::max(0.0, best.dot(mass * best))));
    if (t >= options.t_from) {
      sum += r.error.back() * r.error.back();
      proj_sum += r.projection_error.back() * r.projection_error.back();
      ++counted;
    }
  }
  if (counted == 0) throw std::invalid_argument("error_report: trajectory and reference do not overlap");
  r.mean_square = sum / static_cast<real>(counted);
  r.l2l2 = std::sqrt(r.mean_square);
  r.projection_l2l2 = std::sqrt(proj_sum / static_cast<real>(counted));
  // A trajectory that reproduces the projected reference has nothing to fit.
  if (*std::max_element(r.projection_error.begin(), r.projection_error.end()) > 1e-12 * scale)
    r.decay = fit_decay(r.projection_error);
  return r;
}

void attach_qoi(ErrorReport& report, const QoISeries& rom, const QoISeries& reference, const ReportOptions& options) {
  report.qoi = max_deviation(rom, reference, options.t_from);
}

void write_report_csv(const std::filesystem::path& path, const ErrorReport& report) {
  CsvWriter w(path, {"metric", "value"});
  w.row("l2l2_error", report.l2l2);
  w.row("mean_square_error", report.mean_square);
  w.row("l2l2_projection_error", report.projection_l2l2);
  w.row("max_error", report.error.empty() ? 0.0 : *std::max_element(report.error.begin(), report.error.end()));
  w.row("decay_fit_valid", report.decay.valid ? 1.0 : 0.0);
  w.row("decay_slope", report.decay.slope);
  w.row("decay_ratio", report.decay.ratio);
  w.row("decay_floor", report.decay.floor);
  w.row("decay_last_step", static_cast<real>(report.decay.last));
  if (report.qoi) {
    w.row("e_kin_max_deviation", report.qoi->e_kin);
    w.row("c_d_max_deviation", report.qoi->c_d);
    w.row("c_l_max_deviation", report.qoi->c_l);
  }
  w.close();
}

void write_error_series_csv(const std::filesystem::path& path, const ErrorReport& report) {
  CsvWriter w(path, {"t", "error", "projection_error", "best"});
  for (std::size_t i = 0; i < report.t.size(); ++i)
    w.row({report.t[i], report.error[i], report.projection_error[i], report.best[i]});
  w.close();
}

void write_qoi_csv(const std::filesystem::path& path, const QoISeries& qoi) {
  CsvWriter w(path, {"t", "e_kin", "c_d", "c_l"});
  for (std::size_t i = 0; i < qoi.size(); ++i) w.row({qoi.t[i], qoi.e_kin[i], qoi.c_d[i], qoi.c_l[i]});
  w.close();
}

void write_trajectory_csv(const std::filesystem::path& path, const RomTrajectory& traj) {
  std::vector<std::string> header{"t"};
  for (Index k = 1; k <= traj.a.rows(); ++k) header.push_back("a_" + std::to_string(k));
  CsvWriter w(path, header);
  for (Index n = 0; n < traj.size(); ++n) {
    std::vector<real> row{traj.t[n]};
    for (Index k = 0; k < traj.a.rows(); ++k) row.push_back(traj.a(k, n));
    w.row(row);
  }
  w.close();
}

void write_eigenvalues_csv(const std::filesystem::path& path, const VectorX& eigenvalues) {
  CsvWriter w(path, {"k", "lambda"});
  for (Index k = 0; k < eigenvalues.size(); ++k) w.row({static_cast<real>(k + 1), eigenvalues[k]});
  w.close();
}

QoISeries read_qoi_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  QoISeries q;
  q.t = table.column("t");
  q.e_kin = table.column("e_kin");
  q.c_d = table.column("c_d");
  q.c_l = table.column("c_l");
  return q;
}

RomTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.empty() || table.header[0] != "t") throw IoError("trajectory CSV must start with column t");
  RomTrajectory traj;
  const auto l = static_cast<Index>(table.header.size() - 1);
  traj.a.resize(l, static_cast<Index>(table.rows.size()));
  for (std::size_t n = 0; n < table.rows.size(); ++n) {
    traj.t.push_back(parse_real(table.rows[n][0]));
    for (Index k = 0; k < l; ++k) traj.a(k, static_cast<Index>(n)) = parse_real(table.rows[n][k + 1]);
  }
  return traj;
}

std::string format_report_table(const std::vector<std::pair<std::string, ErrorReport>>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "method" << std::right << std::setw(16) << "l2(L2) error" << std::setw(16)
      << "|dE_kin max|" << std::setw(16) << "|dc_D max|" << std::setw(16) << "|dc_L max|" << '\n';
  out << std::scientific << std::setprecision(4);
  for (const auto& [label, r] : rows) {
    out << std::left << std::setw(24) << label << std::right << std::setw(16) << r.l2l2;
    if (r.qoi)
      out << std::setw(16) << r.qoi->e_kin << std::setw(16) << r.qoi->c_d << std::setw(16) << r.qoi->c_l;
    else
      out << std::setw(16) << "-" << std::setw(16) << "-" << std::setw(16) << "-";
    out << '\n';
  }
  return out.str();
}

}  // namespace gdrom
