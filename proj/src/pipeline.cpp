#include "gdrom/pipeline.hpp"

#include "gdrom/csv.hpp"
#include "gdrom/errors.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace gdrom {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_da(RomVariant v) { return v == RomVariant::da_rom || v == RomVariant::grad_div_da_rom; }

fs::path require_artifact(const fs::path& dir, const std::string& name, const std::string& producer) {
  const fs::path p = dir / name;
  if (!fs::exists(p))
    throw IoError(p.string() + " not found; run `gdrom " + producer + " --config <file> --out " + dir.string() +
                  "` first");
  return p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

json file_entries(const std::vector<fs::path>& files, const fs::path& dir) {
  json list = json::array();
  for (const auto& f : files)
    list.push_back({{"file", fs::relative(f, dir).generic_string()}, {"fnv1a64", hex(file_digest(f))}});
  return list;
}

void write_manifest(const StageResult& r, const PipelineConfig& cfg, const std::vector<fs::path>& inputs,
                    json parameters) {
  json m;
  m["command"] = r.command;
  m["rerun"] = "gdrom " + r.command + " --config config.ini --out <dir>";
  m["profile"] = cfg.profile;
  m["config"] = serialize_config(cfg);
  m["inputs"] = file_entries(inputs, r.directory);
  m["outputs"] = file_entries(r.outputs, r.directory);
  m["parameters"] = std::move(parameters);
  m["wall_seconds"] = r.wall_seconds;
  const fs::path path = r.directory / ("manifest-" + r.command + ".json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << m.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

void write_config_copy(const PipelineConfig& cfg, const fs::path& dir) {
  const fs::path path = dir / "config.ini";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_config(cfg);
}

void check_size(const PodBasis& basis, const Problem& problem, const std::string& what) {
  if (basis.n_dofs() != problem.spaces.n_velocity())
    throw IoError(what + " does not match the configured mesh; rerun pod-build");
}

void check_size(const SnapshotSet& set, const Problem& problem, const std::string& what) {
  if (set.n_dofs() != problem.spaces.n_velocity())
    throw IoError(what + " does not match the configured mesh; rerun fom-run");
}

std::string run_label(RomVariant v, real beta) { return to_string(v) + "-beta" + format_real(beta); }

struct OnlineInputs {
  Problem problem;
  PodBasis basis;
  SnapshotSet observations;
  SnapshotSet reference;
  QoISeries reference_qoi;
  std::vector<fs::path> files;

  OnlineInputs(const PipelineConfig& cfg, const fs::path& out) : problem(cfg) {
    const fs::path basis_file = require_artifact(out, artifact::basis, "pod-build");
    const fs::path snap_file = require_artifact(out, artifact::snapshots, "fom-run");
    const fs::path ref_file = require_artifact(out, artifact::reference, "fom-run");
    const fs::path qoi_file = require_artifact(out, artifact::fom_qoi, "fom-run");
    basis = load_basis(basis_file, problem.ops);
    check_size(basis, problem, artifact::basis);
    observations = load_snapshots(snap_file);
    check_size(observations, problem, artifact::snapshots);
    reference = load_snapshots(ref_file);
    check_size(reference, problem, artifact::reference);
    reference_qoi = read_qoi_csv(qoi_file);
    files = {basis_file, snap_file, ref_file, qoi_file};
  }
};

json run_parameters(const OnlineRun& run, const PipelineConfig& cfg) {
  return {{"variant", to_string(run.variant)},
          {"scheme", to_string(run.scheme)},
          {"l", cfg.rom_size()},
          {"nu", cfg.fom.nu},
          {"mu", run.mu},
          {"beta", run.beta},
          {"t_start", cfg.rom.t_start},
          {"t_end", cfg.rom.t_end},
          {"initial", cfg.rom.initial}};
}

}  // namespace

Problem::Problem(const PipelineConfig& cfg) : spaces(make_mesh(cfg)), ops(assemble_operators(spaces)) {}

CoarseInterp make_interp(const PipelineConfig& cfg, const FemSpaces& spaces) {
  return build_coarse_interp(spaces, make_coarse_mesh(cfg), cfg.nudging.kind);
}

FomArtifacts compute_fom(const PipelineConfig& cfg, const Problem& problem) {
  const FomConfig fc = make_fom_config(cfg);
  const real eps = 1e-9 * fc.dt;
  std::vector<VectorX> ref;
  real ref_first = 0.0;
  FomRun run = run_fom(problem.spaces, problem.ops, fc, [&](const FomState& s) {
    if (s.time < cfg.rom.t_start - eps) return;
    if (ref.empty()) ref_first = s.time;
    ref.push_back(s.u);
  });
  FomArtifacts a;
  a.snapshots = std::move(run.snapshots);
  a.qoi = std::move(run.qoi);
  if (a.snapshots.count() == 0) throw ConfigError("fom.snap_start", "the snapshot window holds no time step");
  if (ref.size() < 2) throw ConfigError("rom.t_start", "fewer than two reference steps after rom.t_start");
  a.reference.dt = fc.dt;
  a.reference.t_first = ref_first;
  a.reference.data.resize(problem.spaces.n_velocity(), static_cast<Index>(ref.size()));
  for (std::size_t j = 0; j < ref.size(); ++j) a.reference.data.col(static_cast<Index>(j)) = ref[j];
  return a;
}

PodBasis compute_basis(const PipelineConfig& cfg, const Problem& problem, const SnapshotSet& snapshots) {
  const auto m = std::max<Index>(
      1, static_cast<Index>(std::floor(cfg.pod.fraction * static_cast<real>(snapshots.count()) + 1e-9)));
  const SnapshotSet used = snapshots.leading(m);
  return build_pod(used, problem.ops, cfg.pod.l, cfg.pod.centered, cfg.pod.drop_tol);
}

OnlineRun configured_run(const PipelineConfig& cfg) {
  return {cfg.rom.variant, cfg.rom.scheme, cfg.rom.mu, cfg.rom.beta};
}

OnlineResult compute_online(const PipelineConfig& cfg, const Problem& problem, const PodBasis& full_basis,
                            const CoarseInterp& interp, const SnapshotSet& observations,
                            const SnapshotSet& reference, const OnlineRun& run) {
  const PodBasis basis = full_basis.truncated(cfg.rom_size());
  const RomParameters params = apply_variant(run.variant, {cfg.fom.nu, run.mu, run.beta});
  NudgingAlgebra algebra = build_nudging_algebra(basis, interp, observations, params.beta);
  const RomSystem sys = build_rom_system(basis, problem.spaces, problem.ops, std::move(algebra), params,
                                         make_forcing(cfg));

  const bool zero = cfg.rom.initial == "zero" || (cfg.rom.initial == "auto" && is_da(run.variant));
  const VectorX a0 = zero ? VectorX::Zero(basis.size()).eval()
                          : project(basis, problem.ops.mass, reference.data.col(0));
  const RomSchedule schedule{reference.t_first, cfg.rom.t_end, cfg.fom.dt, run.scheme};

  OnlineResult r;
  r.trajectory = run_rom(run.variant, sys, schedule, a0);
  std::optional<DragLiftEvaluator> drag_lift;
  if (problem.spaces.mesh().has_tag(BoundaryTag::cylinder))
    drag_lift.emplace(problem.spaces, problem.ops, stokes_test_functions(problem.spaces, problem.ops),
                      DragLiftScales{cfg.analysis.diameter, cfg.analysis.mean_velocity});
  r.qoi = rom_qoi(r.trajectory, basis, drag_lift ? &*drag_lift : nullptr, cfg.fom.nu);
  return r;
}

ReportOptions report_options(const PipelineConfig& cfg, const SnapshotSet& reference) {
  ReportOptions o;
  o.t_from = reference.t_first + cfg.analysis.skip - 1e-9 * cfg.fom.dt;
  return o;
}

ErrorReport compute_report(const PipelineConfig& cfg, const Problem& problem, const PodBasis& full_basis,
                           const OnlineResult& online, const SnapshotSet& reference,
                           const QoISeries& reference_qoi) {
  const PodBasis basis = full_basis.truncated(static_cast<Index>(online.trajectory.a.rows()));
  const ReportOptions o = report_options(cfg, reference);
  ErrorReport report = error_report(online.trajectory, reference, basis, problem.ops.mass, o);
  attach_qoi(report, online.qoi, reference_qoi, o);
  return report;
}

StageResult fom_run(const PipelineConfig& cfg, const fs::path& out) {
  const auto start = Clock::now();
  ensure_dir(out);
  const Problem problem(cfg);
  const FomArtifacts a = compute_fom(cfg, problem);

  StageResult r{"fom-run", out, {}, 0.0};
  save_snapshots(out / artifact::snapshots, a.snapshots);
  save_snapshots(out / artifact::reference, a.reference);
  write_qoi_csv(out / artifact::fom_qoi, a.qoi);
  write_config_copy(cfg, out);
  r.outputs = {out / artifact::snapshots, out / artifact::reference, out / artifact::fom_qoi, out / "config.ini"};
  r.wall_seconds = seconds_since(start);
  write_manifest(r, cfg, {},
                 {{"velocity_dofs", problem.spaces.n_velocity()},
                  {"pressure_dofs", problem.spaces.n_pressure()},
                  {"h", problem.spaces.mesh().h()},
                  {"snapshots", a.snapshots.count()},
                  {"snapshot_t_first", a.snapshots.t_first},
                  {"reference_fields", a.reference.count()},
                  {"reference_t_first", a.reference.t_first}});
  return r;
}

StageResult pod_build(const PipelineConfig& cfg, const fs::path& out) {
  const auto start = Clock::now();
  const fs::path snap_file = require_artifact(out, artifact::snapshots, "fom-run");
  const Problem problem(cfg);
  const SnapshotSet snapshots = load_snapshots(snap_file);
  check_size(snapshots, problem, artifact::snapshots);
  const PodBasis basis = compute_basis(cfg, problem, snapshots);

  StageResult r{"pod-build", out, {}, 0.0};
  save_basis(out / artifact::basis, basis);
  write_eigenvalues_csv(out / artifact::eigenvalues, basis.eigenvalues);
  r.outputs = {out / artifact::basis, out / artifact::eigenvalues};
  r.wall_seconds = seconds_since(start);
  write_manifest(r, cfg, {snap_file},
                 {{"l", basis.size()},
                  {"rank", basis.rank()},
                  {"centered", basis.centered},
                  {"snapshots_used", static_cast<Index>(std::max<real>(
                                         1.0, std::floor(cfg.pod.fraction * snapshots.count() + 1e-9)))},
                  {"stiffness_norm", basis.stiffness_norm}});
  return r;
}

StageResult rom_run(const PipelineConfig& cfg, const fs::path& out) {
  const auto start = Clock::now();
  const OnlineInputs in(cfg, out);
  const CoarseInterp interp = make_interp(cfg, in.problem.spaces);
  const OnlineRun run = configured_run(cfg);
  const OnlineResult online = compute_online(cfg, in.problem, in.basis, interp, in.observations, in.reference, run);

  const fs::path dir = out / artifact::rom_dir;
  ensure_dir(dir);
  StageResult r{"rom-run", dir, {}, 0.0};
  write_trajectory_csv(dir / artifact::trajectory, online.trajectory);
  write_qoi_csv(dir / artifact::rom_qoi, online.qoi);
  r.outputs = {dir / artifact::trajectory, dir / artifact::rom_qoi};
  r.wall_seconds = seconds_since(start);
  write_manifest(r, cfg, in.files, run_parameters(run, cfg));
  return r;
}

StageResult diagnose(const PipelineConfig& cfg, const fs::path& out) {
  const auto start = Clock::now();
  const OnlineInputs in(cfg, out);
  const fs::path dir = out / artifact::rom_dir;
  const fs::path traj_file = require_artifact(dir, artifact::trajectory, "rom-run");
  const fs::path qoi_file = require_artifact(dir, artifact::rom_qoi, "rom-run");
  OnlineResult online{read_trajectory_csv(traj_file), read_qoi_csv(qoi_file)};
  if (online.trajectory.a.rows() > in.basis.size())
    throw IoError(traj_file.string() + " has more coefficients than the basis; rerun rom-run");
  const ErrorReport report = compute_report(cfg, in.problem, in.basis, online, in.reference, in.reference_qoi);

  StageResult r{"diagnose", dir, {}, 0.0};
  write_report_csv(dir / artifact::report, report);
  write_error_series_csv(dir / artifact::errors, report);
  std::ofstream table(dir / artifact::table);
  table << format_report_table({{to_string(cfg.rom.variant), report}});
  table.close();
  r.outputs = {dir / artifact::report, dir / artifact::errors, dir / artifact::table};
  r.wall_seconds = seconds_since(start);
  std::vector<fs::path> inputs = in.files;
  inputs.push_back(traj_file);
  inputs.push_back(qoi_file);
  write_manifest(r, cfg, inputs, {{"t_from", report_options(cfg, in.reference).t_from}, {"l2l2", report.l2l2}});
  return r;
}

StageResult sweep(const PipelineConfig& cfg, const fs::path& out, int threads) {
  const auto start = Clock::now();
  const OnlineInputs in(cfg, out);
  const CoarseInterp interp = make_interp(cfg, in.problem.spaces);

  std::vector<OnlineRun> runs;
  for (RomVariant v : cfg.sweep.variants)
    for (real beta : cfg.sweep.betas) runs.push_back({v, cfg.rom.scheme, cfg.rom.mu, beta});

  const fs::path dir = out / artifact::sweep_dir;
  ensure_dir(dir);
  std::vector<ErrorReport> reports(runs.size());
  std::vector<std::exception_ptr> failures(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        const auto run_start = Clock::now();
        const OnlineRun& run = runs[i];
        const OnlineResult online =
            compute_online(cfg, in.problem, in.basis, interp, in.observations, in.reference, run);
        reports[i] = compute_report(cfg, in.problem, in.basis, online, in.reference, in.reference_qoi);
        const fs::path run_dir = dir / run_label(run.variant, run.beta);
        ensure_dir(run_dir);
        StageResult rr{"sweep-run", run_dir, {}, 0.0};
        write_trajectory_csv(run_dir / artifact::trajectory, online.trajectory);
        write_qoi_csv(run_dir / artifact::rom_qoi, online.qoi);
        write_report_csv(run_dir / artifact::report, reports[i]);
        write_error_series_csv(run_dir / artifact::errors, reports[i]);
        rr.outputs = {run_dir / artifact::trajectory, run_dir / artifact::rom_qoi, run_dir / artifact::report,
                      run_dir / artifact::errors};
        rr.wall_seconds = seconds_since(run_start);
        write_manifest(rr, cfg, in.files, run_parameters(run, cfg));
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp<int>(threads, 1, static_cast<int>(runs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<std::pair<std::string, ErrorReport>> rows;
  for (std::size_t i = 0; i < runs.size(); ++i)
    rows.emplace_back(to_string(runs[i].variant) + " beta=" + format_real(runs[i].beta), reports[i]);
  StageResult r{"sweep", dir, {}, 0.0};
  std::ofstream table(dir / artifact::table);
  table << format_report_table(rows);
  table.close();
  if (!table) throw IoError("write failed for " + (dir / artifact::table).string());
  r.outputs.push_back(dir / artifact::table);
  r.wall_seconds = seconds_since(start);
  json grid = json::array();
  for (const auto& run : runs) grid.push_back(run_label(run.variant, run.beta));
  write_manifest(r, cfg, in.files, {{"runs", grid}, {"threads", n_threads}});
  return r;
}

int worker_threads() {
  if (const char* env = std::getenv("GDROM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof(buffer));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace gdrom
