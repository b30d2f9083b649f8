#include "doctest.h"

#include "gdrom/csv.hpp"
#include "gdrom/errors.hpp"
#include "gdrom/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gdrom;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gdrom_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key;
  }
  return "";
}

// Ten snapshots on an 8 x 8 mesh; the reference window coincides with the
// snapshot window.
const char* kSmall = R"(profile = desk

[fom]
nx = 8
t_end = 1.1
snap_start = 1.0
snap_end = 1.1

[pod]
l = 4

[rom]
t_start = 1.0
t_end = 1.1
)";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GDROM_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("a minimal desk file resolves to the documented defaults") {
  const PipelineConfig cfg = parse_config_text("profile = desk\n");
  CHECK(cfg == profile_defaults("desk"));
  CHECK(cfg.fom.nx == 24);
  CHECK(cfg.fom.nu == 1e-3);
  CHECK(cfg.pod.l == 6);
  CHECK(cfg.nudging.ratio == 4);
  CHECK(cfg.rom.variant == RomVariant::grad_div_da_rom);
  CHECK(cfg.rom_size() == 6);
  CHECK(parse_config_text("") == cfg);
  CHECK(parse_config_text("[fom]\n") == cfg);
}

TEST_CASE("reproduction profiles carry the experiment matrix") {
  const PipelineConfig full = profile_defaults("re100-full");
  CHECK(full.pod.l == 8);
  CHECK(full.pod.centered);
  CHECK(full.rom.mu == 0.15);
  CHECK(full.pod.fraction == 1.0);
  CHECK(full.fom.dt == 2e-3);
  const PipelineConfig inaccurate = profile_defaults("re1000-inaccurate");
  CHECK(inaccurate.rom.mu == 0.001);
  CHECK(inaccurate.fom.nu == 1e-4);
  CHECK(inaccurate.pod.fraction == 0.64);
  CHECK(profile_names().size() == 5);
  CHECK(config_error_key("profile = re100-full\n") == "fom.mesh");
  CHECK(config_error_key("profile = nonsense\n") == "profile");
}

TEST_CASE("inconsistent or malformed configurations name the offending key") {
  CHECK(config_error_key("[rom]\nvariant = g-rom\nbeta = 10\n") == "rom.beta");
  CHECK(config_error_key("[rom]\nvariant = da-rom\nbeta = 0\n") == "rom.beta");
  CHECK(config_error_key("[fom]\nnu = fast\n") == "fom.nu");
  CHECK(config_error_key("[fom]\nnx = 2.5\n") == "fom.nx");
  CHECK(config_error_key("[fom]\nviscosity = 1\n") == "fom.viscosity");
  CHECK(config_error_key("[solver]\ntol = 1\n") == "solver.tol");
  CHECK(config_error_key("color = red\n") == "color");
  CHECK(config_error_key("[nudging]\nratio = 5\n") == "nudging.ratio");
  CHECK(config_error_key("[nudging]\nkind = spline\n") == "nudging.kind");
  CHECK(config_error_key("[nudging]\nbeta = 10\n[rom]\nbeta = 100\n") == "nudging.beta");
  CHECK(config_error_key("[pod]\nl = 7\n[rom]\nl = 8\n") == "rom.l");
  CHECK(config_error_key("[pod]\ncentered = maybe\n") == "pod.centered");
  CHECK(config_error_key("[sweep]\nvariants = g-rom\n") == "sweep.variants");
  CHECK(config_error_key("[fom]\nsnap_end = 9\n") == "fom.snap_end");
  CHECK(config_error_key("[fom]\nnu = 1\nnu = 2\n").starts_with("line"));

  const PipelineConfig g = parse_config_text("[rom]\nvariant = g-rom\nbeta = 0\n");
  CHECK(g.rom.variant == RomVariant::g_rom);
  CHECK(parse_config_text("[nudging]\nbeta = 100\n").rom.beta == 100.0);
  CHECK(parse_config_text("[nudging]\nbeta = 100\n[rom]\nbeta = 100\n").rom.beta == 100.0);
}

TEST_CASE("serialization round trip") {
  const std::string text = R"(profile = desk
[fom]
nx = 12
nu = 0.00123
scheme = euler
forcing = none
[pod]
centered = true
fraction = 0.64
[nudging]
kind = pc
ratio = 3
[rom]
variant = grad-div-rom
beta = 0
mu = 0.15
scheme = euler
initial = zero
[sweep]
betas = 1, 2.5
variants = grad-div-da-rom
)";
  const PipelineConfig cfg = parse_config_text(text);
  CHECK(cfg.fom.nx == 12);
  CHECK(cfg.nudging.kind == InterpKind::piecewise_constant);
  CHECK(cfg.sweep.betas == std::vector<real>{1.0, 2.5});
  const std::string once = serialize_config(cfg);
  const PipelineConfig again = parse_config_text(once);
  CHECK(again == cfg);
  CHECK(serialize_config(again) == once);
  CHECK(parse_config_text(serialize_config(profile_defaults("desk"))) == profile_defaults("desk"));
}

TEST_CASE("the shipped desk configuration equals the desk profile") {
  CHECK(parse_config(fs::path(GDROM_SOURCE_DIR) / "configs" / "desk.ini") == profile_defaults("desk"));
}

TEST_CASE("relative mesh paths resolve against the configuration file") {
  const fs::path dir = scratch_dir("paths");
  save_mesh(dir / "fine.msh", generate_rect_mesh(4, 4));
  save_mesh(dir / "coarse.msh", generate_rect_mesh(2, 2));
  write_file(dir / "cfg.ini", "[fom]\nmesh = fine.msh\n[nudging]\ncoarse_mesh = coarse.msh\n");
  const PipelineConfig cfg = parse_config(dir / "cfg.ini");
  CHECK(fs::path(cfg.fom.mesh) == (dir / "fine.msh").lexically_normal());
  CHECK(make_mesh(cfg).n_triangles() == 32);
  CHECK(make_coarse_mesh(cfg).n_triangles() == 8);
  write_file(dir / "missing.ini", "[fom]\nmesh = nowhere.msh\n[nudging]\ncoarse_mesh = coarse.msh\n");
  CHECK_THROWS_AS(parse_config(dir / "missing.ini"), ConfigError);
  CHECK_THROWS_AS(parse_config(dir / "absent.ini"), IoError);
}

TEST_CASE("stages produce their artifacts and manifests") {
  const fs::path dir = scratch_dir("stages");
  const PipelineConfig cfg = parse_config_text(kSmall);

  try {
    pod_build(cfg, dir);
    FAIL("pod-build ran without snapshots");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("fom-run") != std::string::npos);
  }

  fom_run(cfg, dir);
  const SnapshotSet snaps = load_snapshots(dir / artifact::snapshots);
  CHECK(snaps.count() == 10);
  CHECK(fs::exists(dir / "manifest-fom-run.json"));
  CHECK(parse_config(dir / "config.ini") == cfg);

  SUBCASE("pod-build keeps l modes and writes the eigenvalues") {
    pod_build(cfg, dir);
    const Problem problem(cfg);
    const PodBasis basis = load_basis(dir / artifact::basis, problem.ops);
    CHECK(basis.size() == 4);
    const CsvTable eig = read_csv(dir / artifact::eigenvalues);
    CHECK(eig.header == std::vector<std::string>{"k", "lambda"});
    CHECK(eig.rows.size() == static_cast<std::size_t>(basis.rank()));
    CHECK(basis.rank() == 10);
    const std::string manifest = read_file(dir / "manifest-pod-build.json");
    CHECK(manifest.find("snapshots.bin") != std::string::npos);
    CHECK(manifest.find("fnv1a64") != std::string::npos);
    CHECK(manifest.find("wall_seconds") != std::string::npos);
  }

  SUBCASE("downstream stages report the missing producer") {
    try {
      rom_run(cfg, dir);
      FAIL("rom-run ran without a basis");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("pod-build") != std::string::npos);
    }
    pod_build(cfg, dir);
    try {
      diagnose(cfg, dir);
      FAIL("diagnose ran without a trajectory");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("rom-run") != std::string::npos);
    }
  }

  SUBCASE("sweep writes one directory per run and a table") {
    pod_build(cfg, dir);
    const StageResult r = sweep(cfg, dir, 3);
    int runs = 0;
    for (const auto& entry : fs::directory_iterator(dir / artifact::sweep_dir))
      if (entry.is_directory()) {
        ++runs;
        for (const char* f : {artifact::trajectory, artifact::rom_qoi, artifact::report, artifact::errors})
          CHECK(fs::exists(entry.path() / f));
      }
    CHECK(runs == 6);
    const std::string table = read_file(r.directory / artifact::table);
    CHECK(table.find("grad-div-da-rom beta=500") != std::string::npos);
    CHECK(std::count(table.begin(), table.end(), '\n') == 7);

    // Parallel and sequential sweeps agree bit for bit.
    const fs::path seq = scratch_dir("stages_seq");
    for (const char* f : {artifact::snapshots, artifact::reference, artifact::fom_qoi, artifact::basis})
      fs::copy_file(dir / f, seq / f);
    sweep(cfg, seq, 1);
    for (const char* run : {"da-rom-beta10", "grad-div-da-rom-beta500"})
      for (const char* f : {artifact::trajectory, artifact::report})
        CHECK(file_digest(dir / "sweep" / run / f) == file_digest(seq / "sweep" / run / f));
  }
}

TEST_CASE("rom-run is deterministic") {
  const fs::path dir = scratch_dir("determinism");
  const PipelineConfig cfg = parse_config_text(kSmall);
  fom_run(cfg, dir);
  pod_build(cfg, dir);
  rom_run(cfg, dir);
  const auto first = file_digest(dir / artifact::rom_dir / artifact::trajectory);
  rom_run(cfg, dir);
  CHECK(file_digest(dir / artifact::rom_dir / artifact::trajectory) == first);
}

TEST_CASE("diagnose on a trajectory that reproduces the reference reports zero error") {
  const fs::path dir = scratch_dir("diagnose");
  PipelineConfig cfg = parse_config_text(kSmall);
  cfg.pod.l = 10;
  fom_run(cfg, dir);
  pod_build(cfg, dir);

  const Problem problem(cfg);
  const PodBasis basis = load_basis(dir / artifact::basis, problem.ops);
  const SnapshotSet ref = load_snapshots(dir / artifact::reference);
  REQUIRE(ref.count() == 10);
  RomTrajectory traj;
  traj.a.resize(basis.size(), ref.count());
  for (Index j = 0; j < ref.count(); ++j) {
    traj.t.push_back(ref.time(j));
    traj.a.col(j) = project(basis, problem.ops.mass, ref.data.col(j));
    traj.e_kin.push_back(kinetic_energy(problem.ops.mass, reconstruct(basis, traj.a.col(j))));
  }
  fs::create_directories(dir / artifact::rom_dir);
  write_trajectory_csv(dir / artifact::rom_dir / artifact::trajectory, traj);
  write_qoi_csv(dir / artifact::rom_dir / artifact::rom_qoi, rom_qoi(traj, basis, nullptr, cfg.fom.nu));

  diagnose(cfg, dir);
  const CsvTable report = read_csv(dir / artifact::rom_dir / artifact::report);
  const auto names = report.text_column("metric");
  const auto values = report.column("value");
  const real scale = std::sqrt(ref.data.col(0).dot(problem.ops.mass * ref.data.col(0)));
  for (std::size_t i = 0; i < names.size(); ++i) {
    CAPTURE(names[i]);
    if (names[i] == "l2l2_error" || names[i] == "l2l2_projection_error" || names[i] == "max_error")
      CHECK(values[i] <= 1e-10 * scale);
    if (names[i] == "decay_fit_valid") CHECK(values[i] == 0.0);
  }
}

TEST_CASE("command line grammar and exit codes") {
  const fs::path dir = scratch_dir("exit");
  write_file(dir / "ok.ini", kSmall);
  write_file(dir / "bad.ini", "[rom]\nvariant = g-rom\nbeta = 10\n");
  const std::string out = " --out " + (dir / "out").string();

  CHECK(run_cli("pod-build --config " + (dir / "ok.ini").string() + out) == 4);
  CHECK(run_cli("fom-run --config " + (dir / "bad.ini").string() + out) == 2);
  CHECK(run_cli("fom-run") == 2);
  CHECK(run_cli("launch --config " + (dir / "ok.ini").string()) == 2);
  CHECK(run_cli("fom-run --config " + (dir / "ok.ini").string() + out) == 0);
  CHECK(run_cli("pod-build --config " + (dir / "ok.ini").string() + out) == 0);
  CHECK(fs::exists(dir / "out" / artifact::basis));
}
