#include "gdrom/config.hpp"

#include "gdrom/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace gdrom {

namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

real to_real(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  real value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(value))
    throw ConfigError(key, "expected a number, got '" + text + "'");
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  int value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

template <class Parse>
auto parse_enum(const std::string& key, const std::string& text, Parse parse) {
  try {
    return parse(trim(text));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

FomScheme parse_fom_scheme(const std::string& s) {
  if (s == "bdf2") return FomScheme::bdf2_semi_implicit;
  if (s == "euler") return FomScheme::implicit_euler;
  throw std::invalid_argument("unknown scheme '" + s + "' (bdf2 | euler)");
}

std::string fom_scheme_name(FomScheme s) { return s == FomScheme::bdf2_semi_implicit ? "bdf2" : "euler"; }

std::string shortest(real value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(PipelineConfig&, const std::string& path, const std::string& text)> set;
  std::function<std::string(const PipelineConfig&)> get;
  std::string path() const { return section + "." + key; }
};

template <class Section, class T>
Field number(const char* section, const char* key, Section PipelineConfig::*sec, T Section::*member) {
  return {section, key,
          [=](PipelineConfig& c, const std::string& path, const std::string& text) {
            if constexpr (std::is_same_v<T, int>)
              c.*sec.*member = to_int(path, text);
            else
              c.*sec.*member = to_real(path, text);
          },
          [=](const PipelineConfig& c) {
            if constexpr (std::is_same_v<T, int>)
              return std::to_string(c.*sec.*member);
            else
              return shortest(c.*sec.*member);
          }};
}

template <class Section>
Field text(const char* section, const char* key, Section PipelineConfig::*sec, std::string Section::*member,
           std::vector<std::string> choices = {}) {
  return {section, key,
          [=](PipelineConfig& c, const std::string& path, const std::string& value) {
            const std::string v = trim(value);
            if (!choices.empty() && std::find(choices.begin(), choices.end(), v) == choices.end())
              throw ConfigError(path, "unknown value '" + v + "' (" + join(choices) + ")");
            c.*sec.*member = v;
          },
          [=](const PipelineConfig& c) { return c.*sec.*member; }};
}

const std::vector<Field>& fields() {
  using C = PipelineConfig;
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(text("fom", "mesh", &C::fom, &FomSection::mesh));
    f.push_back(number("fom", "nx", &C::fom, &FomSection::nx));
    f.push_back(number("fom", "nu", &C::fom, &FomSection::nu));
    f.push_back(number("fom", "dt", &C::fom, &FomSection::dt));
    f.push_back(number("fom", "t_end", &C::fom, &FomSection::t_end));
    f.push_back({"fom", "scheme",
                 [](C& c, const std::string& p, const std::string& v) {
                   c.fom.scheme = parse_enum(p, v, parse_fom_scheme);
                 },
                 [](const C& c) { return fom_scheme_name(c.fom.scheme); }});
    f.push_back(text("fom", "boundary", &C::fom, &FomSection::boundary, {"no-slip", "channel"}));
    f.push_back(number("fom", "u_max", &C::fom, &FomSection::u_max));
    f.push_back(number("fom", "height", &C::fom, &FomSection::height));
    f.push_back(text("fom", "forcing", &C::fom, &FomSection::forcing, {"none", "gyres"}));
    f.push_back(number("fom", "forcing_amplitude", &C::fom, &FomSection::forcing_amplitude));
    f.push_back(number("fom", "forcing_period", &C::fom, &FomSection::forcing_period));
    f.push_back(number("fom", "snap_start", &C::fom, &FomSection::snap_start));
    f.push_back(number("fom", "snap_end", &C::fom, &FomSection::snap_end));
    f.push_back(number("fom", "stride", &C::fom, &FomSection::stride));

    f.push_back(number("pod", "l", &C::pod, &PodSection::l));
    f.push_back({"pod", "centered",
                 [](C& c, const std::string& p, const std::string& v) { c.pod.centered = to_bool(p, v); },
                 [](const C& c) { return std::string(c.pod.centered ? "true" : "false"); }});
    f.push_back(number("pod", "drop_tol", &C::pod, &PodSection::drop_tol));
    f.push_back(number("pod", "fraction", &C::pod, &PodSection::fraction));

    f.push_back({"nudging", "kind",
                 [](C& c, const std::string& p, const std::string& v) {
                   c.nudging.kind = parse_enum(p, v, parse_interp_kind);
                   if (c.nudging.kind == InterpKind::identity)
                     throw ConfigError(p, "identity is a test-only kind (nodal | pc)");
                 },
                 [](const C& c) { return to_string(c.nudging.kind); }});
    f.push_back(number("nudging", "ratio", &C::nudging, &NudgingSection::ratio));
    f.push_back(text("nudging", "coarse_mesh", &C::nudging, &NudgingSection::coarse_mesh));

    f.push_back({"rom", "variant",
                 [](C& c, const std::string& p, const std::string& v) {
                   c.rom.variant = parse_enum(p, v, parse_rom_variant);
                 },
                 [](const C& c) { return to_string(c.rom.variant); }});
    f.push_back({"rom", "scheme",
                 [](C& c, const std::string& p, const std::string& v) {
                   c.rom.scheme = parse_enum(p, v, parse_rom_scheme);
                 },
                 [](const C& c) { return to_string(c.rom.scheme); }});
    f.push_back(number("rom", "l", &C::rom, &RomSection::l));
    f.push_back(number("rom", "mu", &C::rom, &RomSection::mu));
    f.push_back(number("rom", "beta", &C::rom, &RomSection::beta));
    f.push_back(number("rom", "t_start", &C::rom, &RomSection::t_start));
    f.push_back(number("rom", "t_end", &C::rom, &RomSection::t_end));
    f.push_back(text("rom", "initial", &C::rom, &RomSection::initial, {"auto", "zero", "projection"}));

    f.push_back(number("analysis", "skip", &C::analysis, &AnalysisSection::skip));
    f.push_back(number("analysis", "diameter", &C::analysis, &AnalysisSection::diameter));
    f.push_back(number("analysis", "mean_velocity", &C::analysis, &AnalysisSection::mean_velocity));

    f.push_back({"sweep", "betas",
                 [](C& c, const std::string& p, const std::string& v) {
                   c.sweep.betas.clear();
                   for (const auto& item : split_list(v)) c.sweep.betas.push_back(to_real(p, item));
                 },
                 [](const C& c) {
                   std::vector<std::string> items;
                   for (real b : c.sweep.betas) items.push_back(shortest(b));
                   return join(items);
                 }});
    f.push_back({"sweep", "variants",
                 [](C& c, const std::string& p, const std::string& v) {
                   c.sweep.variants.clear();
                   for (const auto& item : split_list(v))
                     c.sweep.variants.push_back(parse_enum(p, item, parse_rom_variant));
                 },
                 [](const C& c) {
                   std::vector<std::string> items;
                   for (RomVariant v : c.sweep.variants) items.push_back(to_string(v));
                   return join(items);
                 }});
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

bool is_section(const std::string& name) {
  return std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.section == name; }) ||
         name == "nudging";
}

bool is_path_key(const std::string& path) { return path == "fom.mesh" || path == "nudging.coarse_mesh"; }

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

bool is_da(RomVariant v) { return v == RomVariant::da_rom || v == RomVariant::grad_div_da_rom; }

}  // namespace

const std::vector<std::string>& profile_names() {
  static const std::vector<std::string> names{"desk", "re100-full", "re100-inaccurate", "re1000-full",
                                              "re1000-inaccurate"};
  return names;
}

PipelineConfig profile_defaults(const std::string& name) {
  PipelineConfig c;
  c.profile = name;
  if (name == "desk") return c;
  if (std::find(profile_names().begin(), profile_names().end(), name) == profile_names().end())
    throw ConfigError("profile", "unknown profile '" + name + "' (" + join(profile_names()) + ")");

  const bool re1000 = name.starts_with("re1000");
  c.fom.mesh = "";
  c.fom.nu = re1000 ? 1e-4 : 1e-3;
  c.fom.dt = 2e-3;
  c.fom.t_end = 7.0;
  c.fom.boundary = "channel";
  c.fom.u_max = 1.5;
  c.fom.height = 0.41;
  c.fom.forcing = "none";
  c.fom.snap_start = 5.0;
  c.fom.snap_end = re1000 ? 5.22 : 5.332;
  c.pod.l = 8;
  c.pod.centered = true;
  c.pod.fraction = name.ends_with("inaccurate") ? 0.64 : 1.0;
  c.nudging.kind = InterpKind::nodal;
  c.rom.variant = RomVariant::grad_div_da_rom;
  c.rom.mu = re1000 ? 0.001 : 0.15;
  c.rom.beta = 500.0;
  c.rom.t_start = 5.0;
  c.rom.t_end = 7.0;
  c.analysis.skip = 0.01;
  c.analysis.diameter = 0.1;
  c.analysis.mean_velocity = 1.0;
  return c;
}

PipelineConfig parse_config_text(const std::string& content, const fs::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(content);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }

  std::string profile = "desk";
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (is_section(name) && trim(node.data()).empty()) continue;
      if (name != "profile") throw ConfigError(name, "unknown top-level key");
      profile = trim(node.data());
    }
  }
  PipelineConfig cfg = profile_defaults(profile);

  std::optional<real> nudging_beta;
  for (const auto& [section, node] : tree) {
    if (node.empty()) continue;
    for (const auto& [key, value] : node) {
      const std::string path = section + "." + key;
      if (!value.empty()) throw ConfigError(path, "nested keys are not supported");
      if (path == "nudging.beta") {
        nudging_beta = to_real(path, value.data());
        continue;
      }
      const Field* f = find_field(section, key);
      if (!f) throw ConfigError(path, "unknown key");
      std::string text = value.data();
      if (is_path_key(path) && !trim(text).empty() && trim(text) != "unit-square") {
        fs::path p = trim(text);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        text = p.lexically_normal().string();
      }
      f->set(cfg, path, text);
    }
  }
  if (nudging_beta) {
    const bool rom_beta_given = tree.get_child_optional("rom.beta").has_value();
    if (rom_beta_given && *nudging_beta != cfg.rom.beta)
      throw ConfigError("nudging.beta", "disagrees with rom.beta");
    cfg.rom.beta = *nudging_beta;
  }
  validate(cfg);
  return cfg;
}

PipelineConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), fs::absolute(path).parent_path());
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "profile = " << cfg.profile << "\n";
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      section = f.section;
      out << "\n[" << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << "\n";
  }
  return out.str();
}

void validate(const PipelineConfig& c) {
  const auto& f = c.fom;
  if (c.generated_mesh()) {
    require(f.nx >= 1, "fom.nx", "must be >= 1");
  } else {
    require(!f.mesh.empty(), "fom.mesh",
            "required for profile " + c.profile + " (generate one with tools/make_cylinder_mesh.py)");
    require(fs::exists(f.mesh), "fom.mesh", "file not found: " + f.mesh);
  }
  require(f.nu > 0.0, "fom.nu", "must be positive");
  require(f.dt > 0.0, "fom.dt", "must be positive");
  require(f.t_end > 0.0, "fom.t_end", "must be positive");
  require(f.height > 0.0, "fom.height", "must be positive");
  require(f.forcing_period > 0.0, "fom.forcing_period", "must be positive");
  require(f.stride >= 1, "fom.stride", "must be >= 1");
  require(f.snap_start >= 0.0 && f.snap_start < f.snap_end, "fom.snap_start", "must lie in [0, fom.snap_end)");
  require(f.snap_end <= f.t_end, "fom.snap_end", "must not exceed fom.t_end");

  const auto& p = c.pod;
  require(p.l >= 1 && p.l <= kMaxRomSize, "pod.l", "must lie in [1, " + std::to_string(kMaxRomSize) + "]");
  require(p.drop_tol > 0.0 && p.drop_tol < 1.0, "pod.drop_tol", "must lie in (0, 1)");
  require(p.fraction > 0.0 && p.fraction <= 1.0, "pod.fraction", "must lie in (0, 1]");

  const auto& n = c.nudging;
  if (c.generated_mesh()) {
    require(n.ratio >= 1 && f.nx % n.ratio == 0, "nudging.ratio", "must divide fom.nx");
  } else {
    require(!n.coarse_mesh.empty(), "nudging.coarse_mesh", "required when fom.mesh is a file");
    require(fs::exists(n.coarse_mesh), "nudging.coarse_mesh", "file not found: " + n.coarse_mesh);
  }

  const auto& r = c.rom;
  require(r.l >= 0 && r.l <= p.l, "rom.l", "must lie in [0, pod.l]");
  require(r.mu >= 0.0, "rom.mu", "must be nonnegative");
  require(r.beta >= 0.0, "rom.beta", "must be nonnegative");
  if (is_da(r.variant))
    require(r.beta > 0.0, "rom.beta", "must be positive for " + to_string(r.variant));
  else
    require(r.beta == 0.0, "rom.beta", "must be 0 for " + to_string(r.variant));
  require(r.t_start >= f.dt && r.t_start < f.t_end, "rom.t_start", "must lie in [fom.dt, fom.t_end)");
  require(r.t_end > r.t_start && r.t_end <= f.t_end, "rom.t_end", "must lie in (rom.t_start, fom.t_end]");

  const auto& a = c.analysis;
  require(a.skip >= 0.0, "analysis.skip", "must be nonnegative");
  require(a.diameter > 0.0, "analysis.diameter", "must be positive");
  require(a.mean_velocity > 0.0, "analysis.mean_velocity", "must be positive");

  require(!c.sweep.betas.empty(), "sweep.betas", "must not be empty");
  for (real b : c.sweep.betas) require(b > 0.0, "sweep.betas", "entries must be positive");
  require(!c.sweep.variants.empty(), "sweep.variants", "must not be empty");
  for (RomVariant v : c.sweep.variants)
    require(is_da(v), "sweep.variants", to_string(v) + " takes no nudging parameter");
}

Forcing make_forcing(const PipelineConfig& cfg) {
  if (cfg.fom.forcing == "gyres") return rotating_gyres(cfg.fom.forcing_amplitude, cfg.fom.forcing_period);
  return {};
}

FomConfig make_fom_config(const PipelineConfig& cfg) {
  FomConfig f;
  f.nu = cfg.fom.nu;
  f.dt = cfg.fom.dt;
  f.t_end = cfg.fom.t_end;
  f.u_max = cfg.fom.u_max;
  f.height = cfg.fom.height;
  f.forcing = make_forcing(cfg);
  f.boundary = cfg.fom.boundary == "channel" ? parabolic_inflow(cfg.fom.u_max, cfg.fom.height) : no_slip();
  f.snap_start = cfg.fom.snap_start;
  f.snap_end = cfg.fom.snap_end;
  f.stride = cfg.fom.stride;
  f.scheme = cfg.fom.scheme;
  f.scales = {cfg.analysis.diameter, cfg.analysis.mean_velocity};
  return f;
}

Mesh make_mesh(const PipelineConfig& cfg) {
  if (cfg.generated_mesh()) return generate_rect_mesh(cfg.fom.nx, cfg.fom.nx);
  return load_mesh(cfg.fom.mesh);
}

Mesh make_coarse_mesh(const PipelineConfig& cfg) {
  if (cfg.generated_mesh()) {
    const int nc = cfg.fom.nx / cfg.nudging.ratio;
    return generate_rect_mesh(nc, nc);
  }
  return load_mesh(cfg.nudging.coarse_mesh);
}

}  // namespace gdrom
