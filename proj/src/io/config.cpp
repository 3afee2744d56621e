#include "acrom/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "acrom/error.hpp"

namespace acrom {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Value {
 public:
  Value(std::string key, std::string text) : key_(std::move(key)), text_(std::move(text)) {}

  double number() const {
    double v = 0.0;
    const char* b = text_.data();
    const char* e = b + text_.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) fail("a number");
    return v;
  }
  int integer() const {
    int v = 0;
    const char* b = text_.data();
    const char* e = b + text_.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) fail("an integer");
    return v;
  }
  int count_or_full() const { return text_ == "full" || text_ == "all" ? kAllModes : positive(); }
  int positive() const {
    const int v = integer();
    if (v < 1) throw ConfigError("config key '" + key_ + "': must be at least 1 (got " + text_ + ")");
    return v;
  }
  bool boolean() const {
    if (text_ == "true" || text_ == "yes" || text_ == "1") return true;
    if (text_ == "false" || text_ == "no" || text_ == "0") return false;
    fail("true or false");
    return false;
  }
  std::string word(std::initializer_list<const char*> allowed) const {
    for (const char* a : allowed)
      if (text_ == a) return text_;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
    fail("one of " + list);
    return {};
  }
  const std::string& text() const { return text_; }
  template <class T, class F>
  std::vector<T> list(F&& convert) const {
    std::vector<T> out;
    std::stringstream ss(text_);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(convert(Value(key_, trim(item))));
    if (out.empty()) fail("a non-empty list");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    throw ConfigError("config key '" + key_ + "': expected " + expected + ", got '" + text_ + "'");
  }
  std::string key_;
  std::string text_;
};

using Setter = std::function<void(PipelineConfig&, const Value&)>;

std::map<std::string, Setter> make_setters() {
  std::map<std::string, Setter> t;
  t["mesh.r1"] = [](PipelineConfig& c, const Value& v) { c.mesh.geometry.r1 = v.number(); };
  t["mesh.r2"] = [](PipelineConfig& c, const Value& v) { c.mesh.geometry.r2 = v.number(); };
  t["mesh.c1"] = [](PipelineConfig& c, const Value& v) { c.mesh.geometry.c1 = v.number(); };
  t["mesh.c2"] = [](PipelineConfig& c, const Value& v) { c.mesh.geometry.c2 = v.number(); };
  t["mesh.h"] = [](PipelineConfig& c, const Value& v) { c.mesh.h = v.number(); };
  t["offline.nu"] = [](PipelineConfig& c, const Value& v) { c.offline.nu = v.number(); };
  t["offline.eps"] = [](PipelineConfig& c, const Value& v) { c.offline.eps = v.number(); };
  t["offline.dt"] = [](PipelineConfig& c, const Value& v) { c.offline.dt = v.number(); };
  t["offline.t_start"] = [](PipelineConfig& c, const Value& v) { c.offline.t_start = v.number(); };
  t["offline.t_end"] = [](PipelineConfig& c, const Value& v) { c.offline.t_end = v.number(); };
  t["offline.snapshot_every"] = [](PipelineConfig& c, const Value& v) { c.offline.snapshot_every = v.positive(); };
  t["offline.snapshot_from"] = [](PipelineConfig& c, const Value& v) { c.offline.snapshot_from = v.number(); };
  t["offline.initial_state"] = [](PipelineConfig& c, const Value& v) {
    c.offline.initial_state = v.word({"rest", "file"}) == "rest" ? InitialState::Rest : InitialState::FromFile;
  };
  t["offline.initial_path"] = [](PipelineConfig& c, const Value& v) { c.offline.initial_path = v.text(); };
  t["offline.forcing"] = [](PipelineConfig& c, const Value& v) {
    c.offline.forcing = v.word({"rotating", "none"}) == "rotating" ? ForcingKind::Rotating : ForcingKind::None;
  };
  t["offline.checkpoint_every"] = [](PipelineConfig& c, const Value& v) {
    c.offline.checkpoint_every = v.integer();
  };
  t["pod.velocity_modes"] = [](PipelineConfig& c, const Value& v) { c.pod.velocity_modes = v.count_or_full(); };
  t["pod.pressure_modes"] = [](PipelineConfig& c, const Value& v) { c.pod.pressure_modes = v.count_or_full(); };
  t["rom.modes"] = [](PipelineConfig& c, const Value& v) {
    c.rom.modes = v.list<int>([](const Value& x) { return x.positive(); });
  };
  t["rom.pressure_modes"] = [](PipelineConfig& c, const Value& v) {
    c.rom.pressure_modes = v.list<int>([](const Value& x) { return x.positive(); });
  };
  t["rom.dt"] = [](PipelineConfig& c, const Value& v) { c.rom.dt = v.number(); };
  t["rom.t_start"] = [](PipelineConfig& c, const Value& v) { c.rom.t_start = v.number(); };
  t["rom.t_end"] = [](PipelineConfig& c, const Value& v) { c.rom.t_end = v.number(); };
  t["rom.stress_includes_nu"] = [](PipelineConfig& c, const Value& v) { c.rom.stress_includes_nu = v.boolean(); };
  t["angles.max_modes"] = [](PipelineConfig& c, const Value& v) { c.angles.max_modes = v.positive(); };
  t["convergence.dts"] = [](PipelineConfig& c, const Value& v) {
    c.convergence.dts = v.list<double>([](const Value& x) { return x.number(); });
  };
  t["convergence.modes"] = [](PipelineConfig& c, const Value& v) { c.convergence.modes = v.positive(); };
  t["convergence.pressure_modes"] = [](PipelineConfig& c, const Value& v) {
    c.convergence.pressure_modes = v.positive();
  };
  t["convergence.t_start"] = [](PipelineConfig& c, const Value& v) { c.convergence.t_start = v.number(); };
  t["convergence.t_end"] = [](PipelineConfig& c, const Value& v) { c.convergence.t_end = v.number(); };
  return t;
}

const char* const kRequired[] = {"mesh.h", "offline.dt", "offline.t_end"};

void validate(const PipelineConfig& c) {
  if (!(c.mesh.h > 0.0)) throw ConfigError("config key 'mesh.h': must be positive");
  c.offline.validate();
  if (!c.rom.pressure_modes.empty() && c.rom.pressure_modes.size() != c.rom.modes.size())
    throw ConfigError("config key 'rom.pressure_modes': needs one entry per 'rom.modes' entry");
  if (c.rom.dt && !(*c.rom.dt > 0.0)) throw ConfigError("config key 'rom.dt': must be positive");
  for (double dt : c.convergence.dts)
    if (!(dt > 0.0)) throw ConfigError("config key 'convergence.dts': every step must be positive");
}

}  // namespace

PipelineConfig parse_config_text(const std::string& text, const std::string& origin,
                                 const std::filesystem::path& base_dir) {
  static const std::map<std::string, Setter> table = make_setters();
  PipelineConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    auto it = table.find(full);
    if (it == table.end()) throw ConfigError(where + ": unknown config key '" + full + "'");
    if (!seen.insert(full).second) throw ConfigError(where + ": duplicate config key '" + full + "'");
    if (value.empty()) throw ConfigError(where + ": config key '" + full + "' has no value");
    it->second(cfg, Value(full, value));
  }
  if (!cfg.offline.initial_path.empty() && cfg.offline.initial_path.is_relative() && !base_dir.empty())
    cfg.offline.initial_path = base_dir / cfg.offline.initial_path;
  for (const char* req : kRequired)
    if (!seen.count(req)) throw ConfigError(origin + ": missing required config key '" + std::string(req) + "'");
  validate(cfg);
  return cfg;
}

PipelineConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw MissingArtifactError("missing config file: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path.string(), path.parent_path());
}

}  // namespace acrom
