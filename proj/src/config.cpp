#include "maflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "CLI11.hpp"

namespace maflow {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == ';') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + s + "'");
}

int to_int(const std::string& key, const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& t : tokens(s)) out.push_back(to_double(key, t));
  return out;
}

// Raw (section.key -> text) pairs from the INI reader.
struct RawConfig {
  std::map<std::string, std::string> values;
  std::vector<std::string> order;
};

RawConfig read_raw(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  RawConfig raw;
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    if (it.parents.size() > 1) throw ConfigError("nested sections are not supported");
    const std::string key = (it.parents.empty() ? std::string() : it.parents[0] + ".") + it.name;
    std::string joined;
    for (std::size_t k = 0; k < it.inputs.size(); ++k) joined += (k ? ", " : "") + it.inputs[k];
    if (raw.values.count(key)) throw ConfigError(key + ": given twice");
    raw.values[key] = joined;
    raw.order.push_back(key);
  }
  return raw;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "comparison",  "sup_bound", "minoinf",       "clef",          "stbelow",           "density_monotone",
      "density_min", "lelong_attenuation", "ncmaf_bound", "minodot", "c2_diagnostic", "oscillation_spread"};
  return names;
}

std::vector<Mode> parse_modes(const std::string& text, int n) {
  const auto tok = tokens(text);
  const std::size_t arity = 2 + 2 * static_cast<std::size_t>(n);
  if (tok.size() % arity != 0)
    throw ConfigError("mode list '" + text + "' does not split into entries of " + std::to_string(arity) + " tokens");
  std::vector<Mode> out;
  for (std::size_t k = 0; k < tok.size(); k += arity) {
    Mode m;
    m.amp = to_double("mode amplitude", tok[k]);
    if (tok[k + 1] == "sin")
      m.sine = true;
    else if (tok[k + 1] != "cos")
      throw ConfigError("mode kind must be cos or sin, got '" + tok[k + 1] + "'");
    for (int a = 0; a < 2 * n; ++a) m.m[a] = to_int("mode wavenumber", tok[k + 2 + a]);
    out.push_back(m);
  }
  return out;
}

std::string format_modes(const std::vector<Mode>& modes, int n) {
  std::string s;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (k) s += ", ";
    s += num(modes[k].amp) + (modes[k].sine ? " sin" : " cos");
    for (int a = 0; a < 2 * n; ++a) s += " " + std::to_string(modes[k].m[a]);
  }
  return s;
}

RunConfig parse_run_config(std::istream& in) {
  const RawConfig raw = read_raw(in);
  RunConfig c;
  std::set<std::string> used;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = raw.values.find(key);
    if (it == raw.values.end()) return nullptr;
    used.insert(key);
    return &it->second;
  };
  auto num_key = [&](const std::string& key, double& dst) {
    if (auto v = get(key)) dst = to_double(key, *v);
  };
  auto int_key = [&](const std::string& key, int& dst) {
    if (auto v = get(key)) dst = to_int(key, *v);
  };

  const std::string* schema = get("schema");
  if (schema == nullptr) throw ConfigError("missing 'schema = " + std::to_string(kConfigSchema) + "'");
  if (to_int("schema", *schema) != kConfigSchema)
    throw ConfigError("unsupported schema " + *schema + " (expected " + std::to_string(kConfigSchema) + ")");

  int n = 1, res = 64;
  double period = 1.0;
  int_key("grid.n", n);
  int_key("grid.res", res);
  num_key("grid.period", period);
  try {
    c.grid = TorusGrid::make(n, res, period);
  } catch (const InvalidSpec& e) {
    throw ConfigError(std::string("[grid] ") + e.what());
  }

  if (auto v = get("initial.kind")) {
    try {
      c.initial.kind = potential_kind_from_string(*v);
    } catch (const InvalidSpec& e) {
      throw ConfigError(std::string("initial.kind: ") + e.what());
    }
  }
  if (auto v = get("initial.modes")) c.initial.modes = parse_modes(*v, n);
  num_key("initial.gamma", c.initial.gamma);
  num_key("initial.exponent", c.initial.exponent);
  num_key("initial.depth", c.initial.depth);
  num_key("initial.clip_floor", c.initial.clip_floor);
  if (auto v = get("initial.z0")) {
    const auto z = to_doubles("initial.z0", *v);
    if (static_cast<int>(z.size()) != 2 * n) throw ConfigError("initial.z0: expected " + std::to_string(2 * n) + " coordinates");
    std::array<double, 4> p{0, 0, 0, 0};
    std::copy(z.begin(), z.end(), p.begin());
    c.initial.z0 = p;
  }
  if (auto v = get("initial.path")) c.initial.path = *v;
  int_key("initial.levels", c.levels);
  num_key("initial.truncation", c.truncation);
  if (auto v = get("initial.run")) {
    if (*v == "all")
      c.run_all_levels = true;
    else if (*v != "finest")
      throw ConfigError("initial.run: expected finest or all, got '" + *v + "'");
  }
  if (c.levels < 1) throw ConfigError("initial.levels must be >= 1");
  if (c.initial.kind == PotentialKind::FromFile && c.initial.path.empty())
    throw ConfigError("initial.path is required for kind = file");

  if (auto v = get("flow.variant")) {
    if (*v == "cmaf")
      c.variant = Variant::CMAF;
    else if (*v == "ncmaf")
      c.variant = Variant::NCMAF;
    else
      throw ConfigError("flow.variant: expected cmaf or ncmaf, got '" + *v + "'");
  }
  num_key("flow.c", c.c);
  if (auto v = get("flow.psi_modes")) c.psi_modes = parse_modes(*v, n);
  if (auto v = get("flow.h_modes")) c.h_modes = parse_modes(*v, n);
  num_key("flow.T", c.T);
  if (auto v = get("flow.policy")) {
    if (*v == "rk4")
      c.policy = StepPolicy::RK4;
    else if (*v == "semi_implicit")
      c.policy = StepPolicy::SemiImplicit;
    else
      throw ConfigError("flow.policy: expected rk4 or semi_implicit, got '" + *v + "'");
  }
  num_key("flow.dt_init", c.dt_init);
  num_key("flow.dt_min", c.dt_min);
  num_key("flow.safety", c.safety);
  num_key("flow.guard_fraction", c.guard_fraction);
  num_key("flow.guard_abs", c.guard_abs);
  if (auto v = get("flow.dealias")) c.dealias = to_bool("flow.dealias", *v);
  int_key("flow.workers", c.workers);
  if (c.workers < 1) throw ConfigError("flow.workers must be >= 1");

  if (auto v = get("verify.checks")) {
    c.checks = tokens(*v);
    for (const auto& name : c.checks)
      if (name != "all" && std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
        throw ConfigError("verify.checks: unknown check '" + name + "'");
  }
  num_key("verify.stbelow_a", c.stbelow_a);
  num_key("verify.lelong_beta", c.lelong_beta);
  if (auto v = get("verify.lelong_times")) c.lelong_times = to_doubles("verify.lelong_times", *v);
  for (const auto& name : known_checks()) {
    const std::string key = "verify.tol_" + name;
    if (auto v = get(key)) c.tolerances[name] = to_double(key, *v);
  }

  if (auto v = get("output.directory")) c.directory = *v;
  int_key("output.record_every", c.record_every);
  num_key("output.record_interval", c.record_interval);
  if (auto v = get("output.snapshot_times")) c.snapshot_times = to_doubles("output.snapshot_times", *v);

  for (const auto& key : raw.order)
    if (!used.count(key)) throw ConfigError("unknown key '" + key + "'");

  // Surface flow-level inconsistencies as configuration errors.
  try {
    c.initial.validate(c.grid);
    c.flow_config().prepared(c.grid);
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  return parse_run_config(in);
}

FlowConfig RunConfig::flow_config() const {
  FlowConfig f;
  f.variant = variant;
  if (!h_modes.empty()) f.h = modes_field(h_modes, grid);
  f.twist.c = c;
  if (!psi_modes.empty()) f.twist.psi_chi = modes_field(psi_modes, grid);
  f.T = T;
  f.policy = policy;
  f.dt_init = dt_init;
  f.dt_min = dt_min;
  f.safety = safety;
  f.guard_fraction = guard_fraction;
  f.guard_abs = guard_abs;
  f.record_every = record_every;
  f.record_interval = record_interval;
  f.record_times = snapshot_times;
  f.dealias = dealias;
  return f;
}

std::string to_ini(const RunConfig& c) {
  const int n = c.grid.n;
  std::ostringstream os;
  os << "schema = " << kConfigSchema << "\n\n";
  os << "[grid]\nn = " << n << "\nres = " << c.grid.res << "\nperiod = " << num(c.grid.period) << "\n\n";
  os << "[initial]\nkind = " << to_string(c.initial.kind) << "\n";
  if (!c.initial.modes.empty()) os << "modes = " << format_modes(c.initial.modes, n) << "\n";
  os << "gamma = " << num(c.initial.gamma) << "\nexponent = " << num(c.initial.exponent)
     << "\ndepth = " << num(c.initial.depth) << "\nclip_floor = " << num(c.initial.clip_floor) << "\n";
  if (c.initial.z0) {
    os << "z0 =";
    for (int a = 0; a < 2 * n; ++a) os << " " << num((*c.initial.z0)[a]);
    os << "\n";
  }
  if (!c.initial.path.empty()) os << "path = " << c.initial.path << "\n";
  os << "levels = " << c.levels << "\ntruncation = " << num(c.truncation)
     << "\nrun = " << (c.run_all_levels ? "all" : "finest") << "\n\n";
  os << "[flow]\nvariant = " << to_string(c.variant) << "\nc = " << num(c.c) << "\n";
  if (!c.psi_modes.empty()) os << "psi_modes = " << format_modes(c.psi_modes, n) << "\n";
  if (!c.h_modes.empty()) os << "h_modes = " << format_modes(c.h_modes, n) << "\n";
  os << "T = " << num(c.T) << "\npolicy = " << to_string(c.policy) << "\ndt_init = " << num(c.dt_init)
     << "\ndt_min = " << num(c.dt_min) << "\nsafety = " << num(c.safety) << "\nguard_fraction = "
     << num(c.guard_fraction) << "\nguard_abs = " << num(c.guard_abs)
     << "\ndealias = " << (c.dealias ? "true" : "false") << "\nworkers = " << c.workers << "\n\n";
  os << "[verify]\nchecks =";
  for (std::size_t k = 0; k < c.checks.size(); ++k) os << (k ? ", " : " ") << c.checks[k];
  os << "\nstbelow_a = " << num(c.stbelow_a) << "\nlelong_beta = " << num(c.lelong_beta) << "\n";
  if (!c.lelong_times.empty()) {
    os << "lelong_times =";
    for (std::size_t k = 0; k < c.lelong_times.size(); ++k) os << (k ? ", " : " ") << num(c.lelong_times[k]);
    os << "\n";
  }
  for (const auto& [name, tol] : c.tolerances) os << "tol_" << name << " = " << num(tol) << "\n";
  os << "\n[output]\ndirectory = " << c.directory << "\nrecord_every = " << c.record_every
     << "\nrecord_interval = " << num(c.record_interval) << "\n";
  if (!c.snapshot_times.empty()) {
    os << "snapshot_times =";
    for (std::size_t k = 0; k < c.snapshot_times.size(); ++k) os << (k ? ", " : " ") << num(c.snapshot_times[k]);
    os << "\n";
  }
  return os.str();
}

}  // namespace maflow
