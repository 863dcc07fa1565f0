#include "swhs/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace swhs {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path + "'", path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;

  std::istringstream stream(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::size_t cut = raw.find_first_of("#;");
    std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header",
                          line);
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                            ": expected 'key = value', got '" + line + "'",
                        line);
    }
    Entry entry;
    entry.key = trim(std::string_view(line).substr(0, eq));
    entry.value = trim(std::string_view(line).substr(eq + 1));
    entry.line = line_no;
    if (entry.key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key", line);
    }
    if (!section.empty()) entry.key = section + "." + entry.key;
    cfg.entries_.push_back(std::move(entry));
  }
  return cfg;
}

const Config::Entry* Config::find(const std::string& key) const {
  // later entries override earlier ones
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return &*it;
  }
  return nullptr;
}

void Config::fail(const Entry& entry, const std::string& what) const {
  throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": field '" + entry.key +
                        "': " + what,
                    entry.key);
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

std::string Config::get_string(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "'", key);
  return e->value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

Rational Config::get_rational(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "'", key);
  auto parsed = parse_rational(e->value);
  if (!parsed) fail(*e, "'" + e->value + "' is not a rational, integer or decimal");
  return *parsed;
}

Rational Config::get_rational(const std::string& key, const Rational& fallback) const {
  return find(key) ? get_rational(key) : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  return find(key) ? to_double(get_rational(key)) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  Rational r = get_rational(key);
  if (denominator(r) != 1) fail(*e, "expected an integer");
  BigInt num = numerator(r);
  if (num < -2147483648LL || num > 2147483647LL) fail(*e, "integer out of range");
  return num.convert_to<int>();
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::string v = lower(e->value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(*e, "expected a boolean");
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.key);
  return out;
}

namespace {

// sectioned lookup with bare-key fallback
bool lookup(const Config& cfg, const std::string& section, const std::string& key,
            std::string& found) {
  std::string sectioned = section + "." + key;
  if (cfg.has(sectioned)) {
    found = sectioned;
    return true;
  }
  if (cfg.has(key)) {
    found = key;
    return true;
  }
  return false;
}

Rational param(const Config& cfg, const std::string& key, const Rational& fallback) {
  std::string k;
  return lookup(cfg, "params", key, k) ? cfg.get_rational(k) : fallback;
}

Rational required_param(const Config& cfg, const std::string& key) {
  std::string k;
  if (!lookup(cfg, "params", key, k)) {
    throw ConfigError(cfg.origin() + ": missing required key 'params." + key + "'",
                      "params." + key);
  }
  return cfg.get_rational(k);
}

int param_int(const Config& cfg, const std::string& key, int fallback) {
  std::string k;
  return lookup(cfg, "params", key, k) ? cfg.get_int(k, fallback) : fallback;
}

}  // namespace

InequalityParams inequality_from_config(const Config& cfg) {
  InequalityParams ip;
  ip.n = param_int(cfg, "n", ip.n);
  ip.p = required_param(cfg, "p");
  ip.q_prime = required_param(cfg, "q_prime");
  ip.alpha = param(cfg, "alpha", ip.alpha);
  ip.beta = param(cfg, "beta", ip.beta);
  ip.lambda = param(cfg, "lambda", ip.lambda);
  ip.mu = param(cfg, "mu", ip.mu);
  ip.exact = true;
  return ip;
}

SystemParams system_from_config(const Config& cfg) {
  std::string k;
  if (!lookup(cfg, "params", "p0", k) && !lookup(cfg, "params", "q0", k)) {
    return derive_el_exponents(inequality_from_config(cfg));
  }
  SystemParams sys;
  sys.n = param_int(cfg, "n", sys.n);
  sys.p0 = required_param(cfg, "p0");
  sys.q0 = required_param(cfg, "q0");
  sys.alpha = param(cfg, "alpha", sys.alpha);
  sys.beta = param(cfg, "beta", sys.beta);
  sys.lambda = param(cfg, "lambda", sys.lambda);
  sys.mu = param(cfg, "mu", sys.mu);
  sys.exact = true;
  return sys;
}

GridSpec grid_from_config(const Config& cfg) {
  GridSpec spec;
  std::string k;
  spec.n = param_int(cfg, "n", spec.n);
  if (lookup(cfg, "grid", "r_min", k)) spec.r_min = cfg.get_double(k, spec.r_min);
  if (lookup(cfg, "grid", "r_max", k)) spec.r_max = cfg.get_double(k, spec.r_max);
  if (lookup(cfg, "grid", "n_radial", k)) spec.n_radial = cfg.get_int(k, spec.n_radial);
  if (lookup(cfg, "grid", "n_height", k)) spec.n_height = cfg.get_int(k, spec.n_height);
  if (lookup(cfg, "grid", "n_angular", k)) spec.n_angular = cfg.get_int(k, spec.n_angular);
  if (lookup(cfg, "grid", "spacing", k)) {
    std::string v = lower(cfg.get_string(k));
    if (v == "geometric") {
      spec.spacing = Spacing::Geometric;
    } else if (v == "uniform") {
      spec.spacing = Spacing::Uniform;
    } else if (v == "equal-measure" || v == "equal_measure") {
      spec.spacing = Spacing::EqualMeasure;
    } else {
      throw ConfigError(cfg.origin() + ": field '" + k + "': unknown spacing '" + v +
                            "' (geometric, uniform, equal-measure)",
                        k);
    }
  }
  if (lookup(cfg, "grid", "mode", k)) {
    std::string v = lower(cfg.get_string(k));
    if (v == "reduced") {
      spec.mode = GridMode::Reduced;
    } else if (v == "full") {
      spec.mode = GridMode::Full;
    } else {
      throw ConfigError(cfg.origin() + ": field '" + k + "': unknown mode '" + v +
                            "' (reduced, full)",
                        k);
    }
  }
  return spec;
}

SolveOptions solve_options_from_config(const Config& cfg) {
  SolveOptions opts;
  std::string k;
  if (lookup(cfg, "solve", "max_iters", k)) opts.max_iters = cfg.get_int(k, opts.max_iters);
  if (lookup(cfg, "solve", "tol_rel", k)) opts.tol_rel = cfg.get_double(k, opts.tol_rel);
  if (lookup(cfg, "solve", "damping", k)) opts.damping = cfg.get_double(k, opts.damping);
  if (lookup(cfg, "solve", "symmetrize_each_step", k)) {
    opts.symmetrize_each_step = cfg.get_bool(k, opts.symmetrize_each_step);
  }
  if (lookup(cfg, "solve", "random_start", k)) {
    opts.random_start = cfg.get_bool(k, opts.random_start);
  }
  if (lookup(cfg, "solve", "seed", k)) {
    Rational r = cfg.get_rational(k);
    opts.seed = numerator(r).convert_to<std::uint64_t>();
  }
  return opts;
}

WeightConvention weight_convention_from_config(const Config& cfg) {
  std::string k;
  if (!lookup(cfg, "params", "convention", k)) return WeightConvention::Sum;
  std::string v = lower(cfg.get_string(k));
  if (v == "sum") return WeightConvention::Sum;
  if (v == "each") return WeightConvention::Each;
  throw ConfigError(cfg.origin() + ": field '" + k + "': unknown convention '" + v +
                        "' (sum, each)",
                    k);
}

}  // namespace swhs
