#include "artifacts.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "swhs/rational.hpp"

namespace swhs::cli {

std::string resolve_out_dir(const std::string& flag_value) {
  std::string dir = flag_value;
  if (dir.empty()) {
    const char* env = std::getenv("SWHS_OUTPUT_DIR");
    dir = (env && *env) ? env : ".";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

const char* to_string(Spacing s) {
  switch (s) {
    case Spacing::Geometric: return "geometric";
    case Spacing::Uniform: return "uniform";
    case Spacing::EqualMeasure: return "equal-measure";
  }
  return "unknown";
}

const char* to_string(GridMode m) {
  return m == GridMode::Full ? "full" : "reduced";
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SystemStatus parse_system_status(const std::string& s) {
  if (s == "converged") return SystemStatus::Converged;
  if (s == "iteration-cap") return SystemStatus::IterationCap;
  if (s == "diverged") return SystemStatus::Diverged;
  if (s == "degenerate") return SystemStatus::Degenerate;
  throw std::runtime_error("unknown solution status '" + s + "'");
}

}  // namespace

void put_params(KvReport& rep, const InequalityParams& ip) {
  rep.set("params.n", ip.n);
  rep.set("params.p", swhs::to_string(ip.p));
  rep.set("params.q_prime", swhs::to_string(ip.q_prime));
  rep.set("params.alpha", swhs::to_string(ip.alpha));
  rep.set("params.beta", swhs::to_string(ip.beta));
  rep.set("params.lambda", swhs::to_string(ip.lambda));
  rep.set("params.mu", swhs::to_string(ip.mu));
}

void put_params(KvReport& rep, const SystemParams& sys) {
  rep.set("params.n", sys.n);
  rep.set("params.p0", swhs::to_string(sys.p0));
  rep.set("params.q0", swhs::to_string(sys.q0));
  rep.set("params.alpha", swhs::to_string(sys.alpha));
  rep.set("params.beta", swhs::to_string(sys.beta));
  rep.set("params.lambda", swhs::to_string(sys.lambda));
  rep.set("params.mu", swhs::to_string(sys.mu));
}

void put_grid(KvReport& rep, const GridSpec& spec, const BoundaryGrid& bg, const HalfGrid& hg) {
  rep.set("grid.r_min", spec.r_min);
  rep.set("grid.r_max", spec.r_max);
  rep.set("grid.n_radial", spec.n_radial);
  rep.set("grid.n_height", spec.n_height);
  rep.set("grid.n_angular", spec.n_angular);
  rep.set("grid.spacing", to_string(spec.spacing));
  rep.set("grid.mode", to_string(spec.mode));
  rep.set("grid.boundary_hash", hash_hex(bg.content_hash()));
  rep.set("grid.half_hash", hash_hex(hg.content_hash()));
}

void put_solve(KvReport& rep, const SolveOptions& opts) {
  rep.set("solve.max_iters", opts.max_iters);
  rep.set("solve.tol_rel", opts.tol_rel);
  rep.set("solve.damping", opts.damping);
  rep.set("solve.symmetrize_each_step", opts.symmetrize_each_step);
  rep.set("solve.random_start", opts.random_start);
  rep.set("solve.seed", static_cast<long long>(opts.seed));
}

void Verdicts::add(KvReport& rep, const std::string& name, bool pass) {
  rep.set("verdict." + name, pass ? "pass" : "fail");
  if (!pass) ++failures_;
}

void finish_run(KvReport& rep, const std::string& out_dir, const std::string& json_path,
                double wall_seconds) {
  rep.set("wall_clock_seconds", wall_seconds);
  rep.write(join_path(out_dir, "manifest.txt"));
  std::fputs(rep.to_text().c_str(), stdout);
  if (!json_path.empty()) {
    nlohmann::ordered_json j;
    for (const auto& [key, value] : rep.entries()) j[key] = value;
    write_text_atomic(json_path, j.dump(2) + "\n");
  }
}

std::string kernel_cache_dir(const std::string& out_dir) {
  return join_path(out_dir, "kernel_cache");
}

OpParams op_params_from_config(const Config& cfg) {
  auto value = [&cfg](const char* name, double fallback) {
    std::string sectioned = std::string("params.") + name;
    if (cfg.has(sectioned)) return cfg.get_double(sectioned, fallback);
    return cfg.get_double(name, fallback);
  };
  OpParams op;
  op.n = static_cast<int>(value("n", op.n));
  op.alpha = value("alpha", op.alpha);
  op.beta = value("beta", op.beta);
  op.kp.lambda = value("lambda", op.kp.lambda);
  op.kp.mu = value("mu", op.kp.mu);
  return op;
}

void put_solution(KvReport& rep, const SystemSolution& sol) {
  rep.set("solution.status", to_string(sol.status));
  rep.set("solution.single_weight", sol.single_weight);
  rep.set("solution.rescaled", sol.rescaled);
  rep.set("solution.eigenvalue", sol.eigenvalue);
  rep.set("solution.residual_u", sol.residual_u);
  rep.set("solution.residual_v", sol.residual_v);
  rep.set("solution.iterations", sol.iterations);
}

void save_solution_fields(KvReport& rep, const std::string& dir, const SystemSolution& sol,
                          const BoundaryGrid& bg, const HalfGrid& hg) {
  const std::string u_path = join_path(dir, "u.csv");
  const std::string v_path = join_path(dir, "v.csv");
  const std::string bg_path = join_path(dir, "boundary_grid.csv");
  const std::string hg_path = join_path(dir, "half_grid.csv");
  write_field_csv(u_path, sol.u.value);
  write_field_csv(v_path, sol.v.value);
  write_grid_manifest(bg_path, bg);
  write_grid_manifest(hg_path, hg);
  rep.set("artifact.u", u_path);
  rep.set("artifact.v", v_path);
  rep.set("artifact.boundary_grid", bg_path);
  rep.set("artifact.half_grid", hg_path);
}

void load_solution(const std::string& dir, SolutionArtifacts& art) {
  const std::string manifest = join_path(dir, "manifest.txt");
  if (!std::filesystem::exists(manifest)) {
    throw std::runtime_error("solution directory '" + dir + "' has no manifest.txt");
  }
  Config cfg = Config::parse_file(manifest);

  art.spec = grid_from_config(cfg);
  art.bg = build_boundary_grid(art.spec);
  art.hg = build_half_grid(art.spec);
  if (cfg.has("grid.boundary_hash") &&
      cfg.get_string("grid.boundary_hash") != hash_hex(art.bg.content_hash())) {
    throw std::runtime_error(manifest + ": boundary grid hash does not match the stored spec");
  }
  if (cfg.has("grid.half_hash") &&
      cfg.get_string("grid.half_hash") != hash_hex(art.hg.content_hash())) {
    throw std::runtime_error(manifest + ": half grid hash does not match the stored spec");
  }

  art.sol.sys = system_from_config(cfg);
  art.sol.status = parse_system_status(cfg.get_string("solution.status"));
  art.sol.single_weight = cfg.get_bool("solution.single_weight", false);
  art.sol.rescaled = cfg.get_bool("solution.rescaled", false);
  art.sol.eigenvalue = cfg.get_double("solution.eigenvalue", 0.0);
  art.sol.residual_u = cfg.get_double("solution.residual_u", 0.0);
  art.sol.residual_v = cfg.get_double("solution.residual_v", 0.0);
  art.sol.iterations = cfg.get_int("solution.iterations", 0);

  art.sol.u = make_field(art.bg);
  art.sol.v = make_field(art.hg);
  art.sol.u.value = read_field_csv(join_path(dir, "u.csv"));
  art.sol.v.value = read_field_csv(join_path(dir, "v.csv"));
  if (art.sol.u.value.size() != art.bg.weight.size()) {
    throw std::runtime_error(dir + "/u.csv: " + std::to_string(art.sol.u.value.size()) +
                             " values for a grid with " + std::to_string(art.bg.weight.size()) +
                             " boundary nodes");
  }
  if (art.sol.v.value.size() != art.hg.weight.size()) {
    throw std::runtime_error(dir + "/v.csv: " + std::to_string(art.sol.v.value.size()) +
                             " values for a grid with " + std::to_string(art.hg.weight.size()) +
                             " half-space nodes");
  }
}

std::vector<double> parse_taus(const std::string& text) {
  std::vector<double> taus;
  auto first_colon = text.find(':');
  try {
    if (first_colon == std::string::npos) {
      taus.push_back(std::stod(text));
      return taus;
    }
    auto second_colon = text.find(':', first_colon + 1);
    if (second_colon == std::string::npos) throw std::invalid_argument("missing step");
    double a = std::stod(text.substr(0, first_colon));
    double b = std::stod(text.substr(first_colon + 1, second_colon - first_colon - 1));
    double step = std::stod(text.substr(second_colon + 1));
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (b < a) throw std::invalid_argument("range end below start");
    int count = static_cast<int>((b - a) / step + 1e-9) + 1;
    for (int i = 0; i < count; ++i) taus.push_back(a + i * step);
    return taus;
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot parse tau range '" + text + "' (want a:b:step): " +
                             e.what());
  }
}

}  // namespace swhs::cli
