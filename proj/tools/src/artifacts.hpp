#pragma once

#include <string>
#include <vector>

#include "swhs/config.hpp"
#include "swhs/extremal.hpp"
#include "swhs/grid.hpp"
#include "swhs/operators.hpp"
#include "swhs/params.hpp"
#include "swhs/report.hpp"
#include "swhs/system.hpp"

namespace swhs::cli {

/// Output directory: the --out flag when given, else SWHS_OUTPUT_DIR, else
/// the current directory. Created on first use.
std::string resolve_out_dir(const std::string& flag_value);
std::string join_path(const std::string& dir, const std::string& name);

const char* to_string(Spacing s);
const char* to_string(GridMode m);

/// Manifest blocks. Rational parameters are recorded exactly, grids as
/// their spec plus content hashes, so a manifest alone suffices to rebuild
/// and cross-check the discretization. The manifest text is itself a
/// parseable config file.
void put_params(KvReport& rep, const InequalityParams& ip);
void put_params(KvReport& rep, const SystemParams& sys);
void put_grid(KvReport& rep, const GridSpec& spec, const BoundaryGrid& bg, const HalfGrid& hg);
void put_solve(KvReport& rep, const SolveOptions& opts);

/// Named pass/fail verdicts accumulated into the report under
/// "verdict.<name>". Process exit status is 0 iff all passed.
class Verdicts {
 public:
  void add(KvReport& rep, const std::string& name, bool pass);
  bool all_passed() const { return failures_ == 0; }
  int exit_code() const { return failures_ == 0 ? 0 : 1; }

 private:
  int failures_ = 0;
};

/// Stamps the wall clock, writes <out>/manifest.txt atomically, mirrors the
/// text to stdout, and optionally emits the same record as a JSON file.
void finish_run(KvReport& rep, const std::string& out_dir, const std::string& json_path,
                double wall_seconds);

/// Kernel cache location used by every command that builds a table.
std::string kernel_cache_dir(const std::string& out_dir);

/// Operator parameters for commands that need no exponent pair: reads
/// params.{n,alpha,beta,lambda,mu} with the library defaults.
OpParams op_params_from_config(const Config& cfg);

/// Solution directory layout shared by solve-system and the verifiers:
/// manifest.txt plus u.csv, v.csv and the two grid manifests. Loading
/// rebuilds the grids from the stored spec and refuses mismatched content
/// hashes or field sizes. Filled in place because the loaded fields point
/// at the grids stored alongside them.
struct SolutionArtifacts {
  SystemSolution sol;
  GridSpec spec;
  BoundaryGrid bg;
  HalfGrid hg;
};

void put_solution(KvReport& rep, const SystemSolution& sol);
void save_solution_fields(KvReport& rep, const std::string& dir, const SystemSolution& sol,
                          const BoundaryGrid& bg, const HalfGrid& hg);
void load_solution(const std::string& dir, SolutionArtifacts& art);

/// "a:b:step" inclusive ranges or a single value; step must be positive.
std::vector<double> parse_taus(const std::string& text);

}  // namespace swhs::cli
