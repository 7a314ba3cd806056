#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nisio/grid.hpp"
#include "nisio/levy.hpp"
#include "nisio/mc.hpp"

namespace nisio::config {

using json = nlohmann::json;

/// Rate-`rate` Cauchy jumps of scale gamma on the line segment
/// [-half_length, half_length], identified with the torus.
struct CauchySpec {
  double gamma = 0.5;
  double rate = 1.0;
  double half_length = 200.0;

  friend bool operator==(const CauchySpec&, const CauchySpec&) = default;
};

struct MemberSpec {
  LevyQuadruple quadruple;
  std::optional<CauchySpec> cauchy;  // expanded onto the grid as extra mu atoms

  friend bool operator==(const MemberSpec&, const MemberSpec&) = default;
};

struct InitialSpec {
  std::string kind = "cos";  // cos | bump | constant | file
  std::array<int, 2> wave{1, 0};
  double phase = 0.0;
  Point center{0.0, 0.0};
  double width = 1.5707963267948966;
  double value = 0.0;
  std::string path;

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct NisioSpec {
  int max_level = 12;
  double tol = 1e-6;
  bool write_argmax = false;

  friend bool operator==(const NisioSpec&, const NisioSpec&) = default;
};

struct OracleSpec {
  double dt = 1e-3;
  double tail_tol = 1e-10;
  double gap_tol = 5e-4;
  int residual_stride = 1;
  int trajectory_every = 50;

  friend bool operator==(const OracleSpec&, const OracleSpec&) = default;
};

struct ConvergenceSpec {
  std::vector<double> h_list{0.1, 0.05, 0.025, 0.0125};

  friend bool operator==(const ConvergenceSpec&, const ConvergenceSpec&) = default;
};

struct McSpec {
  std::uint64_t n_paths = 10000;
  std::uint64_t seed = 1;
  Point x0{0.0, 0.0};
  int level = 6;
  int random_strategies = 16;
  bool constant_strategies = false;
  std::vector<std::string> strategy_files;
  double scheme_budget = 1e-2;

  friend bool operator==(const McSpec&, const McSpec&) = default;
};

struct RunConfig {
  int dim = 1;
  int n = 128;
  std::string family_file;          // if set, members were read from this file
  std::vector<MemberSpec> family;
  InitialSpec initial;
  double t = 0.2;
  NisioSpec nisio;
  OracleSpec oracle;
  ConvergenceSpec convergence;
  McSpec mc;
  std::string output_dir = "out";
  /// Directory relative paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  bool operator==(const RunConfig& o) const;
  std::filesystem::path resolve(const std::string& p) const;
};

/// Throws ConfigError on unknown keys, wrong types, out-of-range values or
/// missing referenced files.
RunConfig from_json(const json& j, const std::filesystem::path& base_dir = {});
RunConfig load(const std::filesystem::path& path);
json to_json(const RunConfig& cfg);

LevyQuadruple quadruple_from_json(const json& j, int dim);
json quadruple_to_json(const LevyQuadruple& q);
/// Reads a family file: a JSON array of quadruple objects.
std::vector<MemberSpec> load_family_file(const std::filesystem::path& path, int dim);

TorusGrid build_grid(const RunConfig& cfg);
GeneratorFamily build_family(const RunConfig& cfg, const TorusGrid& grid);
InitialFunction build_initial(const RunConfig& cfg, const TorusGrid& grid);

mc::SimpleStrategy strategy_from_json(const json& j);
json strategy_to_json(const mc::SimpleStrategy& s);

}  // namespace nisio::config
