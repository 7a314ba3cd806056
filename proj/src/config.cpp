#include "nisio/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "nisio/errors.hpp"

namespace nisio::config {

namespace fs = std::filesystem;

namespace {

void require_object(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double get_number(const json& j, const char* key, const std::string& where, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + "." + key + " must be finite");
  return v;
}

long long get_integer(const json& j, const char* key, const std::string& where, long long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return j[key].get<long long>();
}

bool get_bool(const json& j, const char* key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError(where + "." + key + " must be a boolean");
  return j[key].get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& where, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError(where + "." + key + " must be a string");
  return j[key].get<std::string>();
}

Point get_point(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || j.size() != std::size_t(dim)) throw ConfigError(where + " must be an array of length " + std::to_string(dim));
  Point p{0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + " must hold numbers");
    p[i] = j[i].get<double>();
  }
  return p;
}

json point_json(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

MemberSpec member_from_json(const json& j, int dim) {
  MemberSpec m;
  json plain = j;
  if (j.is_object() && j.contains("mu_cauchy")) {
    const json& c = j["mu_cauchy"];
    require_object(c, "mu_cauchy", {"gamma", "rate", "half_length"});
    CauchySpec spec;
    spec.gamma = get_number(c, "gamma", "mu_cauchy", spec.gamma);
    spec.rate = get_number(c, "rate", "mu_cauchy", spec.rate);
    spec.half_length = get_number(c, "half_length", "mu_cauchy", spec.half_length);
    check(spec.gamma > 0.0 && spec.rate > 0.0 && spec.half_length > 0.0, "mu_cauchy: gamma, rate, half_length must be positive");
    check(dim == 1, "mu_cauchy is one-dimensional");
    m.cauchy = spec;
    plain.erase("mu_cauchy");
  }
  m.quadruple = quadruple_from_json(plain, dim);
  return m;
}

json member_to_json(const MemberSpec& m) {
  json j = quadruple_to_json(m.quadruple);
  if (m.cauchy) j["mu_cauchy"] = {{"gamma", m.cauchy->gamma}, {"rate", m.cauchy->rate}, {"half_length", m.cauchy->half_length}};
  return j;
}

json read_json_file(const fs::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + what + " " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(what + " " + path.string() + ": " + e.what());
  }
}

}  // namespace

LevyQuadruple quadruple_from_json(const json& j, int dim) {
  require_object(j, "quadruple", {"b", "sigma", "mu", "nu", "label"});
  LevyQuadruple q;
  q.dim = dim;
  if (j.contains("b")) q.drift = get_point(j["b"], dim, "quadruple.b");
  if (j.contains("sigma")) {
    const json& s = j["sigma"];
    check(s.is_array() && s.size() == std::size_t(dim), "quadruple.sigma must be a " + std::to_string(dim) + "x" +
                                                            std::to_string(dim) + " array");
    for (int r = 0; r < dim; ++r) {
      Point row = get_point(s[r], dim, "quadruple.sigma row");
      for (int c = 0; c < dim; ++c) q.sigma[r][c] = row[c];
    }
  }
  auto atoms = [&](const char* key, const char* at, const char* w) {
    std::vector<Atom> out;
    if (!j.contains(key)) return out;
    check(j[key].is_array(), std::string("quadruple.") + key + " must be an array");
    for (const auto& a : j[key]) {
      require_object(a, std::string("quadruple.") + key + " atom", {at, w});
      check(a.contains(at) && a.contains(w), std::string("quadruple.") + key + " atom needs '" + at + "' and '" + w + "'");
      out.push_back({get_point(a[at], dim, std::string(key) + "." + at), get_number(a, w, key, 0.0)});
    }
    return out;
  };
  q.mu = atoms("mu", "y", "w");
  q.nu = atoms("nu", "z", "v");
  q.label = get_string(j, "label", "quadruple", "");
  q.validate();
  return q;
}

json quadruple_to_json(const LevyQuadruple& q) {
  json j;
  j["b"] = point_json(q.drift, q.dim);
  json sigma = json::array();
  for (int r = 0; r < q.dim; ++r) sigma.push_back(point_json({q.sigma[r][0], q.sigma[r][1]}, q.dim));
  j["sigma"] = sigma;
  j["mu"] = json::array();
  for (const auto& a : q.mu) j["mu"].push_back({{"y", point_json(a.at, q.dim)}, {"w", a.weight}});
  j["nu"] = json::array();
  for (const auto& a : q.nu) j["nu"].push_back({{"z", point_json(a.at, q.dim)}, {"v", a.weight}});
  if (!q.label.empty()) j["label"] = q.label;
  return j;
}

std::vector<MemberSpec> load_family_file(const fs::path& path, int dim) {
  json j = read_json_file(path, "family file");
  check(j.is_array() && !j.empty(), "family file " + path.string() + " must hold a non-empty array");
  std::vector<MemberSpec> out;
  for (const auto& m : j) out.push_back(member_from_json(m, dim));
  return out;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return dim == o.dim && n == o.n && family_file == o.family_file && family == o.family && initial == o.initial &&
         t == o.t && nisio == o.nisio && oracle == o.oracle && convergence == o.convergence && mc == o.mc &&
         output_dir == o.output_dir;
}

fs::path RunConfig::resolve(const std::string& p) const {
  fs::path path(p);
  return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
}

RunConfig from_json(const json& j, const fs::path& base_dir) {
  require_object(j, "config", {"grid", "family", "family_file", "initial", "t", "nisio", "oracle", "convergence", "mc",
                               "output_dir"});
  RunConfig cfg;
  cfg.base_dir = base_dir;

  check(j.contains("grid"), "config needs a grid");
  require_object(j["grid"], "grid", {"dim", "n"});
  cfg.dim = int(get_integer(j["grid"], "dim", "grid", 1));
  cfg.n = int(get_integer(j["grid"], "n", "grid", 128));
  TorusGrid grid(cfg.dim, cfg.n);  // validates

  check(j.contains("family") != j.contains("family_file"), "config needs exactly one of 'family' and 'family_file'");
  if (j.contains("family_file")) {
    cfg.family_file = get_string(j, "family_file", "config", "");
    cfg.family = load_family_file(cfg.resolve(cfg.family_file), cfg.dim);
  } else {
    check(j["family"].is_array() && !j["family"].empty(), "family must be a non-empty array");
    for (const auto& m : j["family"]) cfg.family.push_back(member_from_json(m, cfg.dim));
  }

  check(j.contains("initial"), "config needs an initial function");
  const json& init = j["initial"];
  require_object(init, "initial", {"kind", "wave", "phase", "center", "width", "value", "path"});
  auto& in = cfg.initial;
  in.kind = get_string(init, "kind", "initial", in.kind);
  if (in.kind == "cos") {
    if (init.contains("wave")) {
      Point w = get_point(init["wave"], cfg.dim, "initial.wave");
      check(w[0] == std::round(w[0]) && w[1] == std::round(w[1]), "initial.wave must be integral");
      in.wave = {int(w[0]), int(w[1])};
    }
    in.phase = get_number(init, "phase", "initial", in.phase);
  } else if (in.kind == "bump") {
    if (init.contains("center")) in.center = get_point(init["center"], cfg.dim, "initial.center");
    in.width = get_number(init, "width", "initial", in.width);
    check(in.width > 0.0, "initial.width must be positive");
  } else if (in.kind == "constant") {
    in.value = get_number(init, "value", "initial", in.value);
  } else if (in.kind == "file") {
    in.path = get_string(init, "path", "initial", "");
    check(!in.path.empty(), "initial.path is required for kind 'file'");
    check(fs::exists(cfg.resolve(in.path)), "initial function file not found: " + in.path);
  } else {
    throw ConfigError("initial.kind must be one of cos, bump, constant, file");
  }
  if (cfg.dim == 1) in.wave[1] = 0;

  cfg.t = get_number(j, "t", "config", cfg.t);
  check(cfg.t > 0.0 && cfg.t <= 100.0, "t must lie in (0, 100]");

  if (j.contains("nisio")) {
    require_object(j["nisio"], "nisio", {"max_level", "tol", "write_argmax"});
    cfg.nisio.max_level = int(get_integer(j["nisio"], "max_level", "nisio", cfg.nisio.max_level));
    cfg.nisio.tol = get_number(j["nisio"], "tol", "nisio", cfg.nisio.tol);
    cfg.nisio.write_argmax = get_bool(j["nisio"], "write_argmax", "nisio", cfg.nisio.write_argmax);
  }
  check(cfg.nisio.max_level >= 0 && cfg.nisio.max_level <= 20, "nisio.max_level must lie in [0, 20]");
  check(cfg.nisio.tol >= 0.0, "nisio.tol must be >= 0");

  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    require_object(o, "oracle", {"dt", "tail_tol", "gap_tol", "residual_stride", "trajectory_every"});
    cfg.oracle.dt = get_number(o, "dt", "oracle", cfg.oracle.dt);
    cfg.oracle.tail_tol = get_number(o, "tail_tol", "oracle", cfg.oracle.tail_tol);
    cfg.oracle.gap_tol = get_number(o, "gap_tol", "oracle", cfg.oracle.gap_tol);
    cfg.oracle.residual_stride = int(get_integer(o, "residual_stride", "oracle", cfg.oracle.residual_stride));
    cfg.oracle.trajectory_every = int(get_integer(o, "trajectory_every", "oracle", cfg.oracle.trajectory_every));
  }
  check(cfg.oracle.dt > 0.0 && cfg.oracle.dt <= cfg.t, "oracle.dt must lie in (0, t]");
  check(cfg.oracle.tail_tol > 0.0 && cfg.oracle.tail_tol < 1.0, "oracle.tail_tol must lie in (0, 1)");
  check(cfg.oracle.gap_tol >= 0.0, "oracle.gap_tol must be >= 0");
  check(cfg.oracle.residual_stride >= 1, "oracle.residual_stride must be >= 1");
  check(cfg.oracle.trajectory_every >= 1, "oracle.trajectory_every must be >= 1");

  if (j.contains("convergence")) {
    require_object(j["convergence"], "convergence", {"h_list"});
    if (j["convergence"].contains("h_list")) {
      const json& h = j["convergence"]["h_list"];
      check(h.is_array() && !h.empty(), "convergence.h_list must be a non-empty array");
      cfg.convergence.h_list.clear();
      for (const auto& v : h) {
        check(v.is_number(), "convergence.h_list must hold numbers");
        cfg.convergence.h_list.push_back(v.get<double>());
      }
    }
  }
  for (std::size_t i = 0; i < cfg.convergence.h_list.size(); ++i) {
    check(cfg.convergence.h_list[i] > 0.0, "convergence.h_list entries must be positive");
    check(i == 0 || cfg.convergence.h_list[i] < cfg.convergence.h_list[i - 1], "convergence.h_list must decrease");
  }

  if (j.contains("mc")) {
    const json& m = j["mc"];
    require_object(m, "mc", {"n_paths", "seed", "x0", "level", "random_strategies", "constant_strategies",
                             "strategy_files", "scheme_budget"});
    auto& mc = cfg.mc;
    if (m.contains("n_paths")) {
      check(m["n_paths"].is_number_unsigned(), "mc.n_paths must be a nonnegative integer");
      mc.n_paths = m["n_paths"].get<std::uint64_t>();
    }
    if (m.contains("seed")) {
      check(m["seed"].is_number_unsigned(), "mc.seed must be a nonnegative integer");
      mc.seed = m["seed"].get<std::uint64_t>();
    }
    if (m.contains("x0")) mc.x0 = get_point(m["x0"], cfg.dim, "mc.x0");
    mc.level = int(get_integer(m, "level", "mc", mc.level));
    mc.random_strategies = int(get_integer(m, "random_strategies", "mc", mc.random_strategies));
    mc.constant_strategies = get_bool(m, "constant_strategies", "mc", mc.constant_strategies);
    if (m.contains("strategy_files")) {
      check(m["strategy_files"].is_array(), "mc.strategy_files must be an array");
      for (const auto& s : m["strategy_files"]) {
        check(s.is_string(), "mc.strategy_files must hold paths");
        mc.strategy_files.push_back(s.get<std::string>());
        check(fs::exists(cfg.resolve(mc.strategy_files.back())), "strategy file not found: " + mc.strategy_files.back());
      }
    }
    mc.scheme_budget = get_number(m, "scheme_budget", "mc", mc.scheme_budget);
  }
  check(cfg.mc.n_paths >= 100, "mc.n_paths must be >= 100");
  check(cfg.mc.level >= 0 && cfg.mc.level <= 16, "mc.level must lie in [0, 16]");
  check(cfg.mc.random_strategies >= 0, "mc.random_strategies must be >= 0");
  check(cfg.mc.scheme_budget >= 0.0, "mc.scheme_budget must be >= 0");

  cfg.output_dir = get_string(j, "output_dir", "config", cfg.output_dir);
  check(!cfg.output_dir.empty(), "output_dir must not be empty");
  return cfg;
}

RunConfig load(const fs::path& path) {
  json j = read_json_file(path, "config");
  return from_json(j, path.parent_path());
}

json to_json(const RunConfig& cfg) {
  json j;
  j["grid"] = {{"dim", cfg.dim}, {"n", cfg.n}};
  if (!cfg.family_file.empty()) {
    j["family_file"] = cfg.family_file;
  } else {
    j["family"] = json::array();
    for (const auto& m : cfg.family) j["family"].push_back(member_to_json(m));
  }
  const auto& in = cfg.initial;
  json init = {{"kind", in.kind}};
  if (in.kind == "cos") {
    init["wave"] = point_json({double(in.wave[0]), double(in.wave[1])}, cfg.dim);
    init["phase"] = in.phase;
  } else if (in.kind == "bump") {
    init["center"] = point_json(in.center, cfg.dim);
    init["width"] = in.width;
  } else if (in.kind == "constant") {
    init["value"] = in.value;
  } else {
    init["path"] = in.path;
  }
  j["initial"] = init;
  j["t"] = cfg.t;
  j["nisio"] = {{"max_level", cfg.nisio.max_level}, {"tol", cfg.nisio.tol}, {"write_argmax", cfg.nisio.write_argmax}};
  j["oracle"] = {{"dt", cfg.oracle.dt},
                 {"tail_tol", cfg.oracle.tail_tol},
                 {"gap_tol", cfg.oracle.gap_tol},
                 {"residual_stride", cfg.oracle.residual_stride},
                 {"trajectory_every", cfg.oracle.trajectory_every}};
  j["convergence"] = {{"h_list", cfg.convergence.h_list}};
  j["mc"] = {{"n_paths", cfg.mc.n_paths},
             {"seed", cfg.mc.seed},
             {"x0", point_json(cfg.mc.x0, cfg.dim)},
             {"level", cfg.mc.level},
             {"random_strategies", cfg.mc.random_strategies},
             {"constant_strategies", cfg.mc.constant_strategies},
             {"strategy_files", cfg.mc.strategy_files},
             {"scheme_budget", cfg.mc.scheme_budget}};
  j["output_dir"] = cfg.output_dir;
  return j;
}

TorusGrid build_grid(const RunConfig& cfg) { return TorusGrid(cfg.dim, cfg.n); }

GeneratorFamily build_family(const RunConfig& cfg, const TorusGrid& grid) {
  std::vector<LevyQuadruple> members;
  for (const auto& m : cfg.family) {
    LevyQuadruple q = m.quadruple;
    if (m.cauchy) {
      double gamma = m.cauchy->gamma * std::numbers::pi / m.cauchy->half_length;
      LevyQuadruple c = wrapped_cauchy(grid, gamma, m.cauchy->rate);
      q.mu.insert(q.mu.end(), c.mu.begin(), c.mu.end());
      if (q.label.empty()) q.label = c.label;
    }
    members.push_back(std::move(q));
  }
  return GeneratorFamily(std::move(members));
}

InitialFunction build_initial(const RunConfig& cfg, const TorusGrid& grid) {
  const auto& in = cfg.initial;
  if (in.kind == "cos") return InitialFunction::cosine(in.wave, in.phase);
  if (in.kind == "bump") return InitialFunction::bump(in.center, in.width);
  if (in.kind == "constant") return InitialFunction::constant(in.value);
  return InitialFunction::from_file(cfg.resolve(in.path).string(), grid);
}

mc::SimpleStrategy strategy_from_json(const json& j) {
  require_object(j, "strategy", {"partition", "feedback"});
  check(j.contains("partition") && j["partition"].is_array(), "strategy.partition must be an array");
  check(j.contains("feedback") && j["feedback"].is_array(), "strategy.feedback must be an array");
  std::vector<double> times;
  for (const auto& v : j["partition"]) {
    check(v.is_number(), "strategy.partition must hold numbers");
    times.push_back(v.get<double>());
  }
  mc::SimpleStrategy s{Partition(std::move(times)), {}};
  for (const auto& map : j["feedback"]) {
    check(map.is_array(), "strategy.feedback must hold arrays");
    std::vector<int> m;
    for (const auto& v : map) {
      check(v.is_number_integer(), "strategy.feedback must hold member indices");
      m.push_back(v.get<int>());
    }
    s.feedback.push_back(std::move(m));
  }
  check(s.feedback.size() == s.partition.steps(), "strategy: one feedback map per interval required");
  return s;
}

json strategy_to_json(const mc::SimpleStrategy& s) {
  return {{"partition", s.partition.times()}, {"feedback", s.feedback}};
}

}  // namespace nisio::config
