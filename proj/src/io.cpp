#include "nisio/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nisio/errors.hpp"

namespace nisio::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

namespace {

void coords_header(std::ostringstream& out, int dim) { out << (dim == 2 ? "x,y" : "x"); }

void coords(std::ostringstream& out, const TorusGrid& grid, std::size_t i) {
  Point p = grid.point(i);
  out << format_double(p[0]);
  if (grid.dim() == 2) out << ',' << format_double(p[1]);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number '" + s + "'");
  }
}

}  // namespace

std::string grid_function_csv(const GridFunction& f) {
  const auto& grid = f.grid();
  std::ostringstream out;
  out << "index,";
  coords_header(out, grid.dim());
  out << ",value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << i << ',';
    coords(out, grid, i);
    out << ',' << format_double(f[i]) << '\n';
  }
  return out.str();
}

GridFunction read_grid_function_csv(const std::string& path, const TorusGrid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid function file " + path);
  std::string line;
  const std::string header = grid.dim() == 2 ? "index,x,y,value" : "index,x,value";
  if (!std::getline(in, line) || line != header) throw ConfigError(path + ": expected header '" + header + "'");
  std::vector<double> values;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != std::size_t(grid.dim() + 2)) throw ConfigError(path + ": malformed row '" + line + "'");
    if (parse_double(cells[0], path) != double(values.size())) throw ConfigError(path + ": rows out of order");
    values.push_back(parse_double(cells.back(), path));
  }
  if (values.size() != grid.size())
    throw ConfigError(path + ": " + std::to_string(values.size()) + " rows for a grid of " +
                      std::to_string(grid.size()) + " points");
  return GridFunction(grid, std::move(values));
}

std::string convergence_csv(const NisioResult& r) {
  std::ostringstream out;
  out << "level,steps,sup_increment,sup_norm,elapsed_ms\n";
  for (const auto& l : r.levels)
    out << l.level << ',' << l.steps << ',' << format_double(l.sup_increment) << ',' << format_double(l.sup_norm)
        << ',' << format_double(l.elapsed_ms) << '\n';
  return out.str();
}

std::string argmax_csv(const TorusGrid& grid, const ArgmaxField& field) {
  std::ostringstream out;
  out << "step,index,";
  coords_header(out, grid.dim());
  out << ",lambda_index\n";
  for (std::size_t s = 0; s < field.per_step.size(); ++s)
    for (std::size_t i = 0; i < field.per_step[s].size(); ++i) {
      out << s << ',' << i << ',';
      coords(out, grid, i);
      out << ',' << field.per_step[s][i] << '\n';
    }
  return out.str();
}

std::string trajectory_csv(const oracle::Trajectory& traj, std::size_t every) {
  if (every == 0) every = 1;
  std::ostringstream out;
  if (traj.snapshots.empty()) return "time,index,x,value\n";
  const auto& grid = traj.snapshots.front().grid();
  out << "time,index,";
  coords_header(out, grid.dim());
  out << ",value\n";
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    if (s % every != 0 && s + 1 != traj.snapshots.size()) continue;
    const auto& snap = traj.snapshots[s];
    for (std::size_t i = 0; i < snap.size(); ++i) {
      out << format_double(traj.times[s]) << ',' << i << ',';
      coords(out, grid, i);
      out << ',' << format_double(snap[i]) << '\n';
    }
  }
  return out.str();
}

std::string residual_csv(const oracle::ResidualReport& r) {
  std::ostringstream out;
  out << "time,sup_residual\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    out << format_double(r.times[i]) << ',' << format_double(r.sup_residual[i]) << '\n';
  return out.str();
}

std::string generator_limit_csv(const std::vector<GeneratorLimitRow>& rows) {
  std::ostringstream out;
  out << "h,level,error\n";
  for (const auto& r : rows) out << format_double(r.h) << ',' << r.level << ',' << format_double(r.error) << '\n';
  return out.str();
}

std::string estimate_csv(const mc::DualBoundReport& r) {
  std::ostringstream out;
  out << "strategy,mean,stderr,n_paths,seed,bound_ok\n";
  for (const auto& row : r.rows)
    out << row.name << ',' << format_double(row.estimate.mean) << ',' << format_double(row.estimate.std_error) << ','
        << row.estimate.n_paths << ',' << row.estimate.seed << ',' << (row.bound_ok ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace nisio::io
