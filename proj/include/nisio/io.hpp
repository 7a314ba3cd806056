#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nisio/grid.hpp"
#include "nisio/mc.hpp"
#include "nisio/oracles.hpp"
#include "nisio/semigroup.hpp"

namespace nisio::io {

/// Round-trippable decimal: 17 significant digits, "nan"/"inf" spelled out.
std::string format_double(double x);

/// Writes through a temporary file in the same directory and renames it over
/// `path`, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// `index,x[,y],value`, one row per grid point in flat order.
std::string grid_function_csv(const GridFunction& f);
/// Inverse of grid_function_csv. Throws ConfigError on a missing file, a bad
/// header, a row count different from the grid size, or rows out of order.
GridFunction read_grid_function_csv(const std::string& path, const TorusGrid& grid);

/// `level,steps,sup_increment,sup_norm,elapsed_ms`
std::string convergence_csv(const NisioResult& r);
/// `step,index,x[,y],lambda_index`
std::string argmax_csv(const TorusGrid& grid, const ArgmaxField& field);
/// `time,index,x[,y],value`, every `every`-th snapshot plus the last one.
std::string trajectory_csv(const oracle::Trajectory& traj, std::size_t every = 1);
/// `time,sup_residual`
std::string residual_csv(const oracle::ResidualReport& r);
/// `h,level,error`
std::string generator_limit_csv(const std::vector<GeneratorLimitRow>& rows);
/// `strategy,mean,stderr,n_paths,seed,bound_ok`
std::string estimate_csv(const mc::DualBoundReport& r);

}  // namespace nisio::io
