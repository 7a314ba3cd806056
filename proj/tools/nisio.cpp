#include <cstdlib>
#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "nisio/cli.hpp"
#include "nisio/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Levy semigroups on the torus"};
  app.require_subcommand(1);

  nisio::cli::Options opts;
  std::uint64_t seed = 0;
  std::string out;
  const std::pair<const char*, const char*> commands[] = {
      {"evolve", "Dyadic Nisio iterates up to the configured level or tolerance"},
      {"oracle", "Compare against the RK4 Picard solution and series oracles"},
      {"convergence", "Generator limit table and dynamic-programming defects"},
      {"mc", "Monte-Carlo dual bounds with the extracted strategy"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Monte-Carlo seed (overrides mc.seed)");
    sub->add_flag("--quiet", opts.quiet, "No summary on stdout");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : nisio::cli::kConfigError;
  }

  if (const char* threads = std::getenv("NISIO_THREADS")) {
    try {
      nisio::kernels::set_max_threads(std::stoi(threads));
    } catch (const std::exception&) {
      std::cerr << "NISIO_THREADS must be an integer\n";
      return nisio::cli::kConfigError;
    }
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--out") > 0) opts.out_dir = out;
  if (sub->count("--seed") > 0) opts.seed = seed;
  return nisio::cli::run(sub->get_name(), opts);
}
