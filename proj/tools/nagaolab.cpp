// nagaolab: command-line front end for trace, moment and average-trace
// experiments on quadratic-twist surfaces D(T) y^2 = f(x).

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "nagaolab/cli.hpp"

namespace {

extern "C" void on_interrupt(int) { nagaolab::cli::interrupt_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  nagaolab::cli::ExperimentConfig cfg;
  CLI::App app{"Frobenius traces, Sato-Tate moments and Nagao sums for twist surfaces D(T)y^2 = f(x)"};
  app.add_option("command", cfg.command, "trace | lpoly | nagao | moments | st-classify | peterson | factor-check")
      ->required()
      ->check(CLI::IsMember({"trace", "lpoly", "nagao", "moments", "st-classify", "peterson", "factor-check"}));
  app.add_option("--f", cfg.f, "fiber polynomial f, e.g. \"x^5 - x + 1\"");
  app.add_option("--D", cfg.D, "twisting polynomial D(T) (default: f), or auto-peterson for factor-check");
  app.add_option("--sigma", cfg.sigma, "Moebius transform \"(ax+b)/(cx+d)\" or \"1/x\"");
  app.add_option("--N", cfg.N, "prime cutoff, inclusive (default 100000, cap 10^7)");
  app.add_option("--grid", cfg.grid, "cutoff grid: geometric:<k> or comma-separated list");
  app.add_option("--mode", cfg.mode, "fast-twist | fiberwise")->check(CLI::IsMember({"fast-twist", "fiberwise"}));
  app.add_option("--r", cfg.r, "multiplicity of J_f in J_D for factor-check");
  app.add_option("--s-curves", cfg.s_curves, "extra genus-1 factors E_i for factor-check");
  app.add_option("--threads", cfg.threads, "worker count")->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", cfg.cache_dir, "trace cache directory (NAGAOLAB_CACHE overrides)");
  app.add_option("--output,-o", cfg.output, "report file (default: standard output)");
  app.add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--verify-cache", cfg.verify_cache, "recompute every cached trace before use");
  app.add_option("--tolerance", cfg.tolerance, "moment-class tolerance for st-classify");
  app.add_option("--st-table", cfg.st_table, "Sato-Tate group table file (default: built-in)");
  app.add_flag("--quiet,-q", cfg.quiet, "suppress progress messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(nagaolab::cli::ExitCode::config);
  }

  std::signal(SIGINT, on_interrupt);
  return nagaolab::cli::run(cfg);
}
