#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "horolab/expcli.hpp"

namespace {

using horolab::cli::ExperimentConfig;

void add_options(CLI::App& app, ExperimentConfig& c) {
  app.add_option("--base", c.base, "base point: identity, hecke:N, iwasawa:x=..,y=..,theta=.., alpha:..,y:..,theta:.., sqrt2, golden")
      ->capture_default_str();
  app.add_option("--alpha", c.alpha, "expression for alpha; base becomes alpha:<expr>,y:1,theta:pi/2");
  app.add_option("--center", c.center, "centre of the test function or region (base point grammar)")
      ->capture_default_str();
  app.add_option("--index-set", c.index_set, "all, primes, progression or almost-primes")->capture_default_str();
  app.add_option("--mode", c.mode, "discrete or continuous")->capture_default_str();
  app.add_option("--sequence", c.sequence, "selberg sequence: ones or bump")->capture_default_str();
  app.add_option("--s", c.s, "flow step")->capture_default_str();
  app.add_option("--N", c.N, "number of steps or Hecke level")->capture_default_str();
  app.add_option("--T", c.T, "piece length")->capture_default_str();
  app.add_option("--delta", c.delta, "tolerance delta")->capture_default_str();
  app.add_option("--entry-bound", c.entry_bound, "entry bound for the period oracle")->capture_default_str();
  app.add_option("--q-exponent", c.exponents.q_exponent, "exponent of the denominator search")->capture_default_str();
  app.add_option("--bound-exponent", c.exponents.bound_exponent, "exponent of the inequality bound")
      ->capture_default_str();
  app.add_option("--gamma-entry-bound", c.gamma_entry_bound, "bottom-row bound for the discrete check")
      ->capture_default_str();
  app.add_option("--q-cap", c.q_cap, "largest scanned denominator")->capture_default_str();
  app.add_option("--modulus", c.modulus, "progression modulus")->capture_default_str();
  app.add_option("--max-factors", c.max_factors, "largest Omega(n) for almost primes")->capture_default_str();
  app.add_option("--D", c.D, "sieve level or type I modulus scale")->capture_default_str();
  app.add_option("--d1", c.d1, "first type II prime")->capture_default_str();
  app.add_option("--d2", c.d2, "second type II prime")->capture_default_str();
  app.add_option("--mass-floor", c.mass_floor, "smallest volume mass of a used ball")->capture_default_str();
  app.add_option("--radius", c.radius, "test function radius (linnik accepts inf)")->capture_default_str();
  app.add_option("--spacing", c.spacing, "grid spacing of the test family")->capture_default_str();
  app.add_option("--y-cap", c.y_cap, "height cap of the test family")->capture_default_str();
  app.add_option("--cusp-cutoff", c.cusp_cutoff, "height above which mass counts as escaped")->capture_default_str();
  app.add_option("--window-low", c.window_low, "lower end of the ratio window")->capture_default_str();
  app.add_option("--window-high", c.window_high, "upper end of the ratio window")->capture_default_str();
  app.add_option("--ratio-cap", c.ratio_cap, "upper bound on prime-orbit ratios")->capture_default_str();
  app.add_option("--budget", c.budget, "integration nodes per shift")->capture_default_str();
  app.add_option("--shifts", c.shifts, "random shifts for the integration error")->capture_default_str();
  app.add_option("--seed", c.seed, "seed for the random shifts")->capture_default_str();
  app.add_option("--out", c.output_dir, "output directory")->capture_default_str();
  app.add_option("--format", c.format, "report format: csv or json")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, horolab::cli::OutputFormat>{{"csv", horolab::cli::OutputFormat::Csv},
                                                             {"json", horolab::cli::OutputFormat::Json}},
          CLI::ignore_case));
  app.add_option("--threads", c.threads, "worker cap (default: HOROLAB_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horocycle orbit experiments on the modular surface"};
  app.set_version_flag("--version", std::string(horolab::cli::kLibraryVersion));
  app.require_subcommand(1);

  ExperimentConfig config;
  for (const auto experiment : horolab::cli::all_experiments()) {
    const std::string name(horolab::cli::to_string(experiment));
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_options(*sub, config);
    sub->callback([&config, experiment] { config.experiment = experiment; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string message;
  const int code = horolab::cli::run(config, &message);
  (code == 1 ? std::cerr : std::cout) << horolab::cli::to_string(config.experiment) << ": "
                                      << (code == 0 ? "PASS" : code == 2 ? "FAIL" : "ERROR") << ": " << message
                                      << '\n';
  return code;
}
