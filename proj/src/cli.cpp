#include "psv/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fstream>

#include "psv/config.hpp"
#include "psv/csv.hpp"
#include "psv/diagnostics.hpp"
#include "psv/errors.hpp"
#include "psv/estimate.hpp"

namespace psv::cli {
namespace {

namespace fs = std::filesystem;

RunConfig with_overrides(RunConfig config, const Options& options) {
  if (options.seed) config.master_seed = *options.seed;
  if (options.out_dir) config.output_dir = *options.out_dir;
  config = resolve(std::move(config));
  validate(config);
  return config;
}

fs::path prepare_output(const RunConfig& config) {
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RunError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  return dir;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError(fmt::format("cannot write '{}'", path.string()));
  writer(out);
  if (!out) throw RunError(fmt::format("error while writing '{}'", path.string()));
}

void write_resolved(const fs::path& dir, const RunConfig& config) {
  write_file(dir / "resolved_config.txt", [&](std::ostream& o) { o << render_config(config); });
}

std::string cell(const std::optional<double>& v, std::string_view spec = "{:.4e}") {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string("-");
}

void render_table(std::ostream& out, const BenchmarkResult& result,
                  std::optional<double> reference) {
  fmt::print(out, "{:<10} {:>10} {:>12} {:>10} {:>10} {:>8} {:>12} {:>12}\n", "method", "N",
             "P", "delta", "Delta", "accept", "P(direct)", "P(var)");
  if (result.analytic) {
    fmt::print(out, "{:<10} {:>10} {:>12.5e}\n", "analytic", "-", *result.analytic);
  }
  for (const auto& r : result.reports) {
    if (r.error) {
      fmt::print(out, "{:<10} {:>10} failed: {}\n", r.method, r.n_total, *r.error);
      continue;
    }
    fmt::print(out, "{:<10} {:>10} {:>12.5e} {:>10} {:>10} {:>8} {:>12} {:>12}\n", r.method,
               r.n_total, r.p_mean, cell(r.degenerate ? std::nullopt : std::optional(r.delta), "{:.3e}"),
               cell(r.degenerate ? std::nullopt : std::optional(r.big_delta), "{:.3g}"),
               cell(r.acceptance_rate, "{:.3f}"), cell(r.p_direct), cell(r.p_variational));
  }
  if (reference) {
    fmt::print(out, "reference P = {:.5e}\n", *reference);
    for (const auto& r : result.reports) {
      if (r.error) continue;
      fmt::print(out, "  {:<10} relative error vs reference {:+.3f}%\n", r.method,
                 100.0 * (r.p_mean / *reference - 1.0));
    }
  }
  fmt::print(out, "runtime {:.2f} s\n", result.runtime_seconds);
}

int run_and_report(const RunConfig& config, const std::string& csv_name,
                   std::optional<double> reference, std::ostream& out, std::ostream& err) {
  const fs::path dir = prepare_output(config);
  write_resolved(dir, config);
  const BenchmarkResult result = run_benchmark(config);
  write_file(dir / csv_name, [&](std::ostream& o) { write_bench_csv(o, result); });
  render_table(out, result, reference);
  int code = kExitOk;
  for (const auto& r : result.reports) {
    if (r.error) {
      fmt::print(err, "method {} failed: {}\n", r.method, *r.error);
      code = kExitRuntime;
    }
  }
  return code;
}

/// Same seed stream as the corresponding PSV method's first repeat.
std::uint64_t chain_seed(const RunConfig& config, SamplerKind kind) {
  const Method method = kind == SamplerKind::mcmc ? Method::psv_mcmc : Method::psv_hmc;
  return derive_seed(config.master_seed, static_cast<std::uint64_t>(method) + 1, 0);
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
}

}  // namespace

int cmd_estimate(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = with_overrides(load_config(options.config_path), options);
    return run_and_report(config, "estimate.csv", std::nullopt, out, err);
  });
}

int cmd_bench(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = with_overrides(bench_config(options.table), options);
    fmt::print(out, "bench table {}: {}\n", options.table,
               make_target(config.density).base().describe());
    return run_and_report(config, fmt::format("bench_table{}.csv", options.table),
                          bench_reference_probability(options.table), out, err);
  });
}

int cmd_sample(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = with_overrides(load_config(options.config_path), options);
    const fs::path dir = prepare_output(config);
    write_resolved(dir, config);
    const TargetDensity target = make_target(config.density);
    const SamplerKind kind = config.sample_sampler;
    const Chain chain = draw_chain(target, config.psv_config(kind, config.n_per_repeat),
                                   chain_seed(config, kind));
    const fs::path path = dir / fmt::format("chain_{}.csv", to_string(kind));
    write_file(path, [&](std::ostream& o) { write_chain_csv(o, chain); });
    fmt::print(out, "{} chain: {} steps, burn-in {}, acceptance {:.3f}{} -> {}\n",
               to_string(kind), chain.proposals_made(), chain.burn_in, chain.acceptance_rate(),
               chain.tune_warning ? " (tuning missed target band)" : "", path.string());
    return kExitOk;
  });
}

int cmd_diag(const Options& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = with_overrides(load_config(options.config_path), options);
    const fs::path dir = prepare_output(config);
    write_resolved(dir, config);
    const TargetDensity target = make_target(config.density);
    const GridSpec grid{*config.diag_grid_min, *config.diag_grid_max, config.diag_grid_points};

    std::string summary = "sampler,sup_norm,l1,ks_distance,acceptance_rate\n";
    for (SamplerKind kind : config.diag_samplers) {
      const PsvConfig psv = config.psv_config(kind, config.n_per_repeat);
      const Chain chain = draw_chain(target, psv, chain_seed(config, kind));
      const ConvergenceProfile profile = convergence_profile(chain, target, grid, psv.kde);
      const double ks = ks_distance(chain.retained(), [&](double x) {
        return analytic_truncated_cdf(target, x);
      });
      write_file(dir / fmt::format("profile_{}.csv", to_string(kind)),
                 [&](std::ostream& o) { write_profile_csv(o, profile); });
      summary += fmt::format("{},{},{},{},{}\n", to_string(kind), format_real(profile.sup_norm),
                             format_real(profile.l1), format_real(ks),
                             format_real(chain.acceptance_rate()));
      fmt::print(out, "{:<5} sup-norm {:.4e}  L1 {:.4e}  KS {:.4f}  acceptance {:.3f}\n",
                 to_string(kind), profile.sup_norm, profile.l1, ks, chain.acceptance_rate());
    }
    write_file(dir / "diag_summary.csv", [&](std::ostream& o) { o << summary; });
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exceedance probabilities by post-sampling variational Monte Carlo", "psv"};
  app.require_subcommand(1);
  app.fallthrough();

  Options options;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides run.master_seed)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides output.dir)");

  auto* estimate = app.add_subcommand("estimate", "Run every configured method and write estimate.csv");
  auto* bench = app.add_subcommand("bench", "Reproduce one of the built-in benchmark tables");
  auto* sample = app.add_subcommand("sample", "Dump one chain as index,x,accepted CSV");
  auto* diag = app.add_subcommand("diag", "Write KDE vs analytic density profiles");
  for (auto* sub : {estimate, sample, diag}) {
    sub->add_option("--config", options.config_path, "Run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
  }
  bench->add_option("--table", options.table, "Table id")->required()->check(CLI::IsMember({1, 2, 3}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "{}\n", e.what());
    return kExitConfig;
  }
  if (*seed_opt) options.seed = seed;
  if (*out_opt) options.out_dir = out_dir;

  if (estimate->parsed()) return cmd_estimate(options, out, err);
  if (bench->parsed()) return cmd_bench(options, out, err);
  if (sample->parsed()) return cmd_sample(options, out, err);
  return cmd_diag(options, out, err);
}

}  // namespace psv::cli
