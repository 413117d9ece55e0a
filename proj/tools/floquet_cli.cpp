#include "floquet/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace floquet;

namespace {

void print_summary(const RunReport& r) {
  for (const auto& cell : r.cells) {
    std::printf("L=%d eps=%.6f gap=%.4f (%.1fs)\n", cell.L, cell.epsilon, cell.gap.width, cell.runtime_s);
    for (const auto& i : cell.indices)
      std::printf("  %-14s raw=% .10f%+.2ei  integer=%ld  residual=%.3e%s\n", i.kind.c_str(), i.raw.real(),
                  i.raw.imag(), i.integer, i.residual, i.quantized ? "" : "  [not quantized]");
    for (const auto& c : cell.checks)
      if (!c.passed)
        std::printf("  FAIL%s %s (%s)\n", c.tolerance_bound ? " (tolerance-bound)" : "", c.name.c_str(),
                    c.detail.c_str());
  }
  for (const auto& c : r.checks)
    std::printf("%-48s %-24s %.3e  %s\n", c.name.c_str(),
                c.passed ? "pass" : (c.tolerance_bound ? "fail (tolerance-bound)" : "fail"), c.value,
                c.detail.c_str());
  for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("%s\n", r.all_passed() ? "all checks passed" : "some checks FAILED");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet topological index toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--out", out_dir, "output directory for report.json and table.csv");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_flag("--quiet", quiet, "suppress the summary on stdout");

  std::string config_path;
  auto* run = app.add_subcommand("run", "evaluate every configured size and quasi-energy");
  run->add_option("config", config_path, "experiment config (JSON)")->required();

  auto* sweep = app.add_subcommand("sweep", "convergence sweep over lattice sizes");
  sweep->add_option("config", config_path, "experiment config (JSON)")->required();
  std::vector<int> sizes;
  sweep->add_option("--sizes", sizes, "comma-separated sizes")->delimiter(',')->required();

  auto* verify = app.add_subcommand("verify", "property suite at the first configured size");
  verify->add_option("config", config_path, "experiment config (JSON)")->required();
  std::string suite = "full";
  verify->add_option("--suite", suite, "full or fast")->check(CLI::IsMember({"full", "fast"}));

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load_config(config_path);
    if (*seed_opt) {
      cfg.seed = seed;
      cfg.disorder.seed = seed;
    }
    RunReport report;
    if (run->parsed())
      report = run_experiment(cfg);
    else if (sweep->parsed())
      report = convergence_sweep(cfg, sizes);
    else
      report = verify_suite(cfg, suite == "full");
    write_report(report, cfg, out_dir);
    if (!quiet) print_summary(report);
    return report.all_passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
