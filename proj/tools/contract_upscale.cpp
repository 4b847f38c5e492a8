// contract-upscale: batch runner comparing the smoothed-particle and
// cell-density formulations of tissue contraction on shared meshes.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "upscale/config.hpp"
#include "upscale/runner.hpp"

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOptions {
  std::string config_path;
  std::string out_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "run configuration file")
      ->required();
  cmd->add_option("--out", opt.out_override, "output directory override");
  cmd->add_option("--seed", opt.seed_override, "seed override");
  cmd->add_option("--threads", opt.threads_override,
                  "assembly thread count override")
      ->check(CLI::PositiveNumber);
}

int load_config(const CommonOptions& opt, upscale::RunConfig& cfg) {
  const auto text = read_file(opt.config_path);
  if (!text) {
    std::cerr << "error: cannot read config " << opt.config_path << '\n';
    return upscale::exit_numerical;
  }
  upscale::ParseResult parsed = upscale::parse_config(*text);
  if (!parsed.errors.empty()) {
    for (const auto& e : parsed.errors)
      std::cerr << opt.config_path << ':' << e.line << ": " << e.key << ": "
                << e.message << '\n';
    return upscale::exit_validation;
  }
  cfg = *parsed.config;
  if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
  if (opt.seed_override) cfg.seed = *opt.seed_override;
  if (opt.threads_override) cfg.threads = *opt.threads_override;
  return upscale::exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Agent-based (smoothed-particle) vs continuum (cell-density) "
      "contraction mechanics: batch solver and consistency reports"};
  app.require_subcommand(1);

  CommonOptions run_opt, conv_opt, sample_opt;
  CLI::App* run = app.add_subcommand("run", "solve one case, write reports");
  add_common(run, run_opt);
  CLI::App* conv =
      app.add_subcommand("convergence", "nested mesh refinement study");
  add_common(conv, conv_opt);
  CLI::App* sample =
      app.add_subcommand("sample-cells", "sample cells from a density");
  add_common(sample, sample_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? upscale::exit_ok : upscale::exit_validation;
  }

  upscale::RunConfig cfg;
  if (run->parsed()) {
    if (const int rc = load_config(run_opt, cfg)) return rc;
    return upscale::cmd_run(cfg);
  }
  if (conv->parsed()) {
    if (const int rc = load_config(conv_opt, cfg)) return rc;
    return upscale::cmd_convergence(cfg);
  }
  if (const int rc = load_config(sample_opt, cfg)) return rc;
  return upscale::cmd_sample_cells(cfg);
}
