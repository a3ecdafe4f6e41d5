#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "gnls/errors.hpp"

using namespace gnls;
using namespace gnls::cli;

int main(int argc, char** argv) {
  CLI::App app{"Forward and inverse scattering for the generalized nonlinear Schrodinger equation", "gnls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GNLS_VERSION);

  std::string config_path;
  GlobalOptions global;
  std::string out_dir;
  long seed = 0;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--threads", global.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", seed, "reserved; the pipeline is deterministic");

  auto* forward = app.add_subcommand("forward", "sweep (k, eps) and write the A/B table");
  ExtractOptions extract_opts;
  auto* extract = app.add_subcommand("extract", "fit the eps-series A_n, B_n from a sweep file");
  extract->add_option("--sweep", extract_opts.sweep_file, "sweep file (default <out>/sweep.csv)");
  extract->add_option("--order", extract_opts.order, "highest order N_max")->check(CLI::PositiveNumber);
  auto* invert = app.add_subcommand("invert", "recover q_1 .. q_{N-1} from order-n data");
  auto* roundtrip = app.add_subcommand("roundtrip", "forward, extract and invert a known potential");
  ExampleOptions example_opts;
  auto* example = app.add_subcommand("example", "third-order closed forms and their explicit inversion");
  example->add_option("name", example_opts.name, "constant_gamma | exponential_alpha")->required();
  example->add_option("--parameter", example_opts.parameter, "gamma or alpha");
  example->add_option("--k-cutoff", example_opts.k_cutoff, "integral route cutoff")->check(CLI::PositiveNumber);
  example->add_option("--modes", example_opts.M, "contour sum truncation M");
  double tolerance_scale = 1.0;
  auto* selfcheck = app.add_subcommand("selfcheck", "run the invariant suite");
  selfcheck->add_option("--tolerance-scale", tolerance_scale)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (!out_dir.empty()) global.out = out_dir;

  try {
    const ExperimentConfig config = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
    if (forward->parsed()) return cmd_forward(config, global);
    if (extract->parsed()) return cmd_extract(config, global, extract_opts);
    if (invert->parsed()) return cmd_invert(config, global);
    if (roundtrip->parsed()) return cmd_roundtrip(config, global);
    if (example->parsed()) return cmd_example(config, global, example_opts);
    if (selfcheck->parsed()) return cmd_selfcheck(config, global, tolerance_scale);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
