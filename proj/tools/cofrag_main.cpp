#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cofrag/config.hpp"
#include "cofrag/runner.hpp"

namespace {

int load_config(const std::string& path, cofrag::Config& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read config file: " << path << "\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  cofrag::ParseOutcome outcome = cofrag::parse_config(buf.str());
  if (!outcome.ok()) {
    for (const auto& e : outcome.errors) std::cerr << path << ": " << e << "\n";
    return 2;
  }
  cfg = outcome.config;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coagulation-fragmentation solver and bound checker"};
  app.require_subcommand(1);

  std::string config_path;
  cofrag::CommandOptions opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "key = value config file")
        ->required();
    sub->add_flag("--force", opt.force, "skip the hypothesis gate");
    sub->add_flag("--dry-run", opt.dry_run,
                  "validate and print resolved parameters, write nothing");
    sub->add_option("--out", opt.out_dir, "output directory");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "single run with reports");
  CLI::App* cmd_study =
      app.add_subcommand("study", "convergence study over j and resolution");
  CLI::App* cmd_check =
      app.add_subcommand("check-kernel", "certify kernel hypotheses");
  CLI::App* cmd_two =
      app.add_subcommand("two-run", "two-run stability distance test");
  add_common(cmd_run);
  add_common(cmd_study);
  add_common(cmd_check);
  add_common(cmd_two);

  CLI11_PARSE(app, argc, argv);

  cofrag::Config cfg;
  if (int rc = load_config(config_path, cfg); rc != 0) return rc;

  try {
    if (cmd_run->parsed()) return cofrag::run_command(cfg, opt);
    if (cmd_study->parsed()) return cofrag::study_command(cfg, opt);
    if (cmd_check->parsed()) return cofrag::check_kernel_command(cfg, opt);
    if (cmd_two->parsed()) return cofrag::two_run_command(cfg, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
