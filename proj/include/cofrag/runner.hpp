#ifndef COFRAG_RUNNER_HPP_
#define COFRAG_RUNNER_HPP_

#include <string>

#include "cofrag/config.hpp"
#include "cofrag/diagnostics.hpp"

namespace cofrag {

struct CommandOptions {
  std::string out_dir = ".";
  bool force = false;    // skip the hypothesis gate
  bool dry_run = false;  // validate and print, write nothing
};

/// Exit codes: 0 all good, 1 a toggled check or conservation assertion
/// failed, 2 usage/config/hypothesis-gate error.
int run_command(const Config& cfg, const CommandOptions& opt);
int two_run_command(const Config& cfg, const CommandOptions& opt);
int study_command(const Config& cfg, const CommandOptions& opt);
int check_kernel_command(const Config& cfg, const CommandOptions& opt);

/// Assembles the toggled envelope checks for a finished run.
BoundReport make_bound_report(const Config& cfg, const RunResult& res);

/// moments.csv body, with the resolved config as a comment header.
std::string moments_csv(const Config& cfg, const MomentSeries& s);

}  // namespace cofrag

#endif  // COFRAG_RUNNER_HPP_
