#ifndef COFRAG_CONFIG_HPP_
#define COFRAG_CONFIG_HPP_

#include <string>
#include <vector>

#include "cofrag/solver.hpp"

namespace cofrag {

/// Flat scenario configuration, one `key = value` per line.
struct Config {
  // kernel
  std::string kernel = "power_law_sum";  // constant | additive | power_law_sum
  double alpha = 0.3;
  double beta = 0.3;
  double c = 1.0;
  std::string frag = "power_law";  // power_law | zero
  double gamma = 1.0;
  double nu = -1.2;
  double m0 = 0.3;
  double delta = 0.5;
  // grid
  double x_min = 1e-4;
  double j = 1e3;
  int cells_per_decade = 32;
  // initial condition
  std::string ic = "exponential";  // monodisperse | exponential | power_cutoff
  double ic_mass = 1.0;
  double ic_mean = 1.0;
  double ic_size = 1.0;
  double ic_p = 0.0;
  double ic_xc = 1.0;
  // time stepping
  double t_end = 5.0;
  unsigned long outputs = 64;
  double dt_init = 1e-3;
  double dt_max = 0.05;
  double safety = 0.5;
  double positivity_fraction = 0.5;
  // diagnostics
  bool check_weight_tail = true;
  bool check_frag_flux = true;
  bool check_small_size = true;
  bool check_higher_moment = true;
  double subgrid_threshold = 0.01;
  // two-run stability test
  double epsilon = 1e-3;
  // study sweeps
  std::vector<double> j_list;
  std::vector<int> resolution_list;

  bool operator==(const Config&) const = default;
};

struct ParseOutcome {
  Config config;
  std::vector<std::string> errors;  // every problem found, not just the first
  bool ok() const { return errors.empty(); }
};

ParseOutcome parse_config(const std::string& text);

/// parse_config that throws with all messages joined.
Config parse_config_or_throw(const std::string& text);

/// Canonical text form; re-parsing yields an identical Config.
std::string serialize_config(const Config& cfg);

KernelSpec make_kernel_spec(const Config& cfg);
Scenario make_scenario(const Config& cfg);

}  // namespace cofrag

#endif  // COFRAG_CONFIG_HPP_
