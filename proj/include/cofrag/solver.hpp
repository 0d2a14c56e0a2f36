#ifndef COFRAG_SOLVER_HPP_
#define COFRAG_SOLVER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "cofrag/diagnostics.hpp"
#include "cofrag/discretization.hpp"
#include "cofrag/kernels.hpp"

namespace cofrag {

/// Positivity-preserving step control: dt is chosen so that no cell loses
/// more than positivity_fraction of its mass per step.
struct StepControl {
  double dt_init = 1e-4;
  double dt_max = 0.05;
  double safety = 0.5;
  double positivity_fraction = 0.5;

  void validate() const;
};

enum class InitialKind { monodisperse, exponential, power_cutoff, tabulated };

struct InitialCondition {
  InitialKind kind = InitialKind::exponential;
  double mass = 1.0;
  double size = 1.0;   // monodisperse location
  double mean = 1.0;   // exponential mean
  double p = 0.0;      // power_cutoff exponent (> -2)
  double x_c = 1.0;    // power_cutoff upper end
  std::vector<std::pair<double, double>> table;  // (size, mass) atoms
};

struct GridParams {
  double x_min = 1e-4;
  double j = 1e3;
  int cells_per_decade = 32;
};

struct Scenario {
  KernelSpec spec;
  GridParams grid;
  InitialCondition ic;
  double t_end = 5.0;
  std::size_t outputs = 64;  // snapshots after t=0
  double delta = 0.5;        // exponent offset for the 2+delta moment
  StepControl control;
  double subgrid_fail_fraction = 0.01;  // lumped-mass threshold
};

/// Exact projection of the initial descriptor onto cell masses.
State project_initial(const InitialCondition& ic, const SizeGrid& grid);

/// One SSP two-stage explicit step. Returns the dt actually used
/// (<= dt_cap). The state stays nonnegative and total mass is unchanged up
/// to rounding.
double step(State& state, const FragTables& ft, const CoagTables& ct,
            const StepControl& control, double dt_cap);

struct RunResult {
  std::vector<State> snapshots;  // at the configured cadence, incl. t=0
  MomentSeries series;
  double rho = 0.0;              // initial total mass
  double mass_drift = 0.0;       // max |M1(t)-M1(0)|/M1(0)
  bool subgrid_ok = true;
  std::size_t steps = 0;
};

RunResult run(const Scenario& scenario);

struct TwoRunResult {
  std::vector<double> times;
  std::vector<double> distance;  // weighted xi-distance
  MomentSeries series1, series2;
  double initial_distance = 0.0;
};

/// Runs the scenario and a perturbed copy (initial data scaled by 1+eps)
/// with an identical dt sequence, recording the weighted distance.
TwoRunResult two_run_distance(const Scenario& scenario, double eps);

}  // namespace cofrag

#endif  // COFRAG_SOLVER_HPP_
