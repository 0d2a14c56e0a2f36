#include "cofrag/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cofrag {

namespace {

void eval_derivative(const State& s, const FragTables& ft,
                     const CoagTables& ct, Derivative& d) {
  d.resize(s.mass.size());
  apply_frag(s, ft, d);
  apply_coag(s, ct, d);
  for (double v : d.dmass) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("non-finite derivative (overflow) at t=" +
                               std::to_string(s.t));
    }
  }
}

double positivity_cap(const State& s, const Derivative& d,
                      const StepControl& c) {
  double dt = c.dt_max;
  for (std::size_t i = 0; i < s.mass.size(); ++i) {
    if (s.mass[i] > 0.0 && d.loss[i] > 0.0) {
      // Divide before scaling: for subnormal cell masses the product
      // safety*fraction*mass underflows to zero while the ratio is a
      // perfectly ordinary number.
      dt = std::min(dt,
                    c.safety * c.positivity_fraction * (s.mass[i] / d.loss[i]));
    }
  }
  return dt;
}

// Heun update; returns false when a component would go negative.
bool heun_commit(State& s, const Derivative& d0, const FragTables& ft,
                 const CoagTables& ct, double dt, State& stage,
                 Derivative& d1) {
  const std::size_t n = s.mass.size();
  stage.grid = s.grid;
  stage.mass.resize(n);
  stage.t = s.t + dt;
  for (std::size_t i = 0; i < n; ++i) {
    stage.mass[i] = s.mass[i] + dt * d0.dmass[i];
    if (stage.mass[i] < 0.0) return false;
  }
  eval_derivative(stage, ft, ct, d1);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = 0.5 * (s.mass[i] + stage.mass[i] + dt * d1.dmass[i]);
    if (v < 0.0) return false;
    stage.mass[i] = v;
  }
  s.mass.swap(stage.mass);
  s.lumped_subgrid_mass += 0.5 * dt * (d0.dsubgrid + d1.dsubgrid);
  s.t += dt;
  return true;
}

}  // namespace

void StepControl::validate() const {
  if (!(safety > 0.0 && safety < 1.0)) {
    throw std::invalid_argument("safety must lie in (0,1)");
  }
  if (!(positivity_fraction > 0.0 && positivity_fraction < 1.0)) {
    throw std::invalid_argument("positivity_fraction must lie in (0,1)");
  }
  if (!(dt_max > 0.0 && dt_init > 0.0)) {
    throw std::invalid_argument("time steps must be positive");
  }
}

State project_initial(const InitialCondition& ic, const SizeGrid& grid) {
  State s;
  s.grid = std::make_shared<SizeGrid>(grid);
  s.mass.assign(grid.size(), 0.0);

  switch (ic.kind) {
    case InitialKind::monodisperse: {
      if (ic.size >= grid.j) break;  // fully truncated
      s.mass[grid.locate(ic.size)] = ic.mass;
      break;
    }
    case InitialKind::exponential: {
      // number density rho/mu^2 exp(-x/mu); cell mass integrated exactly.
      const double mu = ic.mean;
      const auto G = [&](double x) {
        return -(x + mu) * mu * std::exp(-x / mu);
      };
      for (std::size_t i = 0; i < grid.size(); ++i) {
        s.mass[i] =
            ic.mass / (mu * mu) * (G(grid.edges[i + 1]) - G(grid.edges[i]));
        s.mass[i] = std::max(s.mass[i], 0.0);
      }
      break;
    }
    case InitialKind::power_cutoff: {
      if (!(ic.p > -2.0) || !(ic.x_c > grid.x_min)) {
        throw std::invalid_argument("bad power-cutoff initial condition");
      }
      const double q = ic.p + 2.0;
      const double C = ic.mass * q / std::pow(ic.x_c, q);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lo = std::min(grid.edges[i], ic.x_c);
        const double hi = std::min(grid.edges[i + 1], ic.x_c);
        if (hi > lo) s.mass[i] = C * (std::pow(hi, q) - std::pow(lo, q)) / q;
      }
      break;
    }
    case InitialKind::tabulated: {
      for (const auto& [x, m] : ic.table) {
        if (x >= grid.j) continue;
        s.mass[grid.locate(x)] += m;
      }
      break;
    }
  }
  return s;
}

double step(State& state, const FragTables& ft, const CoagTables& ct,
            const StepControl& control, double dt_cap) {
  control.validate();
  Derivative d0, d1;
  State stage;
  eval_derivative(state, ft, ct, d0);
  double dt = std::min(dt_cap, positivity_cap(state, d0, control));
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (heun_commit(state, d0, ft, ct, dt, stage, d1)) return dt;
    dt *= 0.5;
  }
  throw std::runtime_error("step size collapsed without preserving positivity");
}

RunResult run(const Scenario& scenario) {
  scenario.control.validate();
  if (scenario.outputs == 0) throw std::invalid_argument("outputs must be > 0");
  const SizeGrid grid =
      build_grid(scenario.grid.x_min, scenario.grid.j,
                 scenario.grid.cells_per_decade);
  const FragTables ft = precompute_frag_tables(grid, scenario.spec);
  const CoagTables ct = precompute_coag_tables(grid, scenario.spec);

  State s = project_initial(scenario.ic, grid);
  RunResult res;
  res.rho = s.total_mass();
  res.series.m0 = scenario.spec.m0;
  res.series.delta = scenario.delta;
  res.snapshots.push_back(s);
  res.series.record(s, ft);

  const double m1_0 = res.rho;
  double first_cap = scenario.control.dt_init;
  for (std::size_t k = 1; k <= scenario.outputs; ++k) {
    const double t_next = scenario.t_end * static_cast<double>(k) /
                          static_cast<double>(scenario.outputs);
    while (s.t < t_next * (1.0 - 1e-14)) {
      const double cap = std::min(t_next - s.t, first_cap);
      step(s, ft, ct, scenario.control, cap);
      first_cap = std::numeric_limits<double>::infinity();
      if (++res.steps > 200000000ULL) {
        throw std::runtime_error("step budget exhausted");
      }
    }
    s.t = t_next;  // absorb rounding in the time coordinate
    res.snapshots.push_back(s);
    res.series.record(s, ft);
    if (m1_0 > 0.0) {
      res.mass_drift = std::max(
          res.mass_drift, std::abs(s.total_mass() - m1_0) / m1_0);
    }
  }
  const double total = s.total_mass();
  res.subgrid_ok = total <= 0.0 ||
                   s.lumped_subgrid_mass <= scenario.subgrid_fail_fraction *
                                                total;
  return res;
}

TwoRunResult two_run_distance(const Scenario& scenario, double eps) {
  scenario.control.validate();
  const SizeGrid grid =
      build_grid(scenario.grid.x_min, scenario.grid.j,
                 scenario.grid.cells_per_decade);
  const FragTables ft = precompute_frag_tables(grid, scenario.spec);
  const CoagTables ct = precompute_coag_tables(grid, scenario.spec);

  State a = project_initial(scenario.ic, grid);
  State b = a;
  for (double& m : b.mass) m *= (1.0 + eps);
  if (eps < -1.0) throw std::invalid_argument("perturbation makes data negative");

  const double m0 = scenario.spec.m0;
  const double delta = scenario.delta;

  TwoRunResult res;
  res.series1.m0 = res.series2.m0 = m0;
  res.series1.delta = res.series2.delta = delta;
  const auto record = [&]() {
    res.times.push_back(a.t);
    res.distance.push_back(xi_distance(a, b, m0, delta));
    res.series1.record(a, ft);
    res.series2.record(b, ft);
  };
  record();
  res.initial_distance = res.distance.front();

  Derivative da0, da1, db0, db1;
  State stage;
  double first_cap = scenario.control.dt_init;
  for (std::size_t k = 1; k <= scenario.outputs; ++k) {
    const double t_next = scenario.t_end * static_cast<double>(k) /
                          static_cast<double>(scenario.outputs);
    while (a.t < t_next * (1.0 - 1e-14)) {
      eval_derivative(a, ft, ct, da0);
      eval_derivative(b, ft, ct, db0);
      // Lockstep: both runs advance with the joint admissible step.
      double dt = std::min({t_next - a.t, first_cap,
                            positivity_cap(a, da0, scenario.control),
                            positivity_cap(b, db0, scenario.control)});
      first_cap = std::numeric_limits<double>::infinity();
      for (int attempt = 0;; ++attempt) {
        State atry = a, btry = b;
        if (heun_commit(atry, da0, ft, ct, dt, stage, da1) &&
            heun_commit(btry, db0, ft, ct, dt, stage, db1)) {
          a = std::move(atry);
          b = std::move(btry);
          break;
        }
        if (attempt >= 60) {
          throw std::runtime_error("lockstep step size collapsed");
        }
        dt *= 0.5;
      }
    }
    a.t = b.t = t_next;
    record();
  }
  return res;
}

}  // namespace cofrag
