#ifndef COFRAG_DISCRETIZATION_HPP_
#define COFRAG_DISCRETIZATION_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "cofrag/kernels.hpp"

namespace cofrag {

/// Geometric partition of [x_min, j) with pivots at the geometric mean of
/// each cell's edges. j doubles as the truncation size: merger products at
/// or beyond j are discarded events, breakup is evaluated at pivots only.
struct SizeGrid {
  double x_min = 0.0;
  double j = 0.0;
  int cells_per_decade = 0;
  std::vector<double> edges;   // n+1, strictly increasing, constant ratio
  std::vector<double> pivots;  // n

  std::size_t size() const { return pivots.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  /// Index of the cell containing x (requires x_min <= x < j).
  std::size_t locate(double x) const;
};

SizeGrid build_grid(double x_min, double j, int cells_per_decade);

/// Exact fragment mass bookkeeping per parent pivot: the fraction of a
/// breaking parent's mass landing in each cell, the fraction below x_min,
/// and the breakup rate. Entries come from the closed-form antiderivative
/// of x b(x,y), so each column sums to one with the sub-grid part.
struct FragTables {
  // massfrac[k] has k+1 entries: cells 0..k for parent pivot k.
  std::vector<std::vector<double>> massfrac;
  std::vector<double> subgrid;  // (x_min/y_k)^(nu+2)
  std::vector<double> loss;     // a(y_k)

  std::size_t parents() const { return loss.size(); }
};

FragTables precompute_frag_tables(const SizeGrid& grid, const KernelSpec& spec);

/// Pivot-splitting coagulation table. Each unmasked pair (i,k), i <= k,
/// merges at rate K(x_i,x_k); the merged size is assigned to the two
/// bracketing pivots so that number and mass are preserved. Pairs with
/// x_i + x_k >= j are excluded, matching the truncated kernel.
struct CoagTables {
  struct Pair {
    std::uint32_t i, k, l;  // l: lower target pivot
    double lambda;          // number fraction to pivot l
    double rate;            // K(x_i, x_k)
    bool overflow;          // merged size beyond the last pivot (full mass
                            // to the last cell)
  };
  std::vector<Pair> pairs;
};

CoagTables precompute_coag_tables(const SizeGrid& grid, const KernelSpec& spec);

/// Cell-integrated mass per cell at time t. Mass, not number density: the
/// singular daughter law produces infinitely many fragments but only a
/// finite amount of mass, so mass is the bookkeeping unit.
struct State {
  std::shared_ptr<const SizeGrid> grid;
  std::vector<double> mass;
  double t = 0.0;
  double lumped_subgrid_mass = 0.0;  // cumulative sub-x_min fragment mass
                                     // folded into the first cell

  double total_mass() const;
};

State make_state(std::shared_ptr<const SizeGrid> grid);

/// Time derivative of the cell masses plus bookkeeping channels.
struct Derivative {
  std::vector<double> dmass;
  std::vector<double> loss;  // gross loss rate per cell (>= 0), used for
                             // positivity-preserving step control
  double dsubgrid = 0.0;     // rate of sub-x_min mass entering cell 0

  void resize(std::size_t n) {
    dmass.assign(n, 0.0);
    loss.assign(n, 0.0);
    dsubgrid = 0.0;
  }
};

/// Accumulates the fragmentation contribution. Conservative: fragment mass
/// below x_min is lumped into the first cell and tracked via dsubgrid.
void apply_frag(const State& state, const FragTables& tables, Derivative& out);

/// Accumulates the coagulation contribution (masked pairs contribute
/// nothing, exactly as the truncated kernel).
void apply_coag(const State& state, const CoagTables& tables, Derivative& out);

}  // namespace cofrag

#endif  // COFRAG_DISCRETIZATION_HPP_
