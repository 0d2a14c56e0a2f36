#include "cofrag/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cofrag {

std::size_t SizeGrid::locate(double x) const {
  if (!(x >= x_min && x < j)) {
    throw std::domain_error("size outside grid range");
  }
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  std::size_t i = static_cast<std::size_t>(it - edges.begin());
  if (i == 0) return 0;
  return std::min(i - 1, pivots.size() - 1);
}

SizeGrid build_grid(double x_min, double j, int cells_per_decade) {
  if (!(x_min > 0.0 && x_min < j)) {
    throw std::invalid_argument("require 0 < x_min < j");
  }
  if (cells_per_decade < 4) {
    throw std::invalid_argument("require cells_per_decade >= 4");
  }
  const double decades = std::log10(j / x_min);
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(cells_per_decade * decades - 1e-9));

  SizeGrid g;
  g.x_min = x_min;
  g.j = j;
  g.cells_per_decade = cells_per_decade;
  g.edges.resize(n + 1);
  const double llo = std::log(x_min), lhi = std::log(j);
  for (std::size_t i = 0; i <= n; ++i) {
    g.edges[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / n);
  }
  g.edges.front() = x_min;
  g.edges.back() = j;
  g.pivots.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.pivots[i] = std::sqrt(g.edges[i] * g.edges[i + 1]);
  }
  return g;
}

FragTables precompute_frag_tables(const SizeGrid& grid,
                                  const KernelSpec& spec) {
  const std::size_t n = grid.size();
  const double p = spec.daughter.nu + 2.0;

  // x b(x,y) integrates to (x^p - lo^p)/y^p exactly; precompute edge powers
  // once so every column telescopes.
  std::vector<double> edge_pow(n + 1);
  for (std::size_t i = 0; i <= n; ++i) edge_pow[i] = std::pow(grid.edges[i], p);

  FragTables t;
  t.massfrac.resize(n);
  t.subgrid.resize(n);
  t.loss.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double y = grid.pivots[k];
    const double yp = std::pow(y, p);
    auto& col = t.massfrac[k];
    col.resize(k + 1);
    for (std::size_t i = 0; i < k; ++i) {
      col[i] = (edge_pow[i + 1] - edge_pow[i]) / yp;
    }
    col[k] = (yp - edge_pow[k]) / yp;  // daughters staying in the parent cell
    t.subgrid[k] = edge_pow[0] / yp;
    t.loss[k] = eval_a(spec.frag, y);
  }
  return t;
}

CoagTables precompute_coag_tables(const SizeGrid& grid,
                                  const KernelSpec& spec) {
  const std::size_t n = grid.size();
  CoagTables t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      const double v = grid.pivots[i] + grid.pivots[k];
      if (v >= grid.j) continue;  // truncation mask
      CoagTables::Pair pr;
      pr.i = static_cast<std::uint32_t>(i);
      pr.k = static_cast<std::uint32_t>(k);
      pr.rate = eval_K(spec.coag, grid.pivots[i], grid.pivots[k]);
      const auto it =
          std::upper_bound(grid.pivots.begin(), grid.pivots.end(), v);
      const std::size_t hi = static_cast<std::size_t>(it - grid.pivots.begin());
      if (hi >= n) {
        // Beyond the last pivot but below j: the last cell takes the full
        // merged mass.
        pr.l = static_cast<std::uint32_t>(n - 1);
        pr.lambda = 1.0;
        pr.overflow = true;
      } else {
        const double xl = grid.pivots[hi - 1];
        const double xr = grid.pivots[hi];
        pr.l = static_cast<std::uint32_t>(hi - 1);
        pr.lambda = (xr - v) / (xr - xl);
        pr.overflow = false;
      }
      t.pairs.push_back(pr);
    }
  }
  return t;
}

double State::total_mass() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

State make_state(std::shared_ptr<const SizeGrid> grid) {
  State s;
  s.mass.assign(grid->size(), 0.0);
  s.grid = std::move(grid);
  return s;
}

void apply_frag(const State& state, const FragTables& tables, Derivative& out) {
  const std::size_t n = state.mass.size();
  if (tables.parents() != n || out.dmass.size() != n) {
    throw std::invalid_argument("fragmentation table/state size mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double m = state.mass[k];
    if (m <= 0.0 || tables.loss[k] == 0.0) continue;
    const double r = tables.loss[k] * m;  // mass breakup flux of cell k
    const auto& col = tables.massfrac[k];
    out.dmass[k] -= r * (1.0 - col[k]);
    out.loss[k] += r * (1.0 - col[k]);
    for (std::size_t i = 0; i < k; ++i) out.dmass[i] += r * col[i];
    out.dmass[0] += r * tables.subgrid[k];
    out.dsubgrid += r * tables.subgrid[k];
  }
}

void apply_coag(const State& state, const CoagTables& tables, Derivative& out) {
  const std::size_t n = state.mass.size();
  if (out.dmass.size() != n) {
    throw std::invalid_argument("coagulation table/state size mismatch");
  }
  const auto& x = state.grid->pivots;
  for (const auto& pr : tables.pairs) {
    const double mi = state.mass[pr.i];
    const double mk = state.mass[pr.k];
    if (mi <= 0.0 || mk <= 0.0) continue;
    const double ni = mi / x[pr.i];
    const double nk = mk / x[pr.k];
    // Event rate; the self pair carries the 1/2 pairing factor.
    const double R = (pr.i == pr.k) ? 0.5 * pr.rate * ni * nk
                                    : pr.rate * ni * nk;
    const double v = x[pr.i] + x[pr.k];
    if (pr.i == pr.k) {
      out.dmass[pr.i] -= v * R;  // two particles consumed per event
      out.loss[pr.i] += v * R;
    } else {
      out.dmass[pr.i] -= x[pr.i] * R;
      out.dmass[pr.k] -= x[pr.k] * R;
      out.loss[pr.i] += x[pr.i] * R;
      out.loss[pr.k] += x[pr.k] * R;
    }
    if (pr.overflow) {
      out.dmass[pr.l] += v * R;
    } else {
      out.dmass[pr.l] += pr.lambda * x[pr.l] * R;
      out.dmass[pr.l + 1] += (1.0 - pr.lambda) * x[pr.l + 1] * R;
    }
  }
}

}  // namespace cofrag
