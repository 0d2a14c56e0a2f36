#include "cofrag/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cofrag {

namespace {

const double kLn5 = std::log(5.0);

}  // namespace

double LogLogWeight::value(double x) {
  if (!(x >= 0.0)) throw std::domain_error("W requires x >= 0");
  // x * [ln(ln(x+5)) - ln(ln 5)] without cancellation for small x.
  return x * std::log1p(std::log1p(x / 5.0) / kLn5);
}

double LogLogWeight::deriv(double x) {
  if (!(x >= 0.0)) throw std::domain_error("W' requires x >= 0");
  const double lx5 = kLn5 + std::log1p(x / 5.0);  // ln(x+5)
  return std::log1p(std::log1p(x / 5.0) / kLn5) + x / ((x + 5.0) * lx5);
}

double LogLogWeight::second(double x) {
  if (!(x >= 0.0)) throw std::domain_error("W'' requires x >= 0");
  const double lx5 = kLn5 + std::log1p(x / 5.0);
  const double d = (x + 5.0) * lx5;
  return ((x + 10.0) * lx5 - x) / (d * d);
}

double LogLogWeight::gap(double x) {
  if (!(x >= 0.0)) throw std::domain_error("gap requires x >= 0");
  const double lx5 = kLn5 + std::log1p(x / 5.0);
  // x^2 / ((x+5) ln(x+5)), factored against overflow for huge x.
  return (x / (x + 5.0)) * (x / lx5);
}

std::vector<double> geometric_grid(double lo, double hi,
                                   std::size_t points_per_decade) {
  if (!(lo > 0.0 && hi > lo) || points_per_decade == 0) {
    throw std::invalid_argument("bad geometric grid parameters");
  }
  const double decades = std::log10(hi / lo);
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(decades * points_per_decade)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    g[i] = lo * std::pow(hi / lo, t);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

CvpReport cvp_check(const WeightFns& phi, const std::vector<double>& grid,
                    double p) {
  if (grid.size() < 100) {
    throw std::invalid_argument("cvp_check grid needs >= 100 points");
  }
  if (!(grid.front() > 0.0) ||
      std::log10(grid.back() / grid.front()) < 6.0 - 1e-9) {
    throw std::invalid_argument("cvp_check grid must span >= 6 decades");
  }
  if (!(p > 1.0 && p < 2.0)) {
    throw std::invalid_argument("cvp_check requires p in (1,2)");
  }

  const double rel = 1e-9;
  CvpReport rep;
  rep.p = p;

  const std::size_t n = grid.size();
  std::vector<double> v(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = phi.value(grid[i]);
    d[i] = phi.deriv(grid[i]);
  }

  rep.origin_conditions =
      std::abs(phi.value(0.0)) <= 1e-12 && std::abs(phi.deriv(0.0)) <= 1e-12;

  // Convexity and concavity of the derivative via chord slopes.
  bool convex = true, dconcave = true;
  double prev_vslope = -std::numeric_limits<double>::infinity();
  double prev_dslope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = grid[i + 1] - grid[i];
    const double vs = (v[i + 1] - v[i]) / h;
    const double ds = (d[i + 1] - d[i]) / h;
    const double vtol = rel * (std::abs(vs) + std::abs(prev_vslope)) + 1e-300;
    const double dtol = rel * (std::abs(ds) + std::abs(prev_dslope)) + 1e-300;
    if (vs < prev_vslope - vtol) convex = false;
    if (ds > prev_dslope + dtol) dconcave = false;
    prev_vslope = vs;
    prev_dslope = ds;
  }
  rep.convex = convex;
  rep.deriv_concave = dconcave;

  // Growth checks: compare the tail against two decades earlier.
  const double r_end = grid.back();
  const double r_ref = r_end / 100.0;
  const auto at = [&](double r) {
    auto it = std::lower_bound(grid.begin(), grid.end(), r);
    return static_cast<std::size_t>(it - grid.begin());
  };
  const std::size_t iref = std::min(at(r_ref), n - 2);
  rep.deriv_unbounded = d.back() >= 1.05 * d[iref] && d.back() > 0.0;
  rep.superlinear =
      v.back() / grid.back() >= 1.05 * (v[iref] / grid[iref]) && v.back() > 0.0;

  // Pointwise chain 0 <= phi <= r phi' <= 2 phi.
  bool chain = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::abs(v[i]) + std::abs(grid[i] * d[i]) + 1e-300;
    if (v[i] < -rel * scale) chain = false;
    if (v[i] > grid[i] * d[i] + rel * scale) chain = false;
    if (grid[i] * d[i] > 2.0 * v[i] + rel * scale) chain = false;
  }
  rep.chain = chain;

  // Pairwise inequalities on the grid's Cartesian square.
  bool x1 = true, x2 = true, x3 = true;
  const double phi2_0 = phi.second(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double r = grid[i], s = grid[k];
      const double vrs = phi.value(r + s);
      const double excess = vrs - v[i] - v[k];
      const double sc1 = std::abs(v[i]) + std::abs(v[k]) + 1e-300;
      if (s * d[i] > v[i] + v[k] + rel * (sc1 + std::abs(s * d[i]))) x1 = false;
      const double sc2 = std::abs(vrs) + sc1;
      if (excess < -rel * sc2) {
        x2 = false;
      }
      const double rhs2 = 2.0 * (s * v[i] + r * v[k]) / (r + s);
      if (excess > rhs2 + rel * (sc2 + rhs2)) x2 = false;
      const double rhs3 = phi2_0 * r * s;
      if (excess > rhs3 + rel * (sc2 + rhs3)) x3 = false;
    }
  }
  rep.x1 = x1;
  rep.x2 = x2;
  rep.x3 = x3;

  // S_p: bounded on the grid plus a log-log slope test on the last decade,
  // since sampling alone cannot certify a supremum over [0,inf).
  double sp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sp = std::max(sp, v[i] / std::pow(grid[i], p));
  }
  rep.sp_value = sp;
  const std::size_t islope = std::min(at(r_end / 10.0), n - 2);
  const double slope = (std::log(v.back()) - std::log(v[islope])) /
                       (std::log(grid.back()) - std::log(grid[islope]));
  rep.sp_finite = std::isfinite(sp) && slope <= p - 1e-3;

  return rep;
}

double superlinearity_gap_growth(double m) {
  if (!(m >= 0.0 && m < 1.0)) {
    throw std::invalid_argument("exponent must lie in [0,1)");
  }
  const double ratio_step = std::pow(10.0, 1.0 / 16.0);
  double x = 1.0;
  double last_fail = 1.0;
  double top_ratio = 0.0;
  // Extend until the gap dominates x^m by a clear factor; the ratio tends
  // to infinity so the scan terminates.
  while (x < 1e305) {
    x *= ratio_step;
    const double r = LogLogWeight::gap(x) / std::pow(x, m);
    if (r < 1.0) {
      last_fail = x;
      top_ratio = 0.0;
    } else {
      top_ratio = r;
      if (top_ratio >= 10.0) break;
    }
  }
  if (top_ratio < 1.0) {
    throw std::runtime_error("gap threshold not found below 1e305");
  }
  return last_fail * ratio_step;
}

VPWeight VPWeight::from_breakpoints(std::vector<double> positive_breaks) {
  if (positive_breaks.empty()) {
    throw std::invalid_argument("need at least one breakpoint");
  }
  VPWeight w;
  w.breakpoints.reserve(positive_breaks.size() + 1);
  w.breakpoints.push_back(0.0);
  double prev_gap = 0.0;
  for (double b : positive_breaks) {
    const double gap = b - w.breakpoints.back();
    if (!(b > w.breakpoints.back()) || gap < prev_gap * (1.0 - 1e-12)) {
      throw std::invalid_argument(
          "breakpoints must increase with nondecreasing gaps");
    }
    prev_gap = gap;
    w.breakpoints.push_back(b);
  }
  // Phi(b_k) with Phi' piecewise linear through (b_k, k).
  w.cumvalue.assign(w.breakpoints.size(), 0.0);
  for (std::size_t k = 0; k + 1 < w.breakpoints.size(); ++k) {
    const double gap = w.breakpoints[k + 1] - w.breakpoints[k];
    w.cumvalue[k + 1] = w.cumvalue[k] + gap * (static_cast<double>(k) + 0.5);
  }
  return w;
}

double VPWeight::deriv(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("VPWeight requires r >= 0");
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin());
  if (k >= breakpoints.size()) {
    const std::size_t K = breakpoints.size() - 1;
    const double slope = 1.0 / (breakpoints[K] - breakpoints[K - 1]);
    return static_cast<double>(K) + slope * (r - breakpoints[K]);
  }
  const double gap = breakpoints[k] - breakpoints[k - 1];
  return static_cast<double>(k - 1) + (r - breakpoints[k - 1]) / gap;
}

double VPWeight::value(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("VPWeight requires r >= 0");
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin());
  if (k >= breakpoints.size()) {
    const std::size_t K = breakpoints.size() - 1;
    const double slope = 1.0 / (breakpoints[K] - breakpoints[K - 1]);
    const double dr = r - breakpoints[K];
    return cumvalue[K] + static_cast<double>(K) * dr + 0.5 * slope * dr * dr;
  }
  const double gap = breakpoints[k] - breakpoints[k - 1];
  const double dr = r - breakpoints[k - 1];
  return cumvalue[k - 1] + static_cast<double>(k - 1) * dr +
         0.5 * dr * dr / gap;
}

double VPWeight::second(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("VPWeight requires r >= 0");
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin());
  const std::size_t K = breakpoints.size() - 1;
  if (k >= breakpoints.size()) return 1.0 / (breakpoints[K] - breakpoints[K - 1]);
  return 1.0 / (breakpoints[k] - breakpoints[k - 1]);
}

WeightFns VPWeight::fns() const {
  return WeightFns{[this](double r) { return value(r); },
                   [this](double r) { return deriv(r); },
                   [this](double r) { return second(r); }};
}

VPWeight build_dlvp_weight(const std::vector<double>& cell_weight,
                           const std::vector<double>& density) {
  if (cell_weight.size() != density.size()) {
    throw std::invalid_argument("weight/density size mismatch");
  }
  double total = 0.0;
  double fmax = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (!(cell_weight[i] >= 0.0) || !(density[i] >= 0.0)) {
      throw std::invalid_argument("negative sample in density");
    }
    total += cell_weight[i] * density[i];
    fmax = std::max(fmax, density[i]);
  }
  if (!std::isfinite(total)) {
    throw std::invalid_argument("weighted density integral not finite");
  }

  std::vector<double> breaks;
  double prev = 0.0, prev_gap = 0.0;
  if (total > 0.0) {
    // Sort by density value, descending; tail(r) over f > r from prefix sums.
    std::vector<std::size_t> order(density.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return density[a] > density[b];
    });
    std::size_t pos = 0;
    double tail = total;
    for (int level = 1; level <= 60 && tail > 0.0; ++level) {
      const double target = total * std::pow(0.5, level);
      while (pos < order.size() && tail > target) {
        tail -= cell_weight[order[pos]] * density[order[pos]];
        ++pos;
      }
      // Threshold below which the remaining tail fits the target.
      const double t =
          (pos < order.size()) ? density[order[pos]] : fmax * 1.0001;
      double b = std::max(t, prev + prev_gap);
      if (!(b > prev)) b = prev + std::max(prev_gap, 1e-12);
      prev_gap = b - prev;
      prev = b;
      breaks.push_back(b);
    }
  }
  if (breaks.empty()) {
    breaks.push_back(1.0);
    prev = 1.0;
    prev_gap = 1.0;
  }
  // Geometric continuation so the derivative keeps growing without bound.
  const double top = std::max(1e12, 10.0 * fmax);
  while (prev < top && breaks.size() < 400) {
    prev_gap = std::max(prev_gap * 2.0, prev);
    prev += prev_gap;
    breaks.push_back(prev);
  }
  return VPWeight::from_breakpoints(std::move(breaks));
}

}  // namespace cofrag
