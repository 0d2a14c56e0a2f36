#ifndef COFRAG_WEIGHTS_HPP_
#define COFRAG_WEIGHTS_HPP_

#include <cstddef>
#include <functional>
#include <vector>

namespace cofrag {

/// The tail-control weight W(x) = x ln(ln(x+5)) - x ln(ln 5): convex,
/// superlinear, with concave derivative. All evaluations use cancellation-
/// free closed forms.
struct LogLogWeight {
  static double value(double x);
  static double deriv(double x);
  static double second(double x);
  /// x W'(x) - W(x) = x^2 / ((x+5) ln(x+5)), the superlinearity gap.
  static double gap(double x);
};

/// Geometric grid helper used by the discrete weight checks.
std::vector<double> geometric_grid(double lo, double hi,
                                   std::size_t points_per_decade);

/// A weight presented through its value and first two derivatives.
struct WeightFns {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::function<double(double)> second;
};

struct CvpReport {
  bool origin_conditions = false;  // phi(0) = phi'(0) = 0
  bool convex = false;
  bool deriv_concave = false;
  bool deriv_unbounded = false;  // phi'(r) grows without bound
  bool superlinear = false;      // phi(r)/r grows without bound
  bool chain = false;            // 0 <= phi <= r phi' <= 2 phi
  bool x1 = false;               // s phi'(r) <= phi(r) + phi(s)
  bool x2 = false;  // 0 <= phi(r+s)-phi(r)-phi(s) <= 2(s phi(r)+r phi(s))/(r+s)
  bool x3 = false;  // phi(r+s)-phi(r)-phi(s) <= phi''(0) r s
  bool sp_finite = false;  // sup phi/r^p bounded for the tested p in (1,2)
  double sp_value = 0.0;
  double p = 0.0;

  bool all() const {
    return origin_conditions && convex && deriv_concave && deriv_unbounded &&
           superlinear && chain && x1 && x2 && x3 && sp_finite;
  }
};

/// Discrete certification of the convex-weight class properties on a grid
/// spanning at least six decades with at least 100 points.
CvpReport cvp_check(const WeightFns& phi, const std::vector<double>& grid,
                    double p = 1.5);

/// Smallest grid point x_m > 1 with x W'(x) - W(x) >= x^m from there on.
/// Scans a geometric grid, extending past 1e9 when the crossing sits
/// further out (for m close to 1 it does).
double superlinearity_gap_growth(double m);

/// Piecewise construction of a convex superlinear weight: breakpoints
/// r_0 = 0 < r_1 < ... with nondecreasing gaps; the derivative
/// interpolates Phi'(r_k) = k linearly, so Phi' is concave, unbounded,
/// and Phi grows like r log r.
struct VPWeight {
  std::vector<double> breakpoints;  // r_0 = 0, strictly increasing
  // Phi'(r_k) = k; cumulative integrals cached for evaluation.
  std::vector<double> cumvalue;

  static VPWeight from_breakpoints(std::vector<double> positive_breaks);

  double deriv(double r) const;
  double value(double r) const;
  double second(double r) const;
  WeightFns fns() const;
};

/// Level-set construction of a uniform-integrability weight for a sampled
/// density: thresholds r_k chosen so the super-level tail of the weighted
/// integral halves at each level, then padded to keep gaps nondecreasing.
/// `cell_weight[i]` is the quadrature weight (x_i^{m0} * cell width) and
/// `density[i]` the reconstructed density value in cell i.
VPWeight build_dlvp_weight(const std::vector<double>& cell_weight,
                           const std::vector<double>& density);

}  // namespace cofrag

#endif  // COFRAG_WEIGHTS_HPP_
