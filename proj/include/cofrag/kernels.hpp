#ifndef COFRAG_KERNELS_HPP_
#define COFRAG_KERNELS_HPP_

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace cofrag {

/// Raised when a requested partial moment of the daughter distribution
/// does not converge (number-like moments of the singular power law).
struct DivergentIntegral : std::domain_error {
  using std::domain_error::domain_error;
};

/// Power-law daughter distribution b(x,y) = (nu+2) x^nu / y^(nu+1) on 0<x<y.
/// The exponent is restricted to (-2,-1]: above -2 the mass integral is
/// finite, at or below -1 the fragment count per breakup is infinite.
struct DaughterDist {
  double nu;

  explicit DaughterDist(double nu_);

  double density(double x, double y) const;
};

/// Exact value of the partial moment  int_{x_lo}^{x_hi} x^m b(x,y) dx.
///
/// Uses the closed-form antiderivative x^(m+nu+1)/(m+nu+1), with the
/// logarithmic branch when m+nu+1 == 0 and x_lo > 0. Requires
/// 0 <= x_lo < x_hi <= y. A lower limit of zero with m+nu+1 <= 0 raises
/// DivergentIntegral.
double daughter_partial_moment(const DaughterDist& d, double m, double x_lo,
                               double x_hi, double y);

enum class CoagForm { power_law_sum, constant, additive, custom };

/// Coagulation kernel. Built-in forms are symmetric by construction;
/// custom kernels are symmetrized on evaluation.
struct CoagKernelSpec {
  CoagForm form = CoagForm::constant;
  double alpha = 0.0;  // power_law_sum exponents, alpha <= beta
  double beta = 0.0;
  double c = 1.0;  // constant form value
  std::function<double(double, double)> custom;

  static CoagKernelSpec PowerLawSum(double alpha, double beta);
  static CoagKernelSpec Constant(double c);
  static CoagKernelSpec Additive();
  static CoagKernelSpec Custom(std::function<double(double, double)> k);
};

double eval_K(const CoagKernelSpec& spec, double x, double y);

enum class FragForm { power_law, zero, custom };

/// Overall fragmentation rate a(x). The `zero` form disables breakup.
struct FragRateSpec {
  FragForm form = FragForm::zero;
  double gamma = 1.0;
  std::function<double(double)> custom;

  static FragRateSpec PowerLaw(double gamma);
  static FragRateSpec Zero();
  static FragRateSpec Custom(std::function<double(double)> a);
};

double eval_a(const FragRateSpec& spec, double x);

/// Full coefficient set: coagulation kernel, fragmentation rate, daughter
/// exponent, and the small-size exponent m0 in (-1-nu, 1) that ties the
/// three together.
struct KernelSpec {
  CoagKernelSpec coag;
  FragRateSpec frag;
  DaughterDist daughter;
  double m0;

  KernelSpec(CoagKernelSpec coag_, FragRateSpec frag_, DaughterDist daughter_,
             double m0_);

  // Structural constants. For the built-in forms these are closed-form
  // (or a slightly inflated sampled supremum where no closed form is
  // convenient); for custom forms they are sampled estimates.
  double linear_growth_constant() const;             // K0
  double small_size_ratio_bound(double R) const;     // L_R
  double frag_small_size_bound(double R) const;      // A_R
  std::optional<double> mixed_regime_constant() const;  // K1
};

struct HypothesisVerdict {
  bool holds = false;
  bool exact = false;      // exponent arithmetic vs sampled
  double constant = 0.0;   // tightest observed constant (if holds)
};

/// Result of certifying the structural hypotheses of a KernelSpec.
struct CertificationReport {
  HypothesisVerdict linear_growth;     // K(x,y) <= K0 (2+x+y)
  HypothesisVerdict small_size_ratio;  // sup K / min^{m0} finite on (0,R)^2
  HypothesisVerdict frag_small_size;   // a(x) <= A_R x^{m0+nu+1} on (0,R)
  HypothesisVerdict mixed_regime;      // K(x,y) <= K1 x^{m0} y (uniqueness)
  double R = 0.0;

  bool all_core() const {
    return linear_growth.holds && small_size_ratio.holds &&
           frag_small_size.holds;
  }
};

CertificationReport verify_hypotheses(const KernelSpec& spec, double R,
                                      std::size_t sample_budget);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = true;  // interval is (lo, hi] when non-empty
};

/// Range of m0 for which the power-law forms pass certification: the
/// conservative interval (-1-nu, min{alpha, gamma-1-nu}], clipped to (.,1).
Interval admissible_m0_interval(double alpha, double beta, double gamma,
                                double nu);

}  // namespace cofrag

#endif  // COFRAG_KERNELS_HPP_
