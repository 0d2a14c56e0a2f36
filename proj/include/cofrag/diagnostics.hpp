#ifndef COFRAG_DIAGNOSTICS_HPP_
#define COFRAG_DIAGNOSTICS_HPP_

#include <string>
#include <vector>

#include "cofrag/discretization.hpp"
#include "cofrag/kernels.hpp"
#include "cofrag/weights.hpp"

namespace cofrag {

/// Weighted moment M_m = sum x_i^(m-1) mass_i (pivot-weighted midpoint rule).
double moment(const State& s, double m);
/// sum W(x_i)/x_i * mass_i.
double weight_functional(const State& s);
/// Fragmentation flux moment over sizes >= 1: sum_{x_i>=1} x_i^(m-1) a_i mass_i.
double frag_flux_moment(const State& s, const FragTables& t, double m);
/// Weighted distance sum xi(x_i)/x_i |mass1_i - mass2_i| with
/// xi = max{x^m0, x^(1+delta)}.
double xi_distance(const State& a, const State& b, double m0, double delta);

/// Time series of every functional the envelope checks consume.
struct MomentSeries {
  double m0 = 0.0;
  double delta = 0.0;
  std::vector<double> times;
  std::vector<double> M_m0;
  std::vector<double> M_0;
  std::vector<double> M_1;
  std::vector<double> M_2;
  std::vector<double> M_2pd;         // order 2+delta
  std::vector<double> W_fn;          // weight functional
  std::vector<double> P_m0;          // frag flux moment, order m0
  std::vector<double> P_mid;         // order (m0+1)/2
  std::vector<double> subgrid_frac;  // lumped sub-grid mass / total mass

  void record(const State& s, const FragTables& ft);
};

/// Closed-form fragmentation moment defect N(y) = theta(y) -
/// int_0^y theta(x) b(x,y) dx for the three test-function families used
/// in the a priori estimates.
enum class ThetaKind {
  power,       // theta(x) = x^m
  small_size,  // theta(x) = x^m0 below 1, x above (concave splice)
  xi           // theta(x) = max{x^m0, x^(1+delta)}
};

struct ThetaSpec {
  ThetaKind kind = ThetaKind::power;
  double m = 1.0;      // power exponent
  double m0 = 0.0;     // small_size / xi
  double delta = 0.0;  // xi only
};

double frag_moment_defect(const DaughterDist& d, const ThetaSpec& theta,
                          double y);
double eval_theta(const ThetaSpec& theta, double x);

/// One envelope check: observed trajectory against an explicit bound.
struct CheckResult {
  std::string name;
  std::vector<double> times;
  std::vector<double> observed;
  std::vector<double> envelope;
  double worst_margin = 0.0;  // min over t of (envelope-observed)/scale
  bool pass = false;
};

struct BoundReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

/// Gronwall envelope for the weight functional:
/// y(t) <= e^{Bt} y(0) + (A/B)(e^{Bt}-1), A = K0 W''(0) rho^2, B = 2 K0 rho.
CheckResult check_weight_tail_envelope(const MomentSeries& s,
                                       const KernelSpec& spec, double rho,
                                       double tol_rel = 1e-6 + 1e-3);

/// Integral bound on the fragmentation flux moment of order m in (0,1):
/// int_0^T P_m dt <= A_{x_m} x_m^{m0+nu+1} rho T + C1(T), with C1 assembled
/// from the weight-tail envelope and x_m the superlinearity threshold.
CheckResult check_frag_flux_integral(const MomentSeries& s,
                                     const KernelSpec& spec, double rho,
                                     double m, double tol_rel = 1e-6 + 1e-3);

/// Linear Gronwall envelope for M_{m0} driven by the recorded flux moment.
CheckResult check_small_size_moment(const MomentSeries& s,
                                    const KernelSpec& spec,
                                    double tol_rel = 1e-6 + 1e-3);

/// Exponential envelope for M_m, m > 1, with the convexity constant of
/// (x+y)[(x+y)^m - x^m - y^m] <= C(m)(x^m y + x y^m) sampled and inflated.
CheckResult check_higher_moment(const MomentSeries& s, const KernelSpec& spec,
                                double rho, double m,
                                double tol_rel = 1e-6 + 1e-3);

double convexity_split_constant(double m);  // C(m), sampled sup * 1.05

struct KappaResult {
  double kappa = 0.0;
  double Y = 0.0;  // size threshold of the fragmentation trade-off
  std::string attained_by;
};

/// Contraction constant for the weighted-distance stability estimate:
/// the max of the per-regime coefficients of the two-solution inequality.
KappaResult compute_kappa(const KernelSpec& spec, double delta);

/// D(t) <= D(0) exp(kappa int_0^t [1 + M_{m0} + M_{2+delta}](f1+f2) ds).
CheckResult check_stability_envelope(const std::vector<double>& times,
                                     const std::vector<double>& distance,
                                     const MomentSeries& run1,
                                     const MomentSeries& run2, double kappa,
                                     double tol_rel = 1e-6 + 1e-3);

/// Uniform-integrability diagnostic: int_0^R x^{m0} Phi(f(x)) dx with the
/// density reconstructed per cell.
double phi_functional(const State& s, const VPWeight& vp, double m0, double R);

}  // namespace cofrag

#endif  // COFRAG_DIAGNOSTICS_HPP_
