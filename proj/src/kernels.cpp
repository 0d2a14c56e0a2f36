#include "cofrag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cofrag {

namespace {

constexpr double kSampledInflation = 1.01;

// Logarithmically spaced sample points in [lo, hi].
std::vector<double> log_samples(double lo, double hi, std::size_t n) {
  std::vector<double> xs(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
    xs[i] = std::exp(llo + t * (lhi - llo));
  }
  return xs;
}

}  // namespace

DaughterDist::DaughterDist(double nu_) : nu(nu_) {
  if (!(nu > -2.0 && nu <= -1.0)) {
    throw std::invalid_argument("daughter exponent nu must lie in (-2,-1]");
  }
}

double DaughterDist::density(double x, double y) const {
  if (!(x > 0.0 && x < y)) {
    throw std::domain_error("daughter density requires 0 < x < y");
  }
  return (nu + 2.0) * std::pow(x, nu) / std::pow(y, nu + 1.0);
}

double daughter_partial_moment(const DaughterDist& d, double m, double x_lo,
                               double x_hi, double y) {
  if (!(y > 0.0)) throw std::domain_error("parent size must be positive");
  if (!(x_lo >= 0.0 && x_lo < x_hi && x_hi <= y)) {
    throw std::domain_error("require 0 <= x_lo < x_hi <= y");
  }
  const double p = m + d.nu + 1.0;
  const double front = (d.nu + 2.0) * std::pow(y, -d.nu - 1.0);
  if (x_lo == 0.0) {
    if (p <= 0.0) {
      throw DivergentIntegral(
          "partial moment diverges at zero: m + nu + 1 <= 0");
    }
    return front * std::pow(x_hi, p) / p;
  }
  if (p == 0.0) {
    return front * std::log(x_hi / x_lo);
  }
  return front * (std::pow(x_hi, p) - std::pow(x_lo, p)) / p;
}

CoagKernelSpec CoagKernelSpec::PowerLawSum(double alpha, double beta) {
  if (!(alpha <= beta)) throw std::invalid_argument("require alpha <= beta");
  CoagKernelSpec s;
  s.form = CoagForm::power_law_sum;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

CoagKernelSpec CoagKernelSpec::Constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("constant kernel must be >= 0");
  CoagKernelSpec s;
  s.form = CoagForm::constant;
  s.c = c;
  return s;
}

CoagKernelSpec CoagKernelSpec::Additive() {
  CoagKernelSpec s;
  s.form = CoagForm::additive;
  return s;
}

CoagKernelSpec CoagKernelSpec::Custom(std::function<double(double, double)> k) {
  CoagKernelSpec s;
  s.form = CoagForm::custom;
  s.custom = std::move(k);
  return s;
}

double eval_K(const CoagKernelSpec& spec, double x, double y) {
  if (!(x > 0.0 && y > 0.0)) {
    throw std::domain_error("kernel arguments must be positive");
  }
  switch (spec.form) {
    case CoagForm::power_law_sum:
      return std::pow(x, spec.alpha) * std::pow(y, spec.beta) +
             std::pow(x, spec.beta) * std::pow(y, spec.alpha);
    case CoagForm::constant:
      return spec.c;
    case CoagForm::additive:
      return x + y;
    case CoagForm::custom: {
      // Symmetrize so the invariant holds for any user function.
      const double v = 0.5 * (spec.custom(x, y) + spec.custom(y, x));
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::domain_error("custom kernel returned invalid value");
      }
      return v;
    }
  }
  throw std::logic_error("unreachable kernel form");
}

FragRateSpec FragRateSpec::PowerLaw(double gamma) {
  FragRateSpec s;
  s.form = FragForm::power_law;
  s.gamma = gamma;
  return s;
}

FragRateSpec FragRateSpec::Zero() {
  FragRateSpec s;
  s.form = FragForm::zero;
  return s;
}

FragRateSpec FragRateSpec::Custom(std::function<double(double)> a) {
  FragRateSpec s;
  s.form = FragForm::custom;
  s.custom = std::move(a);
  return s;
}

double eval_a(const FragRateSpec& spec, double x) {
  if (!(x > 0.0)) throw std::domain_error("fragmentation size must be positive");
  switch (spec.form) {
    case FragForm::power_law:
      return std::pow(x, spec.gamma);
    case FragForm::zero:
      return 0.0;
    case FragForm::custom: {
      const double v = spec.custom(x);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::domain_error("custom fragmentation rate invalid");
      }
      return v;
    }
  }
  throw std::logic_error("unreachable fragmentation form");
}

KernelSpec::KernelSpec(CoagKernelSpec coag_, FragRateSpec frag_,
                       DaughterDist daughter_, double m0_)
    : coag(std::move(coag_)),
      frag(std::move(frag_)),
      daughter(daughter_),
      m0(m0_) {
  if (!(m0 > -1.0 - daughter.nu && m0 < 1.0)) {
    throw std::invalid_argument("m0 must lie in (-1-nu, 1)");
  }
}

double KernelSpec::linear_growth_constant() const {
  switch (coag.form) {
    case CoagForm::constant:
      return coag.c / 2.0;
    case CoagForm::additive:
      return 1.0;
    case CoagForm::power_law_sum:
    case CoagForm::custom: {
      // sup K/(2+x+y); sampled and inflated so the bound stays valid.
      double sup = 0.0;
      for (double x : log_samples(1e-9, 1e9, 400)) {
        for (double y : log_samples(x, 1e9, 100)) {
          sup = std::max(sup, eval_K(coag, x, y) / (2.0 + x + y));
        }
      }
      return sup * kSampledInflation;
    }
  }
  throw std::logic_error("unreachable kernel form");
}

double KernelSpec::small_size_ratio_bound(double R) const {
  switch (coag.form) {
    case CoagForm::power_law_sum:
      // With m0 <= alpha <= beta each term is monotone on (0,R)^2 and the
      // supremum sits at the corner x = y = R.
      if (m0 <= coag.alpha) {
        return 2.0 * std::pow(R, coag.alpha + coag.beta - m0);
      }
      return std::numeric_limits<double>::infinity();
    case CoagForm::constant:
      if (coag.c == 0.0) return 0.0;
      return std::numeric_limits<double>::infinity();
    case CoagForm::additive:
      return std::numeric_limits<double>::infinity();
    case CoagForm::custom: {
      double sup = 0.0;
      for (double x : log_samples(1e-12 * R, R, 300)) {
        for (double y : log_samples(x, R, 80)) {
          sup = std::max(sup,
                         eval_K(coag, x, y) / std::pow(std::min(x, y), m0));
        }
      }
      return sup * kSampledInflation;
    }
  }
  throw std::logic_error("unreachable kernel form");
}

double KernelSpec::frag_small_size_bound(double R) const {
  const double p = m0 + daughter.nu + 1.0;
  switch (frag.form) {
    case FragForm::zero:
      return 0.0;
    case FragForm::power_law:
      if (frag.gamma >= p) return std::pow(R, frag.gamma - p);
      return std::numeric_limits<double>::infinity();
    case FragForm::custom: {
      double sup = 0.0;
      for (double x : log_samples(1e-12 * R, R, 4000)) {
        sup = std::max(sup, eval_a(frag, x) / std::pow(x, p));
      }
      return sup * kSampledInflation;
    }
  }
  throw std::logic_error("unreachable fragmentation form");
}

std::optional<double> KernelSpec::mixed_regime_constant() const {
  switch (coag.form) {
    case CoagForm::power_law_sum:
      // x^alpha <= x^{m0} on (0,1) when alpha >= m0 and y^beta <= y on
      // (1,inf) when beta <= 1; both terms then sit under 2 x^{m0} y.
      if (m0 <= coag.alpha && coag.beta <= 1.0) return 2.0;
      return std::nullopt;
    case CoagForm::constant:
      if (coag.c == 0.0) return 0.0;
      return std::nullopt;
    case CoagForm::additive:
      return std::nullopt;
    case CoagForm::custom: {
      double sup = 0.0;
      for (double x : log_samples(1e-9, 1.0, 200)) {
        for (double y : log_samples(1.0, 1e9, 200)) {
          sup = std::max(sup, eval_K(coag, x, y) / (std::pow(x, m0) * y));
        }
      }
      if (!std::isfinite(sup) || sup > 1e15) return std::nullopt;
      return sup * kSampledInflation;
    }
  }
  throw std::logic_error("unreachable kernel form");
}

CertificationReport verify_hypotheses(const KernelSpec& spec, double R,
                                      std::size_t sample_budget) {
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  if (sample_budget == 0) {
    throw std::invalid_argument("sample budget must be positive");
  }

  CertificationReport rep;
  rep.R = R;
  const bool builtin_K = spec.coag.form != CoagForm::custom;
  const bool builtin_a = spec.frag.form != FragForm::custom;

  // (a7a)-type linear growth.
  switch (spec.coag.form) {
    case CoagForm::power_law_sum:
      rep.linear_growth.holds = spec.coag.alpha + spec.coag.beta <= 1.0 &&
                                spec.coag.alpha <= 1.0 &&
                                spec.coag.beta <= 1.0 && spec.coag.alpha >= 0.0;
      rep.linear_growth.exact = true;
      break;
    case CoagForm::constant:
    case CoagForm::additive:
      rep.linear_growth.holds = true;
      rep.linear_growth.exact = true;
      break;
    case CoagForm::custom: {
      double sup = 0.0;
      const std::size_t n = std::max<std::size_t>(
          16, static_cast<std::size_t>(std::sqrt(double(sample_budget))));
      for (double x : log_samples(1e-12 * R, 1e6, n)) {
        for (double y : log_samples(x, 1e6, n)) {
          sup = std::max(sup, eval_K(spec.coag, x, y) / (2.0 + x + y));
        }
      }
      rep.linear_growth.holds = std::isfinite(sup);
      break;
    }
  }
  if (rep.linear_growth.holds) {
    rep.linear_growth.constant = spec.linear_growth_constant();
  }

  // Small-size ratio bound on (0,R)^2.
  const double lr = spec.small_size_ratio_bound(R);
  rep.small_size_ratio.holds = std::isfinite(lr);
  rep.small_size_ratio.exact = builtin_K;
  if (rep.small_size_ratio.holds) rep.small_size_ratio.constant = lr;
  if (!builtin_K) {
    // Sampled verdict: a ratio still growing at the smallest scale means
    // the supremum is unbounded for practical purposes.
    const std::size_t n = std::max<std::size_t>(
        32, static_cast<std::size_t>(std::sqrt(double(sample_budget))));
    double at_small = 0.0, at_mid = 0.0;
    for (double s : log_samples(1e-12 * R, 1e-6 * R, n)) {
      at_small = std::max(at_small,
                          eval_K(spec.coag, s, s) / std::pow(s, spec.m0));
    }
    for (double s : log_samples(1e-6 * R, R, n)) {
      at_mid =
          std::max(at_mid, eval_K(spec.coag, s, s) / std::pow(s, spec.m0));
    }
    rep.small_size_ratio.holds = at_small <= 2.0 * std::max(at_mid, 1e-300);
  }

  // Fragmentation small-size bound on (0,R).
  const double ar = spec.frag_small_size_bound(R);
  rep.frag_small_size.holds = std::isfinite(ar);
  rep.frag_small_size.exact = builtin_a || spec.frag.form == FragForm::zero ||
                              spec.frag.form == FragForm::power_law;
  if (rep.frag_small_size.holds) rep.frag_small_size.constant = ar;

  // Mixed-regime bound (uniqueness hypothesis); optional.
  const auto k1 = spec.mixed_regime_constant();
  rep.mixed_regime.holds = k1.has_value();
  rep.mixed_regime.exact = builtin_K;
  if (k1) rep.mixed_regime.constant = *k1;

  return rep;
}

Interval admissible_m0_interval(double alpha, double beta, double gamma,
                                double nu) {
  if (!(nu > -2.0 && nu <= -1.0)) {
    throw std::invalid_argument("nu must lie in (-2,-1]");
  }
  if (!(alpha <= beta && beta <= 1.0 - alpha)) {
    throw std::invalid_argument("require alpha <= beta <= 1-alpha");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

  Interval iv;
  iv.lo = -1.0 - nu;
  iv.hi = std::min(std::min(alpha, beta), gamma - 1.0 - nu);
  iv.hi = std::min(iv.hi, std::nextafter(1.0, 0.0));
  iv.empty = !(iv.hi > iv.lo);
  if (iv.empty) {
    iv.lo = iv.hi = 0.0;
  }
  return iv;
}

}  // namespace cofrag
