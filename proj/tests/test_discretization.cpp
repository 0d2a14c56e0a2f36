#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cofrag/discretization.hpp"
#include "cofrag/kernels.hpp"

using namespace cofrag;

namespace {

KernelSpec reference_spec() {
  return KernelSpec(CoagKernelSpec::PowerLawSum(0.3, 0.3),
                    FragRateSpec::PowerLaw(1.0), DaughterDist(-1.2), 0.3);
}

State random_state(std::shared_ptr<const SizeGrid> grid, unsigned seed) {
  State s = make_state(grid);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (auto& m : s.mass) m = unif(rng);
  return s;
}

}  // namespace

TEST_CASE("grid construction basics") {
  auto g = build_grid(1e-4, 1e4, 16);
  CHECK(g.size() == 128);
  CHECK(g.edges.front() == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(g.edges.back() == doctest::Approx(1e4).epsilon(1e-15));

  auto one = build_grid(1.0, 10.0, 8);
  CHECK(one.size() == 8);
  const double want_ratio = std::pow(10.0, 1.0 / 8.0);
  for (std::size_t i = 0; i + 1 < one.edges.size(); ++i) {
    CHECK(one.edges[i + 1] / one.edges[i] ==
          doctest::Approx(want_ratio).epsilon(1e-12));
  }
  CHECK_THROWS_AS(build_grid(10.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.0, 10.0, 3), std::invalid_argument);
}

TEST_CASE("pivots sit inside their cells and locate is consistent") {
  auto g = build_grid(1e-4, 1e3, 32);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.pivots[i] > g.edges[i]);
    CHECK(g.pivots[i] < g.edges[i + 1]);
    CHECK(g.locate(g.pivots[i]) == i);
  }
  CHECK(g.locate(g.edges.front()) == 0);
}

TEST_CASE("fragment table columns sum to one with the sub-grid part") {
  auto spec = reference_spec();
  for (auto [x_min, j, cpd] : {std::tuple{1e-4, 1e3, 32},
                               std::tuple{1e-2, 1e2, 8},
                               std::tuple{1e-6, 1e4, 16}}) {
    auto g = build_grid(x_min, j, cpd);
    auto ft = precompute_frag_tables(g, spec);
    REQUIRE(ft.parents() == g.size());
    for (std::size_t k = 0; k < ft.parents(); ++k) {
      double sum = ft.subgrid[k];
      for (double e : ft.massfrac[k]) {
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
        sum += e;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("sub-grid fraction follows the closed form") {
  KernelSpec spec(CoagKernelSpec::PowerLawSum(0.3, 0.3),
                  FragRateSpec::PowerLaw(1.0), DaughterDist(-1.5), 0.6);
  auto g = build_grid(1e-4, 1e2, 16);
  auto ft = precompute_frag_tables(g, spec);
  for (std::size_t k = 0; k < ft.parents(); ++k) {
    CHECK(ft.subgrid[k] ==
          doctest::Approx(std::pow(1e-4 / g.pivots[k], 0.5)).epsilon(1e-13));
  }
  // A parent of size 1 loses mass fraction (1e-4)^{0.5} = 1e-2 below grid.
  const std::size_t k1 = g.locate(1.0);
  CHECK(ft.subgrid[k1] == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("cell mass fraction matches the antiderivative of the daughter law") {
  // Parent y = 1 breaking with nu = -1.5: a cell [0.25, 0.5] receives
  // 0.5^{0.5} - 0.25^{0.5} of the parent mass.
  DaughterDist d(-1.5);
  const double frac = daughter_partial_moment(d, 1.0, 0.25, 0.5, 1.0);
  CHECK(frac == doctest::Approx(0.20710678).epsilon(1e-7));
}

TEST_CASE("rates in the fragment table are the breakup rates at the pivots") {
  auto spec = reference_spec();
  auto g = build_grid(1e-2, 1e2, 8);
  auto ft = precompute_frag_tables(g, spec);
  for (std::size_t k = 0; k < ft.parents(); ++k) {
    CHECK(ft.loss[k] == doctest::Approx(g.pivots[k]).epsilon(1e-14));
  }
}

TEST_CASE("coagulation pair table preserves the merged mass") {
  auto spec = reference_spec();
  auto g = build_grid(1e-2, 1e2, 8);
  auto ct = precompute_coag_tables(g, spec);
  CHECK_FALSE(ct.pairs.empty());
  for (const auto& p : ct.pairs) {
    const double v = g.pivots[p.i] + g.pivots[p.k];
    CHECK(v < g.j);  // masked pairs never appear
    CHECK(p.rate == doctest::Approx(
                        eval_K(spec.coag, g.pivots[p.i], g.pivots[p.k])));
    if (p.overflow) {
      CHECK(v > g.pivots.back());
      CHECK(p.l == g.size() - 1);
    } else {
      CHECK(p.lambda >= 0.0);
      CHECK(p.lambda <= 1.0);
      const double rebuilt = p.lambda * g.pivots[p.l] +
                             (1.0 - p.lambda) * g.pivots[p.l + 1];
      CHECK(rebuilt == doctest::Approx(v).epsilon(1e-12));
    }
  }
}

TEST_CASE("tight truncation masks every pair") {
  auto spec = reference_spec();
  // Smallest merger is ~2 x_min; truncating just above x_min masks all.
  auto g = build_grid(1.0, 1.9, 8);
  auto ct = precompute_coag_tables(g, spec);
  CHECK(ct.pairs.empty());
}

TEST_CASE("fragmentation operator bookkeeping") {
  auto spec = reference_spec();
  auto grid = std::make_shared<SizeGrid>(build_grid(1e-4, 1e3, 16));
  auto ft = precompute_frag_tables(*grid, spec);

  SUBCASE("zero state gives a zero derivative") {
    State s = make_state(grid);
    Derivative d;
    d.resize(grid->size());
    apply_frag(s, ft, d);
    for (double v : d.dmass) CHECK(v == 0.0);
    CHECK(d.dsubgrid == 0.0);
  }

  SUBCASE("single parent: conservative redistribution at rate a(y) M") {
    State s = make_state(grid);
    const std::size_t k = grid->locate(10.0);
    s.mass[k] = 3.0;
    Derivative d;
    d.resize(grid->size());
    apply_frag(s, ft, d);
    const double rM = ft.loss[k] * 3.0;
    CHECK(d.loss[k] == doctest::Approx(rM * (1.0 - ft.massfrac[k][k])));
    const double total =
        std::accumulate(d.dmass.begin(), d.dmass.end(), 0.0);
    CHECK(std::abs(total) <= 1e-13 * rM);
    CHECK(d.dsubgrid == doctest::Approx(rM * ft.subgrid[k]));
    // Nothing lands above the parent cell.
    for (std::size_t i = k + 1; i < grid->size(); ++i)
      CHECK(d.dmass[i] == 0.0);
  }

  SUBCASE("disabled breakup gives a zero derivative") {
    KernelSpec off(CoagKernelSpec::PowerLawSum(0.3, 0.3), FragRateSpec::Zero(),
                   DaughterDist(-1.2), 0.3);
    auto ft0 = precompute_frag_tables(*grid, off);
    State s = random_state(grid, 11);
    Derivative d;
    d.resize(grid->size());
    apply_frag(s, ft0, d);
    for (double v : d.dmass) CHECK(v == 0.0);
  }
}

TEST_CASE("coagulation operator bookkeeping") {
  auto grid = std::make_shared<SizeGrid>(build_grid(1e-2, 1e2, 8));
  KernelSpec cst(CoagKernelSpec::Constant(2.0), FragRateSpec::Zero(),
                 DaughterDist(-1.2), 0.3);
  auto ct = precompute_coag_tables(*grid, cst);

  SUBCASE("zero state gives a zero derivative") {
    State s = make_state(grid);
    Derivative d;
    d.resize(grid->size());
    apply_coag(s, ct, d);
    for (double v : d.dmass) CHECK(v == 0.0);
  }

  SUBCASE("two populated pivots reproduce the pairing factors") {
    State s = make_state(grid);
    const std::size_t i = 3, k = 10;
    s.mass[i] = 2.0;
    s.mass[k] = 5.0;
    const double ni = s.mass[i] / grid->pivots[i];
    const double nk = s.mass[k] / grid->pivots[k];
    Derivative d;
    d.resize(grid->size());
    apply_coag(s, ct, d);
    // Cross pair: events at K n_i n_k; self pairs at K n^2 / 2. The mass
    // leaving cell i is x_i per cross event plus 2 x_i per (i,i) event.
    const double K = 2.0;
    const double loss_i = grid->pivots[i] * (K * ni * nk + K * ni * ni);
    CHECK(d.loss[i] == doctest::Approx(loss_i).epsilon(1e-12));
    const double total =
        std::accumulate(d.dmass.begin(), d.dmass.end(), 0.0);
    const double l1 = std::accumulate(
        d.dmass.begin(), d.dmass.end(), 0.0,
        [](double a, double b) { return a + std::abs(b); });
    CHECK(std::abs(total) <= 1e-13 * std::max(l1, 1e-300));
  }
}

TEST_CASE("combined operators conserve mass on random states") {
  auto spec = reference_spec();
  auto grid = std::make_shared<SizeGrid>(build_grid(1e-4, 1e3, 16));
  auto ft = precompute_frag_tables(*grid, spec);
  auto ct = precompute_coag_tables(*grid, spec);
  for (unsigned seed : {1u, 2u, 3u}) {
    State s = random_state(grid, seed);
    Derivative d;
    d.resize(grid->size());
    apply_frag(s, ft, d);
    apply_coag(s, ct, d);
    const double total =
        std::accumulate(d.dmass.begin(), d.dmass.end(), 0.0);
    double l1 = 0.0;
    for (double v : d.dmass) l1 += std::abs(v);
    CHECK(std::abs(total) <= 1e-13 * l1);
    // Loss channel is nonnegative everywhere.
    for (double v : d.loss) CHECK(v >= 0.0);
  }
}

TEST_CASE("operator scaling: breakup is linear, merging is quadratic") {
  auto spec = reference_spec();
  auto grid = std::make_shared<SizeGrid>(build_grid(1e-3, 1e2, 8));
  auto ft = precompute_frag_tables(*grid, spec);
  auto ct = precompute_coag_tables(*grid, spec);
  State base = random_state(grid, 77);
  for (double alpha : {0.0, 1.0, 2.0}) {
    State scaled = base;
    for (auto& m : scaled.mass) m *= alpha;
    Derivative db, ds;
    db.resize(grid->size());
    ds.resize(grid->size());
    apply_frag(base, ft, db);
    apply_frag(scaled, ft, ds);
    for (std::size_t i = 0; i < grid->size(); ++i)
      CHECK(ds.dmass[i] == doctest::Approx(alpha * db.dmass[i]).epsilon(1e-12));
    Derivative cb, cs;
    cb.resize(grid->size());
    cs.resize(grid->size());
    apply_coag(base, ct, cb);
    apply_coag(scaled, ct, cs);
    for (std::size_t i = 0; i < grid->size(); ++i)
      CHECK(cs.dmass[i] ==
            doctest::Approx(alpha * alpha * cb.dmass[i]).epsilon(1e-12));
  }
}
