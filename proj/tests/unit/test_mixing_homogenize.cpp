#include "mscut/homogenize.hpp"
#include "mscut/mixing.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace mscut;

TEST_CASE("mixing weight profile") {
  const MixingWeight w(0.5);
  CHECK(MixingWeight::from_full_width(1.0).half_width() == 0.5);
  CHECK(w.full_width() == 1.0);
  CHECK(w.alpha(-0.5) == 0.0);
  CHECK(w.alpha(-3.0) == 0.0);
  CHECK(w.alpha(0.5) == 1.0);
  CHECK(w.alpha(7.0) == 1.0);
  CHECK(w.alpha(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.alpha(0.25) == doctest::Approx(0.5 * (1 + std::sin(std::numbers::pi / 4))));
  oracle::Gen gen(41);
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double phi = -0.6 + 1.2 * i / 200.0;
    const double a = w.alpha(phi);
    CHECK(a >= prev);
    prev = a;
    CHECK(std::abs(w.macro(phi) + w.micro(phi) - 1.0) <= 1e-15);
    // odd symmetry of the profile about the zoom boundary
    CHECK(w.alpha(phi) + w.alpha(-phi) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(MixingWeight(0.0), Error);
  CHECK_THROWS_AS(MixingWeight(-1.0), Error);
}

TEST_CASE("transition cells meet the band") {
  const Mesh2 mesh = generate_rect({0, 0, 4, 1}, 8, 2);
  const LevelSet plane = LevelSet::half_plane(Vec2(2.05, 0), Vec2(1, 0));
  const NodalField phi = project_p1(plane, mesh);
  const CellSet band = transition_cells(mesh, phi, 0.1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell &k = mesh.cells()[c];
    const double lo = std::min({phi[k[0]], phi[k[1]], phi[k[2]]});
    const double hi = std::max({phi[k[0]], phi[k[1]], phi[k[2]]});
    const bool expected = lo <= 0.1 && hi >= -0.1;
    CHECK(in_transition(mesh, phi, c, 0.1) == expected);
    CHECK(std::binary_search(band.begin(), band.end(), c) == expected);
  }
  CHECK(band.size() == 8); // both columns with a node at x = 2
}

TEST_CASE("modified Mori-Tanaka closed form") {
  // (1 - f) / (f L + 1 - f) with f = 0.086, L = 3
  const double expected = 0.914 / (0.258 + 0.914);
  CHECK(mmt_step(1.0, 0.086, 3.0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(std::abs(mmt_step(1.0, 0.086, 3.0) - 0.7799) <= 1e-4);
  CHECK(mmt_step(2.5, 0.0, 3.0) == 2.5);
  // L = 1 reduces to the rule of mixtures on the solid fraction
  CHECK(mmt_step(1.0, 0.3, 1.0) == doctest::Approx(0.7));
  CHECK_THROWS_AS(mmt_step(1.0, 1.0, 3.0), Error);
  CHECK_THROWS_AS(mmt_step(1.0, -0.1, 3.0), Error);
  CHECK_THROWS_AS(mmt_step(1.0, 0.1, 0.0), Error);
}

TEST_CASE("effective modulus over a pore population") {
  PorePopulation empty;
  empty.reference_area = 10.0;
  CHECK(mmt_effective(1.3, empty, {}) == 1.3);

  PorePopulation pop;
  pop.reference_area = 120.0;
  oracle::Gen gen(42);
  for (int i = 0; i < 30; ++i)
    pop.pores.push_back({gen.point(1, 9), gen.uniform(0.2, 0.6)});
  const MMTTrajectory inc = mmt_trajectory(1.0, pop, {3.0, PorosityMode::Incremental});
  const MMTTrajectory cum = mmt_trajectory(1.0, pop, {3.0, PorosityMode::Cumulative});
  REQUIRE(inc.modulus.size() == 30);
  // independent recomputation of the recursion
  double e = 1.0, acc = 0.0;
  for (const Pore &p : pop.pores) {
    const double f = p.area() / 120.0;
    e = (1 - f) * e / (f * 3.0 + 1 - f);
    acc += p.area();
  }
  CHECK(inc.effective == doctest::Approx(e).epsilon(1e-14));
  CHECK(cum.porosity.back() == doctest::Approx(acc / 120.0));
  for (std::size_t i = 1; i < inc.modulus.size(); ++i) {
    CHECK(inc.modulus[i] < inc.modulus[i - 1]);
    CHECK(cum.modulus[i] < cum.modulus[i - 1]);
  }
  CHECK(cum.effective < inc.effective);
}

TEST_CASE("RVE choice: denser pores inside the zooms soften the estimate") {
  const Rect domain{0, 0, 12, 10};
  const std::vector<Pore> zooms{{Vec2(3, 5), 2.0}};
  std::vector<Pore> pores;
  for (int i = 0; i < 6; ++i) // sparse population everywhere
    pores.push_back({Vec2(7 + i * 0.8, 2 + (i % 3) * 3.0), 0.25});
  for (int i = 0; i < 8; ++i) // dense cluster in the zoom
    pores.push_back({Vec2(2.2 + (i % 4) * 0.5, 4.4 + (i / 4) * 1.0), 0.2});
  const auto whole = rve_population(pores, zooms, domain, RveChoice::WholeDomain);
  const auto inside = rve_population(pores, zooms, domain, RveChoice::InsideZooms);
  CHECK(whole.pores.size() == 14);
  CHECK(inside.pores.size() == 8);
  CHECK(inside.reference_area == doctest::Approx(4 * std::numbers::pi));
  CHECK(inside.porosity() > whole.porosity());
  CHECK(mmt_effective(1.0, inside, {}) < mmt_effective(1.0, whole, {}));
  CHECK_THROWS_AS(rve_population(pores, {}, domain, RveChoice::InsideZooms), Error);
}
