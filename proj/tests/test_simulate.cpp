#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "quasipot/error.hpp"
#include "quasipot/rng.hpp"
#include "quasipot/simulate.hpp"

using namespace quasipot;

namespace {

PdmpSpec constant_pdmp(double r01, double r10) {
  return {FieldSpec::constant(1.0), FieldSpec::constant(-1.0), FieldSpec::constant(r01), FieldSpec::constant(r10)};
}

}  // namespace

TEST_CASE("Philox known-answer vectors") {
  for (const auto& v : oracle::philox_vectors()) CHECK(Philox4x32::block(v.ctr, v.key) == v.out);
}

TEST_CASE("Philox streams are distinct and uniforms stay inside (0,1)") {
  Philox4x32 a(1, 0), b(1, 1), c(2, 0);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t x = a.next_u32(), y = b.next_u32(), z = c.next_u32();
    equal_ab += x == y;
    equal_ac += x == z;
  }
  CHECK(equal_ab <= 1);
  CHECK(equal_ac <= 1);
  Philox4x32 g(9, 3);
  double mean = 0.0, sq = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = g.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    const double z = g.normal();
    mean += z;
    sq += z * z;
  }
  CHECK(std::fabs(mean / count) <= 0.01);
  CHECK(std::fabs(sq / count - 1.0) <= 0.02);
}

TEST_CASE("histograms") {
  Histogram h;
  h.bins = 4;
  h.counts = {1, 1, 2, 0};
  h.total = 4;
  const auto d = h.density();
  CHECK(d[2] == doctest::Approx(2.0));
  CHECK(tv_to_uniform(h) == doctest::Approx(0.25));
  Histogram other = h;
  h.merge(other);
  CHECK(h.total == 8);
  CHECK(h.counts[2] == 4);
}

TEST_CASE("diffusion simulation") {
  SUBCASE("driftless motion fills the torus uniformly") {
    DiffusionSimOptions o;
    o.eps = 1.0;
    o.horizon = 2000;
    const Histogram h = simulate_diffusion(FieldSpec::constant(0.0), o);
    std::uint64_t sum = 0;
    for (auto c : h.counts) sum += c;
    CHECK(sum == h.total);
    CHECK(tv_to_uniform(h) <= 0.03);
  }
  SUBCASE("fixed seed reproduces the histogram, thread count does not matter") {
    DiffusionSimOptions o;
    o.horizon = 100;
    o.trajectories = 4;
    o.seed = 42;
    const FieldSpec b = FieldSpec::expression("-sin(2*pi*x)/2");
    const Histogram a = simulate_diffusion(b, o);
    const Histogram again = simulate_diffusion(b, o);
    o.threads = 4;
    const Histogram threaded = simulate_diffusion(b, o);
    CHECK(a.counts == again.counts);
    CHECK(a.counts == threaded.counts);
    o.seed = 43;
    CHECK(simulate_diffusion(b, o).counts != a.counts);
  }
  SUBCASE("histogram matches the quadrature density") {
    DiffusionSimOptions o;
    o.eps = 0.3;
    o.horizon = 2000;
    o.trajectories = 4;
    o.threads = 4;
    const FieldSpec b = FieldSpec::expression("-sin(2*pi*x)/2");
    const Histogram h = simulate_diffusion(b, o);
    CHECK(tv_distance(h, diffusion_density(b, 0.3, 2048)) <= 0.05);
  }
  SUBCASE("invalid options") {
    DiffusionSimOptions o;
    o.dt = 1e-2;
    CHECK_THROWS_AS(simulate_diffusion(FieldSpec::constant(0.0), o), Error);
    o.dt = 1e-3;
    o.horizon = 10;
    o.burn_in = 20;
    CHECK_THROWS_AS(simulate_diffusion(FieldSpec::constant(0.0), o), Error);
  }
}

TEST_CASE("bin masses of a density curve sum to one") {
  const DensityCurve d = diffusion_density(FieldSpec::expression("-sin(2*pi*x)/2"), 0.3, 1024);
  const auto m = bin_masses(d, 50);
  double total = 0.0;
  for (double v : m) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("PDMP simulation") {
  SUBCASE("symmetric switching") {
    PdmpSimOptions o;
    o.lambda = 50;
    o.trajectories = 4;
    o.threads = 4;
    const PdmpSimResult r = simulate_pdmp(constant_pdmp(1, 1), o);
    CHECK(tv_to_uniform(r.histogram) <= 0.05);
    CHECK(std::fabs(r.sigma0_fraction - 0.5) <= 0.02);
  }
  SUBCASE("asymmetric rates set the occupation") {
    PdmpSimOptions o;
    o.lambda = 50;
    o.trajectories = 4;
    o.threads = 4;
    const PdmpSimResult r = simulate_pdmp(constant_pdmp(2, 1), o);
    CHECK(std::fabs(r.sigma0_fraction - 1.0 / 3.0) <= 0.02);
  }
  SUBCASE("thinning reproduces exponential sojourns") {
    PdmpSimOptions o;
    o.lambda = 50;
    o.horizon = 500;
    o.trajectories = 4;
    const PdmpSimResult r = simulate_pdmp(constant_pdmp(2, 1), o);
    // State 0 leaves at rate lambda * r01, state 1 at lambda * r10.
    const double rate[2] = {100.0, 50.0};
    for (int s = 0; s < 2; ++s) {
      const double mean = 1.0 / rate[s];
      CHECK(r.holding[s].count > 1000);
      CHECK(std::fabs(r.holding[s].mean - mean) <= 0.02 * mean);
      CHECK(std::fabs(r.holding[s].variance - mean * mean) <= 0.04 * mean * mean);
    }
  }
  SUBCASE("standard PDMP against the quadrature density") {
    PdmpSimOptions o;
    o.lambda = 50;
    o.trajectories = 4;
    o.threads = 4;
    const PdmpSpec p{FieldSpec::constant(1.0), FieldSpec::constant(-1.0), FieldSpec::expression("1+0.5*sin(2*pi*x)^2"),
                     FieldSpec::constant(1.0)};
    const PdmpSimResult r = simulate_pdmp(p, o);
    CHECK(tv_distance(r.histogram, pdmp_density(p, 50, 2048)) <= 0.05);
    CHECK(r.bound == doctest::Approx(50 * 1.1 * 1.5).epsilon(1e-3));
  }
  SUBCASE("seeded runs repeat") {
    PdmpSimOptions o;
    o.horizon = 50;
    o.trajectories = 3;
    const PdmpSimResult a = simulate_pdmp(constant_pdmp(1, 1), o);
    o.threads = 3;
    const PdmpSimResult b = simulate_pdmp(constant_pdmp(1, 1), o);
    CHECK(a.histogram.counts == b.histogram.counts);
    CHECK(a.switches == b.switches);
  }
}
