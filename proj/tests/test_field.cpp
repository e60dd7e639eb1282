#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "quasipot/error.hpp"
#include "quasipot/expression.hpp"
#include "quasipot/field.hpp"

using namespace quasipot;
using oracle::pi;

namespace {

std::size_t parse_offset(const char* text) {
  try {
    Expression::parse(text);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a parse error for " << text);
  return 0;
}

}  // namespace

TEST_CASE("expression evaluates with standard semantics") {
  CHECK(FieldSpec::expression("sin(2*pi*x)+0.5")(0.25) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(FieldSpec::expression("0")(0.37) == 0.0);
  CHECK(FieldSpec::expression("2*x^2 - x")(0.5) == 0.0);
  CHECK(Expression::parse("2^3^2")(0.0) == 512.0);  // right associative
  CHECK(Expression::parse("-2^2")(0.0) == -4.0);
  CHECK(Expression::parse("abs(x-1)*exp(0)+cos(pi)")(0.25) == doctest::Approx(-0.25));
  CHECK(Expression::parse("1.5e-1*x")(2.0) == doctest::Approx(0.3));
  CHECK(Expression::parse("8/4/2")(0.0) == 1.0);
}

TEST_CASE("expression errors carry byte offsets") {
  CHECK(parse_offset("sin(") == 4);
  CHECK(parse_offset("x + $") == 4);
  CHECK(parse_offset("(x + 1") == 6);
  CHECK(parse_offset("x +") == 3);
  CHECK(parse_offset("2*y") == 2);
  CHECK(parse_offset("x 1") == 2);
  CHECK(parse_offset("tan(x)") == 0);
  try {
    Expression::parse("1+)");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte 2") != std::string::npos);
    CHECK(e.kind() == ErrorKind::Parse);
  }
}

TEST_CASE("every field form is 1-periodic") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> samples(37);
  for (double& s : samples) s = u(rng);
  const std::vector<FieldSpec> fields = {
      FieldSpec::expression("sin(2*pi*x) + 0.3*cos(6*pi*x) + x*0"),
      FieldSpec::expression("x"),  // wraps to frac(x)
      FieldSpec::fourier({0.2, {0.5, -0.1}, {1.0, 0.0, 0.3}}),
      FieldSpec::grid(samples),
      FieldSpec::constant(-1.25),
  };
  for (const FieldSpec& f : fields) {
    for (int k = 0; k < 1000; ++k) {
      const double x = u(rng);
      const double v = f(x);
      CHECK(std::fabs(f(x + 1.0) - v) <= 1e-12 * (1.0 + std::fabs(v)));
    }
  }
}

TEST_CASE("grid form interpolates linearly and needs eight samples") {
  const FieldSpec g = FieldSpec::grid({0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(g(0.0625) == doctest::Approx(0.5));
  CHECK(g(15.0 / 16.0) == doctest::Approx(3.5));  // between 7 and the wrapped 0
  CHECK_THROWS_AS(FieldSpec::grid({1, 2, 3}), Error);
}

TEST_CASE("integrate_potential matches closed forms") {
  SUBCASE("constant field") {
    const SampledPotential s = integrate_potential(FieldSpec::constant(1.0), 8);
    for (std::size_t i = 0; i <= 8; ++i) CHECK(s.s_values()[i] == doctest::Approx(double(i) / 8).epsilon(1e-15));
    CHECK(s.drift() == doctest::Approx(1.0));
  }
  SUBCASE("sine") {
    const SampledPotential s = integrate_potential(FieldSpec::expression("sin(2*pi*x)"), 1024);
    CHECK(std::fabs(s.s_values()[512] - 1.0 / pi) <= 1e-9);
    CHECK(std::fabs(s.drift()) <= 1e-9);
  }
  SUBCASE("shifted sine") {
    const SampledPotential s = integrate_potential(FieldSpec::expression("sin(2*pi*x)+1/2"), 1024);
    CHECK(std::fabs(s.drift() - 0.5) <= 1e-9);
  }
  SUBCASE("Fourier series against its antiderivative") {
    const FourierSeries f{0.1, {0.4, -0.2}, {0.7, 0.1, -0.3}};
    const SampledPotential s = integrate_potential(FieldSpec::fourier(f), 512);
    for (std::size_t i = 0; i <= 512; i += 7)
      CHECK(std::fabs(s.s_values()[i] - oracle::fourier_antiderivative(f, double(i) / 512)) <= 1e-10);
  }
  SUBCASE("grid form is integrated exactly") {
    const std::vector<double> v = {1, -2, 0.5, 3, 0, -1, 2, 4, -3, 1};
    const SampledPotential s = integrate_potential(FieldSpec::grid(v), 40);
    double exact = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) exact += 0.5 * (v[k] + v[(k + 1) % v.size()]) / double(v.size());
    CHECK(s.drift() == doctest::Approx(exact).epsilon(1e-14));
  }
  SUBCASE("extension rule") {
    const SampledPotential s = integrate_potential(FieldSpec::expression("sin(2*pi*x)+0.3"), 64);
    CHECK(s.extended(64 + 5) == s.s_values()[5] + s.drift());
    CHECK(s.extended(-3) == s.s_values()[61] - s.drift());
    CHECK(s.s_values()[0] == 0.0);
  }
  CHECK_THROWS_AS(integrate_potential(FieldSpec::constant(1.0), 4), Error);
  CHECK_THROWS_AS(integrate_potential(FieldSpec::expression("1/(x-x)"), 16), Error);
}

TEST_CASE("Simpson error decays like n^-4") {
  // Continuous across the wrap, with a derivative jump at the origin that
  // sits on a grid node, so each cell is smooth and Simpson is fourth order.
  const FieldSpec f = FieldSpec::expression("x*(1-x)*exp(3*x)");
  const auto drift = [&](std::size_t n) { return integrate_potential(f, n).drift(); };
  const double d1 = std::fabs(drift(128) - drift(256));
  const double d2 = std::fabs(drift(256) - drift(512));
  const double d3 = std::fabs(drift(512) - drift(1024));
  CHECK(d1 / d2 == doctest::Approx(16.0).epsilon(0.05));
  CHECK(d2 / d3 == doctest::Approx(16.0).epsilon(0.1));
  const double exact = (std::exp(3.0) + 5.0) / 27.0;
  CHECK(std::fabs(drift(1024) - exact) <= 1e-12);
}

TEST_CASE("find_components classifies the zero set") {
  SUBCASE("sin(2 pi x)") {
    const ComponentChain c = find_components(FieldSpec::expression("sin(2*pi*x)"), 1024);
    REQUIRE(c.size() == 1);
    REQUIRE(c.unstable.size() == 1);
    CHECK(std::fabs(std::remainder(c.stable[0].representative(), 1.0)) <= 1e-9);
    CHECK(c.unstable[0].representative() == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("sin(4 pi x)") {
    const ComponentChain c = find_components(FieldSpec::expression("sin(4*pi*x)"), 1024);
    REQUIRE(c.size() == 2);
    REQUIRE(c.unstable.size() == 2);
    std::vector<double> k{wrap_unit(c.stable[0].representative() + 1e-12), c.stable[1].representative()};
    std::sort(k.begin(), k.end());
    CHECK(k[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(k[1] == doctest::Approx(0.5).epsilon(1e-9));
    std::vector<double> a{c.unstable[0].representative(), c.unstable[1].representative()};
    std::sort(a.begin(), a.end());
    CHECK(a[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(a[1] == doctest::Approx(0.75).epsilon(1e-9));
  }
  SUBCASE("no zeros") {
    CHECK(find_components(FieldSpec::constant(1.0), 64).empty());
  }
  SUBCASE("plateau component") {
    // F vanishes on [0.4, 0.6] and is negative before, positive after.
    std::vector<double> v(100);
    for (std::size_t i = 0; i < 100; ++i) {
      const double x = i / 100.0;
      v[i] = x < 0.4 ? -std::sin(pi * x / 0.4) : (x <= 0.6 ? 0.0 : std::sin(pi * (x - 0.6) / 0.4));
    }
    const ComponentChain c = find_components(FieldSpec::grid(v), 400);
    REQUIRE(c.size() == 1);
    CHECK(c.stable[0].lo == doctest::Approx(0.4).epsilon(1e-3));
    CHECK(c.stable[0].hi == doctest::Approx(0.6).epsilon(1e-3));
  }
  SUBCASE("touching zero is Neither and strict mode rejects it") {
    const FieldSpec f = FieldSpec::expression("sin(2*pi*x)^2");
    const ComponentChain c = find_components(f, 512);
    CHECK(c.empty());
    bool neither = false;
    for (const ZeroComponent& z : c.all) neither = neither || z.kind == ComponentKind::Neither;
    CHECK(neither);
    ComponentOptions strict;
    strict.strict = true;
    CHECK_THROWS_AS(find_components(f, 512, strict), Error);
  }
  SUBCASE("chains alternate on random fields") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
      const ComponentChain c = find_components(FieldSpec::fourier(oracle::random_three_mode(rng)), 2048);
      if (c.empty()) continue;
      REQUIRE(c.unstable.size() == c.size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double k = c.stable[i].representative();
        const double a = c.unstable[i].representative();
        const double next = c.stable[(i + 1) % c.size()].representative();
        // A_i lies strictly between K_i and K_{i+1} going clockwise.
        const double to_next = c.size() == 1 ? 1.0 : clockwise(k, next);
        CHECK(clockwise(k, a) > 0.0);
        CHECK(clockwise(k, a) < to_next);
      }
    }
  }
}
