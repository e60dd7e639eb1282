#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "quasipot/error.hpp"
#include "quasipot/maxwell.hpp"

using namespace quasipot;
using oracle::pi;

namespace {

constexpr std::size_t kN = 4096;

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::fabs(a[i] - b[i]));
  return g;
}

// S for F = sin(2 pi x) + c.
double s_shifted_sine(double x, double c) { return (1 - std::cos(2 * pi * x)) / (2 * pi) + c * x; }

// Root of g on [a,b] by bisection (g(a), g(b) of opposite sign).
template <class G>
double bisect(G g, double a, double b) {
  double ga = g(a);
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (a + b), gm = g(m);
    if ((gm > 0) == (ga > 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<FieldSpec> structural_fields() {
  std::vector<FieldSpec> out = {
      FieldSpec::expression("sin(2*pi*x)"),
      FieldSpec::expression("sin(2*pi*x)+0.5"),
      FieldSpec::expression("-(sin(2*pi*x)+0.5)"),
      FieldSpec::expression("sin(4*pi*x)"),
      FieldSpec::expression("sin(2*pi*x)+0.3"),
      FieldSpec::expression("sin(2*pi*x)+0.5*cos(6*pi*x)+0.2"),
      FieldSpec::expression("-(sin(2*pi*x)+0.5*cos(6*pi*x)+0.2)"),
      FieldSpec::constant(1.0),
      FieldSpec::constant(-1.0),
      FieldSpec::expression("2+sin(2*pi*x)"),
  };
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 6; ++k) out.push_back(FieldSpec::fourier(oracle::random_three_mode(rng)));
  return out;
}

}  // namespace

TEST_CASE("phi_direct on closed-form fields") {
  SUBCASE("monotone S gives the constant min{0, -S(1)}") {
    const QuasiPotential q = phi_direct(integrate_potential(FieldSpec::constant(1.0), 256));
    for (double v : q.phi) CHECK(v == doctest::Approx(-1.0).epsilon(1e-14));
    REQUIRE(q.flat_intervals.size() == 1);
    CHECK(q.flat_intervals[0].lo == 0.0);
    CHECK(q.flat_intervals[0].hi == doctest::Approx(1.0));
  }
  SUBCASE("sin(2 pi x)") {
    const QuasiPotential q = phi_direct(integrate_potential(FieldSpec::expression("sin(2*pi*x)"), kN));
    double worst = 0.0;
    for (std::size_t i = 0; i <= kN; ++i) {
      const double x = double(i) / kN;
      worst = std::max(worst, std::fabs(q.phi[i] - ((1 - std::cos(2 * pi * x)) / (2 * pi) - 1 / pi)));
    }
    CHECK(worst <= 1e-8);
    CHECK(std::fabs(q.phi[0] + 1 / pi) <= 1e-8);
  }
  SUBCASE("sin(2 pi x) + 1/2") {
    const QuasiPotential q = phi_direct(integrate_potential(FieldSpec::expression("sin(2*pi*x)+0.5"), 4104));
    // 7/12 is the local maximum of S; the window from there ends at the
    // shifted copy, so Phi = -S(1) = -1/2.
    CHECK(std::fabs(q.phi[2394] + 0.5) <= 1e-6);
    CHECK(std::fabs(q.max() + 0.5) <= 1e-12);
    // At 11/12 the window maximum sits at 7/12 + 1, which is higher than the
    // shifted copy of 11/12 itself.
    const double expected = s_shifted_sine(11.0 / 12, 0.5) - s_shifted_sine(19.0 / 12, 0.5);
    CHECK(std::fabs(q.phi[3762] - expected) <= 1e-6);
    CHECK(expected == doctest::Approx(-0.60899769).epsilon(1e-7));
  }
}

TEST_CASE("phi_direct agrees with the O(n^2) definition") {
  for (const FieldSpec& f : structural_fields()) {
    const SampledPotential s = integrate_potential(f, 1024);
    const QuasiPotential q = phi_direct(s);
    CHECK(sup_gap(q.phi, oracle::naive_phi(to_vec(s.s_values()))) <= 1e-13);
  }
}

TEST_CASE("constructive sweep equals the window transform") {
  for (const FieldSpec& f : structural_fields()) {
    const SampledPotential s = integrate_potential(f, kN);
    const ComponentChain chain = find_components(s);
    const QuasiPotential d = phi_direct(s);
    const QuasiPotential c = phi_constructive(s, chain);
    CHECK_MESSAGE(sup_gap(d.phi, c.phi) <= 1e-10, f.describe());
    CHECK(c.method == QuasiMethod::Constructive);
  }
}

TEST_CASE("constructive trace") {
  SUBCASE("positive drift: one flat stretch ending at the local maximum 7/12 + 1") {
    const SampledPotential s = integrate_potential(FieldSpec::expression("sin(2*pi*x)+0.5"), kN);
    const QuasiPotential c = phi_constructive(s, find_components(s));
    REQUIRE(c.trace.active);
    const auto& t = c.trace;
    for (std::size_t k = 1; k < t.levels.size(); ++k) CHECK(t.levels[k] < t.levels[k - 1]);
    CHECK(t.z.back() == t.base_index);
    CHECK(t.y.size() + 1 == t.z.size());
    // The flat stretch in one period is [l, 7/12] with S(l) + 1/2 = S(7/12).
    const double top = s_shifted_sine(7.0 / 12, 0.5);
    const double l = bisect([&](double x) { return s_shifted_sine(x, 0.5) + 0.5 - top; }, -5.0 / 12, 7.0 / 12);
    REQUIRE(!t.flat_union.empty());
    const FlatInterval v = t.flat_union.front();
    CHECK(std::fabs(wrap_unit(v.hi) - 7.0 / 12) <= 2.0 / kN);
    CHECK(std::fabs(wrap_unit(v.lo) - wrap_unit(l)) <= 2.0 / kN);
  }
  SUBCASE("negative drift mirrors the sweep") {
    const SampledPotential s = integrate_potential(FieldSpec::expression("-(sin(2*pi*x)+0.5)"), kN);
    const QuasiPotential c = phi_constructive(s, find_components(s));
    REQUIRE(c.trace.active);
    const auto& t = c.trace;
    for (std::size_t k = 1; k < t.levels.size(); ++k) CHECK(t.levels[k] < t.levels[k - 1]);
    CHECK(t.z.back() == t.base_index + static_cast<std::ptrdiff_t>(kN));
    CHECK(c.flat_value == 0.0);
    // S = -(1 - cos)/(2 pi) - x/2 has its local maximum at 11/12; the flat
    // stretch runs right of it until S has dropped by 1/2.
    auto sv = [](double x) { return -s_shifted_sine(x, 0.5); };
    const double top = sv(11.0 / 12);
    const double r = bisect([&](double x) { return sv(x) - (top - 0.5); }, 11.0 / 12, 23.0 / 12);
    const FlatInterval v = t.flat_union.front();
    CHECK(std::fabs(wrap_unit(v.lo) - 11.0 / 12) <= 2.0 / kN);
    CHECK(std::fabs(wrap_unit(v.hi) - wrap_unit(r)) <= 2.0 / kN);
  }
  SUBCASE("reflection x -> -x reflects the flat set") {
    // G(x) = -F(-x) has S_G(x) = S_F(-x).
    const SampledPotential sf = integrate_potential(FieldSpec::expression("sin(2*pi*x)+0.5"), kN);
    const SampledPotential sg = integrate_potential(FieldSpec::expression("sin(2*pi*x)-0.5"), kN);
    const QuasiPotential qf = phi_direct(sf), qg = phi_direct(sg);
    for (std::size_t i = 0; i <= kN; ++i) CHECK(qg.is_flat[i] == qf.is_flat[kN - i]);
  }
  SUBCASE("shortcut branches leave the trace empty") {
    const SampledPotential s = integrate_potential(FieldSpec::expression("sin(2*pi*x)"), kN);
    const QuasiPotential c = phi_constructive(s, find_components(s));
    CHECK_FALSE(c.trace.active);
    const double top = *std::max_element(s.s_values().begin(), s.s_values().end());
    for (std::size_t i = 0; i <= kN; ++i) CHECK(c.phi[i] == doctest::Approx(s.s_values()[i] - top).epsilon(1e-15));
    const SampledPotential m = integrate_potential(FieldSpec::expression("2+sin(2*pi*x)"), 256);
    const QuasiPotential cm = phi_constructive(m, find_components(m));
    CHECK_FALSE(cm.trace.active);
    for (double v : cm.phi) CHECK(v == doctest::Approx(-2.0));
  }
  SUBCASE("a chain that disagrees with S is rejected") {
    const SampledPotential s = integrate_potential(FieldSpec::expression("sin(2*pi*x)+0.5"), 512);
    const ComponentChain wrong = find_components(FieldSpec::expression("sin(4*pi*x)+0.2"), 512);
    CHECK_THROWS_AS(phi_constructive(s, wrong), Error);
  }
}

TEST_CASE("structural invariants of every Phi") {
  for (const FieldSpec& f : structural_fields()) {
    const SampledPotential s = integrate_potential(f, kN);
    const QuasiPotential q = phi_direct(s);
    const double k = s.field_max_abs();
    const double flat = std::min(0.0, -s.drift());
    INFO(f.describe());
    CHECK(q.phi.front() == q.phi.back());
    CHECK(std::fabs(q.max() - flat) <= q.tau_flat);
    for (std::size_t i = 0; i < kN; ++i) CHECK(std::fabs(q.phi[i + 1] - q.phi[i]) * kN <= 2 * k + 1e-9);
    for (std::size_t i = 0; i <= kN; ++i)
      if (q.is_flat[i]) CHECK(std::fabs(q.phi[i] - flat) <= q.tau_flat);

    // The maximum is attained inside a flat stretch.
    const std::size_t arg = static_cast<std::size_t>(std::max_element(q.phi.begin(), q.phi.end()) - q.phi.begin());
    CHECK(q.is_flat[arg]);

    // Off the flat set Phi follows S; stretch endpoints have F <= 0 on the
    // left and F >= 0 on the right (up to grid resolution).
    const auto sv = s.s_values();
    const double tau_f = 4.0 * k * 2 * pi / kN + 1e-12;
    for (std::size_t i = 0; i < kN;) {
      if (q.is_flat[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 <= kN && !q.is_flat[j + 1]) ++j;
      for (std::size_t m = i; m <= j; ++m)
        CHECK(std::fabs((q.phi[m] - q.phi[i]) - (sv[m] - sv[i])) <= 2 * k / kN + 1e-12);
      if (i > 0 && j < kN) {
        CHECK(f(double(i - 1) / kN) <= tau_f);
        CHECK(f(double(j + 1) / kN) >= -tau_f);
      }
      i = j + 1;
    }
  }
}

TEST_CASE("reversible fields flatten only the global maximum of S") {
  for (const char* text : {"sin(2*pi*x)", "sin(4*pi*x)+0.3*sin(2*pi*x)", "cos(2*pi*x)"}) {
    std::vector<double> measures;
    for (std::size_t n : {1024u, 16384u}) {
      const SampledPotential s = integrate_potential(FieldSpec::expression(text), n);
      const QuasiPotential q = phi_direct(s);
      const double top = *std::max_element(s.s_values().begin(), s.s_values().end());
      for (std::size_t i = 0; i <= n; ++i) CHECK(q.phi[i] == doctest::Approx(s.s_values()[i] - top).epsilon(1e-12));
      double measure = 0.0;
      for (const FlatInterval& fl : q.flat_intervals) measure += fl.hi - fl.lo;
      measures.push_back(measure);
    }
    // Near a nondegenerate maximum the flat set has width ~ sqrt(tau_flat),
    // so a 16x finer grid shrinks it about fourfold.
    CHECK(measures[1] <= 0.3 * measures[0]);
  }
}

TEST_CASE("phi_tilde differs from Phi by the positive mass") {
  SUBCASE("F = 1") {
    const TildeResult t = phi_tilde(FieldSpec::constant(1.0), 256);
    for (double v : t.tilde.phi) CHECK(std::fabs(v) <= 1e-14);
    CHECK(t.positive_mass == doctest::Approx(1.0));
  }
  SUBCASE("F = sin(2 pi x)") {
    const TildeResult t = phi_tilde(FieldSpec::expression("sin(2*pi*x)"), kN);
    CHECK(std::fabs(t.positive_mass - 1 / pi) <= 1e-8);
    CHECK(t.offset_gap <= 1e-8);
  }
  SUBCASE("F = -1") {
    const TildeResult t = phi_tilde(FieldSpec::constant(-1.0), 256);
    for (double v : t.tilde.phi) CHECK(std::fabs(v) <= 1e-14);
    const QuasiPotential q = phi_direct(integrate_potential(FieldSpec::constant(-1.0), 256));
    for (double v : q.phi) CHECK(std::fabs(v) <= 1e-14);
  }
  SUBCASE("random fields") {
    for (const FieldSpec& f : structural_fields()) CHECK(phi_tilde(f, kN).offset_gap <= 1e-9);
  }
}
