#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "quasipot/error.hpp"
#include "quasipot/hj.hpp"
#include "quasipot/maxwell.hpp"

using namespace quasipot;
using oracle::pi;

namespace {

constexpr std::size_t kN = 4096;

std::vector<double> sample(const std::function<double(double)>& fn, std::size_t n) {
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = fn(double(i) / n);
  v[n] = v[0];
  return v;
}

std::vector<FieldSpec> hj_fields() {
  std::vector<FieldSpec> out = {
      FieldSpec::expression("sin(2*pi*x)"),         FieldSpec::expression("sin(2*pi*x)+0.5"),
      FieldSpec::expression("-(sin(2*pi*x)+0.5)"),  FieldSpec::expression("sin(4*pi*x)"),
      FieldSpec::expression("sin(2*pi*x)+0.3"),     FieldSpec::expression("sin(2*pi*x)+0.5*cos(6*pi*x)+0.2"),
  };
  std::mt19937_64 rng(77);
  for (int k = 0; k < 3; ++k) out.push_back(FieldSpec::fourier(oracle::random_three_mode(rng)));
  return out;
}

enum class HypothesisFailedKind { None, Thrown };
HypothesisFailedKind hypothesis_failure(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::HypothesisFailed) return HypothesisFailedKind::Thrown;
    throw;
  }
  return HypothesisFailedKind::None;
}

}  // namespace

TEST_CASE("differentials at kinks and smooth points") {
  const std::size_t n = 1000;
  const auto v = sample([](double x) { return std::fabs(x - 0.5); }, n);
  const Differentials convex = sub_super_differentials(v, 500, 0.1);
  CHECK(convex.left_slope == doctest::Approx(-1.0));
  CHECK(convex.right_slope == doctest::Approx(1.0));
  REQUIRE(convex.sub.has_value());
  CHECK_FALSE(convex.super.has_value());
  CHECK(convex.sub->first == doctest::Approx(-1.0));
  CHECK(convex.sub->second == doctest::Approx(1.0));

  const auto w = sample([](double x) { return -std::fabs(x - 0.5); }, n);
  const Differentials concave = sub_super_differentials(w, 500, 0.1);
  REQUIRE(concave.super.has_value());
  CHECK_FALSE(concave.sub.has_value());
  CHECK(concave.super->first == doctest::Approx(-1.0));
  CHECK(concave.super->second == doctest::Approx(1.0));

  const auto smooth = sample([](double x) { return std::sin(2 * pi * x); }, n);
  for (std::size_t i : {0u, 137u, 250u, 999u}) {
    const Differentials d = sub_super_differentials(smooth, i, 0.1);
    const double slope = 2 * pi * std::cos(2 * pi * double(i) / n);
    REQUIRE(d.sub.has_value());
    REQUIRE(d.super.has_value());
    CHECK(d.sub->first == d.sub->second);
    CHECK(d.sub->first == d.super->first);
    CHECK(std::fabs(d.sub->first - slope) <= 1e-3);
  }
}

TEST_CASE("quadratic Hamiltonian values") {
  const Hamiltonian h = hamiltonian_by_name("quadratic", FieldSpec::constant(2.0));
  CHECK(h(0.3, 1.0) == doctest::Approx(-1.0));
  const FieldSpec f = FieldSpec::expression("sin(2*pi*x)+0.5");
  const Hamiltonian q = hamiltonian_by_name("quadratic", f);
  for (double x : {0.0, 0.1, 0.55, 0.9}) {
    CHECK(q(x, 0.0) == 0.0);
    CHECK(std::fabs(q(x, f(x))) <= 1e-15);
  }
  CHECK_THROWS_AS(hamiltonian_by_name("exp", f), Error);
}

TEST_CASE("built-ins satisfy the sign implications") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const FieldSpec& f : hj_fields()) {
    for (const Hamiltonian& h : builtin_hamiltonians(f)) {
      const double tau = check_hypotheses(h, 1024).tau_h;
      for (int k = 0; k < 100; ++k) {
        const double x = u(rng);
        const double lo = std::min(0.0, f(x)), hi = std::max(0.0, f(x));
        const double inside = lo + (hi - lo) * u(rng);
        CHECK(h(x, inside) <= tau);
        const double outside = u(rng) < 0.5 ? lo - 2.0 * u(rng) : hi + 2.0 * u(rng);
        CHECK(h(x, outside) >= -tau);
      }
    }
  }
}

TEST_CASE("non-conforming Hamiltonians are rejected") {
  const FieldSpec f = FieldSpec::expression("sin(2*pi*x)+0.5");
  const std::vector<double> zero(kN + 1, 0.0);
  const Hamiltonian shifted("p^2", f, [](double p, double) { return p * p - 0.1; });
  CHECK(hypothesis_failure([&] { check_viscosity(zero, shifted); }) == HypothesisFailedKind::Thrown);
  const Hamiltonian concave("-p(p-F)", f, [](double p, double fx) { return -p * (p - fx); });
  const HypothesisReport r = check_hypotheses(concave, 1024);
  CHECK(r.zeros_ok);
  CHECK_FALSE(r.convexity_ok);
  CHECK(hypothesis_failure([&] { check_viscosity(zero, concave); }) == HypothesisFailedKind::Thrown);
}

TEST_CASE("the zero function is a viscosity solution") {
  for (const FieldSpec& f : {FieldSpec::expression("sin(2*pi*x)+0.5"), FieldSpec::expression("sin(4*pi*x)")}) {
    const std::vector<double> zero(kN + 1, 0.0);
    for (const Hamiltonian& h : builtin_hamiltonians(f)) {
      const ViscosityReport r = check_viscosity(zero, h);
      CHECK(r.verdict);
      CHECK(r.kinks == 0);
    }
  }
}

TEST_CASE("the quasipotential solves every built-in equation") {
  for (const FieldSpec& f : hj_fields()) {
    const QuasiPotential q = phi_direct(integrate_potential(f, kN));
    for (const Hamiltonian& h : builtin_hamiltonians(f)) {
      const ViscosityReport r = check_viscosity(q.phi, h);
      INFO(f.describe() << " / " << h.name());
      CHECK(r.verdict);
      CHECK(r.worst_margin() <= r.tau_h);
      CHECK(r.violations.empty());
    }
  }
}

TEST_CASE("slopes of the quasipotential follow the flat set and F") {
  for (const FieldSpec& f : hj_fields()) {
    const QuasiPotential q = phi_direct(integrate_potential(f, kN));
    const double tau_kink = 10.0 * integrate_potential(f, kN).field_max_abs() / kN;
    // The exact plateau, not the tau_flat neighbourhood reported by maxwell.
    std::vector<bool> flat(kN);
    for (std::size_t i = 0; i < kN; ++i) flat[i] = std::fabs(q.phi[i] - q.flat_value) <= 1e-12;
    for (std::size_t i = 0; i < kN; ++i) {
      // Only points whose whole stencil shares the classification.
      bool uniform = true;
      for (std::size_t d = 0; d <= 4 && uniform; ++d) uniform = flat[(i + kN - 2 + d) % kN] == flat[i];
      if (!uniform) continue;
      const Differentials d = sub_super_differentials(q.phi, i, tau_kink);
      if (!(d.sub && d.super)) continue;  // kinks are the checker's business
      const double slope = d.sub->first;
      const double expected = flat[i] ? 0.0 : f(double(i) / kN);
      CHECK(std::fabs(slope - expected) <= 1e-4);
    }
  }
}

TEST_CASE("candidates that are not solutions are flagged") {
  const FieldSpec f = FieldSpec::expression("sin(2*pi*x)+0.5");
  const SampledPotential s = integrate_potential(f, kN);
  const QuasiPotential q = phi_direct(s);

  std::vector<std::pair<std::string, std::vector<double>>> candidates;
  candidates.emplace_back("wrong slope", sample([](double x) { return (1 - std::cos(2 * pi * x)) / (2 * pi); }, kN));
  std::vector<double> negated = q.phi;
  for (double& v : negated) v = -v;
  candidates.emplace_back("negated", negated);
  std::vector<double> bumped = q.phi;
  for (std::size_t i = 0; i <= kN; ++i) bumped[i] += 0.05 * std::sin(2 * pi * double(i) / kN);
  candidates.emplace_back("perturbed", bumped);
  // S minus its forward window minimum: the mirror transform with the wrong
  // extremum, which is periodic but picks the wrong branch.
  const auto sv = s.s_values();
  std::vector<double> wrong(kN + 1);
  for (std::size_t i = 0; i <= kN; ++i) {
    double m = 1e300;
    for (std::size_t j = i; j <= i + kN; ++j) m = std::min(m, s.extended(static_cast<std::ptrdiff_t>(j)));
    wrong[i] = sv[i] - m;
  }
  candidates.emplace_back("window minimum", wrong);

  for (const auto& [label, phi] : candidates) {
    for (const Hamiltonian& h : builtin_hamiltonians(f)) {
      const ViscosityReport r = check_viscosity(phi, h);
      INFO(label << " / " << h.name());
      CHECK_FALSE(r.verdict);
      CHECK(r.worst_margin() >= 10.0 * r.tau_h);
      CHECK_FALSE(r.violations.empty());
    }
  }
}
