#include "quasipot/hj.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "quasipot/error.hpp"

namespace quasipot {

namespace {

constexpr std::size_t kBoxPoints = 33;
constexpr std::size_t kConvexityRows = 64;
constexpr std::size_t kConstructionGrid = 1024;

double field_scale(const FieldSpec& f, std::size_t n) {
  double k = 0.0;
  for (std::size_t i = 0; i < n; ++i) k = std::max(k, std::fabs(f(double(i) / double(n))));
  return k;
}

std::vector<double> p_box(double k) {
  const double r = k > 0.0 ? 3.0 * k : 1.0;
  std::vector<double> p(kBoxPoints);
  for (std::size_t j = 0; j < kBoxPoints; ++j) p[j] = -r + 2.0 * r * double(j) / double(kBoxPoints - 1);
  return p;
}

std::vector<double> lobatto(double lo, double hi, std::size_t m) {
  if (m < 2 || lo == hi) return {0.5 * (lo + hi)};
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k)
    out[k] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(std::numbers::pi * double(k) / double(m - 1));
  return out;
}

}  // namespace

std::vector<Hamiltonian> builtin_hamiltonians(const FieldSpec& f) {
  std::vector<Hamiltonian> out;
  for (const char* name : {"quadratic", "cosh", "quartic"}) {
    Hamiltonian h = hamiltonian_by_name(name, f);
    const HypothesisReport r = check_hypotheses(h, kConstructionGrid);
    if (!r.zeros_ok || !r.convexity_ok)
      throw Error(ErrorKind::HypothesisFailed, std::string("built-in Hamiltonian '") + name +
                                                   "' fails its hypotheses for this field");
    out.push_back(std::move(h));
  }
  return out;
}

Hamiltonian hamiltonian_by_name(const std::string& name, const FieldSpec& f) {
  if (name == "quadratic") return {name, f, [](double p, double F) { return p * (p - F); }};
  if (name == "cosh")
    return {name, f, [](double p, double F) { return std::cosh(p - 0.5 * F) - std::cosh(0.5 * F); }};
  if (name == "quartic")
    return {name, f, [](double p, double F) {
              const double c = p - 0.5 * F, h = 0.5 * F;
              return c * c * c * c - h * h * h * h;
            }};
  throw Error(ErrorKind::Validation,
              "unknown Hamiltonian '" + name + "' (expected quadratic, cosh or quartic)");
}

HypothesisReport check_hypotheses(const Hamiltonian& h, std::size_t n) {
  if (n < 8) throw Error(ErrorKind::Validation, "grid size must be at least 8");
  HypothesisReport r;
  const double nd = static_cast<double>(n);
  const double k = field_scale(h.field(), n);
  const std::vector<double> p = p_box(k);

  double h_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = h.field()(double(i) / nd);
    for (double q : p) h_max = std::max(h_max, std::fabs(h.at(q, f)));
  }
  r.tau_h = 1e-6 * (1.0 + h_max);

  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(i) / nd;
    const double f = h.field()(x);
    const double z = std::max(std::fabs(h.at(0.0, f)), std::fabs(h.at(f, f)));
    if (z > r.worst_zero) {
      r.worst_zero = z;
      r.x_zero = x;
    }
  }

  const std::size_t rows = std::min(n, kConvexityRows);
  for (std::size_t r_i = 0; r_i < rows; ++r_i) {
    const double x = double(r_i * (n / rows)) / nd;
    const double f = h.field()(x);
    for (std::size_t a = 0; a < p.size(); ++a) {
      for (std::size_t b = a + 2; b < p.size(); b += 2) {
        const double excess = h.at(0.5 * (p[a] + p[b]), f) - 0.5 * (h.at(p[a], f) + h.at(p[b], f));
        if (excess > r.worst_convexity) {
          r.worst_convexity = excess;
          r.x_convexity = x;
        }
      }
    }
  }
  r.zeros_ok = r.worst_zero <= r.tau_h;
  r.convexity_ok = r.worst_convexity <= r.tau_h;
  return r;
}

Differentials sub_super_differentials(std::span<const double> phi, std::size_t i, double tau_kink) {
  const std::size_t n = phi.size() - 1;
  if (phi.size() < 9) throw Error(ErrorKind::Validation, "grid function needs at least 9 samples");
  auto at = [&](std::ptrdiff_t k) {
    const auto nn = static_cast<std::ptrdiff_t>(n);
    return phi[static_cast<std::size_t>(((k % nn) + nn) % nn)];
  };
  const double h = 1.0 / static_cast<double>(n);
  const auto k = static_cast<std::ptrdiff_t>(i);
  Differentials d;
  d.left_slope = (3.0 * at(k) - 4.0 * at(k - 1) + at(k - 2)) / (2.0 * h);
  d.right_slope = (-3.0 * at(k) + 4.0 * at(k + 1) - at(k + 2)) / (2.0 * h);
  const double a = d.left_slope, b = d.right_slope;
  if (std::fabs(a - b) <= tau_kink) {
    const double m = 0.5 * (a + b);
    d.sub = d.super = std::pair{m, m};
  } else if (a > b) {
    d.super = std::pair{b, a};
  } else {
    d.sub = std::pair{a, b};
  }
  return d;
}

ViscosityReport check_viscosity(std::span<const double> phi, const Hamiltonian& h, ViscosityOptions options) {
  if (phi.size() < 9) throw Error(ErrorKind::Validation, "grid function needs at least 9 samples");
  const std::size_t n = phi.size() - 1;
  const double scale = std::max({1.0, std::fabs(phi.front()), std::fabs(phi.back())});
  if (std::fabs(phi.front() - phi.back()) > 1e-12 * scale)
    throw Error(ErrorKind::Validation, "grid function must be periodic (last sample equal to the first)");

  const HypothesisReport hyp = check_hypotheses(h, n);
  if (!hyp.zeros_ok || !hyp.convexity_ok) {
    char buf[256];
    if (!hyp.zeros_ok)
      std::snprintf(buf, sizeof buf, "Hamiltonian '%s' fails H(x,0) = H(x,F(x)) = 0: |H| = %.3g at x = %.6g",
                    h.name().c_str(), hyp.worst_zero, hyp.x_zero);
    else
      std::snprintf(buf, sizeof buf, "Hamiltonian '%s' fails convexity in p: excess %.3g at x = %.6g",
                    h.name().c_str(), hyp.worst_convexity, hyp.x_convexity);
    throw Error(ErrorKind::HypothesisFailed, buf);
  }

  ViscosityReport rep;
  rep.hamiltonian = h.name();
  rep.tau_h = options.tau_h.value_or(hyp.tau_h);
  rep.tau_kink = options.tau_kink.value_or(10.0 * field_scale(h.field(), n) / static_cast<double>(n));
  rep.points.reserve(n);
  rep.worst_sub = rep.worst_super = -std::numeric_limits<double>::infinity();

  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    PointRecord pr;
    pr.x = double(i) / nd;
    pr.d = sub_super_differentials(phi, i, rep.tau_kink);
    const double f = h.field()(pr.x);
    pr.sub_margin = pr.super_margin = -std::numeric_limits<double>::infinity();
    if (pr.d.super)
      for (double p : lobatto(pr.d.super->first, pr.d.super->second, options.samples))
        pr.sub_margin = std::max(pr.sub_margin, h.at(p, f));
    if (pr.d.sub)
      for (double p : lobatto(pr.d.sub->first, pr.d.sub->second, options.samples))
        pr.super_margin = std::max(pr.super_margin, -h.at(p, f));
    if (!(pr.d.sub && pr.d.super)) ++rep.kinks;

    rep.worst_sub = std::max(rep.worst_sub, pr.sub_margin);
    rep.worst_super = std::max(rep.worst_super, pr.super_margin);
    if (pr.sub_margin > rep.tau_h) rep.violations.push_back({pr.x, "subsolution", pr.sub_margin});
    if (pr.super_margin > rep.tau_h) rep.violations.push_back({pr.x, "supersolution", pr.super_margin});
    rep.points.push_back(pr);
  }
  rep.verdict = rep.violations.empty();
  return rep;
}

}  // namespace quasipot
