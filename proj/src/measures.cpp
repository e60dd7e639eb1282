#include "quasipot/measures.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "quasipot/error.hpp"
#include "quasipot/kernels.hpp"
#include "quasipot/parallel.hpp"
#include "quasipot/window.hpp"

namespace quasipot {

namespace {

std::vector<double> extend_once(std::span<const double> s, double drift) {
  const std::size_t n = s.size() - 1;
  std::vector<double> e(2 * n + 1);
  for (std::size_t k = 0; k <= n; ++k) e[k] = s[k];
  for (std::size_t k = n + 1; k <= 2 * n; ++k) e[k] = s[k - n] + drift;
  return e;
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - m);
  return m + std::log(sum);
}

// Fills log_density from unnormalized log values and builds the shifted rate.
DensityCurve finish(DensityKind kind, double parameter, std::vector<double> log_unnormalized, double rate_scale) {
  DensityCurve c;
  c.kind = kind;
  c.parameter = parameter;
  c.n = log_unnormalized.size();
  const double log_h = -std::log(static_cast<double>(c.n));
  const double log_z = log_sum_exp(log_unnormalized) + log_h;
  c.log_density = std::move(log_unnormalized);
  for (double& v : c.log_density) v -= log_z;
  c.rate.resize(c.n);
  for (std::size_t i = 0; i < c.n; ++i) c.rate[i] = -rate_scale * c.log_density[i];
  const double lowest = *std::min_element(c.rate.begin(), c.rate.end());
  for (double& r : c.rate) r -= lowest;
  return c;
}

void require_grid(std::size_t n) {
  if (n < 16) throw Error(ErrorKind::Validation, "density grid needs n >= 16");
}

}  // namespace

const char* to_string(DensityKind kind) { return kind == DensityKind::Diffusion ? "diffusion" : "pdmp"; }

double DensityCurve::density(std::size_t i) const { return std::exp(log_density[i]); }

double DensityCurve::mass() const {
  double sum = 0.0;
  for (double v : log_density) sum += std::exp(v);
  return sum / static_cast<double>(n);
}

std::vector<double> log_window_integral(std::span<const double> s, double drift, double scale,
                                        std::span<const double> slope, DensityOptions options) {
  if (s.size() < 9) throw Error(ErrorKind::Validation, "window integral needs at least 8 cells");
  const std::size_t n = s.size() - 1;
  if (options.endpoint_correction && slope.size() < n)
    throw Error(ErrorKind::Validation, "end correction needs the slope at every sample");
  const double h = 1.0 / static_cast<double>(n);
  const std::vector<double> e = extend_once(s, drift);
  const std::vector<std::size_t> top = sliding_window_argmax(e, n);
  std::vector<double> out(n);

  parallel_chunks(n, options.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const double m = e[top[i]];
      const double sum = kernels::exp_sum(&e[i], n + 1, scale, m);
      const double fa = std::exp(scale * (e[i] - m));
      const double fb = std::exp(scale * (e[i + n] - m));
      double t = h * (sum - 0.5 * (fa + fb));
      if (options.endpoint_correction) {
        // f' = scale * S' * f, and S'(x+1) = S'(x).
        const double corrected = t - h * h / 12.0 * scale * slope[i] * (fb - fa);
        if (corrected > 0.0) t = corrected;
      }
      assert(scale * (m - e[i]) >= 0.0);
      out[i] = scale * (m - e[i]) + std::log(t);
    }
  });
  return out;
}

DensityCurve diffusion_density(const SampledPotential& s, double eps, DensityOptions options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::Validation, "eps must be positive");
  require_grid(s.n());
  const double scale = 1.0 / (eps * eps);
  std::vector<double> log_i = log_window_integral(s.s_values(), s.drift(), scale, s.f_values(), options);
  return finish(DensityKind::Diffusion, eps, std::move(log_i), eps * eps);
}

DensityCurve diffusion_density(const FieldSpec& b, double eps, std::size_t n, DensityOptions options) {
  require_grid(n);
  return diffusion_density(integrate_potential(b.scaled(-2.0), n), eps, options);
}

double rate_gap(const DensityCurve& curve, const QuasiPotential& phi) {
  if (phi.n != curve.n) throw Error(ErrorKind::Validation, "density and quasipotential grids differ");
  const double lowest = phi.min();
  double gap = 0.0;
  for (std::size_t i = 0; i < curve.n; ++i) gap = std::max(gap, std::fabs(curve.rate[i] - (phi.phi[i] - lowest)));
  return gap;
}

ConvergenceTable make_convergence_table(const std::vector<double>& params, const std::vector<double>& gaps) {
  if (params.size() != gaps.size()) throw Error(ErrorKind::Validation, "parameter and gap lists differ in length");
  ConvergenceTable t;
  for (std::size_t k = 0; k < params.size(); ++k) t.rows.push_back({params[k], gaps[k]});
  t.monotone_decreasing = t.non_increasing = true;
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    if (!(gaps[k] < gaps[k - 1])) t.monotone_decreasing = false;
    if (!(gaps[k] <= gaps[k - 1] + 1e-12)) t.non_increasing = false;
  }
  return t;
}

ConvergenceTable rate_convergence(const FieldSpec& b, const std::vector<double>& eps_list, const QuasiPotential& phi,
                                  DensityOptions options) {
  const SampledPotential s = integrate_potential(b.scaled(-2.0), phi.n);
  std::vector<double> gaps;
  for (double eps : eps_list) gaps.push_back(rate_gap(diffusion_density(s, eps, options), phi));
  return make_convergence_table(eps_list, gaps);
}

// ---------------------------------------------------------------------------
// PDMP

void validate_pdmp(const PdmpSpec& p, std::size_t n) {
  require_grid(n);
  const double nd = static_cast<double>(n);
  auto samples = [&](const FieldSpec& f, const char* name) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = f(double(i) / nd);
      if (!std::isfinite(v[i]))
        throw Error(ErrorKind::NonFinite, std::string(name) + " is not finite at x = " + std::to_string(double(i) / nd));
    }
    return v;
  };
  for (auto [f, name] : {std::pair{&p.f0, "F0"}, std::pair{&p.f1, "F1"}}) {
    const std::vector<double> v = samples(*f, name);
    double k = 0.0;
    for (double x : v) k = std::max(k, std::fabs(x));
    const double tau = 1e-9 * k;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(v[i]) <= tau || (v[i] > 0.0) != (v[0] > 0.0))
        throw Error(ErrorKind::VelocityVanishes,
                    std::string(name) + " vanishes or changes sign near x = " + std::to_string(double(i) / nd));
    }
  }
  for (auto [f, name] : {std::pair{&p.r01, "r01"}, std::pair{&p.r10, "r10"}}) {
    for (double x : samples(*f, name))
      if (!(x > 0.0)) throw Error(ErrorKind::Validation, std::string(name) + " must be strictly positive");
  }
}

Integrand pdmp_integrand(const PdmpSpec& p) {
  Integrand out;
  const PdmpSpec q = p;
  out.fn = [q](double x) { return q.r01(x) / q.f0(x) + q.r10(x) / q.f1(x); };
  for (const FieldSpec* f : {&p.f0, &p.f1, &p.r01, &p.r10})
    for (std::size_t m : f->integrand().knot_grids) out.knot_grids.push_back(m);
  return out;
}

SampledPotential pdmp_potential(const PdmpSpec& p, std::size_t n) {
  validate_pdmp(p, n);
  return integrate_potential(pdmp_integrand(p), n);
}

DensityCurve pdmp_density(const PdmpSpec& p, double lambda, std::size_t n, DensityOptions options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::Validation, "lambda must be positive");
  const SampledPotential s = pdmp_potential(p, n);
  const double nd = static_cast<double>(n);
  const double h = 1.0 / nd;

  std::vector<double> f0(n), f1(n), wa(2 * n + 1), wb(2 * n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(i) / nd;
    f0[i] = p.f0(x);
    f1[i] = p.f1(x);
    wa[i] = p.r10(x) / f1[i];
    wb[i] = p.r01(x) / f0[i];
  }
  for (std::size_t k = n; k <= 2 * n; ++k) {
    wa[k] = wa[k - n];
    wb[k] = wb[k - n];
  }
  const std::vector<double> e = extend_once(s.s_values(), s.drift());
  const std::vector<std::size_t> top = sliding_window_argmax(e, n);

  std::vector<double> log_abs(n);
  std::vector<int> sign(n);
  parallel_chunks(n, options.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) {
      const double m = e[top[i]];
      const kernels::DualSum d = kernels::dual_weighted_exp_sum(&e[i], &wa[i], &wb[i], n + 1, lambda, m);
      const double fa = std::exp(lambda * (e[i] - m));
      const double fb = std::exp(lambda * (e[i + n] - m));
      // Both weights are periodic, so the window endpoints share wa[i], wb[i].
      double a = h * (d.a - 0.5 * wa[i] * (fa + fb));
      double b = h * (d.b - 0.5 * wb[i] * (fa + fb));
      if (options.endpoint_correction) {
        // g = w exp(lambda (S - m)) has g' = (w' + lambda S' w) exp(...), and
        // w, S' take the same values at both window ends.
        const std::size_t prev = (i + n - 1) % n;
        const double dwa = (wa[i + 1] - wa[prev]) * 0.5 * nd;
        const double dwb = (wb[i + 1] - wb[prev]) * 0.5 * nd;
        const double slope = s.f_values()[i];
        a -= h * h / 12.0 * (dwa + lambda * slope * wa[i]) * (fb - fa);
        b -= h * h / 12.0 * (dwb + lambda * slope * wb[i]) * (fb - fa);
      }
      // Each term is sign-definite; their sum is evaluated relative to the
      // window maximum, so no large exponential is ever formed.
      const double v = a / f0[i] + b / f1[i];
      sign[i] = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
      log_abs[i] = lambda * (m - e[i]) + std::log(std::fabs(v));
    }
  });
  const int z_sign = sign[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (sign[i] == 0 || sign[i] != z_sign)
      throw Error(ErrorKind::NonPositiveDensity,
                  "normalized PDMP density is not positive near x = " + std::to_string(double(i) / nd) +
                      "; check the sign pattern of F0 and F1");
  }
  return finish(DensityKind::Pdmp, lambda, std::move(log_abs), 1.0 / lambda);
}

ConvergenceTable pdmp_convergence(const PdmpSpec& p, const std::vector<double>& lambdas, const QuasiPotential& phi,
                                  DensityOptions options) {
  std::vector<double> gaps;
  for (double lambda : lambdas) gaps.push_back(rate_gap(pdmp_density(p, lambda, phi.n, options), phi));
  return make_convergence_table(lambdas, gaps);
}

}  // namespace quasipot
