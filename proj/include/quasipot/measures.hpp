#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "quasipot/field.hpp"
#include "quasipot/maxwell.hpp"

namespace quasipot {

enum class DensityKind { Diffusion, Pdmp };

const char* to_string(DensityKind kind);

// Stationary density on the grid x_i = i/n, i = 0..n-1, held in log form.
// The rate is -eps^2 log mu (diffusion) or -log(mu)/lambda (PDMP), shifted so
// that its minimum is exactly zero.
struct DensityCurve {
  DensityKind kind = DensityKind::Diffusion;
  double parameter = 0.0;  // eps or lambda
  std::size_t n = 0;
  std::vector<double> log_density;
  std::vector<double> rate;

  double density(std::size_t i) const;
  /// Periodic trapezoid integral of the density (1 up to rounding).
  double mass() const;
};

struct DensityOptions {
  unsigned threads = 1;
  // Euler-Maclaurin end correction of the window trapezoid rule. The window
  // integrand is not periodic, so plain trapezoid is only second order.
  bool endpoint_correction = true;
};

/// log of int_{x_i}^{x_i+1} exp(scale * (S(y) - S(x_i))) dy for i = 0..n-1,
/// where S is given by n+1 samples on [0,1] (s[0] need not vanish) and
/// extended by S(x+1) = S(x) + drift. `slope` holds S' at the samples and is
/// only used by the end correction (may be empty when it is disabled).
std::vector<double> log_window_integral(std::span<const double> s, double drift, double scale,
                                        std::span<const double> slope, DensityOptions options = {});

/// Density of the diffusion dX = b(X) dt + eps dW on the torus (S from F = -2b).
DensityCurve diffusion_density(const FieldSpec& b, double eps, std::size_t n, DensityOptions options = {});
DensityCurve diffusion_density(const SampledPotential& s, double eps, DensityOptions options = {});

struct ConvergenceRow {
  double parameter = 0.0;
  double sup_gap = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool monotone_decreasing = false;  // strictly, in list order
  bool non_increasing = false;       // allowing ties up to 1e-12 (exact rates sit at roundoff)
};

ConvergenceTable make_convergence_table(const std::vector<double>& params, const std::vector<double>& gaps);

/// sup_i |rate_i - (Phi_i - min Phi)| over the shared grid.
double rate_gap(const DensityCurve& curve, const QuasiPotential& phi);

/// e(eps) for each eps in the list, with S built from F = -2b at phi.n.
ConvergenceTable rate_convergence(const FieldSpec& b, const std::vector<double>& eps_list, const QuasiPotential& phi,
                                  DensityOptions options = {});

// Two-state PDMP: x' = F_sigma(x), sigma switches 0 -> 1 at rate
// lambda * r01(x) and 1 -> 0 at rate lambda * r10(x).
struct PdmpSpec {
  FieldSpec f0;
  FieldSpec f1;
  FieldSpec r01;
  FieldSpec r10;
};

/// Throws VelocityVanishes or ValidationError when the PDMP is unusable on the grid.
void validate_pdmp(const PdmpSpec& p, std::size_t n);

/// The integrand r01/F0 + r10/F1 as a quadrature-ready function.
Integrand pdmp_integrand(const PdmpSpec& p);

SampledPotential pdmp_potential(const PdmpSpec& p, std::size_t n);

DensityCurve pdmp_density(const PdmpSpec& p, double lambda, std::size_t n, DensityOptions options = {});

ConvergenceTable pdmp_convergence(const PdmpSpec& p, const std::vector<double>& lambdas, const QuasiPotential& phi,
                                  DensityOptions options = {});

}  // namespace quasipot
