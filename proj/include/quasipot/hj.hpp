#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quasipot/field.hpp"

namespace quasipot {

// H(x,p) = law(p, F(x)) for a declared field F.
class Hamiltonian {
 public:
  using Law = std::function<double(double p, double f)>;

  Hamiltonian(std::string name, FieldSpec field, Law law)
      : name_(std::move(name)), field_(std::move(field)), law_(std::move(law)) {}

  double operator()(double x, double p) const { return law_(p, field_(x)); }
  double at(double p, double f) const { return law_(p, f); }

  const std::string& name() const noexcept { return name_; }
  const FieldSpec& field() const noexcept { return field_; }

 private:
  std::string name_;
  FieldSpec field_;
  Law law_;
};

/// p(p - F), plus convex instances vanishing exactly at p = 0 and p = F:
/// cosh(p - F/2) - cosh(F/2) and (p - F/2)^4 - (F/2)^4. Each is checked
/// against the hypotheses on a 1024-point grid; throws HypothesisFailed.
std::vector<Hamiltonian> builtin_hamiltonians(const FieldSpec& f);

/// Builds one built-in by name: quadratic, cosh, quartic.
Hamiltonian hamiltonian_by_name(const std::string& name, const FieldSpec& f);

struct HypothesisReport {
  double tau_h = 0.0;
  double worst_zero = 0.0;       // max |H(x,0)|, |H(x,F(x))| over the grid
  double worst_convexity = 0.0;  // max of H(mid) - (H(p)+H(q))/2
  double x_zero = 0.0, x_convexity = 0.0;
  bool zeros_ok = false;     // H(x,0) = H(x,F(x)) = 0
  bool convexity_ok = false;  // midpoint convexity in p
};

/// Samples the zero condition on the grid and convexity for p in [-3K, 3K] on a subsampled grid.
HypothesisReport check_hypotheses(const Hamiltonian& h, std::size_t n);

struct Differentials {
  double left_slope = 0.0;
  double right_slope = 0.0;
  std::optional<std::pair<double, double>> sub;    // D-, as [lo, hi]
  std::optional<std::pair<double, double>> super;  // D+
};

/// One-sided second-order slopes at grid index i of a periodic grid function
/// (n values, or n+1 with the last equal to the first) and the resulting
/// sub/superdifferential estimate.
Differentials sub_super_differentials(std::span<const double> phi, std::size_t i, double tau_kink);

struct PointRecord {
  double x = 0.0;
  Differentials d;
  double sub_margin = 0.0;    // max of H over D+ (must be <= tau)
  double super_margin = 0.0;  // -min of H over D- (must be <= tau)
};

struct Violation {
  double x = 0.0;
  std::string condition;  // "subsolution" or "supersolution"
  double margin = 0.0;
};

struct ViscosityReport {
  std::string hamiltonian;
  bool verdict = false;
  double tau_h = 0.0;
  double tau_kink = 0.0;
  double worst_sub = 0.0;
  double worst_super = 0.0;
  std::size_t kinks = 0;
  std::vector<PointRecord> points;
  std::vector<Violation> violations;

  double worst_margin() const { return worst_sub > worst_super ? worst_sub : worst_super; }
};

struct ViscosityOptions {
  std::optional<double> tau_kink;  // default 10 K / n
  std::optional<double> tau_h;     // default from check_hypotheses
  std::size_t samples = 17;        // Chebyshev-Lobatto points per interval
};

/// Throws HypothesisFailed if H is not convex in p or does not vanish at p = 0 and p = F.
ViscosityReport check_viscosity(std::span<const double> phi, const Hamiltonian& h, ViscosityOptions options = {});

}  // namespace quasipot
