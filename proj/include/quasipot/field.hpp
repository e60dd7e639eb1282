#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quasipot/expression.hpp"

namespace quasipot {

using ScalarFn = std::function<double(double)>;

// A scalar function on the torus together with the resolutions of any
// sample grids it was built from. Quadrature splits cells at those knots so
// piecewise-linear inputs integrate exactly.
struct Integrand {
  ScalarFn fn;
  std::vector<std::size_t> knot_grids;
};

struct FourierSeries {
  double a0 = 0.0;
  std::vector<double> cos;  // coefficient of cos(2 pi k x), k = 1, 2, ...
  std::vector<double> sin;  // coefficient of sin(2 pi k x)
};

struct GridSamples {
  std::vector<double> samples;  // uniform on [0,1), linear interpolation
};

/// Periodic scalar field on the torus. Every form is evaluated at the
/// fractional part of x, so evaluation is 1-periodic by construction.
class FieldSpec {
 public:
  using Form = std::variant<Expression, FourierSeries, GridSamples>;

  static FieldSpec expression(std::string_view text);
  static FieldSpec fourier(FourierSeries series);
  static FieldSpec grid(std::vector<double> samples);
  static FieldSpec constant(double value);

  double operator()(double x) const;

  /// The field multiplied by a constant, in the same form.
  FieldSpec scaled(double factor) const;

  Integrand integrand() const;
  const Form& form() const noexcept { return form_; }
  std::string describe() const;

 private:
  explicit FieldSpec(Form form) : form_(std::move(form)) {}
  Form form_;
};

/// Wraps x into [0,1).
double wrap_unit(double x) noexcept;

/// Clockwise distance from a to b on the torus, in [0,1).
double clockwise(double a, double b) noexcept;

// Cumulative integrals of the positive part F+ = max(F,0) and negative part
// F- = max(-F,0) on a uniform grid. Cells containing a sign change are split
// at the root before Simpson is applied, so the kinks of F+ and F- do not
// degrade accuracy.
class FieldParts {
 public:
  FieldParts(const Integrand& f, std::size_t n);

  /// Integral over [0,t] of F+ (resp. F-) for any real t, using periodicity.
  double positive_to(double t) const;
  double negative_to(double t) const;
  double signed_to(double t) const { return positive_to(t) - negative_to(t); }

  double positive_mass() const noexcept { return pos_.back(); }
  double negative_mass() const noexcept { return neg_.back(); }

  std::span<const double> positive_cumulative() const noexcept { return pos_; }
  std::span<const double> negative_cumulative() const noexcept { return neg_; }
  std::size_t n() const noexcept { return n_; }

 private:
  double partial(double t, bool positive) const;

  Integrand f_;
  std::size_t n_;
  std::vector<double> pos_;
  std::vector<double> neg_;
};

/// Integral of f over [a,b] by Simpson, splitting at grid knots.
double integrate_piece(const Integrand& f, double a, double b);

struct PartsPiece {
  double positive = 0.0;
  double negative = 0.0;
};

/// Integrals of F+ and F- over [a,b], splitting at knots and sign changes.
PartsPiece integrate_parts_piece(const Integrand& f, double a, double b);

// Grid samples of S(x) = integral_0^x F on [0,1] together with the samples of
// F itself. Off the base period S extends by S(x+1) = S(x) + drift.
class SampledPotential {
 public:
  SampledPotential(std::vector<double> s_values, std::vector<double> f_values,
                   Integrand integrand);

  std::size_t n() const noexcept { return s_.size() - 1; }
  double drift() const noexcept { return s_.back(); }
  std::span<const double> s_values() const noexcept { return s_; }
  /// n+1 samples F(i/n), i = 0..n.
  std::span<const double> f_values() const noexcept { return f_; }

  /// S at grid index k for any integer k, via the drift extension rule.
  double extended(std::ptrdiff_t k) const noexcept;
  double x(std::ptrdiff_t k) const noexcept { return static_cast<double>(k) / static_cast<double>(n()); }

  /// max |F| over the grid (the Lipschitz scale K).
  double field_max_abs() const noexcept { return kmax_; }

  const Integrand& integrand() const noexcept { return integrand_; }
  const FieldParts& parts() const noexcept { return *parts_; }

  /// Continuous S(t) for real t, from the positive/negative part integrals.
  double s_at(double t) const { return parts_->signed_to(t); }

 private:
  std::vector<double> s_;
  std::vector<double> f_;
  Integrand integrand_;
  std::shared_ptr<const FieldParts> parts_;
  double kmax_ = 0.0;
};

SampledPotential integrate_potential(const FieldSpec& f, std::size_t n);
SampledPotential integrate_potential(const Integrand& f, std::size_t n);

enum class ComponentKind { Stable, TotallyUnstable, Neither };

const char* to_string(ComponentKind kind);

// A connected component of {F = 0}. `lo` lies in [0,1); `hi` >= lo and may
// exceed 1 when the component wraps through the origin.
struct ZeroComponent {
  double lo = 0.0;
  double hi = 0.0;
  ComponentKind kind = ComponentKind::Neither;

  double representative() const noexcept { return wrap_unit(0.5 * (lo + hi)); }
  double width() const noexcept { return hi - lo; }
  bool contains(double x, double slack = 0.0) const noexcept;
};

struct ComponentChain {
  std::vector<ZeroComponent> stable;    // K_1..K_l, clockwise from the origin
  std::vector<ZeroComponent> unstable;  // A_i lies between K_i and K_{i+1}
  std::vector<ZeroComponent> all;       // every component, including Neither

  std::size_t size() const noexcept { return stable.size(); }
  bool empty() const noexcept { return stable.empty(); }
};

struct ComponentOptions {
  std::optional<double> tau_zero;  // default 1e-9 * max|F| over the grid
  bool strict = false;             // throw ClassificationAmbiguous on Neither
};

ComponentChain find_components(const FieldSpec& f, std::size_t n, ComponentOptions options = {});
ComponentChain find_components(const SampledPotential& s, ComponentOptions options = {});
/// Core routine: `f_values` holds F(i/n) for i = 0..n-1 (a trailing F(1) is ignored
/// when the span has n+1 entries); `fn` refines sign-change roots.
ComponentChain find_components(std::span<const double> f_values, std::size_t n, const ScalarFn& fn,
                               ComponentOptions options = {});

}  // namespace quasipot
