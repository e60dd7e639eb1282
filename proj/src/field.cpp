#include "quasipot/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "quasipot/error.hpp"

namespace quasipot {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double simpson(double fa, double fm, double fb, double width) {
  return width / 6.0 * (fa + 4.0 * fm + fb);
}

double checked(double v, double x) {
  if (!std::isfinite(v)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "non-finite field value %g at x = %.17g", v, x);
    throw Error(ErrorKind::NonFinite, buf);
  }
  return v;
}

// Knots j/m strictly inside (a,b), sorted, for every knot grid m.
std::vector<double> knots_between(const Integrand& f, double a, double b) {
  std::vector<double> out;
  for (std::size_t m : f.knot_grids) {
    const double md = static_cast<double>(m);
    for (double j = std::floor(a * md) + 1.0; j / md < b; j += 1.0) {
      const double t = j / md;
      if (t > a) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double bisect_root(const ScalarFn& fn, double a, double b, double fa) {
  for (int it = 0; it < 200 && b - a > 0.0; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = fn(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

int sign_of(double v, double tau) { return v > tau ? 1 : (v < -tau ? -1 : 0); }

}  // namespace

double wrap_unit(double x) noexcept {
  double t = x - std::floor(x);
  if (t >= 1.0) t = 0.0;
  return t;
}

double clockwise(double a, double b) noexcept { return wrap_unit(b - a); }

// ---------------------------------------------------------------------------
// FieldSpec

FieldSpec FieldSpec::expression(std::string_view text) { return FieldSpec(Expression::parse(text)); }

FieldSpec FieldSpec::fourier(FourierSeries series) { return FieldSpec(std::move(series)); }

FieldSpec FieldSpec::grid(std::vector<double> samples) {
  if (samples.size() < 8)
    throw Error(ErrorKind::Validation, "grid field needs at least 8 samples, got " +
                                           std::to_string(samples.size()));
  for (double v : samples)
    if (!std::isfinite(v)) throw Error(ErrorKind::Validation, "grid field contains a non-finite sample");
  return FieldSpec(GridSamples{std::move(samples)});
}

FieldSpec FieldSpec::constant(double value) { return FieldSpec(FourierSeries{value, {}, {}}); }

double FieldSpec::operator()(double x) const {
  const double t = wrap_unit(x);
  return std::visit(
      [t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Expression>) {
          return f(t);
        } else if constexpr (std::is_same_v<T, FourierSeries>) {
          double v = f.a0;
          for (std::size_t k = 0; k < f.cos.size(); ++k) v += f.cos[k] * std::cos(kTwoPi * double(k + 1) * t);
          for (std::size_t k = 0; k < f.sin.size(); ++k) v += f.sin[k] * std::sin(kTwoPi * double(k + 1) * t);
          return v;
        } else {
          const std::size_t m = f.samples.size();
          const double u = t * static_cast<double>(m);
          std::size_t j = static_cast<std::size_t>(u);
          if (j >= m) j = m - 1;
          const double w = u - static_cast<double>(j);
          return (1.0 - w) * f.samples[j] + w * f.samples[(j + 1) % m];
        }
      },
      form_);
}

FieldSpec FieldSpec::scaled(double factor) const {
  return std::visit(
      [factor](const auto& f) -> FieldSpec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Expression>) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", factor);
          return FieldSpec::expression(std::string(buf) + "*(" + f.text() + ")");
        } else if constexpr (std::is_same_v<T, FourierSeries>) {
          FourierSeries g = f;
          g.a0 *= factor;
          for (double& c : g.cos) c *= factor;
          for (double& s : g.sin) s *= factor;
          return FieldSpec::fourier(std::move(g));
        } else {
          std::vector<double> s = f.samples;
          for (double& v : s) v *= factor;
          return FieldSpec::grid(std::move(s));
        }
      },
      form_);
}

Integrand FieldSpec::integrand() const {
  Integrand out;
  FieldSpec self = *this;
  out.fn = [self](double x) { return self(x); };
  if (const auto* g = std::get_if<GridSamples>(&form_)) out.knot_grids.push_back(g->samples.size());
  return out;
}

std::string FieldSpec::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Expression>) {
          return f.text();
        } else if constexpr (std::is_same_v<T, FourierSeries>) {
          return "fourier(" + std::to_string(std::max(f.cos.size(), f.sin.size())) + " modes)";
        } else {
          return "grid(" + std::to_string(f.samples.size()) + " samples)";
        }
      },
      form_);
}

// ---------------------------------------------------------------------------
// Quadrature

double integrate_piece(const Integrand& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  double left = a;
  auto piece = [&](double p, double q) {
    total += simpson(checked(f.fn(p), p), checked(f.fn(0.5 * (p + q)), 0.5 * (p + q)),
                     checked(f.fn(q), q), q - p);
  };
  for (double k : knots_between(f, a, b)) {
    piece(left, k);
    left = k;
  }
  piece(left, b);
  return total;
}

PartsPiece integrate_parts_piece(const Integrand& f, double a, double b) {
  PartsPiece out;
  if (!(b > a)) return out;
  auto signed_piece = [&](double p, double q, double fp, double fq) {
    const double m = 0.5 * (p + q);
    const double fm = checked(f.fn(m), m);
    const double v = simpson(fp, fm, fq, q - p);
    if (v >= 0.0) out.positive += v;
    else out.negative -= v;
  };
  auto smooth_piece = [&](double p, double q) {
    const double fp = checked(f.fn(p), p);
    const double fq = checked(f.fn(q), q);
    const double m = 0.5 * (p + q);
    const double fm = checked(f.fn(m), m);
    std::vector<double> cuts{p};
    std::vector<double> vals{fp};
    if ((fp < 0.0 && fm > 0.0) || (fp > 0.0 && fm < 0.0)) {
      cuts.push_back(bisect_root(f.fn, p, m, fp));
      vals.push_back(0.0);
    }
    cuts.push_back(m);
    vals.push_back(fm);
    if ((fm < 0.0 && fq > 0.0) || (fm > 0.0 && fq < 0.0)) {
      cuts.push_back(bisect_root(f.fn, m, q, fm));
      vals.push_back(0.0);
    }
    cuts.push_back(q);
    vals.push_back(fq);
    if (cuts.size() == 3) {
      const double v = simpson(fp, fm, fq, q - p);
      // No interior sign change among the three samples: one-signed piece.
      if (fp >= 0.0 && fm >= 0.0 && fq >= 0.0) out.positive += v;
      else if (fp <= 0.0 && fm <= 0.0 && fq <= 0.0) out.negative -= v;
      else if (v >= 0.0) out.positive += v;
      else out.negative -= v;
      return;
    }
    // Merge the midpoint back in: integrate between consecutive sign cuts.
    std::vector<double> edges{p};
    std::vector<double> edge_vals{fp};
    for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
      if (vals[k] == 0.0) {
        edges.push_back(cuts[k]);
        edge_vals.push_back(0.0);
      }
    }
    edges.push_back(q);
    edge_vals.push_back(fq);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
      signed_piece(edges[k], edges[k + 1], edge_vals[k], edge_vals[k + 1]);
  };
  double left = a;
  for (double k : knots_between(f, a, b)) {
    smooth_piece(left, k);
    left = k;
  }
  smooth_piece(left, b);
  return out;
}

FieldParts::FieldParts(const Integrand& f, std::size_t n) : f_(f), n_(n), pos_(n + 1, 0.0), neg_(n + 1, 0.0) {
  if (n < 8) throw Error(ErrorKind::Validation, "grid size must be at least 8");
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PartsPiece p = integrate_parts_piece(f_, double(i) / nd, double(i + 1) / nd);
    pos_[i + 1] = pos_[i] + p.positive;
    neg_[i + 1] = neg_[i] + p.negative;
  }
}

double FieldParts::partial(double t, bool positive) const {
  const double periods = std::floor(t);
  const double frac = t - periods;
  const double nd = static_cast<double>(n_);
  std::size_t j = static_cast<std::size_t>(frac * nd);
  if (j >= n_) j = n_ - 1;
  const double start = double(j) / nd;
  const auto& cum = positive ? pos_ : neg_;
  double v = cum[j];
  if (frac > start) {
    const PartsPiece p = integrate_parts_piece(f_, start, frac);
    v += positive ? p.positive : p.negative;
  }
  return periods * cum.back() + v;
}

double FieldParts::positive_to(double t) const { return partial(t, true); }
double FieldParts::negative_to(double t) const { return partial(t, false); }

// ---------------------------------------------------------------------------
// SampledPotential

SampledPotential::SampledPotential(std::vector<double> s_values, std::vector<double> f_values,
                                   Integrand integrand)
    : s_(std::move(s_values)), f_(std::move(f_values)), integrand_(std::move(integrand)) {
  if (s_.size() < 9) throw Error(ErrorKind::Validation, "grid size must be at least 8");
  if (f_.size() != s_.size()) throw Error(ErrorKind::Validation, "field and potential sample counts differ");
  if (s_.front() != 0.0) throw Error(ErrorKind::Validation, "potential must vanish at the origin");
  for (double v : f_) kmax_ = std::max(kmax_, std::fabs(v));
  parts_ = std::make_shared<const FieldParts>(integrand_, n());
}

double SampledPotential::extended(std::ptrdiff_t k) const noexcept {
  const auto nn = static_cast<std::ptrdiff_t>(n());
  std::ptrdiff_t q = k / nn;
  std::ptrdiff_t r = k % nn;
  if (r < 0) {
    r += nn;
    --q;
  }
  // k == n*q exactly with q == 1 keeps the sample s[n] itself.
  if (r == 0 && q == 1) return s_.back();
  return s_[static_cast<std::size_t>(r)] + static_cast<double>(q) * drift();
}

SampledPotential integrate_potential(const Integrand& f, std::size_t n) {
  if (n < 8) throw Error(ErrorKind::Validation, "grid size must be at least 8");
  const double nd = static_cast<double>(n);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = double(i) / nd;
    fv[i] = checked(f.fn(x), x);
  }
  std::vector<double> s(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = double(i) / nd;
    const double b = double(i + 1) / nd;
    double inc;
    if (f.knot_grids.empty()) {
      const double m = 0.5 * (a + b);
      inc = simpson(fv[i], checked(f.fn(m), m), fv[i + 1], b - a);
    } else {
      inc = integrate_piece(f, a, b);
    }
    s[i + 1] = s[i] + inc;
  }
  return SampledPotential(std::move(s), std::move(fv), f);
}

SampledPotential integrate_potential(const FieldSpec& f, std::size_t n) {
  return integrate_potential(f.integrand(), n);
}

// ---------------------------------------------------------------------------
// Zero components

const char* to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Stable: return "stable";
    case ComponentKind::TotallyUnstable: return "totally_unstable";
    case ComponentKind::Neither: return "neither";
  }
  return "?";
}

bool ZeroComponent::contains(double x, double slack) const noexcept {
  return clockwise(lo - slack, x) <= width() + 2.0 * slack;
}

ComponentChain find_components(std::span<const double> f_values, std::size_t n, const ScalarFn& fn,
                               ComponentOptions options) {
  if (n < 8) throw Error(ErrorKind::Validation, "grid size must be at least 8");
  if (f_values.size() < n) throw Error(ErrorKind::Validation, "too few field samples");
  const double nd = static_cast<double>(n);

  double kmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) kmax = std::max(kmax, std::fabs(f_values[j]));
  const double tau = options.tau_zero.value_or(1e-9 * kmax);

  auto sample = [&](std::ptrdiff_t k) {
    const auto nn = static_cast<std::ptrdiff_t>(n);
    return f_values[static_cast<std::size_t>(((k % nn) + nn) % nn)];
  };
  auto sgn = [&](std::ptrdiff_t k) { return sign_of(sample(k), tau); };

  ComponentChain chain;
  std::ptrdiff_t start = -1;
  for (std::size_t j = 0; j < n; ++j)
    if (sgn(static_cast<std::ptrdiff_t>(j)) != 0) {
      start = static_cast<std::ptrdiff_t>(j);
      break;
    }
  if (start < 0) {
    chain.all.push_back({0.0, 1.0, ComponentKind::Neither});
    if (options.strict)
      throw Error(ErrorKind::ClassificationAmbiguous, "field vanishes identically on the grid");
    return chain;
  }

  struct Event {
    double lo, hi;
    std::ptrdiff_t left, right;
  };
  std::vector<Event> events;
  const std::ptrdiff_t stop = start + static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t k = start; k < stop;) {
    if (sgn(k) == 0) {
      std::ptrdiff_t end = k;
      while (sgn(end + 1) == 0) ++end;
      events.push_back({double(k) / nd, double(end) / nd, k - 1, end + 1});
      k = end + 1;
      continue;
    }
    if (sgn(k + 1) != 0 && sgn(k + 1) != sgn(k)) {
      const double a = double(k) / nd;
      const double b = double(k + 1) / nd;
      double r;
      if (fn) {
        r = bisect_root(fn, a, b, sample(k));
      } else {
        const double fa = sample(k), fb = sample(k + 1);
        r = a + (b - a) * fa / (fa - fb);
      }
      events.push_back({r, r, k, k + 1});
    }
    ++k;
  }

  // Components closer than two grid cells are merged.
  const double gap = 2.0 / nd;
  std::vector<Event> merged;
  for (const Event& e : events) {
    if (!merged.empty() && e.lo - merged.back().hi < gap) {
      merged.back().hi = e.hi;
      merged.back().right = e.right;
    } else {
      merged.push_back(e);
    }
  }
  if (merged.size() > 1 && (merged.front().lo + 1.0) - merged.back().hi < gap) {
    Event& last = merged.back();
    last.hi = merged.front().hi + 1.0;
    last.right = merged.front().right + static_cast<std::ptrdiff_t>(n);
    merged.erase(merged.begin());
  }

  for (const Event& e : merged) {
    ZeroComponent c;
    c.lo = wrap_unit(e.lo);
    c.hi = c.lo + (e.hi - e.lo);
    const int l = sgn(e.left), r = sgn(e.right);
    if (l < 0 && r > 0) c.kind = ComponentKind::Stable;
    else if (l > 0 && r < 0) c.kind = ComponentKind::TotallyUnstable;
    else c.kind = ComponentKind::Neither;
    chain.all.push_back(c);
  }
  std::sort(chain.all.begin(), chain.all.end(),
            [](const ZeroComponent& a, const ZeroComponent& b) { return a.lo < b.lo; });

  std::vector<const ZeroComponent*> ordered;
  for (const ZeroComponent& c : chain.all) {
    if (c.kind == ComponentKind::Neither) {
      if (options.strict) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "component [%.6g, %.6g] is neither stable nor totally unstable",
                      c.lo, c.hi);
        throw Error(ErrorKind::ClassificationAmbiguous, buf);
      }
      continue;
    }
    ordered.push_back(&c);
  }
  if (ordered.empty()) return chain;

  // Rotate so the chain starts with the first stable component.
  std::size_t first = 0;
  while (first < ordered.size() && ordered[first]->kind != ComponentKind::Stable) ++first;
  if (first == ordered.size())
    throw Error(ErrorKind::ClassificationAmbiguous, "no stable component between unstable ones");
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    const ZeroComponent& c = *ordered[(first + k) % ordered.size()];
    const ComponentKind expect = (k % 2 == 0) ? ComponentKind::Stable : ComponentKind::TotallyUnstable;
    if (c.kind != expect)
      throw Error(ErrorKind::ClassificationAmbiguous, "stable and unstable components do not alternate");
    (expect == ComponentKind::Stable ? chain.stable : chain.unstable).push_back(c);
  }
  if (chain.stable.size() != chain.unstable.size())
    throw Error(ErrorKind::ClassificationAmbiguous, "stable and unstable components do not alternate");
  return chain;
}

ComponentChain find_components(const FieldSpec& f, std::size_t n, ComponentOptions options) {
  std::vector<double> samples(n);
  for (std::size_t j = 0; j < n; ++j) samples[j] = f(double(j) / double(n));
  return find_components(samples, n, [&f](double x) { return f(x); }, options);
}

ComponentChain find_components(const SampledPotential& s, ComponentOptions options) {
  return find_components(s.f_values(), s.n(), s.integrand().fn, options);
}

}  // namespace quasipot
