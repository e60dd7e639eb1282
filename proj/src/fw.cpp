#include "quasipot/fw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "quasipot/error.hpp"
#include "quasipot/parallel.hpp"

namespace quasipot {

namespace {

std::size_t mod(std::ptrdiff_t k, std::size_t l) {
  const auto ll = static_cast<std::ptrdiff_t>(l);
  return static_cast<std::size_t>(((k % ll) + ll) % ll);
}

std::vector<double> representatives(const std::vector<ZeroComponent>& comps) {
  std::vector<double> out;
  out.reserve(comps.size());
  for (const ZeroComponent& c : comps) out.push_back(c.representative());
  return out;
}

}  // namespace

VCosts v_costs(const SampledPotential& s, double x, double y) {
  VCosts out;
  x = wrap_unit(x);
  y = wrap_unit(y);
  if (x == y) return out;
  const FieldParts& parts = s.parts();
  const double cw = clockwise(x, y);
  const double acw = clockwise(y, x);
  const double p0 = parts.positive_to(x), n0 = parts.negative_to(x);
  const double p1 = parts.positive_to(x + cw), n1 = parts.negative_to(x + cw);
  out.v_plus = std::max(0.0, p1 - p0);
  out.v_minus = std::max(0.0, n0 - parts.negative_to(x - acw));
  out.v = std::min(out.v_plus, out.v_minus);
  out.delta_s = (p1 - n1) - (p0 - n0);
  return out;
}

double fw_tolerance(const SampledPotential& s) {
  const FieldParts& p = s.parts();
  return 1e-9 * std::max(1.0, p.positive_mass() + p.negative_mass());
}

std::vector<std::vector<double>> component_costs(const SampledPotential& s, const ComponentChain& chain) {
  const std::vector<double> x = representatives(chain.stable);
  const std::size_t l = x.size();
  std::vector<std::vector<double>> c(l, std::vector<double>(l, 0.0));
  for (std::size_t m = 0; m < l; ++m)
    for (std::size_t k = 0; k < l; ++k)
      if (m != k) c[m][k] = v_costs(s, x[m], x[k]).v;
  return c;
}

double tree_cost(const std::vector<std::vector<double>>& costs, const RootedTree& tree) {
  double total = 0.0;
  for (std::size_t m = 0; m < tree.parent.size(); ++m)
    if (tree.parent[m] >= 0) total += costs[m][static_cast<std::size_t>(tree.parent[m])];
  return total;
}

bool is_arborescence(const RootedTree& tree) {
  const std::size_t l = tree.parent.size();
  if (tree.root >= l || tree.parent[tree.root] != -1) return false;
  for (std::size_t v = 0; v < l; ++v) {
    std::size_t cur = v;
    std::size_t steps = 0;
    while (cur != tree.root) {
      const std::ptrdiff_t p = tree.parent[cur];
      if (p < 0 || static_cast<std::size_t>(p) >= l || static_cast<std::size_t>(p) == cur) return false;
      cur = static_cast<std::size_t>(p);
      if (++steps > l) return false;
    }
  }
  return true;
}

RootedTree comb_tree(std::size_t l, std::size_t i, std::size_t j) {
  RootedTree t;
  t.root = i;
  t.parent.assign(l, -1);
  const std::size_t arm = mod(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i), l);
  for (std::size_t m = 0; m < l; ++m) {
    if (m == i) continue;
    const std::size_t offset = mod(static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(i), l);
    const std::ptrdiff_t step = offset <= arm ? -1 : 1;
    t.parent[m] = static_cast<std::ptrdiff_t>(mod(static_cast<std::ptrdiff_t>(m) + step, l));
  }
  return t;
}

std::optional<std::size_t> comb_index(const RootedTree& tree) {
  const std::size_t l = tree.parent.size();
  for (std::size_t j = 0; j < l; ++j)
    if (comb_tree(l, tree.root, j).parent == tree.parent) return j;
  return std::nullopt;
}

StableValue w_stable_bruteforce(const SampledPotential& s, const ComponentChain& chain, std::size_t i,
                                unsigned threads) {
  const std::size_t l = chain.size();
  if (l == 0) throw Error(ErrorKind::Validation, "no stable components");
  if (l > kMaxBruteforceComponents)
    throw Error(ErrorKind::TooManyComponents, "exhaustive tree search supports at most 8 stable components, got " +
                                                  std::to_string(l));
  if (i >= l) throw Error(ErrorKind::Validation, "root index out of range");
  StableValue out;
  out.tree.root = i;
  out.tree.parent.assign(l, -1);
  if (l == 1) return out;

  const auto costs = component_costs(s, chain);
  std::vector<std::size_t> free;
  for (std::size_t v = 0; v < l; ++v)
    if (v != i) free.push_back(v);
  // Each free vertex picks its parent among the l-1 other vertices.
  auto target = [&](std::size_t v, std::size_t choice) { return choice >= v ? choice + 1 : choice; };

  const std::size_t radix = l - 1;
  std::size_t per_first = 1;
  for (std::size_t k = 1; k < free.size(); ++k) per_first *= radix;

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<std::ptrdiff_t> parent;
  };
  std::vector<Best> best(radix);

  parallel_chunks(radix, threads, [&](std::size_t begin, std::size_t end, unsigned) {
    RootedTree t;
    t.root = i;
    t.parent.assign(l, -1);
    std::vector<std::size_t> digit(free.size(), 0);
    for (std::size_t first = begin; first < end; ++first) {
      Best& b = best[first];
      std::fill(digit.begin(), digit.end(), 0);
      digit[0] = first;
      for (std::size_t count = 0; count < per_first; ++count) {
        for (std::size_t k = 0; k < free.size(); ++k)
          t.parent[free[k]] = static_cast<std::ptrdiff_t>(target(free[k], digit[k]));
        if (is_arborescence(t)) {
          const double c = tree_cost(costs, t);
          if (c < b.cost) {
            b.cost = c;
            b.parent = t.parent;
          }
        }
        for (std::size_t k = free.size(); k-- > 1;) {
          if (++digit[k] < radix) break;
          digit[k] = 0;
        }
      }
    }
  });

  double value = std::numeric_limits<double>::infinity();
  for (const Best& b : best) {
    if (b.cost < value) {
      value = b.cost;
      out.tree.parent = b.parent;
    }
  }
  out.value = value;
  return out;
}

FastValue w_stable_fast(const SampledPotential& s, const ComponentChain& chain, std::size_t i) {
  const std::size_t l = chain.size();
  if (l == 0) throw Error(ErrorKind::Validation, "no stable components");
  if (i >= l) throw Error(ErrorKind::Validation, "root index out of range");
  FastValue out;
  const std::vector<double> x = representatives(chain.stable);
  const std::vector<double> a = representatives(chain.unstable);
  out.t.resize(l);
  for (std::size_t j = 0; j < l; ++j) {
    const double vm = j == i ? 0.0 : v_costs(s, x[j], x[i]).v_minus;
    const std::size_t j1 = (j + 1) % l;
    const double vp = j1 == i ? 0.0 : v_costs(s, x[j1], x[i]).v_plus;
    out.t[j] = vm + vp;
  }
  out.value = *std::min_element(out.t.begin(), out.t.end());

  const double tol = fw_tolerance(s);
  const double rise = continuous_rise(s, chain, x[i]);
  bool found = false;
  for (std::size_t j = 0; j < l; ++j) {
    const double ds = s.s_at(x[i] + clockwise(x[i], a[j])) - s.s_at(x[i]);
    if (std::fabs(ds - rise) <= tol) {
      out.J = j;
      found = true;
      break;
    }
  }
  if (!found)
    throw Error(ErrorKind::NumericalAssertion,
                "no unstable component attains the window maximum from K_" + std::to_string(i));
  if (std::fabs(out.t[out.J] - out.value) > tol)
    throw Error(ErrorKind::NumericalAssertion, "window-maximum criterion selects a non-minimal t(i,J)");
  out.tree = comb_tree(l, i, out.J);
  return out;
}

const char* to_string(PointCase c) {
  switch (c) {
    case PointCase::OnStable: return "on_stable";
    case PointCase::Case1: return "case1";
    case PointCase::Case2: return "case2";
    case PointCase::Case3: return "case3";
    case PointCase::Case4: return "case4";
  }
  return "?";
}

double continuous_rise(const SampledPotential& s, const ComponentChain& chain, double t) {
  const double base = s.s_at(t);
  double best = std::max(0.0, s.drift());
  for (const ZeroComponent& a : chain.unstable) {
    const double ya = t + clockwise(wrap_unit(t), a.representative());
    best = std::max(best, s.s_at(ya) - base);
  }
  return best;
}

PointValue w_point(const SampledPotential& s, const ComponentChain& chain, const std::vector<double>& w_stable,
                   double x) {
  const std::size_t l = chain.size();
  if (l == 0) throw Error(ErrorKind::Validation, "no stable components");
  x = wrap_unit(x);
  const double tol = fw_tolerance(s);
  const std::vector<double> reps = representatives(chain.stable);

  PointValue out;
  for (std::size_t r = 0; r < l; ++r) {
    if (chain.stable[r].contains(x)) {
      out.value = out.full = w_stable[r];
      out.neighbor = r;
      return out;
    }
  }

  // Full minimum over every stable component and both directions.
  out.full = std::numeric_limits<double>::infinity();
  VCosts arg_costs;
  for (std::size_t r = 0; r < l; ++r) {
    const VCosts c = v_costs(s, reps[r], x);
    const double v = w_stable[r] + c.v;
    if (v < out.full) {
      out.full = v;
      arg_costs = c;
    }
  }
  out.tie = std::fabs(arg_costs.v_plus - arg_costs.v_minus) <= tol;

  // K_i < x < K_{i+1}.
  std::size_t i = 0;
  for (std::size_t r = 0; r < l; ++r) {
    const double next = l == 1 ? 1.0 : clockwise(reps[r], reps[(r + 1) % l]);
    if (clockwise(reps[r], x) < next) {
      i = r;
      break;
    }
  }
  const std::size_t i1 = (i + 1) % l;
  const double xi = reps[i];
  const double xbar = xi + clockwise(xi, x);
  const double xbar1 = l == 1 ? xi + 1.0 : xi + clockwise(xi, reps[i1]);
  auto window_top = [&](double t) { return s.s_at(t) + continuous_rise(s, chain, t); };
  const double m_i = window_top(xi), m_x = window_top(xbar), m_i1 = window_top(xbar1);

  const ZeroComponent& a = chain.unstable[i];
  const double to_x = clockwise(xi, x);
  const double slack = 1e-12;
  const bool left = to_x <= clockwise(xi, wrap_unit(a.hi)) + slack;
  const bool right = to_x >= clockwise(xi, a.lo) - slack;

  const double via_plus = w_stable[i] + v_costs(s, xi, x).v_plus;
  const double via_minus = w_stable[i1] + v_costs(s, reps[i1], x).v_minus;

  auto accept = [&](PointCase label, bool plus) {
    const double v = plus ? via_plus : via_minus;
    if (std::fabs(v - out.full) > tol) return false;
    out.value = v;
    out.label = label;
    out.neighbor = plus ? i : i1;
    out.direction = plus ? 1 : -1;
    return true;
  };
  if (left) {
    if (std::fabs(m_i - m_x) <= tol && accept(PointCase::Case1, true)) return out;
    if (m_i < m_x - tol && accept(PointCase::Case2, false)) return out;
  }
  if (right) {
    if (std::fabs(m_i1 - m_x) <= tol && accept(PointCase::Case3, false)) return out;
    if (m_i1 < m_x - tol && accept(PointCase::Case4, true)) return out;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "no case shortcut matches W(%.9g) = %.12g (via K_i: %.12g, via K_i+1: %.12g); "
                "the grid may not resolve the zero set",
                x, out.full, via_plus, via_minus);
  throw Error(ErrorKind::CaseClassificationFailed, buf);
}

FwSolution solve_fw(const SampledPotential& s, const ComponentChain& chain, FwOptions options) {
  FwSolution out;
  out.n = s.n();
  const std::size_t l = chain.size();
  out.w_curve.assign(out.n + 1, 0.0);
  out.cases.assign(out.n + 1, PointCase::OnStable);
  out.neighbor.assign(out.n + 1, 0);
  out.tie.assign(out.n + 1, 0);
  if (l == 0) return out;

  for (std::size_t i = 0; i < l; ++i) {
    const FastValue f = w_stable_fast(s, chain, i);
    out.w_stable.push_back(f.value);
    out.J.push_back(f.J);
    if (options.bruteforce_check && l <= kMaxBruteforceComponents)
      out.w_bruteforce.push_back(w_stable_bruteforce(s, chain, i, options.threads).value);
  }

  const double nd = static_cast<double>(out.n);
  parallel_chunks(out.n, options.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t k = begin; k < end; ++k) {
      const PointValue p = w_point(s, chain, out.w_stable, double(k) / nd);
      out.w_curve[k] = p.value;
      out.cases[k] = p.label;
      out.neighbor[k] = p.neighbor;
      out.tie[k] = p.tie ? 1 : 0;
    }
  });
  out.w_curve[out.n] = out.w_curve[0];
  out.cases[out.n] = out.cases[0];
  out.neighbor[out.n] = out.neighbor[0];
  out.tie[out.n] = out.tie[0];
  return out;
}

QuasiPotential fw_as_quasipotential(const SampledPotential& s, const FwSolution& fw) {
  QuasiPotential q;
  q.n = fw.n;
  q.method = QuasiMethod::TreeFW;
  q.drift = s.drift();
  q.flat_value = std::min(0.0, -s.drift());
  q.tau_flat = 8.0 * s.field_max_abs() / static_cast<double>(s.n());
  const double mass = s.parts().positive_mass();
  q.phi.resize(q.n + 1);
  for (std::size_t i = 0; i <= q.n; ++i) q.phi[i] = fw.w_curve[i] - mass;
  q.is_flat.assign(q.n + 1, 0);
  for (std::size_t i = 0; i <= q.n; ++i) q.is_flat[i] = std::fabs(q.phi[i] - q.flat_value) <= q.tau_flat ? 1 : 0;
  q.flat_intervals = flat_runs(q.is_flat, q.n);
  return q;
}

IdentityReport check_identities(const SampledPotential& s, const QuasiPotential& phi, const FwSolution& fw) {
  if (phi.n != fw.n || phi.n != s.n()) throw Error(ErrorKind::Validation, "grids differ between inputs");
  IdentityReport r;
  r.positive_mass = s.parts().positive_mass();
  const std::vector<double> rise = window_rise(s);
  const double w_min = *std::min_element(fw.w_curve.begin(), fw.w_curve.end());
  const double p_min = phi.min();
  double sum = 0.0;
  for (std::size_t i = 0; i < fw.n; ++i) {
    const double c = fw.w_curve[i] + rise[i];
    sum += c;
    r.rise_gap = std::max(r.rise_gap, std::fabs(c - r.positive_mass));
    r.equivalence_gap = std::max(r.equivalence_gap, std::fabs((fw.w_curve[i] - w_min) - (phi.phi[i] - p_min)));
  }
  r.rise_constant = sum / static_cast<double>(fw.n);
  return r;
}

}  // namespace quasipot
