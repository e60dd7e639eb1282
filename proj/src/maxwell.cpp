#include "quasipot/maxwell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quasipot/error.hpp"
#include "quasipot/window.hpp"

namespace quasipot {

namespace {

double default_tau_flat(const SampledPotential& s, const PhiOptions& o) {
  return o.tau_flat.value_or(8.0 * s.field_max_abs() / static_cast<double>(s.n()));
}

void finalize(QuasiPotential& q, double tau) {
  q.tau_flat = tau;
  q.phi[q.n] = q.phi[0];
  q.is_flat.assign(q.n + 1, 0);
  for (std::size_t i = 0; i <= q.n; ++i) q.is_flat[i] = std::fabs(q.phi[i] - q.flat_value) <= tau ? 1 : 0;
  q.flat_intervals = flat_runs(q.is_flat, q.n);
}

std::vector<double> extended_samples(const SampledPotential& s) {
  const auto n = static_cast<std::ptrdiff_t>(s.n());
  std::vector<double> e(static_cast<std::size_t>(2 * n + 1));
  for (std::ptrdiff_t k = 0; k <= 2 * n; ++k) e[static_cast<std::size_t>(k)] = s.extended(k);
  return e;
}

// A drift this small relative to the summed increments is rounding noise.
bool drift_negligible(const SampledPotential& s) {
  double total = 0.0;
  const auto v = s.s_values();
  for (std::size_t i = 1; i < v.size(); ++i) total += std::fabs(v[i] - v[i - 1]);
  return std::fabs(s.drift()) <= 64.0 * std::numeric_limits<double>::epsilon() * total;
}

int monotone_direction(const SampledPotential& s) {
  bool up = true, down = true;
  const auto v = s.s_values();
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) up = false;
    if (v[i] > v[i - 1]) down = false;
  }
  return up ? 1 : (down ? -1 : 0);
}

std::size_t wrap_index(std::ptrdiff_t k, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((k % nn) + nn) % nn);
}

}  // namespace

const char* to_string(QuasiMethod method) {
  switch (method) {
    case QuasiMethod::DirectWindow: return "direct_window";
    case QuasiMethod::Constructive: return "constructive";
    case QuasiMethod::TreeFW: return "tree_fw";
    case QuasiMethod::SplitParts: return "split_parts";
  }
  return "?";
}

double QuasiPotential::max() const { return *std::max_element(phi.begin(), phi.end()); }
double QuasiPotential::min() const { return *std::min_element(phi.begin(), phi.end()); }

std::vector<FlatInterval> flat_runs(const std::vector<std::uint8_t>& flags, std::size_t n) {
  std::vector<FlatInterval> out;
  const double nd = static_cast<double>(n);
  struct Run {
    std::size_t a, b;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < n;) {
    if (!flags[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && flags[j + 1]) ++j;
    runs.push_back({i, j});
    i = j + 1;
  }
  if (runs.size() == 1 && runs[0].a == 0 && runs[0].b == n - 1) return {{0.0, 1.0}};
  if (runs.size() > 1 && runs.front().a == 0 && runs.back().b == n - 1) {
    runs.back().b = runs.front().b + n;
    runs.erase(runs.begin());
  }
  for (const Run& r : runs) out.push_back({double(r.a) / nd, double(r.b) / nd});
  return out;
}

WindowMax window_max(const SampledPotential& s) {
  const std::vector<double> e = extended_samples(s);
  const auto arg = sliding_window_argmax(e, s.n());
  WindowMax out;
  out.value.resize(arg.size());
  out.argmax.resize(arg.size());
  for (std::size_t i = 0; i < arg.size(); ++i) {
    out.value[i] = e[arg[i]];
    out.argmax[i] = static_cast<std::ptrdiff_t>(arg[i]);
  }
  return out;
}

std::vector<double> window_rise(const SampledPotential& s) {
  const WindowMax w = window_max(s);
  std::vector<double> rise(w.value.size());
  const auto v = s.s_values();
  for (std::size_t i = 0; i < rise.size(); ++i) rise[i] = w.value[i] - v[i];
  rise.back() = rise.front();
  return rise;
}

QuasiPotential phi_direct(const SampledPotential& s, PhiOptions options) {
  QuasiPotential q;
  q.n = s.n();
  q.method = QuasiMethod::DirectWindow;
  q.drift = s.drift();
  q.flat_value = std::min(0.0, -s.drift());
  const WindowMax w = window_max(s);
  const auto v = s.s_values();
  q.phi.resize(q.n + 1);
  for (std::size_t i = 0; i <= q.n; ++i) q.phi[i] = v[i] - w.value[i];
  finalize(q, default_tau_flat(s, options));
  return q;
}

QuasiPotential phi_constructive(const SampledPotential& s, const ComponentChain& chain, PhiOptions options) {
  QuasiPotential q;
  q.n = s.n();
  q.method = QuasiMethod::Constructive;
  q.drift = s.drift();
  q.flat_value = std::min(0.0, -s.drift());
  q.phi.assign(q.n + 1, 0.0);
  const double tau = default_tau_flat(s, options);
  const auto v = s.s_values();

  if (const int dir = monotone_direction(s); dir != 0) {
    std::fill(q.phi.begin(), q.phi.end(), q.flat_value);
    finalize(q, tau);
    return q;
  }
  if (drift_negligible(s)) {
    const double top = *std::max_element(v.begin(), v.end());
    for (std::size_t i = 0; i <= q.n; ++i) q.phi[i] = v[i] - top;
    finalize(q, tau);
    return q;
  }

  const auto n = static_cast<std::ptrdiff_t>(q.n);
  const bool rising = s.drift() > 0.0;
  auto E = [&s](std::ptrdiff_t k) { return s.extended(k); };

  // Local maxima of the sampled S with plateaus collapsed to one edge.
  auto maxima_between = [&](std::ptrdiff_t from, std::ptrdiff_t to) {
    std::vector<std::ptrdiff_t> out;
    for (std::ptrdiff_t k = from; k <= to;) {
      if (!(E(k - 1) < E(k))) {
        ++k;
        continue;
      }
      std::ptrdiff_t j = k;
      while (E(j + 1) == E(k)) ++j;
      if (E(j + 1) < E(k)) out.push_back(rising ? k : j);
      k = j + 1;
    }
    return out;
  };

  const std::vector<std::ptrdiff_t> first_period = maxima_between(0, 2 * n);
  if (first_period.empty()) throw Error(ErrorKind::ChainMismatch, "no local maximum of S found");
  const std::ptrdiff_t a = first_period.front();

  std::ptrdiff_t base = a;
  for (std::ptrdiff_t k = a; k <= a + n; ++k) {
    // Smallest argmax when S(1) > 0, largest in the mirrored case.
    if (rising ? E(k) > E(base) : E(k) >= E(base)) base = k;
  }

  std::vector<std::ptrdiff_t> gamma;
  for (std::ptrdiff_t g : maxima_between(base - n, base + 2 * n))
    if (g >= base && g <= base + n) gamma.push_back(g);
  std::sort(gamma.begin(), gamma.end());
  gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
  if (gamma.empty() || gamma.front() != base || gamma.back() != base + n)
    throw Error(ErrorKind::ChainMismatch, "base point is not a local maximum of the sampled S");
  const std::size_t per_period = gamma.size() - 1;
  if (per_period != chain.unstable.size())
    throw Error(ErrorKind::ChainMismatch,
                "sampled S has " + std::to_string(per_period) + " local maxima per period but the chain has " +
                    std::to_string(chain.unstable.size()) + " unstable components");

  ConstructionTrace& tr = q.trace;
  tr.active = true;
  tr.base_index = base;
  const std::size_t m = gamma.size();

  if (rising) {
    // best[j]: first index of the maximum over gamma[0..j].
    std::vector<std::size_t> best(m);
    best[0] = 0;
    for (std::size_t j = 1; j < m; ++j) best[j] = E(gamma[j]) > E(gamma[best[j - 1]]) ? j : best[j - 1];
    std::size_t j = best[m - 1];
    for (;;) {
      tr.z.push_back(gamma[j]);
      tr.levels.push_back(E(gamma[j]));
      if (j == 0) break;
      j = best[j - 1];
    }
    for (std::size_t i = 0; i + 1 < tr.z.size(); ++i) {
      const double next_level = tr.levels[i + 1];
      std::ptrdiff_t k = tr.z[i];
      while (!(E(k) < next_level)) --k;
      tr.y.push_back(k + 1);
    }
  } else {
    // best[j]: last index of the maximum over gamma[j..m-1].
    std::vector<std::size_t> best(m);
    best[m - 1] = m - 1;
    for (std::size_t j = m - 1; j-- > 0;) best[j] = E(gamma[j]) > E(gamma[best[j + 1]]) ? j : best[j + 1];
    std::size_t j = best[0];
    for (;;) {
      tr.z.push_back(gamma[j]);
      tr.levels.push_back(E(gamma[j]));
      if (j == m - 1) break;
      j = best[j + 1];
    }
    for (std::size_t i = 0; i + 1 < tr.z.size(); ++i) {
      const double next_level = tr.levels[i + 1];
      std::ptrdiff_t k = tr.z[i];
      while (!(E(k) < next_level)) ++k;
      tr.y.push_back(k - 1);
    }
  }

  // Membership in V over the extended window [base, base+n].
  std::vector<std::uint8_t> in_v(static_cast<std::size_t>(n + 1), 0);
  auto mark = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
    for (std::ptrdiff_t k = lo; k <= hi; ++k) in_v[static_cast<std::size_t>(k - base)] = 1;
    tr.flat_union.push_back({double(lo) / double(n), double(hi) / double(n)});
  };
  for (std::size_t i = 0; i < tr.y.size(); ++i) {
    if (rising) mark(tr.y[i], tr.z[i]);
    else mark(tr.z[i], tr.y[i]);
  }
  mark(tr.z.back(), tr.z.back());

  const double flat = q.flat_value;
  if (rising) {
    std::ptrdiff_t anchor = base;
    for (std::ptrdiff_t k = base; k <= base + n; ++k) {
      double value = flat;
      if (in_v[static_cast<std::size_t>(k - base)]) anchor = k;
      else value = flat + E(k) - E(anchor);
      q.phi[wrap_index(k, q.n)] = value;
    }
  } else {
    std::ptrdiff_t anchor = base + n;
    for (std::ptrdiff_t k = base + n; k >= base; --k) {
      double value = flat;
      if (in_v[static_cast<std::size_t>(k - base)]) anchor = k;
      else value = flat + E(k) - E(anchor);
      q.phi[wrap_index(k, q.n)] = value;
    }
  }
  finalize(q, tau);
  return q;
}

TildeResult phi_tilde(const SampledPotential& s, PhiOptions options) {
  const FieldParts& parts = s.parts();
  const auto pos = parts.positive_cumulative();
  const auto neg = parts.negative_cumulative();
  const std::size_t n = s.n();
  const double pm = parts.positive_mass(), nm = parts.negative_mass();

  std::vector<double> d(2 * n + 1);
  for (std::size_t k = 0; k <= 2 * n; ++k) {
    const std::size_t r = k <= n ? k : k - n;
    const double shift = k <= n ? 0.0 : 1.0;
    d[k] = (neg[r] + shift * nm) - (pos[r] + shift * pm);
  }
  const auto arg = sliding_window_argmin(d, n);

  TildeResult out;
  out.positive_mass = pm;
  QuasiPotential& q = out.tilde;
  q.n = n;
  q.method = QuasiMethod::SplitParts;
  q.drift = s.drift();
  q.flat_value = std::min(0.0, -s.drift()) + pm;
  q.phi.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) q.phi[i] = d[arg[i]] + pos[i] + pm - neg[i];
  finalize(q, default_tau_flat(s, options));

  const QuasiPotential direct = phi_direct(s, options);
  for (std::size_t i = 0; i <= n; ++i)
    out.offset_gap = std::max(out.offset_gap, std::fabs(q.phi[i] - direct.phi[i] - pm));
  return out;
}

TildeResult phi_tilde(const FieldSpec& f, std::size_t n, PhiOptions options) {
  return phi_tilde(integrate_potential(f, n), options);
}

}  // namespace quasipot
