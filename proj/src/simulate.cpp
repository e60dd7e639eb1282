#include "quasipot/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quasipot/error.hpp"
#include "quasipot/parallel.hpp"
#include "quasipot/rng.hpp"

namespace quasipot {

namespace {

std::size_t bin_of(double x, std::size_t bins) {
  const auto j = static_cast<std::size_t>(x * static_cast<double>(bins));
  return std::min(j, bins - 1);
}

Histogram empty_histogram(std::size_t bins, std::uint64_t seed) {
  Histogram h;
  h.bins = bins;
  h.counts.assign(bins, 0);
  h.seed = seed;
  return h;
}

double resolve_burn_in(std::optional<double> burn_in, double horizon) {
  const double b = burn_in.value_or(horizon / 10.0);
  if (!(b >= 0.0) || !(b < horizon)) throw Error(ErrorKind::Validation, "burn-in must lie in [0, T)");
  return b;
}

void check_common(double horizon, std::size_t bins, std::size_t stride, std::size_t trajectories) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(ErrorKind::Validation, "horizon T must be positive");
  if (bins == 0) throw Error(ErrorKind::Validation, "need at least one histogram bin");
  if (stride == 0) throw Error(ErrorKind::Validation, "sampling stride must be positive");
  if (trajectories == 0) throw Error(ErrorKind::Validation, "need at least one trajectory");
}

// Welford accumulator, merged across trajectories in index order.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
  HoldingStats stats() const {
    return {n, mean, n > 1 ? m2 / static_cast<double>(n - 1) : 0.0};
  }
};

}  // namespace

std::vector<double> Histogram::density() const {
  std::vector<double> d(bins, 0.0);
  if (total == 0) return d;
  const double scale = static_cast<double>(bins) / static_cast<double>(total);
  for (std::size_t j = 0; j < bins; ++j) d[j] = static_cast<double>(counts[j]) * scale;
  return d;
}

void Histogram::merge(const Histogram& other) {
  if (other.bins != bins) throw Error(ErrorKind::Validation, "histogram bin counts differ");
  for (std::size_t j = 0; j < bins; ++j) counts[j] += other.counts[j];
  total += other.total;
}

Histogram simulate_diffusion(const FieldSpec& b, const DiffusionSimOptions& o) {
  check_common(o.horizon, o.bins, o.stride, o.trajectories);
  if (!(o.eps > 0.0)) throw Error(ErrorKind::Validation, "eps must be positive");
  if (!(o.dt > 0.0) || o.dt > 1e-3) throw Error(ErrorKind::Validation, "dt must lie in (0, 1e-3]");
  const double burn_in = resolve_burn_in(o.burn_in, o.horizon);
  const auto steps = static_cast<std::uint64_t>(std::llround(o.horizon / o.dt));
  const auto burn_steps = static_cast<std::uint64_t>(std::llround(burn_in / o.dt));
  const double noise = o.eps * std::sqrt(o.dt);

  std::vector<Histogram> parts(o.trajectories, empty_histogram(o.bins, o.seed));
  parallel_chunks(o.trajectories, o.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t traj = begin; traj < end; ++traj) {
      Philox4x32 rng(o.seed, traj);
      Histogram& h = parts[traj];
      double x = rng.uniform();
      for (std::uint64_t k = 1; k <= steps; ++k) {
        x += b(x) * o.dt + noise * rng.normal();
        x -= std::floor(x);
        if (x >= 1.0) x = 0.0;
        if (k > burn_steps && k % o.stride == 0) {
          ++h.counts[bin_of(x, o.bins)];
          ++h.total;
        }
      }
    }
  });
  Histogram out = empty_histogram(o.bins, o.seed);
  for (const Histogram& h : parts) out.merge(h);
  return out;
}

PdmpSimResult simulate_pdmp(const PdmpSpec& p, const PdmpSimOptions& o) {
  check_common(o.horizon, o.bins, o.stride, o.trajectories);
  if (!(o.lambda > 0.0)) throw Error(ErrorKind::Validation, "lambda must be positive");
  validate_pdmp(p, std::max<std::size_t>(o.rate_grid, 16));
  const double burn_in = resolve_burn_in(o.burn_in, o.horizon);

  double r_max = 0.0;
  for (std::size_t i = 0; i < o.rate_grid; ++i) {
    const double x = double(i) / double(o.rate_grid);
    r_max = std::max({r_max, p.r01(x), p.r10(x)});
  }
  PdmpSimResult result;
  result.bound = o.lambda * 1.1 * r_max;
  result.step = std::min(1e-3, 0.1 / (o.lambda * r_max));
  const double h = result.step;
  const double bound = result.bound;
  const auto steps = static_cast<std::uint64_t>(std::ceil(o.horizon / h));

  auto velocity = [&p](int sigma, double x) { return sigma == 0 ? p.f0(x) : p.f1(x); };
  auto flow = [&](int sigma, double x, double d) {
    const double k1 = velocity(sigma, x);
    const double k2 = velocity(sigma, x + 0.5 * d * k1);
    const double k3 = velocity(sigma, x + 0.5 * d * k2);
    const double k4 = velocity(sigma, x + d * k3);
    x += d / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
  };

  struct Part {
    Histogram hist;
    double time0 = 0.0, time_total = 0.0;
    Moments hold[2];
    std::uint64_t proposals = 0, switches = 0;
  };
  std::vector<Part> parts(o.trajectories);
  for (Part& part : parts) part.hist = empty_histogram(o.bins, o.seed);

  parallel_chunks(o.trajectories, o.threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t traj = begin; traj < end; ++traj) {
      Part& part = parts[traj];
      Philox4x32 rng(o.seed, traj);
      double x = rng.uniform();
      int sigma = rng.uniform() < 0.5 ? 0 : 1;
      double t = 0.0;
      double last_switch = -1.0;  // no sojourn is timed until the first switch after burn-in
      double next = rng.exponential() / bound;

      auto advance = [&](double to) {
        const double d = to - t;
        if (d <= 0.0) return;
        if (t >= burn_in) {
          part.time_total += d;
          if (sigma == 0) part.time0 += d;
        }
        x = flow(sigma, x, d);
        t = to;
      };

      for (std::uint64_t k = 1; k <= steps; ++k) {
        const double step_end = static_cast<double>(k) * h;
        while (next < step_end) {
          advance(next);
          ++part.proposals;
          const double rate = o.lambda * (sigma == 0 ? p.r01(x) : p.r10(x));
          if (rate > bound)
            throw Error(ErrorKind::ThinningBoundViolated,
                        "switching rate " + std::to_string(rate) + " exceeds thinning bound " +
                            std::to_string(bound) + " at x = " + std::to_string(x) +
                            "; raise the rate grid resolution");
          if (rng.uniform() * bound < rate) {
            if (last_switch >= burn_in) part.hold[sigma].add(t - last_switch);
            last_switch = t;
            sigma = 1 - sigma;
            ++part.switches;
          }
          next = t + rng.exponential() / bound;
        }
        advance(step_end);
        if (t >= burn_in && k % o.stride == 0) {
          ++part.hist.counts[bin_of(x, o.bins)];
          ++part.hist.total;
        }
      }
    }
  });

  result.histogram = empty_histogram(o.bins, o.seed);
  double time0 = 0.0, time_total = 0.0;
  Moments hold[2];
  for (const Part& part : parts) {
    result.histogram.merge(part.hist);
    time0 += part.time0;
    time_total += part.time_total;
    hold[0].merge(part.hold[0]);
    hold[1].merge(part.hold[1]);
    result.proposals += part.proposals;
    result.switches += part.switches;
  }
  result.sigma0_fraction = time_total > 0.0 ? time0 / time_total : 0.0;
  result.holding[0] = hold[0].stats();
  result.holding[1] = hold[1].stats();
  return result;
}

std::vector<double> bin_masses(const DensityCurve& curve, std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::Validation, "need at least one bin");
  const std::size_t n = curve.n;
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> mu(n + 1);
  for (std::size_t i = 0; i < n; ++i) mu[i] = curve.density(i);
  mu[n] = mu[0];
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + 0.5 * h * (mu[i] + mu[i + 1]);

  // Mass of [0, t] under the piecewise-linear interpolant.
  auto mass_to = [&](double t) {
    const double u = t * static_cast<double>(n);
    std::size_t j = static_cast<std::size_t>(u);
    if (j >= n) return cum[n];
    const double f = u - static_cast<double>(j);
    return cum[j] + h * (mu[j] * f + 0.5 * (mu[j + 1] - mu[j]) * f * f);
  };
  std::vector<double> out(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double a = double(k) / double(bins), b = double(k + 1) / double(bins);
    out[k] = (mass_to(b) - mass_to(a)) / cum[n];
  }
  return out;
}

double tv_distance(const Histogram& h, const std::vector<double>& masses) {
  if (masses.size() != h.bins) throw Error(ErrorKind::Validation, "bin counts differ");
  if (h.total == 0) throw Error(ErrorKind::Validation, "empty histogram");
  double sum = 0.0;
  for (std::size_t j = 0; j < h.bins; ++j)
    sum += std::fabs(static_cast<double>(h.counts[j]) / static_cast<double>(h.total) - masses[j]);
  return 0.5 * sum;
}

double tv_distance(const Histogram& h, const DensityCurve& curve) { return tv_distance(h, bin_masses(curve, h.bins)); }

double tv_to_uniform(const Histogram& h) {
  return tv_distance(h, std::vector<double>(h.bins, 1.0 / static_cast<double>(h.bins)));
}

}  // namespace quasipot
