#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "quasipot/field.hpp"
#include "quasipot/measures.hpp"

namespace quasipot {

struct Histogram {
  std::size_t bins = 0;  // equal-width bins on [0,1)
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;

  double bin_center(std::size_t j) const { return (static_cast<double>(j) + 0.5) / static_cast<double>(bins); }
  /// counts normalized to a probability density on [0,1).
  std::vector<double> density() const;
  void merge(const Histogram& other);
};

struct DiffusionSimOptions {
  double eps = 0.3;
  double horizon = 2000.0;
  double dt = 1e-3;
  std::optional<double> burn_in;  // default horizon / 10
  std::size_t stride = 10;        // steps between recorded samples
  std::size_t bins = 50;
  std::uint64_t seed = 1;
  std::size_t trajectories = 1;  // each runs the full horizon
  unsigned threads = 1;
};

/// Euler-Maruyama for dX = b(X) dt + eps dW, wrapped to [0,1) every step.
Histogram simulate_diffusion(const FieldSpec& b, const DiffusionSimOptions& options);

struct PdmpSimOptions {
  double lambda = 50.0;
  double horizon = 2000.0;
  std::optional<double> burn_in;  // default horizon / 10
  std::size_t stride = 10;        // integration steps between recorded samples
  std::size_t bins = 50;
  std::uint64_t seed = 1;
  std::size_t trajectories = 1;
  unsigned threads = 1;
  std::size_t rate_grid = 1024;  // grid used to bound the switching rates
};

struct HoldingStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

struct PdmpSimResult {
  Histogram histogram;
  double sigma0_fraction = 0.0;  // time fraction in state 0 after burn-in
  HoldingStats holding[2];       // sojourn times in state 0 and 1
  std::uint64_t proposals = 0;
  std::uint64_t switches = 0;
  double bound = 0.0;  // thinning bound lambda * 1.1 * max rate
  double step = 0.0;   // flow integration step
};

/// Flow by classical Runge-Kutta, switches by thinning against a constant
/// bound. Throws ThinningBoundViolated if a rate above the bound is met.
PdmpSimResult simulate_pdmp(const PdmpSpec& p, const PdmpSimOptions& options);

/// Probability mass of each histogram bin under a density curve (exact for
/// the piecewise-linear interpolant of the grid values).
std::vector<double> bin_masses(const DensityCurve& curve, std::size_t bins);

double tv_distance(const Histogram& h, const std::vector<double>& masses);
double tv_distance(const Histogram& h, const DensityCurve& curve);
double tv_to_uniform(const Histogram& h);

}  // namespace quasipot
