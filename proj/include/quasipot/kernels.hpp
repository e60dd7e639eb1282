#pragma once

#include <cstddef>

namespace quasipot::kernels {

// Exponential-sum kernels behind the density quadrature. Every backend computes
// the same sums; only the summation order and the exp implementation differ.

enum class Backend { Scalar, Avx2 };

const char* to_string(Backend backend);

bool backend_available(Backend backend);

/// Backend chosen at first use from the CPU features, unless overridden.
Backend active_backend();

/// Overrides the backend; returns false (and changes nothing) when unavailable.
bool set_backend(Backend backend);

/// sum_k exp(scale * (v[k] - ref)). Callers pass ref >= max v[k] so every
/// exponent is <= 0.
double exp_sum(const double* v, std::size_t count, double scale, double ref);

struct DualSum {
  double a = 0.0;
  double b = 0.0;
};

/// sum_k wa[k] e_k and sum_k wb[k] e_k with e_k = exp(scale * (v[k] - ref)).
DualSum dual_weighted_exp_sum(const double* v, const double* wa, const double* wb, std::size_t count, double scale,
                              double ref);

}  // namespace quasipot::kernels
