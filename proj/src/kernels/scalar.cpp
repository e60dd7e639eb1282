#include <cmath>

#include "internal.hpp"

namespace quasipot::kernels::detail {

double scalar_exp_sum(const double* v, std::size_t count, double scale, double ref) {
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) sum += std::exp(scale * (v[k] - ref));
  return sum;
}

DualSum scalar_dual_weighted_exp_sum(const double* v, const double* wa, const double* wb, std::size_t count,
                                     double scale, double ref) {
  DualSum s;
  for (std::size_t k = 0; k < count; ++k) {
    const double e = std::exp(scale * (v[k] - ref));
    s.a += wa[k] * e;
    s.b += wb[k] * e;
  }
  return s;
}

}  // namespace quasipot::kernels::detail
