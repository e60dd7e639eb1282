#pragma once

#include "quasipot/kernels.hpp"

namespace quasipot::kernels::detail {

double scalar_exp_sum(const double* v, std::size_t count, double scale, double ref);
DualSum scalar_dual_weighted_exp_sum(const double* v, const double* wa, const double* wb, std::size_t count,
                                     double scale, double ref);

#if QUASIPOT_HAVE_AVX2
double avx2_exp_sum(const double* v, std::size_t count, double scale, double ref);
DualSum avx2_dual_weighted_exp_sum(const double* v, const double* wa, const double* wb, std::size_t count,
                                   double scale, double ref);
#endif

}  // namespace quasipot::kernels::detail
