#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace quasipot {

// Index of the best element in every closed window v[i..i+w], for
// i = 0..size-w-1, in O(size) total with a monotone deque. `better(a, b)` is a
// strict ordering, so among equal values the smallest index wins.
template <class Better>
std::vector<std::size_t> sliding_window_best(std::span<const double> v, std::size_t w, Better better) {
  std::vector<std::size_t> out;
  if (v.size() <= w) return out;
  out.reserve(v.size() - w);
  std::deque<std::size_t> dq;
  for (std::size_t k = 0; k < v.size(); ++k) {
    while (!dq.empty() && better(v[k], v[dq.back()])) dq.pop_back();
    dq.push_back(k);
    if (k >= w) {
      const std::size_t i = k - w;
      while (dq.front() < i) dq.pop_front();
      out.push_back(dq.front());
    }
  }
  return out;
}

inline std::vector<std::size_t> sliding_window_argmax(std::span<const double> v, std::size_t w) {
  return sliding_window_best(v, w, [](double a, double b) { return a > b; });
}

inline std::vector<std::size_t> sliding_window_argmin(std::span<const double> v, std::size_t w) {
  return sliding_window_best(v, w, [](double a, double b) { return a < b; });
}

}  // namespace quasipot
