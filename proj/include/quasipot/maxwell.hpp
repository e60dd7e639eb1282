#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "quasipot/field.hpp"

namespace quasipot {

enum class QuasiMethod { DirectWindow, Constructive, TreeFW, SplitParts };

const char* to_string(QuasiMethod method);

// A maximal flat stretch. `lo` lies in [0,1); `hi` may exceed 1 when the
// stretch wraps through the origin.
struct FlatInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ConstructionTrace {
  bool active = false;             // false when a shortcut branch applied
  std::ptrdiff_t base_index = 0;   // b, as an index into the extended grid
  std::vector<double> levels;      // L_1 > L_2 > ...
  std::vector<std::ptrdiff_t> z;   // extended-grid indices z_1, z_2, ...
  std::vector<std::ptrdiff_t> y;   // y_1, ..., y_{m-1}
  std::vector<FlatInterval> flat_union;  // V, in unwrapped x coordinates
};

struct QuasiPotential {
  std::size_t n = 0;
  std::vector<double> phi;            // n+1 values on the grid i/n
  std::vector<std::uint8_t> is_flat;  // n+1 flags
  std::vector<FlatInterval> flat_intervals;
  QuasiMethod method = QuasiMethod::DirectWindow;
  double drift = 0.0;
  double flat_value = 0.0;  // value of the quasipotential off U
  double tau_flat = 0.0;
  ConstructionTrace trace;

  double max() const;
  double min() const;
};

struct WindowMax {
  std::vector<double> value;           // max of extended S over [i, i+n], i = 0..n
  std::vector<std::ptrdiff_t> argmax;  // smallest maximizing index
};

/// Closed unit-window maxima of the drift-extended samples.
WindowMax window_max(const SampledPotential& s);

/// max_{y in [x,x+1]} (S(y) - S(x)) on the grid: the "rise" above each sample.
std::vector<double> window_rise(const SampledPotential& s);

struct PhiOptions {
  std::optional<double> tau_flat;  // default 8 * max|F| / n
};

QuasiPotential phi_direct(const SampledPotential& s, PhiOptions options = {});

/// Level-sweep construction. Throws ChainMismatch when the local maxima of the
/// sampled S disagree with the unstable components of `chain`.
QuasiPotential phi_constructive(const SampledPotential& s, const ComponentChain& chain,
                                PhiOptions options = {});

struct TildeResult {
  QuasiPotential tilde;
  double positive_mass = 0.0;  // integral of F+ over one period
  double offset_gap = 0.0;     // sup |tilde - phi_direct - positive_mass|
};

/// The split form inf_y [int_x^y F- + int_y^{x+1} F+], built from the
/// positive/negative part integrals rather than S itself.
TildeResult phi_tilde(const SampledPotential& s, PhiOptions options = {});
TildeResult phi_tilde(const FieldSpec& f, std::size_t n, PhiOptions options = {});

/// Maximal runs of grid samples with |phi - flat_value| <= tau, merged across
/// the origin.
std::vector<FlatInterval> flat_runs(const std::vector<std::uint8_t>& flags, std::size_t n);

}  // namespace quasipot
