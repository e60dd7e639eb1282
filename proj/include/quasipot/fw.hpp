#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "quasipot/field.hpp"
#include "quasipot/maxwell.hpp"

namespace quasipot {

// Stable components are indexed 0..l-1 in clockwise order; A_i is the
// unstable component between K_i and K_{i+1}, indices mod l.

struct VCosts {
  double v_plus = 0.0;   // integral of F+ along the clockwise path x -> y
  double v_minus = 0.0;  // integral of F- along the anticlockwise path x -> y
  double v = 0.0;        // min of the two
  double delta_s = 0.0;  // integral of F along the clockwise path
};

VCosts v_costs(const SampledPotential& s, double x, double y);

/// Tolerance used for value comparisons in this module: 1e-9 * max(1, int |F|).
double fw_tolerance(const SampledPotential& s);

// Spanning arborescence on the stable components: every vertex except the
// root has exactly one parent, and following parents always reaches the root.
struct RootedTree {
  std::size_t root = 0;
  std::vector<std::ptrdiff_t> parent;  // parent[root] == -1
};

/// Cost matrix C[m][k] = V(K_m, K_k) between component representatives.
std::vector<std::vector<double>> component_costs(const SampledPotential& s, const ComponentChain& chain);

double tree_cost(const std::vector<std::vector<double>>& costs, const RootedTree& tree);
bool is_arborescence(const RootedTree& tree);

/// The comb g_{i,j}: vertices clockwise from K_i up to K_j point
/// anticlockwise, the rest point clockwise; the cut sits at A_j.
RootedTree comb_tree(std::size_t l, std::size_t i, std::size_t j);

/// The j for which `tree` equals comb_tree(l, root, j), if any.
std::optional<std::size_t> comb_index(const RootedTree& tree);

struct StableValue {
  double value = 0.0;
  RootedTree tree;
};

constexpr std::size_t kMaxBruteforceComponents = 8;

/// Exhaustive minimum over G{i}. Throws TooManyComponents when l > 8.
StableValue w_stable_bruteforce(const SampledPotential& s, const ComponentChain& chain, std::size_t i,
                                unsigned threads = 1);

struct FastValue {
  double value = 0.0;
  std::size_t J = 0;         // smallest index meeting the window-maximum criterion
  std::vector<double> t;     // t(i,j) for every j
  RootedTree tree;           // comb_tree(l, i, J)
};

FastValue w_stable_fast(const SampledPotential& s, const ComponentChain& chain, std::size_t i);

enum class PointCase : std::uint8_t { OnStable, Case1, Case2, Case3, Case4 };

const char* to_string(PointCase c);

struct PointValue {
  double value = 0.0;     // value given by the classified shortcut
  double full = 0.0;      // min_r W(K_r) + V(K_r, x)
  PointCase label = PointCase::OnStable;
  std::size_t neighbor = 0;  // realizing stable component
  int direction = 0;         // +1: V+ from K_i, -1: V- from K_{i+1}, 0: on a component
  bool tie = false;          // V+ and V- both realize the full minimum
};

/// max_{y in [t, t+1]} (S(y) - S(t)) for real t, from component positions.
double continuous_rise(const SampledPotential& s, const ComponentChain& chain, double t);

/// Throws CaseClassificationFailed when the shortcut disagrees with the full minimum.
PointValue w_point(const SampledPotential& s, const ComponentChain& chain, const std::vector<double>& w_stable,
                   double x);

struct FwOptions {
  bool bruteforce_check = false;  // also run the exhaustive oracle when l <= 8
  unsigned threads = 1;
};

struct FwSolution {
  std::vector<double> w_stable;
  std::vector<std::size_t> J;
  std::vector<double> w_bruteforce;  // filled when bruteforce_check is set
  std::size_t n = 0;
  std::vector<double> w_curve;  // n+1 grid values
  std::vector<PointCase> cases;
  std::vector<std::size_t> neighbor;
  std::vector<std::uint8_t> tie;
};

FwSolution solve_fw(const SampledPotential& s, const ComponentChain& chain, FwOptions options = {});

/// W as a QuasiPotential (method TreeFW) shifted so that its flat value is
/// comparable with phi_direct.
QuasiPotential fw_as_quasipotential(const SampledPotential& s, const FwSolution& fw);

struct IdentityReport {
  double positive_mass = 0.0;
  double rise_constant = 0.0;  // mean over the grid of W + rise
  double rise_gap = 0.0;       // sup |W + rise - positive_mass|
  double equivalence_gap = 0.0;  // sup |(W - min W) - (Phi - min Phi)|
};

IdentityReport check_identities(const SampledPotential& s, const QuasiPotential& phi, const FwSolution& fw);

}  // namespace quasipot
