#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace quasipot::cli {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// Everything a run depends on. Serialized verbatim as manifest.json so a run
// can be repeated with `--config manifest.json`.
struct RunConfig {
  std::string command;
  std::optional<nlohmann::json> field;  // field JSON (F; diffusions use b = -F/2)
  std::optional<nlohmann::json> pdmp;   // PDMP JSON
  std::size_t n = 4096;
  std::vector<double> eps{0.3};
  std::vector<double> lambda{50.0};
  double horizon = 2000.0;
  double dt = 1e-3;
  std::optional<double> burn_in;
  std::size_t bins = 50;
  std::size_t stride = 10;
  std::uint64_t seed = 1;
  std::size_t trajectories = 1;
  std::optional<unsigned> threads;
  std::string backend = "auto";  // auto, scalar, avx2
  std::filesystem::path out = "quasipot_out";
  bool plot = false;
  std::string candidate = "phi";     // phi, fw, or a field for check-hj
  std::string hamiltonian = "all";   // all, quadratic, cosh, quartic
};

/// Defaults that differ per subcommand (e.g. compare sweeps several eps).
RunConfig defaults_for(const std::string& command);

nlohmann::json to_manifest(const RunConfig& c);
/// Missing keys keep the values already in `base`.
RunConfig from_manifest(const nlohmann::json& j, RunConfig base);

/// Runs one subcommand; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace quasipot::cli
