#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "quasipot/field.hpp"
#include "quasipot/fw.hpp"
#include "quasipot/hj.hpp"
#include "quasipot/maxwell.hpp"
#include "quasipot/measures.hpp"
#include "quasipot/simulate.hpp"

namespace quasipot::io {

using nlohmann::json;

// Field JSON: {"form":"expression","text":...} | {"form":"fourier","a0":...,
// "cos":[...],"sin":[...]} | {"form":"grid","samples":[...]}. A bare string
// or number is accepted as an expression or constant.
json field_to_json(const FieldSpec& f);
FieldSpec field_from_json(const json& j);

/// Text that starts with '{' is field JSON, anything else an expression.
FieldSpec parse_field_text(std::string_view text);

// PDMP JSON: {"f0": field, "f1": field, "r01": field, "r10": field}.
json pdmp_to_json(const PdmpSpec& p);
PdmpSpec pdmp_from_json(const json& j);
PdmpSpec parse_pdmp_text(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view content);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// %.17g, so every double survives a text round trip.
std::string fmt(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(const std::vector<std::string>& cells);
  Csv& row(std::initializer_list<double> values);
  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

// x, S, Phi, is_flat over the n+1 grid points.
std::string phi_csv(const SampledPotential& s, const QuasiPotential& phi);
// x, log_density, density, rate.
std::string density_csv(const DensityCurve& c);
// eps_or_lambda, sup_gap.
std::string convergence_csv(const ConvergenceTable& t);
// bin_center, density.
std::string histogram_csv(const Histogram& h);
// x, W, case, neighbor, tie.
std::string w_curve_csv(const FwSolution& fw);

json trace_json(const QuasiPotential& phi);
json fw_json(const FwSolution& fw, const IdentityReport& ids);
json viscosity_json(const ViscosityReport& r, std::size_t max_violations = 64);
json convergence_json(const ConvergenceTable& t);

}  // namespace quasipot::io
