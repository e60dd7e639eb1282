#include "quasipot/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "quasipot/error.hpp"

namespace quasipot::io {

namespace {

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  if (!v.is_array()) throw Error(ErrorKind::Validation, std::string("field JSON: '") + key + "' must be an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw Error(ErrorKind::Validation, std::string("field JSON: '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

json field_to_json(const FieldSpec& f) {
  return std::visit(
      [](const auto& form) -> json {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Expression>) {
          return {{"form", "expression"}, {"text", form.text()}};
        } else if constexpr (std::is_same_v<T, FourierSeries>) {
          return {{"form", "fourier"}, {"a0", form.a0}, {"cos", form.cos}, {"sin", form.sin}};
        } else {
          return {{"form", "grid"}, {"samples", form.samples}};
        }
      },
      f.form());
}

FieldSpec field_from_json(const json& j) {
  if (j.is_string()) return FieldSpec::expression(j.get<std::string>());
  if (j.is_number()) return FieldSpec::constant(j.get<double>());
  if (!j.is_object() || !j.contains("form") || !j.at("form").is_string())
    throw Error(ErrorKind::Validation, "field JSON needs a string member \"form\"");
  const std::string form = j.at("form").get<std::string>();
  if (form == "expression") {
    if (!j.contains("text") || !j.at("text").is_string())
      throw Error(ErrorKind::Validation, "expression field needs a string member \"text\"");
    return FieldSpec::expression(j.at("text").get<std::string>());
  }
  if (form == "fourier") {
    FourierSeries s;
    if (j.contains("a0")) {
      if (!j.at("a0").is_number()) throw Error(ErrorKind::Validation, "field JSON: 'a0' must be a number");
      s.a0 = j.at("a0").get<double>();
    }
    s.cos = number_list(j, "cos");
    s.sin = number_list(j, "sin");
    return FieldSpec::fourier(std::move(s));
  }
  if (form == "grid") return FieldSpec::grid(number_list(j, "samples"));
  throw Error(ErrorKind::Validation, "unknown field form '" + form + "' (expected expression, fourier or grid)");
}

FieldSpec parse_field_text(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, std::string("field JSON: ") + e.what());
    }
    return field_from_json(j);
  }
  std::string_view t = text;
  while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.remove_suffix(1);
  return FieldSpec::expression(t);
}

json pdmp_to_json(const PdmpSpec& p) {
  return {{"f0", field_to_json(p.f0)},
          {"f1", field_to_json(p.f1)},
          {"r01", field_to_json(p.r01)},
          {"r10", field_to_json(p.r10)}};
}

PdmpSpec pdmp_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Validation, "PDMP JSON must be an object with f0, f1, r01, r10");
  auto get = [&](const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::Validation, std::string("PDMP JSON is missing '") + key + "'");
    return field_from_json(j.at(key));
  };
  return {get("f0"), get("f1"), get("r01"), get("r10")};
}

PdmpSpec parse_pdmp_text(std::string_view text) {
  try {
    return pdmp_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("PDMP JSON: ") + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

Csv& Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error(ErrorKind::Validation, "CSV row has the wrong number of cells");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) text_ += ',';
    text_ += cells[k];
  }
  text_ += '\n';
  return *this;
}

Csv& Csv::row(std::initializer_list<double> values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(fmt(v));
  return row(cells);
}

std::string phi_csv(const SampledPotential& s, const QuasiPotential& phi) {
  Csv csv({"x", "S", "Phi", "is_flat"});
  const auto sv = s.s_values();
  for (std::size_t i = 0; i <= phi.n; ++i)
    csv.row({fmt(s.x(static_cast<std::ptrdiff_t>(i))), fmt(sv[i]), fmt(phi.phi[i]), phi.is_flat[i] ? "1" : "0"});
  return csv.str();
}

std::string density_csv(const DensityCurve& c) {
  Csv csv({"x", "log_density", "density", "rate"});
  for (std::size_t i = 0; i < c.n; ++i)
    csv.row({double(i) / double(c.n), c.log_density[i], c.density(i), c.rate[i]});
  return csv.str();
}

std::string convergence_csv(const ConvergenceTable& t) {
  Csv csv({"eps_or_lambda", "sup_gap"});
  for (const ConvergenceRow& r : t.rows) csv.row({r.parameter, r.sup_gap});
  return csv.str();
}

std::string histogram_csv(const Histogram& h) {
  Csv csv({"bin_center", "density"});
  const std::vector<double> d = h.density();
  for (std::size_t j = 0; j < h.bins; ++j) csv.row({h.bin_center(j), d[j]});
  return csv.str();
}

std::string w_curve_csv(const FwSolution& fw) {
  Csv csv({"x", "W", "case", "neighbor", "tie"});
  for (std::size_t i = 0; i < fw.w_curve.size(); ++i) {
    const bool labelled = i < fw.cases.size();
    csv.row({fmt(double(i) / double(fw.n)), fmt(fw.w_curve[i]), labelled ? to_string(fw.cases[i]) : "",
             labelled ? std::to_string(fw.neighbor[i]) : "", labelled && fw.tie[i] ? "1" : "0"});
  }
  return csv.str();
}

json trace_json(const QuasiPotential& phi) {
  json flat = json::array();
  for (const FlatInterval& f : phi.flat_intervals) flat.push_back({f.lo, f.hi});
  json v = json::array();
  for (const FlatInterval& f : phi.trace.flat_union) v.push_back({f.lo, f.hi});
  return {{"method", to_string(phi.method)},
          {"n", phi.n},
          {"drift", phi.drift},
          {"flat_value", phi.flat_value},
          {"tau_flat", phi.tau_flat},
          {"active", phi.trace.active},
          {"b", phi.trace.base_index},
          {"levels", phi.trace.levels},
          {"z", phi.trace.z},
          {"y", phi.trace.y},
          {"flat_union", v},
          {"flat_intervals", flat}};
}

json fw_json(const FwSolution& fw, const IdentityReport& ids) {
  std::map<std::string, std::size_t> hist;
  for (PointCase c : fw.cases) ++hist[to_string(c)];
  std::size_t ties = 0;
  for (std::uint8_t t : fw.tie) ties += t;
  json j = {{"components", fw.w_stable.size()},
            {"w_stable", fw.w_stable},
            {"J_per_root", fw.J},
            {"positive_mass", ids.positive_mass},
            {"rise_constant", ids.rise_constant},
            {"rise_gap", ids.rise_gap},
            {"equivalence_gap", ids.equivalence_gap},
            {"cases", hist},
            {"ties", ties}};
  if (!fw.w_bruteforce.empty()) j["w_bruteforce"] = fw.w_bruteforce;
  return j;
}

json viscosity_json(const ViscosityReport& r, std::size_t max_violations) {
  std::size_t sub = 0, super = 0;
  for (const Violation& v : r.violations) (v.condition == "subsolution" ? sub : super)++;
  json list = json::array();
  for (std::size_t k = 0; k < r.violations.size() && k < max_violations; ++k)
    list.push_back({{"x", r.violations[k].x}, {"condition", r.violations[k].condition},
                    {"margin", r.violations[k].margin}});
  return {{"hamiltonian", r.hamiltonian},
          {"verdict", r.verdict ? "viscosity solution" : "not a viscosity solution"},
          {"pass", r.verdict},
          {"tau_h", r.tau_h},
          {"tau_kink", r.tau_kink},
          {"points", r.points.size()},
          {"kinks", r.kinks},
          {"worst_subsolution_margin", r.worst_sub},
          {"worst_supersolution_margin", r.worst_super},
          {"subsolution_violations", sub},
          {"supersolution_violations", super},
          {"violations", list}};
}

json convergence_json(const ConvergenceTable& t) {
  json rows = json::array();
  for (const ConvergenceRow& r : t.rows) rows.push_back({{"parameter", r.parameter}, {"sup_gap", r.sup_gap}});
  return {{"rows", rows}, {"monotone_decreasing", t.monotone_decreasing}, {"non_increasing", t.non_increasing}};
}

}  // namespace quasipot::io
