#include "quasipot/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "quasipot/error.hpp"
#include "quasipot/field.hpp"
#include "quasipot/fw.hpp"
#include "quasipot/hj.hpp"
#include "quasipot/io.hpp"
#include "quasipot/kernels.hpp"
#include "quasipot/maxwell.hpp"
#include "quasipot/measures.hpp"
#include "quasipot/parallel.hpp"
#include "quasipot/plot.hpp"
#include "quasipot/simulate.hpp"

namespace quasipot::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

const char* hint(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
      return "check the input near the reported position; expressions use x, pi, numbers, + - * / ^, "
             "parentheses and sin, cos, exp, abs";
    case ErrorKind::Io:
      return "check that the input path exists and is readable and that --out is writable";
    case ErrorKind::Validation:
      return "run 'quasipot <command> --help' for the accepted flags and values";
    case ErrorKind::NonFinite:
      return "the field evaluates to inf or nan somewhere on the grid; check divisions and exp arguments";
    case ErrorKind::ClassificationAmbiguous:
    case ErrorKind::ChainMismatch:
    case ErrorKind::CaseClassificationFailed:
      return "raise --n so that the zero set of F is resolved by the grid";
    case ErrorKind::TooManyComponents:
      return "the exhaustive tree search handles at most 8 stable components";
    case ErrorKind::VelocityVanishes:
      return "each PDMP velocity f0, f1 must keep one sign and stay away from zero";
    case ErrorKind::NonPositiveDensity:
      return "check the sign pattern of the PDMP velocities f0 and f1";
    case ErrorKind::ThinningBoundViolated:
      return "the switching rates vary faster than the bounding grid resolves; smooth r01 and r10";
    case ErrorKind::HypothesisFailed:
      return "the Hamiltonian must be convex in p and vanish at p = 0 and p = F(x)";
    case ErrorKind::NumericalAssertion:
      return "raise --n; if the failure persists the field is outside the supported class";
  }
  return "";
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> grid_x(std::size_t count, std::size_t n) {
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i) x[i] = double(i) / double(n);
  return x;
}

std::vector<double> shifted(const std::vector<double>& v, std::size_t count) {
  const double lo = *std::min_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(count));
  std::vector<double> out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(count));
  for (double& x : out) x -= lo;
  return out;
}

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) g = std::max(g, std::fabs(a[i] - b[i]));
  return g;
}

// Output sink confined to the --out directory.
class Session {
 public:
  Session(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), threads_(resolve_threads(cfg.threads)) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + cfg.out.string() + "': " + ec.message());
  }

  const RunConfig& cfg() const { return cfg_; }
  std::ostream& log() { return out_; }
  unsigned threads() const { return threads_; }
  DensityOptions density_options() const { return {threads_, true}; }

  void text(const std::string& name, const std::string& content) { io::write_text(cfg_.out / name, content); }
  void json_file(const std::string& name, const json& j) { io::write_json(cfg_.out / name, j); }
  void plot(const std::string& name, const PlotSpec& spec) {
    if (cfg_.plot) emit_plot(spec, cfg_.out / name);
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
  unsigned threads_;
};

FieldSpec require_field(const RunConfig& c) {
  if (!c.field) throw Error(ErrorKind::Validation, "this command needs a field: pass --field or --field-file");
  return io::field_from_json(*c.field);
}

PdmpSpec require_pdmp(const RunConfig& c) {
  if (!c.pdmp) throw Error(ErrorKind::Validation, "this command needs a PDMP: pass --pdmp or --pdmp-file");
  return io::pdmp_from_json(*c.pdmp);
}

void require_list(const std::vector<double>& v, const char* flag) {
  if (v.empty()) throw Error(ErrorKind::Validation, std::string(flag) + " needs at least one value");
}

// ---------------------------------------------------------------------------
// Pipeline steps. Each writes its own artifacts and returns what later steps
// or the combined report need.

struct PhiStep {
  SampledPotential s;
  ComponentChain chain;
  QuasiPotential phi;
  double transform_gap = 0.0;
};

PhiStep step_phi(Session& ses, const FieldSpec& f) {
  const RunConfig& c = ses.cfg();
  SampledPotential s = integrate_potential(f, c.n);
  ComponentChain chain = find_components(s);
  QuasiPotential phi = phi_direct(s);
  const QuasiPotential built = phi_constructive(s, chain);
  const double gap = sup_gap(phi.phi, built.phi);

  ses.text("phi.csv", io::phi_csv(s, phi));
  json trace = io::trace_json(built);
  trace["transform_gap"] = gap;
  trace["stable_components"] = chain.stable.size();
  ses.json_file("trace.json", trace);

  const auto sv = s.s_values();
  ses.plot("phi.svg", {"S and Phi", grid_x(c.n + 1, c.n),
                       {{"S", std::vector<double>(sv.begin(), sv.end())}, {"Phi", phi.phi}},
                       phi.flat_intervals});
  ses.log() << "phi: n=" << c.n << " drift=" << io::fmt(s.drift()) << " max Phi=" << io::fmt(phi.max())
            << " flat intervals=" << phi.flat_intervals.size() << " transform gap=" << io::fmt(gap) << "\n";
  return {std::move(s), std::move(chain), std::move(phi), gap};
}

struct FwStep {
  FwSolution fw;
  IdentityReport ids;
};

FwStep step_fw(Session& ses, const PhiStep& p) {
  FwOptions opts;
  opts.bruteforce_check = !p.chain.empty() && p.chain.size() <= kMaxBruteforceComponents;
  opts.threads = ses.threads();
  FwSolution fw = solve_fw(p.s, p.chain, opts);
  const double tol = fw_tolerance(p.s);
  for (std::size_t i = 0; i < fw.w_bruteforce.size(); ++i)
    if (std::fabs(fw.w_bruteforce[i] - fw.w_stable[i]) > tol)
      throw Error(ErrorKind::NumericalAssertion, "tree search and comb formula disagree at component " +
                                                     std::to_string(i) + ": " + io::fmt(fw.w_bruteforce[i]) +
                                                     " vs " + io::fmt(fw.w_stable[i]));
  const IdentityReport ids = check_identities(p.s, p.phi, fw);

  ses.text("w.csv", io::w_curve_csv(fw));
  ses.json_file("fw.json", io::fw_json(fw, ids));
  const std::size_t n = ses.cfg().n;
  ses.plot("w.svg", {"W - min W and Phi - min Phi", grid_x(n + 1, n),
                     {{"W - min W", shifted(fw.w_curve, n + 1)}, {"Phi - min Phi", shifted(p.phi.phi, n + 1)}},
                     p.phi.flat_intervals});
  ses.log() << "fw: components=" << fw.w_stable.size() << " equivalence gap=" << io::fmt(ids.equivalence_gap)
            << " constant=" << io::fmt(ids.rise_constant) << " (positive mass " << io::fmt(ids.positive_mass)
            << ")\n";
  return {std::move(fw), ids};
}

ConvergenceTable step_density(Session& ses, const PhiStep& p) {
  const RunConfig& c = ses.cfg();
  require_list(c.eps, "--eps");
  std::vector<double> gaps;
  PlotSpec plot{"rate curves and Phi - min Phi", grid_x(c.n, c.n), {}, p.phi.flat_intervals};
  for (double eps : c.eps) {
    const DensityCurve curve = diffusion_density(p.s, eps, ses.density_options());
    const double gap = rate_gap(curve, p.phi);
    gaps.push_back(gap);
    ses.text("density_eps" + tag(eps) + ".csv", io::density_csv(curve));
    plot.curves.push_back({"eps=" + tag(eps), curve.rate});
    ses.log() << "density: eps=" << tag(eps) << " sup gap=" << io::fmt(gap) << "\n";
  }
  plot.curves.push_back({"Phi - min Phi", shifted(p.phi.phi, c.n)});
  const ConvergenceTable table = make_convergence_table(c.eps, gaps);
  ses.text("convergence.csv", io::convergence_csv(table));
  ses.plot("density.svg", plot);
  return table;
}

json step_simulate(Session& ses, const FieldSpec& f, const PhiStep& p, const std::vector<double>& eps_list) {
  const RunConfig& c = ses.cfg();
  json runs = json::array();
  for (double eps : eps_list) {
    DiffusionSimOptions o;
    o.eps = eps;
    o.horizon = c.horizon;
    o.dt = c.dt;
    o.burn_in = c.burn_in;
    o.stride = c.stride;
    o.bins = c.bins;
    o.seed = c.seed;
    o.trajectories = c.trajectories;
    o.threads = ses.threads();
    const Histogram h = simulate_diffusion(f.scaled(-0.5), o);
    const double tv = tv_distance(h, diffusion_density(p.s, eps, ses.density_options()));
    ses.text("histogram_eps" + tag(eps) + ".csv", io::histogram_csv(h));
    runs.push_back({{"eps", eps}, {"tv", tv}, {"samples", h.total}});
    ses.log() << "simulate: eps=" << tag(eps) << " samples=" << h.total << " TV=" << io::fmt(tv) << "\n";
  }
  return {{"seed", c.seed}, {"trajectories", c.trajectories}, {"T", c.horizon}, {"dt", c.dt}, {"runs", runs}};
}

struct PdmpStep {
  PdmpSpec spec;
  SampledPotential s;
  QuasiPotential phi;
};

PdmpStep step_pdmp_density(Session& ses, const PdmpSpec& spec) {
  const RunConfig& c = ses.cfg();
  require_list(c.lambda, "--lambda");
  SampledPotential s = pdmp_potential(spec, c.n);
  QuasiPotential phi = phi_direct(s);
  ses.text("pdmp_phi.csv", io::phi_csv(s, phi));
  std::vector<double> gaps;
  PlotSpec plot{"PDMP rate curves and Phi - min Phi", grid_x(c.n, c.n), {}, phi.flat_intervals};
  for (double lambda : c.lambda) {
    const DensityCurve curve = pdmp_density(spec, lambda, c.n, ses.density_options());
    const double gap = rate_gap(curve, phi);
    gaps.push_back(gap);
    ses.text("pdmp_density_lambda" + tag(lambda) + ".csv", io::density_csv(curve));
    plot.curves.push_back({"lambda=" + tag(lambda), curve.rate});
    ses.log() << "pdmp-density: lambda=" << tag(lambda) << " sup gap=" << io::fmt(gap) << "\n";
  }
  plot.curves.push_back({"Phi - min Phi", shifted(phi.phi, c.n)});
  const ConvergenceTable table = make_convergence_table(c.lambda, gaps);
  ses.text("pdmp_convergence.csv", io::convergence_csv(table));
  ses.json_file("pdmp_convergence.json", io::convergence_json(table));
  ses.plot("pdmp_density.svg", plot);
  return {spec, std::move(s), std::move(phi)};
}

json step_simulate_pdmp(Session& ses, const PdmpSpec& spec) {
  const RunConfig& c = ses.cfg();
  require_list(c.lambda, "--lambda");
  json runs = json::array();
  for (double lambda : c.lambda) {
    PdmpSimOptions o;
    o.lambda = lambda;
    o.horizon = c.horizon;
    o.burn_in = c.burn_in;
    o.stride = c.stride;
    o.bins = c.bins;
    o.seed = c.seed;
    o.trajectories = c.trajectories;
    o.threads = ses.threads();
    const PdmpSimResult r = simulate_pdmp(spec, o);
    const double tv = tv_distance(r.histogram, pdmp_density(spec, lambda, c.n, ses.density_options()));
    ses.text("pdmp_histogram_lambda" + tag(lambda) + ".csv", io::histogram_csv(r.histogram));
    json holding = json::array();
    for (const HoldingStats& h : r.holding)
      holding.push_back({{"count", h.count}, {"mean", h.mean}, {"variance", h.variance}});
    runs.push_back({{"lambda", lambda},
                    {"tv", tv},
                    {"samples", r.histogram.total},
                    {"sigma0_fraction", r.sigma0_fraction},
                    {"holding", holding},
                    {"proposals", r.proposals},
                    {"switches", r.switches},
                    {"thinning_bound", r.bound},
                    {"flow_step", r.step}});
    ses.log() << "simulate-pdmp: lambda=" << tag(lambda) << " samples=" << r.histogram.total
              << " TV=" << io::fmt(tv) << "\n";
  }
  return {{"seed", c.seed}, {"trajectories", c.trajectories}, {"T", c.horizon}, {"runs", runs}};
}

// Returns true when every requested Hamiltonian accepts the candidate.
bool step_check_hj(Session& ses, const FieldSpec& f, const PhiStep* known) {
  const RunConfig& c = ses.cfg();
  std::vector<double> candidate;
  if (c.candidate == "phi" || c.candidate == "fw") {
    std::optional<PhiStep> local;
    if (!known) {
      SampledPotential s = integrate_potential(f, c.n);
      ComponentChain chain = find_components(s);
      QuasiPotential phi = phi_direct(s);
      local.emplace(PhiStep{std::move(s), std::move(chain), std::move(phi), 0.0});
      known = &*local;
    }
    if (c.candidate == "phi") {
      candidate = known->phi.phi;
    } else {
      FwOptions opts;
      opts.threads = ses.threads();
      candidate = fw_as_quasipotential(known->s, solve_fw(known->s, known->chain, opts)).phi;
    }
  } else {
    const FieldSpec g = io::parse_field_text(c.candidate);
    candidate.resize(c.n + 1);
    for (std::size_t i = 0; i <= c.n; ++i) candidate[i] = g(double(i) / double(c.n));
  }

  std::vector<Hamiltonian> hs;
  if (c.hamiltonian == "all")
    hs = builtin_hamiltonians(f);
  else
    hs.push_back(hamiltonian_by_name(c.hamiltonian, f));

  bool all_pass = true;
  json reports = json::array();
  for (const Hamiltonian& h : hs) {
    const ViscosityReport r = check_viscosity(candidate, h);
    all_pass = all_pass && r.verdict;
    reports.push_back(io::viscosity_json(r));
    ses.log() << "check-hj: " << h.name() << " " << (r.verdict ? "pass" : "FAIL")
              << " worst margin=" << io::fmt(r.worst_margin()) << " tau_H=" << io::fmt(r.tau_h)
              << " violations=" << r.violations.size() << "\n";
  }
  ses.json_file("hj_report.json", {{"candidate", c.candidate}, {"pass", all_pass}, {"reports", reports}});
  return all_pass;
}

int execute(const RunConfig& c, std::ostream& out) {
  if (c.n < 16) throw Error(ErrorKind::Validation, "--n must be at least 16");
  if (c.backend != "auto") {
    const kernels::Backend b = c.backend == "scalar" ? kernels::Backend::Scalar : kernels::Backend::Avx2;
    if ((c.backend != "scalar" && c.backend != "avx2") || !kernels::set_backend(b))
      throw Error(ErrorKind::Validation, "kernel backend '" + c.backend + "' is not available on this machine");
  }
  Session ses(c, out);
  RunConfig recorded = c;
  if (recorded.backend == "auto") recorded.backend = kernels::to_string(kernels::active_backend());
  ses.json_file("manifest.json", to_manifest(recorded));

  const std::string& cmd = c.command;
  if (cmd == "phi") {
    step_phi(ses, require_field(c));
  } else if (cmd == "fw") {
    const PhiStep p = step_phi(ses, require_field(c));
    step_fw(ses, p);
  } else if (cmd == "density") {
    const FieldSpec f = require_field(c);
    SampledPotential s = integrate_potential(f, c.n);
    QuasiPotential phi = phi_direct(s);
    const PhiStep p{std::move(s), ComponentChain{}, std::move(phi), 0.0};
    ses.json_file("density.json", io::convergence_json(step_density(ses, p)));
  } else if (cmd == "pdmp-density") {
    step_pdmp_density(ses, require_pdmp(c));
  } else if (cmd == "simulate") {
    const FieldSpec f = require_field(c);
    require_list(c.eps, "--eps");
    SampledPotential s = integrate_potential(f, c.n);
    QuasiPotential phi = phi_direct(s);
    const PhiStep p{std::move(s), ComponentChain{}, std::move(phi), 0.0};
    ses.json_file("simulate.json", step_simulate(ses, f, p, c.eps));
  } else if (cmd == "simulate-pdmp") {
    ses.json_file("simulate_pdmp.json", step_simulate_pdmp(ses, require_pdmp(c)));
  } else if (cmd == "check-hj") {
    if (!step_check_hj(ses, require_field(c), nullptr)) return kExitNumerical;
  } else if (cmd == "compare" || cmd == "pipeline") {
    const FieldSpec f = require_field(c);
    require_list(c.eps, "--eps");
    const PhiStep p = step_phi(ses, f);
    const FwStep w = step_fw(ses, p);
    const ConvergenceTable table = step_density(ses, p);
    const double sim_eps = *std::max_element(c.eps.begin(), c.eps.end());
    const json sim = step_simulate(ses, f, p, {sim_eps});
    json report = {{"field", *c.field},
                   {"n", c.n},
                   {"transform_gap", p.transform_gap},
                   {"equivalence_gap", w.ids.equivalence_gap},
                   {"rise_constant", w.ids.rise_constant},
                   {"rise_gap", w.ids.rise_gap},
                   {"positive_mass", w.ids.positive_mass},
                   {"w_stable", w.fw.w_stable},
                   {"convergence", io::convergence_json(table)},
                   {"simulation", sim}};
    bool ok = true;
    if (cmd == "pipeline") {
      ok = step_check_hj(ses, f, &p);
      report["viscosity_pass"] = ok;
      if (c.pdmp) {
        const PdmpSpec spec = require_pdmp(c);
        step_pdmp_density(ses, spec);
        report["pdmp_simulation"] = step_simulate_pdmp(ses, spec);
      }
    }
    ses.json_file(cmd == "compare" ? "compare.json" : "pipeline.json", report);
    out << cmd << ": equivalence gap=" << io::fmt(w.ids.equivalence_gap)
        << " e(eps) non-increasing=" << (table.non_increasing ? "yes" : "no")
        << " strictly decreasing=" << (table.monotone_decreasing ? "yes" : "no") << "\n";
    if (!ok) return kExitNumerical;
  } else {
    throw Error(ErrorKind::Validation, "unknown command '" + cmd + "'");
  }
  return kExitOk;
}

// Collects "apply this flag if it was given" actions for one subcommand.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  template <class T, class Set>
  CLI::Option* add(const std::string& name, const std::string& desc, Set set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, desc);
    actions_.push_back([opt, value, set](RunConfig& c) {
      if (opt->count() > 0) set(c, *value);
    });
    return opt;
  }

  void flag(const std::string& name, const std::string& desc, std::function<void(RunConfig&)> set) {
    CLI::Option* opt = app_->add_flag(name, desc);
    actions_.push_back([opt, set](RunConfig& c) {
      if (opt->count() > 0) set(c);
    });
  }

  void apply(RunConfig& c) const {
    for (const auto& a : actions_) a(c);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(RunConfig&)>> actions_;
};

struct Subcommand {
  CLI::App* app = nullptr;
  std::unique_ptr<Flags> flags;
  std::shared_ptr<std::string> config;
};

enum : unsigned { kField = 1, kPdmp = 2, kEps = 4, kLambda = 8, kSim = 16, kDt = 32, kHj = 64 };

Subcommand make_subcommand(CLI::App& root, const std::string& name, const std::string& desc, unsigned groups) {
  Subcommand sc;
  sc.app = root.add_subcommand(name, desc);
  sc.flags = std::make_unique<Flags>(sc.app);
  sc.config = std::make_shared<std::string>();
  Flags& f = *sc.flags;
  sc.app->add_option("--config", *sc.config, "manifest.json of an earlier run; other flags override it");

  if (groups & kField) {
    f.add<std::string>("--field", "F as an expression in x or as field JSON", [](RunConfig& c, const std::string& v) {
      c.field = io::field_to_json(io::parse_field_text(v));
    });
    f.add<std::string>("--field-file", "file holding an expression or field JSON",
                       [](RunConfig& c, const std::string& v) {
                         c.field = io::field_to_json(io::parse_field_text(io::read_text(v)));
                       });
  }
  if (groups & kPdmp) {
    f.add<std::string>("--pdmp", "PDMP JSON with f0, f1, r01, r10", [](RunConfig& c, const std::string& v) {
      c.pdmp = io::pdmp_to_json(io::parse_pdmp_text(v));
    });
    f.add<std::string>("--pdmp-file", "file holding PDMP JSON", [](RunConfig& c, const std::string& v) {
      c.pdmp = io::pdmp_to_json(io::parse_pdmp_text(io::read_text(v)));
    });
  }
  f.add<std::size_t>("--n", "grid size", [](RunConfig& c, std::size_t v) { c.n = v; });
  if (groups & kEps)
    f.add<std::vector<double>>("--eps", "noise levels, comma separated",
                               [](RunConfig& c, const std::vector<double>& v) { c.eps = v; })
        ->delimiter(',');
  if (groups & kLambda)
    f.add<std::vector<double>>("--lambda", "switching rate scales, comma separated",
                               [](RunConfig& c, const std::vector<double>& v) { c.lambda = v; })
        ->delimiter(',');
  if (groups & kSim) {
    f.add<double>("--T", "simulated time horizon", [](RunConfig& c, double v) { c.horizon = v; });
    f.add<double>("--burn-in", "discarded initial time (default T/10)", [](RunConfig& c, double v) { c.burn_in = v; });
    f.add<std::size_t>("--bins", "histogram bins", [](RunConfig& c, std::size_t v) { c.bins = v; });
    f.add<std::size_t>("--stride", "steps between recorded samples", [](RunConfig& c, std::size_t v) { c.stride = v; });
    f.add<std::uint64_t>("--seed", "random seed", [](RunConfig& c, std::uint64_t v) { c.seed = v; });
    f.add<std::size_t>("--trajectories", "independent trajectories, each over the full horizon",
                       [](RunConfig& c, std::size_t v) { c.trajectories = v; });
  }
  if (groups & kDt) f.add<double>("--dt", "Euler-Maruyama step, at most 1e-3", [](RunConfig& c, double v) { c.dt = v; });
  if (groups & kHj) {
    f.add<std::string>("--candidate", "phi, fw, or a function of x to test",
                       [](RunConfig& c, const std::string& v) { c.candidate = v; });
    f.add<std::string>("--hamiltonian", "all, quadratic, cosh or quartic",
                       [](RunConfig& c, const std::string& v) { c.hamiltonian = v; });
  }
  f.add<std::string>("--out", "output directory; nothing is written elsewhere",
                     [](RunConfig& c, const std::string& v) { c.out = v; });
  f.add<unsigned>("--threads", "worker threads (default QUASIPOT_THREADS or 1)",
                  [](RunConfig& c, unsigned v) { c.threads = v; });
  f.add<std::string>("--backend", "kernel backend: auto, scalar or avx2",
                     [](RunConfig& c, const std::string& v) { c.backend = v; });
  f.flag("--plot", "also write SVG plots", [](RunConfig& c) { c.plot = true; });
  return sc;
}

void report_error(std::ostream& err, const Error& e) {
  err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
  err << "hint: " << hint(e.kind()) << "\n";
}

template <class T>
void read_key(const json& j, const char* key, T& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

}  // namespace

RunConfig defaults_for(const std::string& command) {
  RunConfig c;
  c.command = command;
  if (command == "compare" || command == "pipeline") c.eps = {0.4, 0.3, 0.2};
  if (command == "pdmp-density" || command == "pipeline") c.lambda = {20.0, 50.0, 100.0};
  return c;
}

json to_manifest(const RunConfig& c) {
  json j = {{"tool", "quasipot"},
            {"version", kVersion},
            {"command", c.command},
            {"field", c.field ? *c.field : json(nullptr)},
            {"pdmp", c.pdmp ? *c.pdmp : json(nullptr)},
            {"n", c.n},
            {"eps", c.eps},
            {"lambda", c.lambda},
            {"T", c.horizon},
            {"dt", c.dt},
            {"burn_in", c.burn_in ? json(*c.burn_in) : json(nullptr)},
            {"bins", c.bins},
            {"stride", c.stride},
            {"seed", c.seed},
            {"trajectories", c.trajectories},
            {"threads", c.threads ? json(*c.threads) : json(nullptr)},
            {"backend", c.backend},
            {"out", c.out.string()},
            {"plot", c.plot},
            {"candidate", c.candidate},
            {"hamiltonian", c.hamiltonian}};
  return j;
}

RunConfig from_manifest(const json& j, RunConfig c) {
  if (!j.is_object()) throw Error(ErrorKind::Validation, "manifest must be a JSON object");
  try {
    if (j.contains("field") && !j.at("field").is_null()) c.field = io::field_to_json(io::field_from_json(j.at("field")));
    if (j.contains("pdmp") && !j.at("pdmp").is_null()) c.pdmp = io::pdmp_to_json(io::pdmp_from_json(j.at("pdmp")));
    read_key(j, "n", c.n);
    read_key(j, "eps", c.eps);
    read_key(j, "lambda", c.lambda);
    read_key(j, "T", c.horizon);
    read_key(j, "dt", c.dt);
    if (j.contains("burn_in") && !j.at("burn_in").is_null()) c.burn_in = j.at("burn_in").get<double>();
    read_key(j, "bins", c.bins);
    read_key(j, "stride", c.stride);
    read_key(j, "seed", c.seed);
    read_key(j, "trajectories", c.trajectories);
    if (j.contains("threads") && !j.at("threads").is_null()) c.threads = j.at("threads").get<unsigned>();
    read_key(j, "backend", c.backend);
    if (j.contains("out") && j.at("out").is_string()) c.out = j.at("out").get<std::string>();
    read_key(j, "plot", c.plot);
    read_key(j, "candidate", c.candidate);
    read_key(j, "hamiltonian", c.hamiltonian);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed manifest: ") + e.what());
  }
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasipotentials of diffusions and PDMPs on the circle", "quasipot"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::vector<std::pair<std::string, Subcommand>> subs;
  auto add = [&](const char* name, const char* desc, unsigned groups) {
    subs.emplace_back(name, make_subcommand(app, name, desc, groups));
  };
  add("phi", "quasipotential by the window transform, with construction trace", kField);
  add("fw", "Freidlin-Wentzell tree values and the W curve", kField);
  add("density", "diffusion stationary density and rate convergence", kField | kEps);
  add("pdmp-density", "PDMP stationary density and rate convergence", kPdmp | kLambda);
  add("simulate", "Euler-Maruyama histograms against the quadrature density", kField | kEps | kSim | kDt);
  add("simulate-pdmp", "PDMP histograms by thinning against the quadrature density", kPdmp | kLambda | kSim);
  add("check-hj", "viscosity-solution check of a candidate", kField | kHj);
  add("compare", "phi, fw, density and simulate on one field, with a gap report", kField | kEps | kSim | kDt);
  add("pipeline", "every stage, plus the viscosity check and optional PDMP stages",
      kField | kPdmp | kEps | kLambda | kSim | kDt | kHj);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error (usage): " << e.what() << "\n";
    err << "hint: run 'quasipot --help' for the list of commands, or 'quasipot <command> --help'\n";
    return kExitValidation;
  }

  try {
    for (auto& [name, sc] : subs) {
      if (!sc.app->parsed()) continue;
      RunConfig c = defaults_for(name);
      if (!sc.config->empty()) c = from_manifest(io::read_json(*sc.config), c);
      c.command = name;
      sc.flags->apply(c);
      return execute(c, out);
    }
    throw Error(ErrorKind::Validation, "no command given");
  } catch (const Error& e) {
    report_error(err, e);
    return e.is_numerical() ? kExitNumerical : kExitValidation;
  } catch (const json::exception& e) {
    report_error(err, Error(ErrorKind::Validation, e.what()));
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    report_error(err, Error(ErrorKind::Io, e.what()));
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error (internal): " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, std::cout, std::cerr);
}

}  // namespace quasipot::cli
