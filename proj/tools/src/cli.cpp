#include "amspec_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "amspec/aubry.hpp"
#include "amspec/cocycle.hpp"
#include "amspec/continued_fraction.hpp"
#include "amspec/error.hpp"
#include "amspec/model_io.hpp"
#include "amspec/spectral.hpp"
#include "amspec/twist_model.hpp"
#include "amspec_cli/run_config.hpp"
#include "amspec_cli/worker_pool.hpp"

namespace amspec::cli {
namespace {

using nlohmann::json;

struct CommonFlags {
  std::string model_path;
  std::string output_path;
  std::vector<std::string> tolerances;
  int parallelism = 1;
};

// Writes to the output file when one is given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

RunConfig base_config(const std::string& command, const CommonFlags& flags) {
  RunConfig cfg;
  cfg.command = command;
  cfg.model_path = flags.model_path;
  cfg.output_path = flags.output_path;
  cfg.parallelism = resolve_workers(flags.parallelism);
  for (const auto& t : flags.tolerances) cfg.tolerances.insert(parse_tolerance(t));
  return cfg;
}

std::vector<double> energy_grid(double emin, double emax, int points) {
  if (points < 1) throw Error(ErrorCode::InvalidArgument, "energy grid needs at least one point");
  if (points > 1 && !(emax > emin)) throw Error(ErrorCode::InvalidArgument, "energy range must have emax > emin");
  std::vector<double> grid(static_cast<std::size_t>(points));
  // Weighted form hits exact grid values such as 0 that emin + i * step misses.
  for (int i = 0; i < points; ++i) {
    grid[i] = points == 1 ? emin : (emin * (points - 1 - i) + emax * i) / (points - 1);
  }
  return grid;
}

// ---------------------------------------------------------------- construct

struct ConstructFlags {
  std::string alpha;
  std::string phi;
  int modes = kDefaultModes;
  int grid = 2048;
};

int run_construct(const ConstructFlags& flags, const CommonFlags& common, std::ostream& out, std::ostream& err) {
  RunConfig cfg = base_config("construct", common);
  cfg.parameters = {{"alpha", flags.alpha},
                    {"phi", flags.phi},
                    {"modes", std::to_string(flags.modes)},
                    {"grid", std::to_string(flags.grid)}};
  cfg.tolerances.emplace("certification", 1e-9);

  const Frequency alpha = Frequency::parse(flags.alpha);
  const HarmonicSpec harmonics = parse_phi_spec(flags.phi);
  const CircleDiffeo phi = CircleDiffeo::from_derivative_harmonics(harmonics.cos_amps, harmonics.sin_amps);
  ConstructOptions opts;
  opts.modes = flags.modes;
  opts.grid = flags.grid;
  opts.tolerance = cfg.tolerances.at("certification");
  const TwistModel model = construct_from_conjugacy(alpha, phi, opts);

  const BrjunoResult brjuno = brjuno_sum(alpha, 60);
  json j = to_json(model);
  j["meta"]["run"] = cfg.to_json();
  j["meta"]["frequency"] = {{"brjuno_partial_sum", brjuno.partial_sum},
                            {"beta_estimate", brjuno.beta_estimate},
                            {"depth", brjuno.depth_used},
                            {"precision_exhausted", brjuno.precision_exhausted}};
  Sink sink(common.output_path, out);
  sink.get() << j.dump(1) << "\n";
  std::ostream& report = sink.is_file() ? out : err;
  const ModelResiduals& r = model.residuals;
  report << "invariance " << format_double(r.invariance) << "\n"
         << "mean_f " << format_double(r.mean_f) << "\n"
         << "g_consistency " << format_double(r.g_consistency) << "\n"
         << "derivative_identity " << format_double(r.derivative_identity) << "\n"
         << "strip_h0 " << format_double(model.strip_h0) << "\n"
         << "brjuno_partial_sum " << format_double(brjuno.partial_sum) << " (depth " << brjuno.depth_used
         << (brjuno.precision_exhausted ? ", precision exhausted" : "") << ")\n"
         << "beta_estimate " << format_double(brjuno.beta_estimate) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string name;
  double value;
  bool pass;
  std::string bound;
};

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol = {
      {"invariance", 1e-9},          {"mean_f", 1e-10},        {"g_consistency", 1e-9},
      {"derivative_identity", 1e-9}, {"parabolic_reduction", 1e-8}, {"z_formula", 1e-10},
      {"bloch", 1e-9},               {"dual", 1e-8},           {"potential_identity", 1e-9},
  };
  return tol;
}

int run_verify(const CommonFlags& common, std::ostream& out, std::ostream& err) {
  RunConfig cfg = base_config("verify", common);
  for (const auto& [name, value] : cfg.tolerances) {
    if (!default_tolerances().count(name)) throw Error(ErrorCode::InvalidArgument, "unknown tolerance '" + name + "'");
  }
  for (const auto& [name, value] : default_tolerances()) cfg.tolerances.emplace(name, value);
  const auto& tol = cfg.tolerances;

  const std::string hash = file_hash(common.model_path);
  const TwistModel model = load_model(common.model_path);

  std::vector<Check> checks;
  auto bounded = [&](const std::string& name, double value) {
    const double t = tol.at(name);
    checks.push_back({name, value, value <= t, "<= " + format_double(t)});
  };
  const ModelResiduals& r = model.residuals;
  bounded("invariance", r.invariance);
  bounded("mean_f", r.mean_f);
  double g_consistency = r.g_consistency;
  try {
    g_consistency = std::max(g_consistency, induced_circle_map(model, std::numeric_limits<double>::infinity()).disagreement);
  } catch (const Error& e) {
    err << "g_consistency: " << e.what() << "\n";
    g_consistency = std::numeric_limits<double>::quiet_NaN();
  }
  bounded("g_consistency", g_consistency);
  bounded("derivative_identity", r.derivative_identity);

  double reduction = std::numeric_limits<double>::quiet_NaN();
  double z_formula = std::numeric_limits<double>::quiet_NaN();
  double nu0 = std::numeric_limits<double>::quiet_NaN();
  try {
    const ReductionResult red = parabolic_reduce(model, std::numeric_limits<double>::infinity());
    reduction = red.residual;
    z_formula = red.formula_mismatch;
    nu0 = red.nu0;
  } catch (const Error& e) {
    err << "parabolic_reduction: " << e.what() << "\n";
  }
  bounded("parabolic_reduction", reduction);
  bounded("z_formula", z_formula);
  checks.push_back({"nu0", nu0, nu0 < 0.0, "< 0"});

  const BlochCheck bloch = bloch_section_check(model);
  bounded("bloch", std::max(bloch.section, bloch.scalar));

  double dual = std::numeric_limits<double>::quiet_NaN();
  double decay = std::numeric_limits<double>::quiet_NaN();
  double potential = std::numeric_limits<double>::quiet_NaN();
  try {
    const DualCheck dc = dual_eigencheck(model);
    dual = dc.residual;
    decay = dc.decay_rate;
    potential = dc.potential_identity;
  } catch (const Error& e) {
    err << "dual: " << e.what() << "\n";
  }
  bounded("dual", dual);
  checks.push_back({"dual_decay_rate", decay, decay < 0.0, "< 0"});
  bounded("potential_identity", potential);

  Sink sink(common.output_path, out);
  std::ostream& o = sink.get();
  write_csv_header(o, cfg, hash);
  o << "check,value,bound,status\n";
  bool all = true;
  for (const Check& c : checks) {
    all &= c.pass;
    o << c.name << "," << format_double(c.value) << "," << c.bound << "," << (c.pass ? "PASS" : "FAIL") << "\n";
  }
  return all ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- minimize

struct MinimizeFlags {
  long p = 0;
  long q = 1;
  std::optional<double> drift;
  std::optional<double> standard_lambda;
  int periods = 1;
};

int run_minimize(const MinimizeFlags& flags, const CommonFlags& common, std::ostream& out, std::ostream& err) {
  RunConfig cfg = base_config("minimize", common);
  cfg.tolerances.emplace("residual", 1e-10);
  cfg.tolerances.emplace("hessian_slack", 1e-10);
  const PeriodicOrbitSpec spec{flags.p, flags.q, flags.drift.value_or(static_cast<double>(flags.p) / flags.q)};
  spec.validate();
  if (flags.periods < 1) throw Error(ErrorCode::InvalidArgument, "--periods must be positive");
  cfg.parameters = {{"p", std::to_string(flags.p)},
                    {"q", std::to_string(flags.q)},
                    {"a", format_double(spec.a)},
                    {"periods", std::to_string(flags.periods)}};

  std::optional<TwistModel> model;
  FourierSeries f;
  std::string hash = "none";
  if (flags.standard_lambda) {
    if (!common.model_path.empty()) throw Error(ErrorCode::InvalidArgument, "use either --model or --standard");
    cfg.parameters["standard_lambda"] = format_double(*flags.standard_lambda);
    f = FourierSeries::harmonic(1, 0.0, *flags.standard_lambda / kTwoPi);
  } else {
    if (common.model_path.empty()) throw Error(ErrorCode::InvalidArgument, "minimize needs --model or --standard");
    hash = file_hash(common.model_path);
    model = load_model(common.model_path);
    f = model->f;
  }

  MinimizeOptions opts;
  opts.tol = cfg.tolerances.at("residual");
  opts.hessian_slack = cfg.tolerances.at("hessian_slack");
  json summary;
  summary["run"] = cfg.to_json();
  summary["model_hash"] = hash;
  std::optional<PeriodicMinimizer> found;
  try {
    found = minimize_periodic(f, spec, opts);
  } catch (const Error& e) {
    err << e.what() << "\n";
    summary["converged"] = false;
    summary["error"] = std::string(to_string(e.code()));
  }

  Sink sink(common.output_path, out);
  std::ostream& o = sink.get();
  write_csv_header(o, cfg, hash);
  o << "n,x,r,residual\n";
  if (found) {
    const Configuration c = unroll(*found, spec, flags.periods);
    const double prev = c.points[static_cast<std::size_t>(spec.q) - 1] - static_cast<double>(spec.p);
    const FourierSeries ft = f.trimmed(kCoefficientNoiseFloor);
    for (std::size_t n = 0; n < c.size(); ++n) {
      const double before = n == 0 ? prev : c.points[n - 1];
      const std::size_t k = n % static_cast<std::size_t>(spec.q);
      const double after = found->config.points[k + 1] + static_cast<double>((n / spec.q) * spec.p);
      const double residual = after - 2.0 * c.points[n] + before - ft.eval(c.points[n]);
      o << n << "," << format_double(c.points[n]) << "," << format_double(c.points[n] - before) << ","
        << format_double(residual) << "\n";
    }
    summary["converged"] = true;
    summary["action"] = found->action;
    summary["top_eigenvalue"] = found->top_eigenvalue;
    summary["residual"] = found->residual;
    summary["mean_r"] = found->mean_r;
    if (model) summary["graph_distance"] = graph_distance(*model, c);
  }
  (sink.is_file() ? out : err) << summary.dump() << "\n";
  return found ? kExitOk : kExitFail;
}

// ---------------------------------------------------------------- cocycle

struct CocycleFlags {
  double energy = 0.0;
  long iters = 100000;
  double strip = 0.0;
  double phase = 0.0;
};

// Log-log slope of sup ||A_k|| over the finite part of k in [n/16, n].
double growth_fit(const std::vector<double>& sup) {
  const std::size_t n = sup.size() - 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t k = std::max<std::size_t>(1, n / 16); k <= n; k = std::max(k + 1, k * 17 / 16)) {
    if (!std::isfinite(sup[k]) || sup[k] <= 0.0) break;
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(sup[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int run_cocycle(const CocycleFlags& flags, const CommonFlags& common, std::ostream& out) {
  RunConfig cfg = base_config("cocycle", common);
  if (flags.iters < 2) throw Error(ErrorCode::InvalidArgument, "--iters must be at least 2");
  cfg.parameters = {{"energy", format_double(flags.energy)},
                    {"iters", std::to_string(flags.iters)},
                    {"strip", format_double(flags.strip)},
                    {"phase", format_double(flags.phase)}};
  const std::string hash = file_hash(common.model_path);
  const TwistModel model = load_model(common.model_path);
  const MatrixCocycle c = schrodinger_cocycle(model.V, flags.energy, model.alpha.value);

  json j;
  j["run"] = cfg.to_json();
  j["model_hash"] = hash;
  j["lyapunov"] = number_or_null(lyapunov_exponent(c, flags.iters, flags.strip));
  j["rotation"] = fibered_rotation_number(c, flags.iters, flags.phase);
  j["sup_norm_growth_fit"] = number_or_null(growth_fit(sup_norm_growth(c, std::min<long>(flags.iters, 4096), 16)));
  const UhResult uh = uh_test(c, flags.iters);
  // Boolean when decided, null when the margin sits inside the noise band.
  j["uh"] = uh.verdict == UhVerdict::Inconclusive ? json(nullptr) : json(uh.hyperbolic());
  j["margin"] = uh.margin;
  Sink sink(common.output_path, out);
  sink.get() << j.dump(1) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- spectrum / sweep

struct GridFlags {
  double emin = -4.5;
  double emax = 0.5;
  int points = 51;
  int size = 2000;
  double phase = 0.0;
  long iters = 20000;
  double eps = 0.01;
};

struct EnergyRow {
  double energy = 0.0;
  double lyapunov = 0.0;
  double rotation = 0.0;
  double ids_counting = 0.0;
  double ids_rotation = 0.0;
  UhResult uh;
  double measure_factor = 0.0;
};

int run_grid(bool sweep, const GridFlags& flags, const CommonFlags& common, std::ostream& out, std::ostream& err) {
  RunConfig cfg = base_config(sweep ? "sweep" : "spectrum", common);
  if (flags.iters < 2) throw Error(ErrorCode::InvalidArgument, "--iters must be at least 2");
  if (flags.size < 2) throw Error(ErrorCode::InvalidArgument, "--size must be at least 2");
  cfg.parameters = {{"emin", format_double(flags.emin)},     {"emax", format_double(flags.emax)},
                    {"points", std::to_string(flags.points)}, {"size", std::to_string(flags.size)},
                    {"phase", format_double(flags.phase)},   {"iters", std::to_string(flags.iters)}};
  if (sweep) cfg.parameters["eps"] = format_double(flags.eps);
  const std::vector<double> energies = energy_grid(flags.emin, flags.emax, flags.points);
  const std::string hash = file_hash(common.model_path);
  const TwistModel model = load_model(common.model_path);
  const double alpha = model.alpha.value;
  const TridiagonalOperator section = quasi_periodic_section(model.V, alpha, flags.phase, flags.size);

  auto compute = [&](std::size_t i) {
    EnergyRow row;
    row.energy = energies[i];
    const MatrixCocycle c = schrodinger_cocycle(model.V, row.energy, alpha);
    row.lyapunov = lyapunov_exponent(c, flags.iters);
    row.rotation = fibered_rotation_number(c, flags.iters, flags.phase);
    const double above = std::nextafter(row.energy, std::numeric_limits<double>::infinity());
    row.ids_counting = static_cast<double>(section.count_below(above)) / flags.size;
    row.ids_rotation = 1.0 - 2.0 * row.rotation;
    row.uh = uh_test(c, flags.iters);
    if (sweep) row.measure_factor = spectral_measure_factor(c, flags.eps);
    return row;
  };
  const auto rows = parallel_map<EnergyRow>(energies.size(), cfg.parallelism, interrupt_flag(), compute);

  Sink sink(common.output_path, out);
  std::ostream& o = sink.get();
  write_csv_header(o, cfg, hash);
  o << (sweep ? "E,lyapunov,rotation,ids_counting,ids_rotation,uh,margin,measure_factor\n"
              : "E,ids_counting,ids_rotation,lyapunov,rotation,uh\n");
  std::size_t written = 0;
  for (const auto& row : rows) {
    if (!row) break;
    const EnergyRow& r = *row;
    if (sweep) {
      o << format_double(r.energy) << "," << format_double(r.lyapunov) << "," << format_double(r.rotation) << ","
        << format_double(r.ids_counting) << "," << format_double(r.ids_rotation) << "," << to_string(r.uh.verdict)
        << "," << format_double(r.uh.margin) << "," << format_double(r.measure_factor) << "\n";
    } else {
      o << format_double(r.energy) << "," << format_double(r.ids_counting) << "," << format_double(r.ids_rotation)
        << "," << format_double(r.lyapunov) << "," << format_double(r.rotation) << "," << to_string(r.uh.verdict)
        << "\n";
    }
    ++written;
  }
  if (written < rows.size()) {
    o << "# truncated: " << written << " of " << rows.size() << " rows written (interrupted)\n";
    o.flush();
    err << "interrupted after " << written << " of " << rows.size() << " energies\n";
    return kExitFail;
  }
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonInvertible:
      return kExitUsage;
    default:
      return kExitFail;
  }
}

}  // namespace

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twist maps with analytic invariant curves and their Schroedinger cocycles", "amspec"};
  app.require_subcommand(1);

  CommonFlags common;
  auto add_common = [&](CLI::App* sub, bool needs_model) {
    auto* model = sub->add_option("--model,-m", common.model_path, "model JSON file");
    if (needs_model) model->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", common.output_path, "output file (default: standard output)");
    sub->add_option("--tol", common.tolerances, "tolerance override name=value (repeatable)");
    sub->add_option("--parallelism,-j", common.parallelism, "worker count (AMSPEC_WORKERS overrides)");
  };

  ConstructFlags construct;
  auto* c_construct = app.add_subcommand("construct", "build a certified model from alpha and phi");
  c_construct->add_option("--alpha", construct.alpha, "golden, sqrt2m1 or a decimal in (0,1)")->required();
  c_construct->add_option("--phi", construct.phi, "phi' harmonics, e.g. c1=0.3,s2=0.01")->required();
  c_construct->add_option("--modes", construct.modes, "retained Fourier modes")->check(CLI::Range(1, 8192));
  c_construct->add_option("--grid", construct.grid, "sampling grid")->check(CLI::Range(16, 1 << 16));
  add_common(c_construct, false);

  auto* c_verify = app.add_subcommand("verify", "recheck every identity of a model file");
  add_common(c_verify, true);

  MinimizeFlags minimize;
  auto* c_minimize = app.add_subcommand("minimize", "periodic action minimizer of rotation number p/q");
  c_minimize->add_option("--p", minimize.p, "numerator")->required();
  c_minimize->add_option("--q", minimize.q, "denominator")->required();
  c_minimize->add_option("--a", minimize.drift, "drift parameter (default p/q)");
  c_minimize->add_option("--standard", minimize.standard_lambda, "use the standard map force of strength lambda");
  c_minimize->add_option("--periods", minimize.periods, "periods written to the CSV");
  add_common(c_minimize, false);

  CocycleFlags cocycle;
  auto* c_cocycle = app.add_subcommand("cocycle", "Lyapunov exponent, rotation number and dichotomy at one energy");
  c_cocycle->add_option("--energy", cocycle.energy, "energy E");
  c_cocycle->add_option("--iters", cocycle.iters, "iterates");
  c_cocycle->add_option("--strip", cocycle.strip, "imaginary phase offset for the Lyapunov exponent");
  c_cocycle->add_option("--phase", cocycle.phase, "start phase for the rotation number");
  add_common(c_cocycle, true);

  GridFlags spectrum;
  auto* c_spectrum = app.add_subcommand("spectrum", "IDS, Lyapunov exponent and rotation number on an energy grid");
  c_spectrum->add_option("--size", spectrum.size, "finite-section size");
  c_spectrum->add_option("--emin", spectrum.emin, "lowest energy");
  c_spectrum->add_option("--emax", spectrum.emax, "highest energy");
  c_spectrum->add_option("--grid", spectrum.points, "number of energies");
  c_spectrum->add_option("--phase", spectrum.phase, "phase of the section");
  c_spectrum->add_option("--iters", spectrum.iters, "cocycle iterates per energy");
  add_common(c_spectrum, true);

  GridFlags sweep;
  sweep.points = 101;
  auto* c_sweep = app.add_subcommand("sweep", "energy sweep including the spectral-measure factor");
  c_sweep->add_option("--emin", sweep.emin, "lowest energy")->required();
  c_sweep->add_option("--emax", sweep.emax, "highest energy")->required();
  c_sweep->add_option("--points", sweep.points, "number of energies");
  c_sweep->add_option("--size", sweep.size, "finite-section size for the counting IDS");
  c_sweep->add_option("--phase", sweep.phase, "phase");
  c_sweep->add_option("--iters", sweep.iters, "cocycle iterates per energy");
  c_sweep->add_option("--eps", sweep.eps, "radius for the spectral-measure factor")->check(CLI::PositiveNumber);
  add_common(c_sweep, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_construct->parsed()) return run_construct(construct, common, out, err);
    if (c_verify->parsed()) return run_verify(common, out, err);
    if (c_minimize->parsed()) return run_minimize(minimize, common, out, err);
    if (c_cocycle->parsed()) return run_cocycle(cocycle, common, out);
    if (c_spectrum->parsed()) return run_grid(false, spectrum, common, out, err);
    if (c_sweep->parsed()) return run_grid(true, sweep, common, out, err);
  } catch (const Error& e) {
    err << "amspec: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "amspec: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace amspec::cli
