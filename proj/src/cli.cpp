#include "plab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plab/coefficients.hpp"
#include "plab/density.hpp"
#include "plab/errors.hpp"
#include "plab/io.hpp"
#include "plab/malliavin.hpp"
#include "plab/noise.hpp"
#include "plab/parallel.hpp"
#include "plab/perturbed.hpp"
#include "plab/reflected.hpp"
#include "plab/verify.hpp"

namespace plab {

namespace {

using nlohmann::json;

struct Options {
  std::uint64_t seed = 42;
  std::size_t paths = 1000;
  std::size_t steps = 256;
  double horizon = 1.0;
  double alpha = 0.0;
  double y0 = 0.0;
  std::string coeffs = "constant:1";
  std::string drift;  // empty keeps the zero drift
  std::string out_dir;
  std::string format = "csv";
  std::string config_path;
  bool no_timestamp = false;
  bool reflected = false;

  // subcommand-specific
  double bandwidth = 0.0;  // nonpositive selects the automatic rule
  std::size_t grid_points = 256;
  std::string deltas = "0.04,0.02,0.01";
  double eps = 1e-4;
  std::string verify_mode = "all";
  std::size_t iters = 8;
  double delta = 0.04;
};

std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size())
      throw std::invalid_argument("bad entry '" + item + "' in delta list");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty delta list");
  return out;
}

CoefficientField build_coeffs(const Options& o) {
  CoefficientField c = parse_coefficient(o.coeffs);
  if (!o.drift.empty()) c = with_drift(std::move(c), o.drift);
  return c;
}

json inputs_json(const Options& o) {
  return {{"seed", o.seed},       {"paths", o.paths},   {"steps", o.steps},
          {"horizon", o.horizon}, {"alpha", o.alpha},   {"y0", o.y0},
          {"coeffs", o.coeffs},   {"drift", o.drift},   {"reflected", o.reflected},
          {"format", o.format}};
}

void emit(const Options& o, std::ostream& out, const std::string& name,
          const std::string& content) {
  if (o.out_dir.empty()) {
    out << content;
    return;
  }
  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path target = std::filesystem::path(o.out_dir) / name;
  std::ofstream f(target, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file " + target.string());
  f << content;
  out << "wrote " << target.string() << "\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- subcommands -----------------------------------------------------------

void run_simulate(const Options& o, std::ostream& out) {
  const TimeGrid grid(o.horizon, o.steps);
  const BrownianGrid w = sample_brownian(grid, o.seed);
  const CoefficientField coeffs = build_coeffs(o);
  std::ostringstream body;
  if (o.reflected) {
    const ReflectedSpec spec{o.alpha, coeffs};
    const ReflectedPath path = solve_stepwise(spec, w);
    if (o.format == "json") {
      json j{{"inputs", inputs_json(o)}, {"t", json::array()},
             {"x", path.x},              {"g", path.g},
             {"m", path.m},              {"l", path.l},
             {"v", path.v}};
      for (std::size_t k = 0; k <= grid.n_steps; ++k) j["t"].push_back(grid.t(k));
      emit(o, out, "path.json", dump(j));
    } else {
      write_reflected_csv(body, path, !o.no_timestamp);
      emit(o, out, "path.csv", body.str());
    }
  } else {
    const PerturbedSpec spec{o.y0, o.alpha, coeffs};
    const ProcessPath path = solve_closed_form(spec, w);
    if (o.format == "json") {
      json j{{"inputs", inputs_json(o)},
             {"t", json::array()},
             {"y", path.y},
             {"C", path.cumulative},
             {"F", path.running_max_cum},
             {"m", path.m},
             {"theta", path.argmax_index}};
      for (std::size_t k = 0; k <= grid.n_steps; ++k) j["t"].push_back(grid.t(k));
      emit(o, out, "path.json", dump(j));
    } else {
      write_perturbed_csv(body, path, !o.no_timestamp);
      emit(o, out, "path.csv", body.str());
    }
  }
}

std::vector<double> terminal_samples(const Options& o, const CoefficientField& coeffs) {
  const TimeGrid grid(o.horizon, o.steps);
  std::vector<double> samples(o.paths);
  if (o.reflected) {
    const ReflectedSpec spec{o.alpha, coeffs};
    parallel_for(o.paths, [&](std::size_t p) {
      samples[p] = solve_stepwise(spec, sample_brownian(grid, o.seed + p)).x.back();
    });
  } else {
    const PerturbedSpec spec{o.y0, o.alpha, coeffs};
    parallel_for(o.paths, [&](std::size_t p) {
      samples[p] = solve_closed_form(spec, sample_brownian(grid, o.seed + p)).y.back();
    });
  }
  return samples;
}

void run_density(const Options& o, std::ostream& out) {
  const CoefficientField coeffs = build_coeffs(o);
  const std::vector<double> samples = terminal_samples(o, coeffs);
  const DensityEstimate est = kde(samples, o.bandwidth, o.grid_points);
  const auto scan = atom_scan(samples, parse_delta_list(o.deltas));
  if (o.format == "json") {
    json j{{"inputs", inputs_json(o)},
           {"bandwidth", est.bandwidth},
           {"n_samples", est.n_samples},
           {"grid_points", est.grid_points},
           {"values", est.values},
           {"atoms", json::array()}};
    for (const auto& e : scan) j["atoms"].push_back({{"delta", e.delta}, {"max_mass", e.max_mass}});
    emit(o, out, "density.json", dump(j));
  } else {
    std::ostringstream d, a;
    write_density_csv(d, est, !o.no_timestamp);
    write_atom_csv(a, scan, !o.no_timestamp);
    emit(o, out, "density.csv", d.str());
    emit(o, out, "atoms.csv", a.str());
  }
}

void run_malliavin(const Options& o, std::ostream& out) {
  const TimeGrid grid(o.horizon, o.steps);
  const BrownianGrid w = sample_brownian(grid, o.seed);
  const CoefficientField coeffs = build_coeffs(o);
  const CameronMartinShift h = sample_shift_direction(grid, o.seed + 1000003);

  std::vector<double> row;
  double fd = 0.0;
  bool excluded = false;
  std::ostringstream field_csv;
  if (o.reflected) {
    const ReflectedSpec spec{o.alpha, coeffs};
    const ReflectedPath path = solve_stepwise(spec, w);
    row = terminal_row_reflected(path, spec);
    fd = directional_fd(spec, w, h, o.eps);
    excluded = fd_exclude_reflected(path, spec);
    if (o.format != "json")
      write_field_csv(field_csv, propagate_reflected(path, spec), !o.no_timestamp);
  } else {
    const PerturbedSpec spec{o.y0, o.alpha, coeffs};
    const ProcessPath path = solve_closed_form(spec, w);
    row = terminal_row_perturbed(path, spec);
    fd = directional_fd(spec, w, h, o.eps);
    if (o.format != "json")
      write_field_csv(field_csv, propagate_perturbed(path, spec), !o.no_timestamp);
  }
  const double paired = pair_h(row, h);
  const double hnorm = h_norm_from_row(row, grid.dt());
  json summary{{"inputs", inputs_json(o)},
               {"h_norm_squared", hnorm},
               {"pair_h", paired},
               {"directional_fd", fd},
               {"relative_error", std::abs(paired - fd) / (std::abs(fd) + 1e-8)},
               {"eps", o.eps},
               {"fd_excluded", excluded}};
  if (o.format == "json") {
    summary["terminal_row"] = row;
    emit(o, out, "malliavin.json", dump(summary));
  } else {
    std::ostringstream row_csv;
    write_terminal_row_csv(row_csv, row, grid, !o.no_timestamp);
    emit(o, out, "field.csv", field_csv.str());
    emit(o, out, "terminal_row.csv", row_csv.str());
    emit(o, out, "malliavin.json", dump(summary));
  }
}

double median_of(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  return n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

json verify_picard(const Options& o, const CoefficientField& coeffs, bool& pass) {
  if (o.iters < 4)
    throw std::invalid_argument("picard verification needs --iters >= 4");
  const TimeGrid grid(o.horizon, o.steps);
  const std::size_t half = o.iters / 2;
  std::vector<double> ratios(o.paths);
  parallel_for(o.paths, [&](std::size_t p) {
    const BrownianGrid w = sample_brownian(grid, o.seed + p);
    PicardReport rep;
    if (o.reflected)
      rep = picard_convergence_report(ReflectedSpec{o.alpha, coeffs}, w, o.iters);
    else
      rep = picard_convergence_report(PerturbedSpec{o.y0, o.alpha, coeffs}, w, o.iters);
    const double d_half = rep.distances[half - 1];
    const double d_full = rep.distances[o.iters - 1];
    ratios[p] = d_half > 0.0 ? d_full / d_half : 0.0;
  });
  const double med = median_of(ratios);
  pass = med < 0.5;
  return {{"mode", "picard"},      {"median_ratio", med}, {"iters", o.iters},
          {"half_iters", half},    {"seeds", o.paths},    {"pass", pass}};
}

json verify_nondegeneracy(const Options& o, const CoefficientField& coeffs, bool& pass) {
  const TimeGrid grid(o.horizon, o.steps);
  HNormStat stat;
  if (o.reflected)
    stat = nondegeneracy_report(ReflectedSpec{o.alpha, coeffs}, grid, o.paths, o.seed);
  else
    stat = nondegeneracy_report(PerturbedSpec{o.y0, o.alpha, coeffs}, grid, o.paths, o.seed);
  pass = stat.fraction_zero == 0.0;
  json j = to_json(stat);
  j["mode"] = "nondegeneracy";
  j["pass"] = pass;
  return j;
}

json verify_zerohit(const Options& o, const CoefficientField& coeffs, bool& pass) {
  const ZeroHitReport rep = zero_hit_probability(ReflectedSpec{o.alpha, coeffs}, o.horizon,
                                                 o.steps, o.delta, o.paths, o.seed);
  pass = rep.fraction > 0.0 && rep.ratio >= 0.3 && rep.ratio <= 0.7;
  json j = to_json(rep);
  j["mode"] = "zerohit";
  j["pass"] = pass;
  return j;
}

bool run_verify(const Options& o, std::ostream& out) {
  const CoefficientField coeffs = build_coeffs(o);
  json report{{"inputs", inputs_json(o)}};
  bool pass = true;
  if (o.verify_mode == "picard" || o.verify_mode == "all") {
    bool p = false;
    report["picard"] = verify_picard(o, coeffs, p);
    pass = pass && p;
  }
  if (o.verify_mode == "nondegeneracy" || o.verify_mode == "all") {
    bool p = false;
    report["nondegeneracy"] = verify_nondegeneracy(o, coeffs, p);
    pass = pass && p;
  }
  if (o.verify_mode == "zerohit" || o.verify_mode == "all") {
    if (o.alpha < 0.5) {
      bool p = false;
      report["zerohit"] = verify_zerohit(o, coeffs, p);
      pass = pass && p;
    } else if (o.verify_mode == "zerohit") {
      throw std::invalid_argument("zerohit verification needs alpha < 1/2");
    } else {
      report["zerohit"] = {{"mode", "zerohit"}, {"skipped", "needs alpha < 1/2"}};
    }
  }
  report["pass"] = pass;
  emit(o, out, "verify_" + o.verify_mode + ".json", dump(report));
  return pass;
}

bool run_compare(const Options& o, std::ostream& out) {
  const CoefficientField coeffs = build_coeffs(o);
  const TimeGrid grid(o.horizon, o.steps);
  const ComparisonReport rep =
      comparison_test(coeffs, o.alpha, o.paths, grid, o.seed);
  json j{{"inputs", inputs_json(o)}, {"report", to_json(rep)}, {"pass", rep.pass()}};
  emit(o, out, "compare.json", dump(j));
  return rep.pass();
}

// ---- config file -----------------------------------------------------------

struct ConfigBinding {
  std::string key;
  CLI::Option* opt;
  std::function<void(const json&)> apply;
};

void apply_config(const std::string& path, const std::vector<ConfigBinding>& bindings,
                  std::ostream& err) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config file " + path);
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse failure: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(bindings.begin(), bindings.end(),
                                 [&key](const ConfigBinding& b) { return b.key == key; });
    if (it == bindings.end())
      throw std::invalid_argument("unknown config key '" + key + "'");
    if (it->opt->count() == 0) it->apply(value);  // flags override config
  }
  (void)err;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Simulation and verification laboratory for diffusions driven by "
               "their own running maximum, with and without reflection at zero."};
  app.require_subcommand(1);

  std::vector<ConfigBinding> bindings;
  const auto bind = [&bindings](const std::string& key, CLI::Option* opt, auto* target) {
    bindings.push_back({key, opt, [target](const json& v) {
                          *target = v.get<std::remove_pointer_t<decltype(target)>>();
                        }});
  };

  bind("seed", app.add_option("--seed", o.seed, "base RNG seed")->capture_default_str(),
       &o.seed);
  bind("paths",
       app.add_option("--paths", o.paths, "Monte Carlo path count")->capture_default_str(),
       &o.paths);
  bind("steps",
       app.add_option("--steps", o.steps, "grid steps")->capture_default_str()
           ->check(CLI::PositiveNumber),
       &o.steps);
  bind("horizon",
       app.add_option("--horizon", o.horizon, "time horizon T")->capture_default_str(),
       &o.horizon);
  bind("alpha",
       app.add_option("--alpha", o.alpha, "running-max feedback strength")
           ->capture_default_str(),
       &o.alpha);
  bind("y0", app.add_option("--y0", o.y0, "initial value (non-reflected equation)")
                 ->capture_default_str(),
       &o.y0);
  bind("coeffs",
       app.add_option("--coeffs", o.coeffs,
                      "diffusion coefficient, name:params among constant:c, "
                      "affine:c:s, sin_perturbed:c0:c1, tanh_bounded:c0:c1")
           ->capture_default_str(),
       &o.coeffs);
  bind("drift",
       app.add_option("--drift", o.drift, "drift coefficient, same format; default 0"),
       &o.drift);
  bind("out",
       app.add_option("--out", o.out_dir, "output directory; stdout when omitted"),
       &o.out_dir);
  bind("format",
       app.add_option("--format", o.format, "output format")
           ->capture_default_str()
           ->check(CLI::IsMember({"csv", "json"})),
       &o.format);
  bind("no_timestamp",
       app.add_flag("--no-timestamp", o.no_timestamp,
                    "suppress the generated-at header line in CSV output"),
       &o.no_timestamp);
  bind("reflected",
       app.add_flag("--reflected", o.reflected,
                    "use the reflected equation (starts at 0, stays nonnegative)"),
       &o.reflected);
  app.add_option("--config", o.config_path,
                 "JSON file with defaults for any long flag; explicit flags win");

  auto* sim = app.add_subcommand("simulate", "solve one path and export it");
  auto* den = app.add_subcommand(
      "density", "Monte Carlo terminal samples: kernel density and atom scan");
  auto* mal = app.add_subcommand(
      "malliavin",
      "sensitivity field of one path, its H-norm and a finite-difference probe");
  auto* ver = app.add_subcommand("verify", "run verification reports (exit 3 on FAIL)");
  auto* cmp = app.add_subcommand(
      "compare",
      "pathwise comparison of the reflected equation with and without feedback");
  for (auto* sub : {sim, den, mal, ver, cmp}) sub->fallthrough();

  bind("bandwidth",
       den->add_option("--bandwidth", o.bandwidth,
                       "kernel bandwidth; nonpositive selects the automatic rule"),
       &o.bandwidth);
  bind("grid_points",
       den->add_option("--grid-points", o.grid_points, "density grid size")
           ->capture_default_str(),
       &o.grid_points);
  bind("deltas",
       den->add_option("--deltas", o.deltas, "comma list of atom-scan bin widths")
           ->capture_default_str(),
       &o.deltas);
  bind("eps",
       mal->add_option("--eps", o.eps, "finite-difference step")->capture_default_str(),
       &o.eps);
  bind("mode",
       ver->add_option("mode", o.verify_mode, "picard | nondegeneracy | zerohit | all")
           ->check(CLI::IsMember({"picard", "nondegeneracy", "zerohit", "all"})),
       &o.verify_mode);
  bind("iters",
       ver->add_option("--iters", o.iters, "Picard iterations")->capture_default_str(),
       &o.iters);
  bind("delta",
       ver->add_option("--delta", o.delta, "zero-hit boundary width")
           ->capture_default_str(),
       &o.delta);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("perturbed_lab");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!o.config_path.empty()) apply_config(o.config_path, bindings, err);
    if (app.got_subcommand(sim)) {
      run_simulate(o, out);
    } else if (app.got_subcommand(den)) {
      run_density(o, out);
    } else if (app.got_subcommand(mal)) {
      run_malliavin(o, out);
    } else if (app.got_subcommand(ver)) {
      if (!run_verify(o, out)) {
        err << "verification FAILED\n";
        return 3;
      }
    } else if (app.got_subcommand(cmp)) {
      if (!run_compare(o, out)) {
        err << "comparison FAILED\n";
        return 3;
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace plab
