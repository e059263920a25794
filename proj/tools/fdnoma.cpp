// fdnoma: outage-probability sweeps for the FD cooperative NOMA relay chain.
//
//   fdnoma analyze  --config sys.cfg --grid 0:40:5
//   fdnoma simulate --preset fig4 --trials 10000000 --out fig4_mc.csv
//   fdnoma sweep    --preset fig9
//   fdnoma preset   fig6            (prints the preset configuration)
//   fdnoma validate --preset fig5 --grid 0:30:5 --trials 10000000
//
// Exit codes: 0 ok, 1 usage, 2 config, 3 numeric failure, 4 validation failure.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fdnoma/config_io.hpp"
#include "fdnoma/errors.hpp"
#include "fdnoma/opcli.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kConfig = 2, kNumeric = 3, kValidation = 4 };

struct Options {
  std::string config;
  std::string preset;
  std::string axis;
  std::string grid;
  std::string users;
  std::string methods;
  std::optional<double> snr_db;
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<double> rel_tol;
  unsigned workers = 1;
  std::optional<double> confidence;
  bool timing = false;
  std::string hd_thresholds;  // empty keeps the preset (or default) choice
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "System configuration file");
  cmd->add_option("--preset", o.preset, "Figure preset (see 'fdnoma preset --list')");
  cmd->add_option("--axis", o.axis, "Sweep axis: snr_db, mu, sigma2_est_SR, sigma2_est_RU, d_SR");
  cmd->add_option("--grid", o.grid, "Axis grid as start:stop:step or a comma list");
  cmd->add_option("--users", o.users, "Comma-separated 1-based user indices (default: all)");
  cmd->add_option("--snr", o.snr_db, "SNR in dB when the axis is not snr_db");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per point");
  cmd->add_option("--seed", o.seed, "Monte Carlo seed");
  cmd->add_option("--out", o.out, "Output file (default: stdout)");
  cmd->add_option("--rel-tol", o.rel_tol, "Relative tolerance of the numerical integration");
  cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  cmd->add_option("--confidence", o.confidence, "Confidence level of the Wilson intervals");
}

// Builds the sweep from the preset (if any), then applies the explicit
// flags on top. --config replaces the preset's system configurations.
std::pair<fdnoma::SweepSpec, std::vector<fdnoma::Variant>> build_sweep(const Options& o,
                                                                      const std::vector<fdnoma::Method>& defaults) {
  fdnoma::SweepSpec spec;
  std::vector<fdnoma::Variant> variants;
  if (!o.preset.empty()) {
    auto p = fdnoma::figure_preset(o.preset);
    spec = p.sweep;
    variants = p.variants;
  }
  if (!o.config.empty()) {
    variants = {{o.config, fdnoma::load_config(o.config)}};
  }
  if (variants.empty()) throw fdnoma::UsageError("one of --config or --preset is required");

  if (!o.axis.empty()) spec.axis = fdnoma::parse_axis(o.axis);
  if (!o.grid.empty()) spec.grid = fdnoma::parse_grid(o.grid);
  else if (o.preset.empty()) throw fdnoma::UsageError("--grid is required without --preset");
  if (o.snr_db) spec.snr_db = *o.snr_db;
  if (!o.users.empty()) spec.users = fdnoma::parse_users(o.users);
  if (!o.methods.empty()) spec.methods = fdnoma::parse_methods(o.methods);
  else if (!defaults.empty()) spec.methods = defaults;
  if (o.trials) spec.trials = *o.trials;
  spec.seed = o.seed;
  spec.workers = o.workers;
  if (o.rel_tol) spec.rel_tol = *o.rel_tol;
  if (o.confidence) spec.confidence = *o.confidence;
  spec.timing = o.timing;
  if (o.hd_thresholds == "equal") {
    spec.hd_thresholds = fdnoma::HdThresholdMode::equal;
  } else if (o.hd_thresholds == "rate_matched") {
    spec.hd_thresholds = fdnoma::HdThresholdMode::rate_matched;
  } else if (!o.hd_thresholds.empty()) {
    throw fdnoma::UsageError("--hd-thresholds must be 'equal' or 'rate_matched'");
  }
  return {spec, variants};
}

template <typename Fn>
int with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) return fn(std::cout);
  std::ofstream file(path);
  if (!file) throw fdnoma::UsageError("cannot open output file '" + path + "'");
  const int rc = fn(file);
  file.flush();
  if (!file) throw fdnoma::UsageError("write to '" + path + "' failed");
  return rc;
}

int run_rows(const Options& o, const std::vector<fdnoma::Method>& defaults,
             const std::vector<fdnoma::Method>& allowed) {
  auto [spec, variants] = build_sweep(o, defaults);
  if (!allowed.empty()) {
    for (auto m : spec.methods) {
      if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
        throw fdnoma::UsageError("method '" + fdnoma::to_string(m) + "' is not available in this subcommand");
      }
    }
  }
  const auto rows = fdnoma::run_sweep(spec, variants);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  with_output(o.out, [&](std::ostream& out) {
    fdnoma::write_csv(out, spec, rows);
    return 0;
  });
  if (failed > 0) {
    std::cerr << "fdnoma: " << failed << " of " << rows.size() << " rows failed (see the error column)\n";
    return kNumeric;
  }
  return kOk;
}

int run_preset(const std::string& name, bool list) {
  if (list || name.empty()) {
    for (const auto& n : fdnoma::preset_names()) {
      std::cout << n << "  " << fdnoma::figure_preset(n).description << '\n';
    }
    return kOk;
  }
  const auto p = fdnoma::figure_preset(name);
  std::cout << "# preset " << p.name << ": " << p.description << '\n';
  std::cout << "# axis = " << fdnoma::to_string(p.sweep.axis) << '\n';
  std::cout << "# grid =";
  for (std::size_t i = 0; i < p.sweep.grid.size(); ++i) {
    std::cout << (i ? ", " : " ") << fdnoma::format_double(p.sweep.grid[i]);
  }
  std::cout << '\n';
  if (p.sweep.axis != fdnoma::Axis::snr_db) {
    std::cout << "# snr_db = " << fdnoma::format_double(p.sweep.snr_db) << '\n';
  }
  std::cout << "# methods =";
  for (std::size_t i = 0; i < p.sweep.methods.size(); ++i) {
    std::cout << (i ? ", " : " ") << fdnoma::to_string(p.sweep.methods[i]);
  }
  std::cout << '\n';
  for (const auto& v : p.variants) {
    std::cout << "\n# variant " << v.label << '\n' << fdnoma::serialize_config(v.cfg);
  }
  return kOk;
}

int run_validate(const Options& o) {
  auto [spec, variants] = build_sweep(o, {});
  if (spec.axis != fdnoma::Axis::snr_db) throw fdnoma::UsageError("validate sweeps SNR only");
  fdnoma::ValidationSpec vs;
  vs.snr_grid = spec.grid;
  vs.users = spec.users;
  vs.trials = spec.trials;
  vs.seed = spec.seed;
  vs.workers = spec.workers;
  if (o.confidence) vs.confidence = *o.confidence;
  vs.exact.quad.rel_tol = spec.rel_tol;
  bool passed = true;
  with_output(o.out, [&](std::ostream& out) {
    for (const auto& v : variants) {
      out << "# variant " << v.label << '\n';
      const auto report = fdnoma::run_validation(v.cfg, vs);
      fdnoma::write_report(out, report);
      passed = passed && report.passed();
    }
    return 0;
  });
  return passed ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage probability of full-duplex cooperative NOMA with TAS/Alamouti and AF relaying"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "Closed-form outage (exact, bounds, asymptotes) as CSV");
  add_common(analyze, o);
  analyze->add_option("--methods", o.methods, "Comma-separated analytic methods (default: exact)");
  analyze->add_flag("--timing", o.timing, "Fill the wall_ms column");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo outage estimates as CSV");
  add_common(simulate, o);
  simulate->add_option("--methods", o.methods, "monte_carlo, hd_noma, fd_oma (default: monte_carlo)");
  simulate->add_option("--hd-thresholds", o.hd_thresholds, "HD-NOMA thresholds: equal or rate_matched");
  simulate->add_flag("--timing", o.timing, "Fill the wall_ms column");

  auto* sweep = app.add_subcommand("sweep", "Any mix of methods over an axis grid as CSV");
  add_common(sweep, o);
  sweep->add_option("--methods", o.methods, "Comma-separated methods (default: preset's or exact)");
  sweep->add_option("--hd-thresholds", o.hd_thresholds, "HD-NOMA thresholds: equal or rate_matched");
  sweep->add_flag("--timing", o.timing, "Fill the wall_ms column");

  std::string preset_name;
  bool preset_list = false;
  auto* preset = app.add_subcommand("preset", "List presets or print one preset's sweep and configurations");
  preset->add_option("name", preset_name, "Preset name");
  preset->add_flag("--list", preset_list, "List the available presets");

  auto* validate = app.add_subcommand("validate", "Exact vs Monte Carlo, bound ordering and slope checks");
  add_common(validate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  using fdnoma::Method;
  try {
    if (analyze->parsed()) {
      return run_rows(o, o.methods.empty() ? std::vector<Method>{Method::exact} : std::vector<Method>{},
                      {Method::exact, Method::lower_bound, Method::asymptotic_ideal, Method::asymptotic_practical});
    }
    if (simulate->parsed()) {
      return run_rows(o, o.methods.empty() ? std::vector<Method>{Method::monte_carlo} : std::vector<Method>{},
                      {Method::monte_carlo, Method::hd_noma, Method::fd_oma});
    }
    if (sweep->parsed()) return run_rows(o, {}, {});
    if (preset->parsed()) return run_preset(preset_name, preset_list);
    if (validate->parsed()) return run_validate(o);
  } catch (const fdnoma::UsageError& e) {
    std::cerr << "fdnoma: " << e.what() << '\n';
    return kUsage;
  } catch (const fdnoma::ConfigError& e) {
    std::cerr << "fdnoma: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fdnoma::DomainError& e) {
    std::cerr << "fdnoma: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const fdnoma::DegenerateInput& e) {
    std::cerr << "fdnoma: numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const fdnoma::NumericError& e) {
    std::cerr << "fdnoma: numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "fdnoma: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
