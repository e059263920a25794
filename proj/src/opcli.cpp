#include "fdnoma/opcli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "fdnoma/config_io.hpp"
#include "fdnoma/mcsim.hpp"

namespace fdnoma {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + s + "' is not a number");
  }
}

}  // namespace

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::snr_db: return "snr_db";
    case Axis::mu: return "mu";
    case Axis::sigma2_est_SR: return "sigma2_est_SR";
    case Axis::sigma2_est_RU: return "sigma2_est_RU";
    case Axis::d_SR: return "d_SR";
  }
  return "unknown";
}

Axis parse_axis(const std::string& name) {
  for (Axis a : {Axis::snr_db, Axis::mu, Axis::sigma2_est_SR, Axis::sigma2_est_RU, Axis::d_SR}) {
    if (to_string(a) == name) return a;
  }
  throw UsageError("unknown axis '" + name + "' (expected snr_db, mu, sigma2_est_SR, sigma2_est_RU or d_SR)");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid: expected start:stop:step, got '" + text + "'");
    const double start = parse_number(parts[0], "grid start");
    const double stop = parse_number(parts[1], "grid stop");
    const double step = parse_number(parts[2], "grid step");
    if (!(step > 0.0)) throw UsageError("grid: step must be positive");
    if (stop < start) throw UsageError("grid: stop must not be below start");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
      double v = start + static_cast<double>(i) * step;
      // Snap values such as 0.30000000000000004 to the decimal the user meant.
      const double snapped = std::round(v * 1e12) / 1e12;
      if (std::abs(snapped - v) < 1e-12 * std::max(1.0, std::abs(v))) v = snapped;
      grid.push_back(v);
    }
  } else {
    for (const auto& p : split(text, ',')) grid.push_back(parse_number(p, "grid"));
  }
  if (grid.empty()) throw UsageError("grid: no points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw UsageError("grid: values must be strictly increasing");
  }
  return grid;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  for (const auto& name : split(text, ',')) {
    const auto m = parse_method(name);
    if (!m) {
      throw UsageError("unknown method '" + name +
                       "' (expected exact, lower_bound, asymptotic_ideal, asymptotic_practical, monte_carlo, "
                       "hd_noma or fd_oma)");
    }
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw UsageError("no methods given");
  return out;
}

std::vector<std::size_t> parse_users(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& s : split(text, ',')) {
    const double v = parse_number(s, "users");
    if (v < 1.0 || v != std::floor(v)) throw UsageError("users: indices are positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SystemConfig apply_axis(const SystemConfig& cfg, Axis axis, double value) {
  SystemConfig out = cfg;
  switch (axis) {
    case Axis::snr_db: break;
    case Axis::mu: out.mu = value; break;
    case Axis::sigma2_est_SR: out.sigma2_est_SR = value; break;
    case Axis::sigma2_est_RU: std::fill(out.sigma2_est_RU.begin(), out.sigma2_est_RU.end(), value); break;
    case Axis::d_SR: place_relay(out, value); break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets.

namespace {

SystemConfig base_config(int n_B, int n_R, double mu, int m = 1) {
  SystemConfig c;
  c.n_B = n_B;
  c.n_R = n_R;
  c.mu = mu;
  c.m_SR = c.m_RR = m;
  std::fill(c.m_RU.begin(), c.m_RU.end(), static_cast<double>(m));
  return c;
}

void make_practical(SystemConfig& c, double sigma2 = 0.01, double fd_tau = 0.03) {
  c.sigma2_est_SR = sigma2;
  std::fill(c.sigma2_est_RU.begin(), c.sigma2_est_RU.end(), sigma2);
  c.fd_tau_SR = fd_tau;
  std::fill(c.fd_tau_RU.begin(), c.fd_tau_RU.end(), fd_tau);
}

std::string antenna_label(const SystemConfig& c) {
  return "nB=" + std::to_string(c.n_B) + ";nR=" + std::to_string(c.n_R);
}

const std::vector<std::pair<std::string, std::function<FigurePreset()>>>& preset_table() {
  static const std::vector<std::pair<std::string, std::function<FigurePreset()>>> table = {
      {"fig3",
       [] {
         FigurePreset p{"fig3", "mu = 1, m = 1, ideal; error floor", {}, {}};
         p.sweep.grid = parse_grid("0:50:5");
         p.sweep.methods = {Method::exact, Method::lower_bound, Method::asymptotic_ideal, Method::monte_carlo};
         for (int nB : {2, 3}) {
           auto c = base_config(nB, 1, 1.0);
           p.variants.push_back({antenna_label(c), c});
         }
         return p;
       }},
      {"fig4",
       [] {
         FigurePreset p{"fig4", "mu in {0, 0.25, 0.5, 1}, n_B = 2, m = 1, ideal", {}, {}};
         p.sweep.grid = parse_grid("0:40:5");
         p.sweep.methods = {Method::exact, Method::asymptotic_ideal, Method::monte_carlo};
         for (double mu : {0.0, 0.25, 0.5, 1.0}) {
           auto c = base_config(2, 1, mu);
           p.variants.push_back({"mu=" + format_double(mu), c});
         }
         return p;
       }},
      {"fig5",
       [] {
         FigurePreset p{"fig5", "n_B in {2, 3}, mu = 0.25, m = 1, ideal", {}, {}};
         p.sweep.grid = parse_grid("0:40:5");
         p.sweep.methods = {Method::exact, Method::asymptotic_ideal, Method::monte_carlo};
         for (int nB : {2, 3}) {
           auto c = base_config(nB, 1, 0.25);
           p.variants.push_back({antenna_label(c), c});
         }
         return p;
       }},
      {"fig6",
       [] {
         FigurePreset p{"fig6", "practical (sigma2_est = 0.01, fd_tau = 0.03), mu = 0.25, antenna configurations", {},
                        {}};
         p.sweep.grid = parse_grid("0:50:5");
         p.sweep.methods = {Method::exact, Method::asymptotic_practical, Method::monte_carlo};
         for (auto [nB, nR] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}, std::pair{3, 2}}) {
           auto c = base_config(nB, nR, 0.25);
           make_practical(c);
           p.variants.push_back({antenna_label(c), c});
         }
         return p;
       }},
      {"fig7",
       [] {
         FigurePreset p{"fig7", "m in {1, 2}, ideal vs practical, mu = 0.25", {}, {}};
         p.sweep.grid = parse_grid("0:40:5");
         p.sweep.methods = {Method::exact, Method::monte_carlo};
         for (int m : {1, 2}) {
           auto ideal = base_config(2, 1, 0.25, m);
           p.variants.push_back({"m=" + std::to_string(m) + ";ideal", ideal});
           auto practical = ideal;
           make_practical(practical);
           p.variants.push_back({"m=" + std::to_string(m) + ";practical", practical});
         }
         return p;
       }},
      {"fig8",
       [] {
         FigurePreset p{"fig8", "test-bed parameters: n_B = 3, n_R = 2, sigma2_est = 0.048, mu = 0", {}, {}};
         p.sweep.grid = parse_grid("0:40:5");
         p.sweep.methods = {Method::exact, Method::monte_carlo};
         auto c = base_config(3, 2, 0.0);
         c.a = {0.761, 0.191, 0.048};
         c.gamma_th = {2.0, 2.5, 3.0};
         make_practical(c, 0.048, 0.0);
         p.variants.push_back({"testbed", c});
         return p;
       }},
      {"fig9",
       [] {
         FigurePreset p{"fig9", "FD-NOMA vs HD-NOMA over mu at 15 dB, ideal", {}, {}};
         p.sweep.axis = Axis::mu;
         p.sweep.grid = parse_grid("0:1:0.1");
         p.sweep.methods = {Method::exact, Method::monte_carlo, Method::hd_noma};
         // Fig. 9 keeps the FD thresholds for HD-NOMA so that the SIC
         // feasibility condition still holds.
         p.sweep.hd_thresholds = HdThresholdMode::equal;
         p.variants.push_back({"nB=2;nR=1", base_config(2, 1, 0.25)});
         return p;
       }},
      {"fig10",
       [] {
         FigurePreset p{"fig10", "FD-NOMA vs FD-OMA over sigma2_est_SR (fd_tau_SR = 0.03) at 15 dB", {}, {}};
         p.sweep.axis = Axis::sigma2_est_SR;
         p.sweep.grid = parse_grid("0:0.25:0.025");
         p.sweep.methods = {Method::exact, Method::monte_carlo, Method::fd_oma};
         for (int nB : {2, 3}) {
           auto c = base_config(nB, 1, 0.25);
           c.fd_tau_SR = 0.03;
           p.variants.push_back({antenna_label(c), c});
         }
         return p;
       }},
      {"fig10b",
       [] {
         FigurePreset p{"fig10b", "FD-NOMA vs FD-OMA over sigma2_est_RU (fd_tau_RU = 0.03) at 15 dB", {}, {}};
         p.sweep.axis = Axis::sigma2_est_RU;
         p.sweep.grid = parse_grid("0:0.25:0.025");
         p.sweep.methods = {Method::exact, Method::monte_carlo, Method::fd_oma};
         for (int nB : {2, 3}) {
           auto c = base_config(nB, 1, 0.25);
           std::fill(c.fd_tau_RU.begin(), c.fd_tau_RU.end(), 0.03);
           p.variants.push_back({antenna_label(c), c});
         }
         return p;
       }},
      {"fig11",
       [] {
         FigurePreset p{"fig11", "relay placement d_SR at 15 dB, ideal", {}, {}};
         p.sweep.axis = Axis::d_SR;
         p.sweep.grid = parse_grid("0.1:0.9:0.05");
         p.sweep.methods = {Method::exact, Method::monte_carlo, Method::fd_oma};
         for (auto [nB, nR] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}, std::pair{3, 2}}) {
           auto c = base_config(nB, nR, 0.25);
           p.variants.push_back({antenna_label(c), c});
         }
         return p;
       }},
      {"fig12",
       [] {
         FigurePreset p{"fig12", "relay placement d_SR at 15 dB, practical", {}, {}};
         p.sweep.axis = Axis::d_SR;
         p.sweep.grid = parse_grid("0.1:0.9:0.05");
         p.sweep.methods = {Method::exact, Method::monte_carlo, Method::fd_oma};
         for (auto [nB, nR] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}, std::pair{3, 2}}) {
           auto c = base_config(nB, nR, 0.25);
           make_practical(c);
           p.variants.push_back({antenna_label(c), c});
         }
         return p;
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : preset_table()) names.push_back(name);
  return names;
}

FigurePreset figure_preset(const std::string& name) {
  for (const auto& [n, fn] : preset_table()) {
    if (n == name) return fn();
  }
  std::string list;
  for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
  throw UsageError("unknown preset '" + name + "' (available: " + list + ")");
}

// ---------------------------------------------------------------------------
// Sweeps.

namespace {

struct PointTask {
  std::size_t variant = 0;
  std::size_t point = 0;
};

std::vector<CsvRow> evaluate_point(const SweepSpec& spec, const Variant& variant, double axis_value) {
  const SystemConfig cfg = apply_axis(variant.cfg, spec.axis, axis_value);
  const double snr_db = spec.axis == Axis::snr_db ? axis_value : spec.snr_db;
  std::vector<std::size_t> users = spec.users;
  if (users.empty()) {
    for (std::size_t u = 1; u <= cfg.users(); ++u) users.push_back(u);
  }

  ExactOptions exact_opts;
  exact_opts.quad.rel_tol = spec.rel_tol;
  McOptions mc;
  mc.trials = spec.trials;
  mc.seed = spec.seed;
  mc.workers = 1;
  mc.confidence = spec.confidence;
  BaselineOptions bopts;
  bopts.hd_thresholds = spec.hd_thresholds;

  // table[method][user index in `users`]
  std::vector<std::vector<CsvRow>> table(spec.methods.size());
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    const Method method = spec.methods[mi];
    auto blank = [&](std::size_t user) {
      CsvRow r;
      r.variant = variant.label;
      r.axis_value = axis_value;
      r.user = user;
      r.method = method;
      return r;
    };
    const bool simulated =
        method == Method::monte_carlo || method == Method::hd_noma || method == Method::fd_oma;
    if (simulated) {
      // One shared set of draws serves all users.
      const auto start = std::chrono::steady_clock::now();
      std::vector<OutagePoint> pts;
      std::string err;
      try {
        for (std::size_t u : users) {
          if (u > cfg.users()) throw DomainError("user index " + std::to_string(u) + " exceeds L");
        }
        if (method == Method::monte_carlo) {
          pts = simulate_outage_all(cfg, snr_db, mc);
        } else {
          pts = simulate_baseline_all(cfg, snr_db, method == Method::hd_noma ? Baseline::hd_noma : Baseline::fd_oma,
                                      mc, bopts);
        }
      } catch (const std::exception& e) {
        err = e.what();
      }
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      for (std::size_t u : users) {
        CsvRow r = blank(u);
        if (err.empty()) {
          const auto& p = pts.at(u - 1);
          r.op = p.value;
          r.ci = p.ci;
          r.trials = p.trials;
        } else {
          r.error = err;
        }
        if (spec.timing) r.wall_ms = ms / static_cast<double>(users.size());
        table[mi].push_back(r);
      }
      continue;
    }
    for (std::size_t u : users) {
      CsvRow r = blank(u);
      const auto start = std::chrono::steady_clock::now();
      try {
        OutagePoint p;
        switch (method) {
          case Method::exact: p = exact_outage(cfg, snr_db, u, exact_opts); break;
          case Method::lower_bound: p = lower_bound_outage(cfg, snr_db, u); break;
          case Method::asymptotic_ideal: p = asymptotic_outage_ideal(cfg, snr_db, u); break;
          case Method::asymptotic_practical: p = asymptotic_outage_practical(cfg, u, exact_opts); break;
          default: break;
        }
        r.op = p.value;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      if (spec.timing) {
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
      table[mi].push_back(r);
    }
  }
  std::vector<CsvRow> rows;
  for (std::size_t ui = 0; ui < users.size(); ++ui) {
    for (auto& col : table) rows.push_back(col[ui]);
  }
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::vector<CsvRow> run_sweep(const SweepSpec& spec, const std::vector<Variant>& variants) {
  if (spec.grid.empty()) throw UsageError("sweep: empty grid");
  if (spec.methods.empty()) throw UsageError("sweep: no methods");
  std::vector<PointTask> tasks;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (std::size_t i = 0; i < spec.grid.size(); ++i) tasks.push_back({v, i});
  }
  std::vector<std::vector<CsvRow>> results(tasks.size());
  auto run = [&](std::size_t t) {
    results[t] = evaluate_point(spec, variants[tasks[t].variant], spec.grid[tasks[t].point]);
  };
  const unsigned workers = std::max(1u, spec.workers);
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) run(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<CsvRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<CsvRow>& rows) {
  out << kCsvHeader << '\n';
  const std::string axis = to_string(spec.axis);
  for (const auto& r : rows) {
    out << csv_escape(r.variant) << ',' << axis << ',' << format_double(r.axis_value) << ',' << r.user << ','
        << to_string(r.method) << ',';
    if (r.op) out << format_double(*r.op);
    out << ',';
    if (r.ci) out << format_double(r.ci->first);
    out << ',';
    if (r.ci) out << format_double(r.ci->second);
    out << ',';
    if (r.trials > 0) out << r.trials;
    out << ',';
    if (r.wall_ms) out << format_double(std::round(*r.wall_ms * 1000.0) / 1000.0);
    out << ',' << csv_escape(r.error) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Validation.

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::ok: return "ok";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::insufficient_trials: return "insufficient_trials";
  }
  return "unknown";
}

bool ValidationReport::passed() const {
  return std::none_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.status == CheckStatus::fail; });
}

ValidationReport run_validation(const SystemConfig& cfg, const ValidationSpec& spec) {
  validate(cfg);
  ValidationReport report;
  std::vector<std::size_t> users = spec.users;
  if (users.empty()) {
    for (std::size_t u = 1; u <= cfg.users(); ++u) users.push_back(u);
  }
  McOptions mc;
  mc.trials = spec.trials;
  mc.seed = spec.seed;
  mc.workers = spec.workers;
  mc.confidence = spec.confidence;

  // A failing engine call becomes a FAIL row rather than aborting the report.
  auto guarded = [](ValidationRow& row, auto&& compute) {
    try {
      compute();
    } catch (const std::exception& e) {
      row.status = CheckStatus::fail;
      row.detail = e.what();
    }
  };

  for (double snr : spec.snr_grid) {
    const auto sim = simulate_outage_all(cfg, snr, mc);
    for (std::size_t u : users) {
      const auto& p = sim.at(u - 1);
      std::optional<double> exact;

      ValidationRow row{"mc_agreement", snr, u, 0.0, p.value, p.ci, CheckStatus::ok, ""};
      guarded(row, [&] {
        exact = exact_outage(cfg, snr, u, spec.exact).value;
        row.reference = *exact;
        const double expected_events = *exact * static_cast<double>(spec.trials);
        if (expected_events < spec.min_expected_events) {
          row.status = CheckStatus::insufficient_trials;
          std::ostringstream os;
          os << "expected " << expected_events << " outage events; need >= " << spec.min_expected_events;
          row.detail = os.str();
        } else if (*exact < p.ci->first || *exact > p.ci->second) {
          row.status = CheckStatus::fail;
          row.detail = "exact value outside the simulation confidence interval";
        }
      });
      report.rows.push_back(row);

      ValidationRow bound{"bound_order", snr, u, exact.value_or(0.0), 0.0, std::nullopt, CheckStatus::ok, ""};
      if (!exact) {
        bound.status = CheckStatus::fail;
        bound.detail = "exact outage unavailable";
      } else {
        guarded(bound, [&] {
          bound.observed = lower_bound_outage(cfg, snr, u).value;
          if (bound.observed > *exact + spec.bound_tolerance) {
            bound.status = CheckStatus::fail;
            bound.detail = "lower bound exceeds exact outage";
          }
        });
      }
      report.rows.push_back(bound);
    }
  }

  if (is_ideal(cfg) && cfg.mu < 1.0) {
    constexpr double lo = 35.0, hi = 45.0;
    for (std::size_t u : users) {
      ValidationRow row{"slope", hi, u, diversity_order(cfg, u), 0.0, std::nullopt, CheckStatus::ok, ""};
      guarded(row, [&] {
        const double p_lo = exact_outage(cfg, lo, u, spec.exact).value;
        const double p_hi = exact_outage(cfg, hi, u, spec.exact).value;
        if (!(p_lo > 0.0 && p_hi > 0.0)) {
          row.status = CheckStatus::fail;
          row.detail = "outage underflowed to zero";
          return;
        }
        row.observed = -(std::log10(p_hi) - std::log10(p_lo)) / ((hi - lo) / 10.0);
        if (std::abs(row.observed - row.reference) > spec.slope_tolerance * row.reference) {
          row.status = CheckStatus::fail;
          row.detail = "fitted slope over [35, 45] dB deviates from the diversity order";
        }
      });
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_report(std::ostream& out, const ValidationReport& report) {
  out << "check,snr_db,user,reference,observed,ci_low,ci_high,status,detail\n";
  for (const auto& r : report.rows) {
    out << r.check << ',' << format_double(r.snr_db) << ',' << r.user << ',' << format_double(r.reference) << ','
        << format_double(r.observed) << ',';
    if (r.ci) out << format_double(r.ci->first);
    out << ',';
    if (r.ci) out << format_double(r.ci->second);
    out << ',' << to_string(r.status) << ',' << csv_escape(r.detail) << '\n';
  }
  out << (report.passed() ? "result: ok\n" : "result: FAIL\n");
}

}  // namespace fdnoma
