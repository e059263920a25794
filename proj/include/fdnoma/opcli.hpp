#pragma once

// Sweep driver behind the command-line tool: axis/grid handling, figure
// presets, CSV output and the cross-engine validation report.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdnoma/analytic.hpp"
#include "fdnoma/outage.hpp"
#include "fdnoma/sysmodel.hpp"

namespace fdnoma {

/// Bad command-line usage (unknown preset, malformed grid, ...).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis { snr_db, mu, sigma2_est_SR, sigma2_est_RU, d_SR };

std::string to_string(Axis axis);
Axis parse_axis(const std::string& name);

/// "start:stop:step" (inclusive stop, tolerant to rounding) or a comma list.
/// The result must be strictly increasing.
std::vector<double> parse_grid(const std::string& text);

/// Comma-separated method names, e.g. "exact,monte_carlo".
std::vector<Method> parse_methods(const std::string& text);

/// Comma-separated 1-based user indices.
std::vector<std::size_t> parse_users(const std::string& text);

/// Returns cfg with the axis variable set to value. d_SR also moves the
/// users so that d_RU = 1 - d_SR.
SystemConfig apply_axis(const SystemConfig& cfg, Axis axis, double value);

struct SweepSpec {
  Axis axis = Axis::snr_db;
  std::vector<double> grid{0.0};
  /// SNR used when the axis is not snr_db.
  double snr_db = 15.0;
  std::vector<Method> methods{Method::exact};
  /// Empty selects every user.
  std::vector<std::size_t> users;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double rel_tol = 1e-10;
  double confidence = 0.95;
  /// Fill the wall_ms column. Off by default so output is byte-stable.
  bool timing = false;
  HdThresholdMode hd_thresholds = HdThresholdMode::rate_matched;
};

struct Variant {
  std::string label;
  SystemConfig cfg;
};

struct FigurePreset {
  std::string name;
  std::string description;
  SweepSpec sweep;
  std::vector<Variant> variants;
};

std::vector<std::string> preset_names();
/// Throws UsageError listing the known presets for an unknown name.
FigurePreset figure_preset(const std::string& name);

struct CsvRow {
  std::string variant;
  double axis_value = 0.0;
  std::size_t user = 1;
  Method method = Method::exact;
  std::optional<double> op;
  std::optional<std::pair<double, double>> ci;
  std::uint64_t trials = 0;
  std::optional<double> wall_ms;
  std::string error;
};

/// Evaluates every (variant, axis point, user, method) combination. Rows
/// come out ordered by variant, axis point, user, then the order of
/// spec.methods, whatever the worker count. Failures become rows with an
/// error message instead of aborting the sweep.
std::vector<CsvRow> run_sweep(const SweepSpec& spec, const std::vector<Variant>& variants);

inline constexpr const char* kCsvHeader = "variant,axis,axis_value,user,method,op,ci_low,ci_high,trials,wall_ms,error";

void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<CsvRow>& rows);

// ---------------------------------------------------------------------------
// Cross-engine validation.

struct ValidationSpec {
  std::vector<double> snr_grid{0.0, 10.0, 20.0};
  std::vector<std::size_t> users;  // empty: all
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double confidence = 0.99;
  /// Absolute slack for the lower-bound ordering check.
  double bound_tolerance = 1e-8;
  /// Relative tolerance of the diversity-slope check (ideal, mu < 1 only).
  double slope_tolerance = 0.10;
  /// Expected outage count below which a CI comparison is not meaningful.
  double min_expected_events = 10.0;
  ExactOptions exact{};
};

enum class CheckStatus { ok, fail, insufficient_trials };
std::string to_string(CheckStatus status);

struct ValidationRow {
  std::string check;  // "mc_agreement", "bound_order", "slope"
  double snr_db = 0.0;
  std::size_t user = 1;
  double reference = 0.0;  // exact OP or expected slope
  double observed = 0.0;   // MC estimate, lower bound or fitted slope
  std::optional<std::pair<double, double>> ci;
  CheckStatus status = CheckStatus::ok;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool passed() const;
};

ValidationReport run_validation(const SystemConfig& cfg, const ValidationSpec& spec);
void write_report(std::ostream& out, const ValidationReport& report);

}  // namespace fdnoma
