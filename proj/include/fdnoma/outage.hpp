#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

namespace fdnoma {

enum class Method {
  exact,
  lower_bound,
  asymptotic_ideal,
  asymptotic_practical,
  monte_carlo,
  hd_noma,
  fd_oma,
};

std::string to_string(Method method);
/// Accepts the names produced by to_string(Method).
std::optional<Method> parse_method(const std::string& name);

/// One outage-probability estimate for user `user` (1-based).
struct OutagePoint {
  std::size_t user = 1;
  double snr_db = 0.0;
  double value = 0.0;
  Method method = Method::exact;
  /// Confidence interval; present only for simulated methods.
  std::optional<std::pair<double, double>> ci;
  /// Simulated trial count (0 for analytic methods).
  std::size_t trials = 0;
  /// 1 - (summed success probability) before clamping to [0, 1].
  double residual = 0.0;
  /// True for error-floor values that do not depend on snr_db.
  bool snr_independent = false;
};

}  // namespace fdnoma
