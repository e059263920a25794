#include "fdnoma/outage.hpp"

#include <array>

namespace fdnoma {

namespace {

constexpr std::array<std::pair<Method, const char*>, 7> kNames = {{
    {Method::exact, "exact"},
    {Method::lower_bound, "lower_bound"},
    {Method::asymptotic_ideal, "asymptotic_ideal"},
    {Method::asymptotic_practical, "asymptotic_practical"},
    {Method::monte_carlo, "monte_carlo"},
    {Method::hd_noma, "hd_noma"},
    {Method::fd_oma, "fd_oma"},
}};

}  // namespace

std::string to_string(Method method) {
  for (const auto& [m, name] : kNames) {
    if (m == method) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  for (const auto& [m, n] : kNames) {
    if (name == n) return m;
  }
  return std::nullopt;
}

}  // namespace fdnoma
