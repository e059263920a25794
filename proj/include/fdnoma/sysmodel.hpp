#pragma once

// System parameters and the impairment algebra shared by the analytic and
// Monte Carlo engines. All SNR-like quantities are linear unless a name says
// otherwise. User indices are 1-based throughout the public API.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fdnoma/errors.hpp"

namespace fdnoma {

struct SystemConfig {
  int n_B = 2;  // base-station antennas (two are selected)
  int n_R = 1;  // receive antennas per user

  double m_SR = 1.0;
  double m_RR = 1.0;
  std::vector<double> m_RU{1.0, 1.0, 1.0};

  double d_SR = 0.5;
  std::vector<double> d_RU{0.5, 0.5, 0.5};
  double eta = 4.0;

  std::vector<double> a{1.0 / 2.0, 1.0 / 3.0, 1.0 / 6.0};
  std::vector<double> gamma_th{0.9, 1.5, 2.0};

  double mu = 0.25;
  double alpha_si = 1.0;

  double sigma2_est_SR = 0.0;
  std::vector<double> sigma2_est_RU{0.0, 0.0, 0.0};
  double fd_tau_SR = 0.0;
  std::vector<double> fd_tau_RU{0.0, 0.0, 0.0};

  std::size_t users() const { return a.size(); }

  bool operator==(const SystemConfig&) const = default;
};

/// Checks structural invariants (sizes, ranges, ordering, sum of a) and the
/// SIC feasibility condition. Throws ConfigError / InfeasibleAllocation.
void validate(const SystemConfig& cfg);

/// Same as validate() minus the feasibility condition; used for baseline
/// configurations whose mapped thresholds may be infeasible by design.
void validate_structure(const SystemConfig& cfg);

/// True when every Nakagami shape is a positive integer.
bool has_integer_shapes(const SystemConfig& cfg);

/// True when no channel-estimation error and no feedback delay is configured.
bool is_ideal(const SystemConfig& cfg);

/// Sets d_SR and d_RU[l] = 1 - d_SR for all users.
void place_relay(SystemConfig& cfg, double d_SR);

struct LinkStats {
  double omega_SR = 0.0;
  double omega_hat_SR = 0.0;
  double rho_SR = 1.0;
  double sigma2_SR = 0.0;

  std::vector<double> omega_RU;
  std::vector<double> omega_hat_RU;
  std::vector<double> rho_RU;
  std::vector<double> sigma2_RU;

  double omega_RR = 0.0;
};

/// Channel powers, correlation coefficients and the combined CEE + FBD
/// variances at average SNR snr_bar (linear).
LinkStats derive_link_stats(const SystemConfig& cfg, double snr_bar);

/// SINR constants for user l. theta1..theta5 enter the exact SINR;
/// the primed set drives the lower bound.
struct ThetaSet {
  double theta1 = 1.0;
  double theta2 = 1.0;
  double theta3 = 1.0;
  double theta4 = 1.0;
  double theta5 = 1.0;

  double thetap1 = 1.0;
  double thetap2 = 1.0;
  double thetap3 = 1.0;
  double thetap4 = 1.0;
};

ThetaSet compute_theta(const LinkStats& stats, double snr_bar, std::size_t user);

/// Normalized SIC thresholds.
///   delta[k]      = gamma_th,k / (snr_bar (a_k - gamma_th,k sum_{t>k} a_t))
///   delta_dag[l]  = max_{k<=l} delta[k]
///   lambda_dag[l] = snr_bar * delta_dag[l]   (SNR independent)
/// Vectors are 0-based: entry i belongs to user i + 1.
struct DeltaSet {
  std::vector<double> delta;
  std::vector<double> delta_dag;
  std::vector<double> lambda_dag;
};

DeltaSet compute_deltas(const SystemConfig& cfg, double snr_bar);

enum class Baseline { hd_noma, fd_oma };

/// How HD-NOMA thresholds are derived from the FD ones.
///   rate_matched: (1 + g)^2 - 1, the half-duplex rate-matching relation.
///   equal:        unchanged thresholds (the choice used for the mu sweep preset).
enum class HdThresholdMode { rate_matched, equal };

/// FD_OMA yields a single threshold prod_l(1 + g_l) - 1; HD_NOMA yields one
/// threshold per user.
std::vector<double> map_baseline_thresholds(const SystemConfig& cfg, Baseline baseline,
                                            HdThresholdMode mode = HdThresholdMode::rate_matched);

std::string to_string(Baseline baseline);

inline double db_to_linear(double db) {
  return std::pow(10.0, db / 10.0);
}

}  // namespace fdnoma
