#include "fdnoma/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace fdnoma {

namespace {

constexpr double kSumTolerance = 1e-12;
// First zero of J0; fd_tau must keep rho strictly positive.
constexpr double kJ0FirstZero = 2.404825557695773;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_per_user(const std::vector<double>& v, std::size_t L, const char* name) {
  if (v.size() != L) {
    std::ostringstream os;
    os << name << ": expected " << L << " entries (one per user), got " << v.size();
    fail(os.str());
  }
}

double correlation(double fd_tau) { return std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * fd_tau); }

}  // namespace

void validate_structure(const SystemConfig& cfg) {
  const std::size_t L = cfg.users();
  if (L == 0) fail("a: at least one user is required");
  if (cfg.n_B < 2) fail("n_B: Alamouti transmission needs at least two base-station antennas");
  if (cfg.n_R < 1) fail("n_R: must be >= 1");
  check_per_user(cfg.gamma_th, L, "gamma_th");
  check_per_user(cfg.m_RU, L, "m_RU");
  check_per_user(cfg.d_RU, L, "d_RU");
  check_per_user(cfg.sigma2_est_RU, L, "sigma2_est_RU");
  check_per_user(cfg.fd_tau_RU, L, "fd_tau_RU");

  auto shape_ok = [](double m) { return std::isfinite(m) && m >= 0.5; };
  if (!shape_ok(cfg.m_SR)) fail("m_SR: Nakagami shape must be >= 0.5");
  if (!shape_ok(cfg.m_RR)) fail("m_RR: Nakagami shape must be >= 0.5");
  for (double m : cfg.m_RU) {
    if (!shape_ok(m)) fail("m_RU: Nakagami shape must be >= 0.5");
  }

  if (!(cfg.d_SR > 0.0)) fail("d_SR: distance must be positive");
  for (double d : cfg.d_RU) {
    if (!(d > 0.0)) fail("d_RU: distance must be positive");
  }
  if (!(cfg.eta > 0.0)) fail("eta: path-loss exponent must be positive");

  const double sum = std::accumulate(cfg.a.begin(), cfg.a.end(), 0.0);
  if (std::abs(sum - 1.0) > kSumTolerance) fail("a: power coefficients must sum to 1");
  for (std::size_t i = 0; i < L; ++i) {
    if (!(cfg.a[i] > 0.0)) fail("a: power coefficients must be positive");
    if (i > 0 && !(cfg.a[i - 1] > cfg.a[i])) fail("a: power coefficients must be strictly decreasing");
    if (!(cfg.gamma_th[i] >= 0.0)) fail("gamma_th: thresholds must be nonnegative");
  }

  if (!(cfg.mu >= 0.0 && cfg.mu <= 1.0)) fail("mu: must lie in [0, 1]");
  if (!(cfg.alpha_si > 0.0)) fail("alpha_si: must be positive");

  if (!(cfg.sigma2_est_SR >= 0.0)) fail("sigma2_est_SR: must be nonnegative");
  for (double s : cfg.sigma2_est_RU) {
    if (!(s >= 0.0)) fail("sigma2_est_RU: must be nonnegative");
  }
  auto tau_ok = [](double t) { return t >= 0.0 && 2.0 * std::numbers::pi * t < kJ0FirstZero; };
  if (!tau_ok(cfg.fd_tau_SR)) fail("fd_tau_SR: must be in [0, 0.38) so that rho > 0");
  for (double t : cfg.fd_tau_RU) {
    if (!tau_ok(t)) fail("fd_tau_RU: must be in [0, 0.38) so that rho > 0");
  }
}

void validate(const SystemConfig& cfg) {
  validate_structure(cfg);
  compute_deltas(cfg, 1.0);
}

bool has_integer_shapes(const SystemConfig& cfg) {
  auto is_int = [](double m) { return m >= 1.0 && std::floor(m) == m; };
  return is_int(cfg.m_SR) && is_int(cfg.m_RR) && std::all_of(cfg.m_RU.begin(), cfg.m_RU.end(), is_int);
}

bool is_ideal(const SystemConfig& cfg) {
  auto zero = [](double v) { return v == 0.0; };
  return cfg.sigma2_est_SR == 0.0 && cfg.fd_tau_SR == 0.0 &&
         std::all_of(cfg.sigma2_est_RU.begin(), cfg.sigma2_est_RU.end(), zero) &&
         std::all_of(cfg.fd_tau_RU.begin(), cfg.fd_tau_RU.end(), zero);
}

void place_relay(SystemConfig& cfg, double d_SR) {
  cfg.d_SR = d_SR;
  std::fill(cfg.d_RU.begin(), cfg.d_RU.end(), 1.0 - d_SR);
}

LinkStats derive_link_stats(const SystemConfig& cfg, double snr_bar) {
  if (!(snr_bar > 0.0)) throw DomainError("derive_link_stats: snr_bar must be positive");
  LinkStats s;
  s.omega_SR = std::pow(cfg.d_SR, -cfg.eta);
  s.omega_hat_SR = s.omega_SR - cfg.sigma2_est_SR;
  if (!(s.omega_hat_SR > 0.0)) {
    fail("sigma2_est_SR: estimation-error variance must be below the S-R channel power");
  }
  s.rho_SR = correlation(cfg.fd_tau_SR);
  s.sigma2_SR = (1.0 - s.rho_SR * s.rho_SR) * s.omega_hat_SR + cfg.sigma2_est_SR;

  const std::size_t L = cfg.users();
  s.omega_RU.resize(L);
  s.omega_hat_RU.resize(L);
  s.rho_RU.resize(L);
  s.sigma2_RU.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    s.omega_RU[i] = std::pow(cfg.d_RU[i], -cfg.eta);
    s.omega_hat_RU[i] = s.omega_RU[i] - cfg.sigma2_est_RU[i];
    if (!(s.omega_hat_RU[i] > 0.0)) {
      fail("sigma2_est_RU: estimation-error variance must be below the R-U channel power");
    }
    s.rho_RU[i] = correlation(cfg.fd_tau_RU[i]);
    s.sigma2_RU[i] = (1.0 - s.rho_RU[i] * s.rho_RU[i]) * s.omega_hat_RU[i] + cfg.sigma2_est_RU[i];
  }
  s.omega_RR = cfg.alpha_si * std::pow(snr_bar, cfg.mu - 1.0);
  return s;
}

ThetaSet compute_theta(const LinkStats& stats, double g, std::size_t user) {
  const std::size_t i = user - 1;
  const double s_sr = stats.sigma2_SR;
  const double s_ru = stats.sigma2_RU.at(i);
  const double r_sr = stats.rho_SR * stats.rho_SR;
  const double r_ru = stats.rho_RU.at(i) * stats.rho_RU.at(i);

  ThetaSet t;
  t.theta1 = 0.5 * g * s_ru / r_ru + 1.0 / r_ru;
  t.theta2 = 0.5 * g * s_sr / r_sr + 1.0 / r_sr;
  t.theta3 = (g * s_ru + 1.0) / (r_sr * r_ru);
  t.theta4 = 1.0 / r_sr;
  t.theta5 = (0.5 * g * g * s_sr * s_ru + g * s_ru + g * s_sr + 1.0) / (r_sr * r_ru);

  t.thetap1 = t.theta1;
  t.thetap2 = 1.0 / r_sr;
  t.thetap3 = (g * s_ru + 1.0) / (r_sr * r_ru);
  // Chosen so that thetap2 * thetap4 == theta2, i.e. the factorization
  // (thetap2 g B + thetap3)(g C + thetap4) reproduces the B-linear term.
  t.thetap4 = 0.5 * g * s_sr + 1.0;
  return t;
}

DeltaSet compute_deltas(const SystemConfig& cfg, double snr_bar) {
  const std::size_t L = cfg.users();
  DeltaSet d;
  d.delta.resize(L);
  d.delta_dag.resize(L);
  d.lambda_dag.resize(L);
  double tail = 0.0;  // sum_{t>k} a_t
  std::vector<double> tails(L);
  for (std::size_t k = L; k-- > 0;) {
    tails[k] = tail;
    tail += cfg.a[k];
  }
  double running = 0.0;
  for (std::size_t k = 0; k < L; ++k) {
    const double margin = cfg.a[k] - cfg.gamma_th[k] * tails[k];
    if (!(margin > 0.0)) {
      std::ostringstream os;
      os << "infeasible power allocation for user " << (k + 1) << ": a_k - gamma_th,k * sum_{t>k} a_t = "
         << margin << " <= 0";
      throw InfeasibleAllocation(os.str(), k + 1);
    }
    const double lambda = cfg.gamma_th[k] / margin;
    d.delta[k] = lambda / snr_bar;
    running = std::max(running, lambda);
    d.lambda_dag[k] = running;
    d.delta_dag[k] = running / snr_bar;
  }
  return d;
}

std::vector<double> map_baseline_thresholds(const SystemConfig& cfg, Baseline baseline,
                                            HdThresholdMode mode) {
  if (baseline == Baseline::fd_oma) {
    double prod = 1.0;
    for (double g : cfg.gamma_th) prod *= 1.0 + g;
    return {prod - 1.0};
  }
  std::vector<double> out = cfg.gamma_th;
  if (mode == HdThresholdMode::rate_matched) {
    for (double& g : out) g = (1.0 + g) * (1.0 + g) - 1.0;
  }
  return out;
}

std::string to_string(Baseline baseline) {
  return baseline == Baseline::hd_noma ? "hd_noma" : "fd_oma";
}

}  // namespace fdnoma
