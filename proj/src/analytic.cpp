#include "fdnoma/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "fdnoma/specfn.hpp"

namespace fdnoma {

namespace {

using specfn::binomial;
using specfn::ln_binomial;
using specfn::ln_gamma;

constexpr double kClampTolerance = 1e-6;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Neumaier-compensated sum of values sorted by increasing magnitude.
double stable_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

/// Accumulates signed terms given as (log magnitude, sign).
class LogTermSum {
 public:
  void add(double log_mag, double sign) {
    if (log_mag == kNegInf || sign == 0.0) return;
    values_.push_back(sign * std::exp(log_mag));
  }
  double total() const { return stable_sum(values_); }
  std::size_t count() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// log(x^k) with the convention 0^0 = 1.
double log_pow(double x, int k) {
  if (k == 0) return 0.0;
  if (x == 0.0) return kNegInf;
  return k * std::log(x);
}

double probability_from_residual(double residual, const std::string& what) {
  if (residual < -kClampTolerance || residual > 1.0 + kClampTolerance || std::isnan(residual)) {
    std::ostringstream os;
    os << what << ": outage residual " << residual << " lies outside [0, 1] beyond tolerance";
    throw NumericError(os.str());
  }
  return std::clamp(residual, 0.0, 1.0);
}

void check_user(const SystemConfig& cfg, std::size_t l) {
  if (l < 1 || l > cfg.users()) {
    std::ostringstream os;
    os << "user index " << l << " outside 1.." << cfg.users();
    throw DomainError(os.str());
  }
}

void require_integer_shapes(const SystemConfig& cfg) {
  if (!has_integer_shapes(cfg)) {
    throw DomainError("analytic engine requires integer Nakagami shapes (use the simulator for real m)");
  }
}

/// Merges terms that share (rate, power) so that each basis function appears
/// once; the merged weight is a compensated sum.
template <class Term, class KeyFn, class MakeFn>
std::vector<Term> merge_terms(const std::vector<Term>& raw, KeyFn key, MakeFn make) {
  std::map<decltype(key(raw.front())), std::vector<double>> groups;
  for (const auto& t : raw) groups[key(t)].push_back(t.weight);
  std::vector<Term> out;
  out.reserve(groups.size());
  for (const auto& [k, weights] : groups) out.push_back(make(k, stable_sum(weights)));
  return out;
}

// ---------------------------------------------------------------------------
// Self-interference model and the generic success-probability kernel.

struct SiModel {
  bool present = false;  // false: C == 0 almost surely
  double shape = 1.0;
  double rate = 1.0;
};

struct KernelInput {
  double gamma = 1.0;
  double delta = 0.0;
  double th1 = 1.0, th2 = 1.0, th3 = 1.0, th4 = 1.0, th5 = 1.0;
  SiModel si;
};

/// P(success) = P(A > a(B, C)) where the SINR condition is rearranged as
///   A > (2 delta / gamma) (th2 gamma B + th3 gamma C + th4 gamma^2 B C + th5)
///           / (B - 2 th1 delta)       for B > 2 th1 delta.
/// A enters through its survival function (a finite mixture of Gamma
/// survivals), B through its density terms, and C through its Gamma density.
double success_probability(const std::vector<GammaAtom>& a_atoms, const OrderStatLaw& B, const KernelInput& in,
                           const ExactOptions& opts) {
  const double g = in.gamma;
  const double delta = in.delta;
  const double G = 2.0 * delta / g;
  const double c0 = 2.0 * in.th1 * delta;
  const double D = in.th3 * g + 2.0 * in.th1 * in.th4 * g * g * delta;
  const double P0 = 2.0 * delta * in.th2;
  const double Pz = 2.0 * delta * in.th4 * g;
  const double pi0 = D > 0.0 ? (2.0 * in.th1 * in.th2 * g * delta + in.th5) / D : 0.0;
  // No 1/u term survives: the Bessel integral collapses to a Gamma integral.
  const bool beta_zero = !(D > 0.0) || (!in.si.present && !(pi0 > 0.0));

  const double lC = in.si.present ? in.si.shape * std::log(in.si.rate) - ln_gamma(in.si.shape) : 0.0;
  const int mC = in.si.present ? static_cast<int>(in.si.shape) : 0;

  std::map<std::tuple<double, double, int, int, int>, double> phi_cache;
  LogTermSum sum;

  for (const auto& atom : a_atoms) {
    const double wa = atom.weight * opts.kappa_scale;
    if (wa == 0.0) continue;
    const double s = atom.rate;
    const double log_wa = std::log(std::abs(wa));
    const double sign_a = wa < 0.0 ? -1.0 : 1.0;
    const double cz = s * Pz + (in.si.present ? in.si.rate : 0.0);

    for (int n1 = 0; n1 < atom.order; ++n1) {
      const double log_n1 = log_wa + (n1 - atom.order) * std::log(s) - ln_gamma(n1 + 1.0) - s * P0;
      for (int t3 = 0; t3 <= n1; ++t3) {
        const int j = n1 - t3;
        if (beta_zero && j > 0) continue;
        for (int k2 = 0; k2 <= t3; ++k2) {
          if (!in.si.present && k2 > 0) continue;
          const double log_z = ln_binomial(n1, t3) + ln_binomial(t3, k2) + log_pow(Pz, k2) + log_pow(P0, t3 - k2);
          if (log_z == kNegInf) continue;

          for (const auto& bt : B.pdf_terms()) {
            const double bp = bt.rate;
            const int q = bt.power;
            const double log_wb = std::log(std::abs(bt.weight));
            const double sign = sign_a * (bt.weight < 0.0 ? -1.0 : 1.0);
            for (int t4 = 0; t4 <= q; ++t4) {
              const double log_u = ln_binomial(q, t4) + log_pow(c0, q - t4) - bp * c0;
              if (log_u == kNegInf) continue;
              double log_uz;
              if (beta_zero) {
                log_uz = ln_gamma(t4 + 1.0) - (t4 + 1.0) * std::log(bp);
                if (in.si.present) {
                  log_uz += lC + ln_gamma(k2 + in.si.shape) - (k2 + in.si.shape) * std::log(cz);
                }
              } else {
                const int nu = t4 - j + 1;
                const double e = 0.5 * (j + t4 + 1);
                double b = bp * s * G * D;
                if (opts.bessel_arg == BesselArgument::as_printed) {
                  b = bp * G * (in.th3 * g + 2.0 * in.th1 * in.th4 * g * g * delta * s);
                }
                log_uz = std::log(2.0) + e * std::log(G * D) + 0.5 * nu * (std::log(s) - std::log(bp));
                if (in.si.present) {
                  const auto key = std::make_tuple(s, bp, k2, j, t4);
                  auto it = phi_cache.find(key);
                  if (it == phi_cache.end()) {
                    PhiParams pp{k2 + mC - 1, pi0, e, cz, nu, b};
                    it = phi_cache.emplace(key, log_phi_integral(pp, opts.quad)).first;
                  }
                  log_uz += lC + it->second;
                } else {
                  log_uz += e * std::log(pi0) + specfn::log_bessel_k_int(nu, 2.0 * std::sqrt(b * pi0));
                }
              }
              sum.add(log_n1 + log_z + log_wb + log_u + log_uz, sign);
            }
          }
        }
      }
    }
  }
  return sum.total();
}

SiModel si_model(const SystemConfig& cfg, double omega_rr) {
  if (!(omega_rr > 0.0)) return {};
  return {true, cfg.m_RR, cfg.m_RR / omega_rr};
}

FirstHopLaw first_hop_law(const SystemConfig& cfg, const LinkStats& stats) {
  return FirstHopLaw(cfg.n_B, static_cast<int>(cfg.m_SR), stats.omega_hat_SR);
}

OrderStatLaw second_hop_law(const SystemConfig& cfg, const LinkStats& stats, std::size_t l) {
  const double m = cfg.m_RU[l - 1];
  return OrderStatLaw(cfg.users(), l, static_cast<int>(m) * cfg.n_R, m / stats.omega_hat_RU[l - 1]);
}

/// Coefficient K with F_A(x) ~ K x^{m n_B} as x -> 0.
double first_hop_small_ball(int n_B, int m, double omega_hat) {
  const double lambda = m / omega_hat;
  const int q = m * (n_B - 1);
  std::vector<double> terms;
  for (int t = 0; t < m; ++t) {
    terms.push_back(std::exp(ln_gamma(q + t) - ln_gamma(t + 1.0) - (q + t) * std::log(2.0)));
  }
  const double log_pref = std::log(n_B * (n_B - 1.0)) + m * n_B * std::log(lambda) - ln_gamma(m) -
                          (n_B - 2) * ln_gamma(m + 1.0) - ln_gamma(m * n_B + 1.0);
  return std::exp(log_pref) * stable_sum(terms);
}

}  // namespace

// ---------------------------------------------------------------------------
// First hop.

FirstHopLaw::FirstHopLaw(int n_B, int m, double omega_hat) {
  if (n_B < 2 || m < 1 || !(omega_hat > 0.0)) {
    throw DomainError("FirstHopLaw: need n_B >= 2, integer m >= 1 and positive power");
  }
  const double lambda = m / omega_hat;
  std::vector<GammaAtom> raw;
  for (int r = 0; r <= n_B - 2; ++r) {
    const auto beta = specfn::poly_power_coeffs(m, lambda, r);
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    for (int n = 0; n <= r * (m - 1); ++n) {
      for (int t = 0; t < m; ++t) {
        const double log_c = std::log(n_B * (n_B - 1.0)) + 2.0 * m * std::log(lambda) - ln_gamma(m) +
                             ln_binomial(n_B - 2, r) + std::log(beta[n]) + ln_gamma(m + n + t) -
                             ln_gamma(t + 1.0) - (m + n + t) * std::log(2.0);
        const double c = sign * std::exp(log_c);
        const auto pfd = (r == 0) ? specfn::pfd_two_pole(lambda, 2 * m + n, 0.0, 0)
                                  : specfn::pfd_two_pole(lambda, m - t, lambda * (2.0 + r) / 2.0, m + n + t);
        for (int t1 = 0; t1 < pfd.T; ++t1) {
          for (int t2 = 1; t2 <= pfd.mult[t1]; ++t2) {
            const double k = pfd.coefficient(t1, t2);
            if (k != 0.0) raw.push_back({c * k, pfd.pole[t1], t2});
          }
        }
      }
    }
  }
  atoms_ = merge_terms(
      raw, [](const GammaAtom& a) { return std::make_pair(a.rate, a.order); },
      [](const std::pair<double, int>& k, double w) { return GammaAtom{w, k.first, k.second}; });
}

double FirstHopLaw::pdf(double x) const {
  if (x <= 0.0) return 0.0;
  std::vector<double> v;
  for (const auto& a : atoms_) {
    v.push_back(a.weight * std::exp((a.order - 1) * std::log(x) - a.rate * x - ln_gamma(a.order)));
  }
  return stable_sum(v);
}

double FirstHopLaw::survival(double x) const {
  if (x <= 0.0) return 1.0;
  std::vector<double> v;
  for (const auto& a : atoms_) {
    v.push_back(a.weight * std::pow(a.rate, -a.order) * specfn::upper_incomplete_gamma_reg(a.order, a.rate * x));
  }
  return stable_sum(v);
}

double FirstHopLaw::mean() const {
  std::vector<double> v;
  for (const auto& a : atoms_) v.push_back(a.weight * a.order * std::pow(a.rate, -a.order - 1));
  return stable_sum(v);
}

// ---------------------------------------------------------------------------
// Second hop.

OrderStatLaw::OrderStatLaw(std::size_t L, std::size_t l, int shape, double rate)
    : L_(L), l_(l), shape_(shape), rate_(rate) {
  if (L < 1 || l < 1 || l > L || shape < 1 || !(rate > 0.0)) {
    throw DomainError("OrderStatLaw: need 1 <= l <= L, integer shape >= 1 and positive rate");
  }
  const int Li = static_cast<int>(L), li = static_cast<int>(l);
  const double log_q = ln_gamma(Li + 1.0) - ln_gamma(Li - li + 1.0) - ln_gamma(li);
  const double log_f = shape * std::log(rate) - ln_gamma(shape);

  std::vector<ExpPolyTerm> pdf_raw, surv_raw;
  for (int k = 0; k <= Li - li; ++k) {
    for (int p = 0; p <= li + k - 1; ++p) {
      const auto beta = specfn::poly_power_coeffs(shape, rate, p);
      const double sign = ((k + p) % 2 == 0) ? 1.0 : -1.0;
      const double log_c = log_q + ln_binomial(Li - li, k) + ln_binomial(li + k - 1, p) + log_f;
      for (std::size_t k1 = 0; k1 < beta.coeffs.size(); ++k1) {
        pdf_raw.push_back({sign * std::exp(log_c + std::log(beta[k1])), (1.0 + p) * rate,
                           shape + static_cast<int>(k1) - 1});
      }
    }
    for (int p = 1; p <= li + k; ++p) {
      const auto beta = specfn::poly_power_coeffs(shape, rate, p);
      const double sign = ((k + p - 1) % 2 == 0) ? 1.0 : -1.0;
      const double log_c = log_q + ln_binomial(Li - li, k) + ln_binomial(li + k, p) - std::log(li + k);
      for (std::size_t k1 = 0; k1 < beta.coeffs.size(); ++k1) {
        surv_raw.push_back({sign * std::exp(log_c + std::log(beta[k1])), p * rate, static_cast<int>(k1)});
      }
    }
  }
  auto key = [](const ExpPolyTerm& t) { return std::make_pair(t.rate, t.power); };
  auto make = [](const std::pair<double, int>& k, double w) { return ExpPolyTerm{w, k.first, k.second}; };
  pdf_terms_ = merge_terms(pdf_raw, key, make);
  survival_terms_ = merge_terms(surv_raw, key, make);
}

namespace {

double eval_exp_poly(const std::vector<ExpPolyTerm>& terms, double x) {
  std::vector<double> v;
  v.reserve(terms.size());
  for (const auto& t : terms) v.push_back(t.weight * std::exp(log_pow(x, t.power) - t.rate * x));
  return stable_sum(v);
}

}  // namespace

double OrderStatLaw::pdf(double x) const { return x <= 0.0 ? 0.0 : eval_exp_poly(pdf_terms_, x); }

double OrderStatLaw::survival(double x) const { return x <= 0.0 ? 1.0 : eval_exp_poly(survival_terms_, x); }

double OrderStatLaw::cdf(double x) const { return 1.0 - survival(x); }

// ---------------------------------------------------------------------------
// Bessel-kernel integral.

double log_phi_integral(const PhiParams& p, const QuadratureSpec& q) {
  if (!(p.c > 0.0) || !(p.b > 0.0) || p.pi0 < 0.0 || p.power < 0) {
    throw DomainError("phi_integral: need c > 0, b > 0, pi0 >= 0 and power >= 0");
  }
  auto log_f = [&](double z) {
    const double w = z + p.pi0;
    return p.power * std::log(z) + p.expo * std::log(w) - p.c * z +
           specfn::log_bessel_k_int(p.nu, 2.0 * std::sqrt(p.b * w));
  };
  // Width at which c z + 2 sqrt(b z) ~ 1, the combined decay of the
  // exponential and the Bessel tail.
  const double root = 2.0 / (std::sqrt(p.b + 4.0 * p.c) + std::sqrt(p.b));
  const double scale = root * root;

  // Locate the bulk of z f(z) on a geometric grid (the integrand of the log
  // substitution), then integrate between points where it has dropped by
  // more than e^-46 relative to the peak.
  constexpr double kDrop = 46.0;
  constexpr int kMaxSteps = 4000;
  auto log_g = [&](double z) { return log_f(z) + std::log(z); };
  double peak = log_g(scale);
  double lo = scale, hi = scale;
  for (int i = 0; i < kMaxSteps; ++i) {
    lo *= 0.5;
    const double v = log_g(lo);
    peak = std::max(peak, v);
    if (v < peak - kDrop || lo < std::numeric_limits<double>::min() * 1e10) break;
  }
  for (int i = 0; i < kMaxSteps; ++i) {
    hi *= 2.0;
    const double v = log_g(hi);
    peak = std::max(peak, v);
    if (v < peak - kDrop) break;
  }
  // The bracket search may have raised the peak; re-extend the low end.
  for (int i = 0; i < kMaxSteps && log_g(lo) > peak - kDrop; ++i) lo *= 0.5;

  auto f = [&](double z) { return std::exp(log_f(z) - peak); };
  QuadratureSpec spec = q;
  const auto res = integrate_half_line(f, lo, hi, scale, spec);
  if (!res.converged || !std::isfinite(res.value) || !(res.value > 0.0)) {
    std::ostringstream os;
    os << "phi_integral did not converge (power=" << p.power << ", pi0=" << p.pi0 << ", expo=" << p.expo
       << ", c=" << p.c << ", nu=" << p.nu << ", b=" << p.b << "; estimate " << res.value << " +/- "
       << res.abs_error << " after " << res.subdivisions << " subdivisions)";
    throw NumericError(os.str());
  }
  return std::log(res.value) + peak;
}

double phi_integral(const PhiParams& p, const QuadratureSpec& q) { return std::exp(log_phi_integral(p, q)); }

// ---------------------------------------------------------------------------
// Exact outage.

OutagePoint exact_outage(const SystemConfig& cfg, double snr_db, std::size_t l, const ExactOptions& opts) {
  validate(cfg);
  check_user(cfg, l);
  require_integer_shapes(cfg);
  const double snr = db_to_linear(snr_db);
  OutagePoint out;
  out.user = l;
  out.snr_db = snr_db;
  out.method = Method::exact;

  const auto deltas = compute_deltas(cfg, snr);
  const double delta = deltas.delta_dag[l - 1];
  if (delta == 0.0) return out;  // zero thresholds: never in outage

  const auto stats = derive_link_stats(cfg, snr);
  const auto th = compute_theta(stats, snr, l);
  const auto A = first_hop_law(cfg, stats);
  const auto B = second_hop_law(cfg, stats, l);
  KernelInput in{snr, delta, th.theta1, th.theta2, th.theta3, th.theta4, th.theta5, si_model(cfg, stats.omega_RR)};
  const double success = success_probability(A.atoms(), B, in, opts);
  out.residual = 1.0 - success;
  out.value = probability_from_residual(out.residual, "exact_outage");
  return out;
}

// ---------------------------------------------------------------------------
// Lower bound.

double survival_W(const FirstHopLaw& A, double m_RR, double omega_RR, double x, double q) {
  if (x <= 0.0) return 1.0;
  const bool si = omega_RR > 0.0;
  const double lam = si ? m_RR / omega_RR : 0.0;
  std::vector<double> v;
  for (const auto& a : A.atoms()) {
    const double s = a.rate;
    const double base = std::log(std::abs(a.weight)) - a.order * std::log(s) - s * x * q;
    const double sign = a.weight < 0.0 ? -1.0 : 1.0;
    for (int t4 = 0; t4 < a.order; ++t4) {
      const double lt4 = base + log_pow(s * x, t4) - ln_gamma(t4 + 1.0);
      for (int t5 = 0; t5 <= t4; ++t5) {
        if (!si && t5 > 0) break;
        double lt = lt4 + ln_binomial(t4, t5) + log_pow(q, t4 - t5);
        if (si) {
          lt += m_RR * std::log(lam) + ln_gamma(t5 + m_RR) - ln_gamma(m_RR) - (t5 + m_RR) * std::log(s * x + lam);
        }
        if (lt != kNegInf) v.push_back(sign * std::exp(lt));
      }
    }
  }
  return stable_sum(v);
}

OutagePoint lower_bound_outage(const SystemConfig& cfg, double snr_db, std::size_t l) {
  validate(cfg);
  check_user(cfg, l);
  require_integer_shapes(cfg);
  const double snr = db_to_linear(snr_db);
  OutagePoint out;
  out.user = l;
  out.snr_db = snr_db;
  out.method = Method::lower_bound;

  const double delta = compute_deltas(cfg, snr).delta_dag[l - 1];
  if (delta == 0.0) return out;
  const auto stats = derive_link_stats(cfg, snr);
  const auto th = compute_theta(stats, snr, l);
  const auto A = first_hop_law(cfg, stats);
  const auto B = second_hop_law(cfg, stats, l);
  const double q = is_ideal(cfg) ? 0.0 : th.thetap4 / snr;
  const double sw = survival_W(A, cfg.m_RR, stats.omega_RR, 2.0 * delta * snr * th.thetap2, q);
  const double sb = B.survival(2.0 * delta * th.thetap1);
  out.residual = 1.0 - sw * sb;
  out.value = probability_from_residual(out.residual, "lower_bound_outage");
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotics.

double diversity_order(const SystemConfig& cfg, std::size_t l) {
  check_user(cfg, l);
  if (cfg.mu >= 1.0) return 0.0;
  const double first = (1.0 - cfg.mu) * cfg.m_SR * cfg.n_B;
  const double second = cfg.m_RU[l - 1] * cfg.n_R * static_cast<double>(l);
  return std::min(first, second);
}

ArrayGain array_gain(const SystemConfig& cfg, std::size_t l) {
  validate(cfg);
  check_user(cfg, l);
  require_integer_shapes(cfg);
  const auto stats = derive_link_stats(cfg, 1.0);
  const double lambda = compute_deltas(cfg, 1.0).lambda_dag[l - 1];
  ArrayGain g;

  // Second hop: F_B(2 Lambda / snr) ~ C(L, l) ((2 Lambda m / (snr Omega))^M / M!)^l.
  const int M = static_cast<int>(cfg.m_RU[l - 1]) * cfg.n_R;
  const double d2 = static_cast<double>(M) * static_cast<double>(l);
  const double log_c2 = ln_binomial(static_cast<int>(cfg.users()), static_cast<int>(l)) - l * ln_gamma(M + 1.0);
  g.xi2 = std::exp(-log_c2 / d2) * stats.omega_hat_RU[l - 1] / (2.0 * lambda * cfg.m_RU[l - 1]);
  if (cfg.mu >= 1.0) {
    g.value = g.xi2;
    return g;
  }

  // First hop: F_W(2 Lambda) ~ K (2 Lambda)^d E[(C + 1/snr)^d] with
  // C ~ Gamma(m_RR, mean alpha snr^{mu - 1}). For mu > 0 the noise term is
  // of lower order; for mu == 0 it scales like C and is kept.
  const int m = static_cast<int>(cfg.m_SR);
  const int d = m * cfg.n_B;
  const double K = first_hop_small_ball(cfg.n_B, m, stats.omega_hat_SR);
  const double scale = cfg.alpha_si / cfg.m_RR;
  double moment;
  if (cfg.mu > 0.0) {
    moment = std::exp(ln_gamma(cfg.m_RR + d) - ln_gamma(cfg.m_RR)) * std::pow(scale, d);
  } else {
    std::vector<double> v;
    for (int j = 0; j <= d; ++j) {
      v.push_back(binomial(d, j) * std::exp(ln_gamma(cfg.m_RR + j) - ln_gamma(cfg.m_RR)) * std::pow(scale, j));
    }
    moment = stable_sum(v);
  }
  const double d1 = (1.0 - cfg.mu) * d;
  g.xi1 = std::pow(K * std::pow(2.0 * lambda, d) * moment, -1.0 / d1);

  const double G = std::min(d1, d2);
  if (std::abs(d1 - d2) <= 1e-12 * std::max(d1, d2)) {
    g.value = std::pow(std::pow(g.xi1, -G) + std::pow(g.xi2, -G), -1.0 / G);
  } else {
    g.value = d1 < d2 ? g.xi1 : g.xi2;
  }
  return g;
}

OutagePoint asymptotic_outage_ideal(const SystemConfig& cfg, double snr_db, std::size_t l) {
  validate(cfg);
  check_user(cfg, l);
  require_integer_shapes(cfg);
  if (!is_ideal(cfg)) throw DomainError("asymptotic_outage_ideal: configuration has impairments");
  OutagePoint out;
  out.user = l;
  out.snr_db = snr_db;
  out.method = Method::asymptotic_ideal;
  const double lambda = compute_deltas(cfg, 1.0).lambda_dag[l - 1];
  if (lambda == 0.0) return out;

  if (cfg.mu >= 1.0) {
    const auto stats = derive_link_stats(cfg, 1.0);
    const auto A = first_hop_law(cfg, stats);
    out.residual = 1.0 - survival_W(A, cfg.m_RR, cfg.alpha_si, 2.0 * lambda, 0.0);
    out.value = probability_from_residual(out.residual, "asymptotic_outage_ideal");
    out.snr_independent = true;
    return out;
  }
  const double G = diversity_order(cfg, l);
  const auto gain = array_gain(cfg, l);
  out.residual = std::pow(gain.value * db_to_linear(snr_db), -G);
  out.value = std::min(1.0, out.residual);
  return out;
}

OutagePoint asymptotic_outage_practical(const SystemConfig& cfg, std::size_t l, const ExactOptions& opts) {
  validate(cfg);
  check_user(cfg, l);
  require_integer_shapes(cfg);
  if (is_ideal(cfg)) {
    throw DomainError("asymptotic_outage_practical: no error floor exists without estimation error or delay");
  }
  OutagePoint out;
  out.user = l;
  out.method = Method::asymptotic_practical;
  out.snr_independent = true;
  const double lambda = compute_deltas(cfg, 1.0).lambda_dag[l - 1];
  if (lambda == 0.0) return out;

  // gamma -> infinity with delta = Lambda / gamma: every theta grows at most
  // like its leading power of gamma, and the kernel is invariant under
  // (gamma, delta, theta_i) -> (1, Lambda, leading coefficient of theta_i).
  const auto stats = derive_link_stats(cfg, 1.0);
  const double s_sr = stats.sigma2_SR, s_ru = stats.sigma2_RU[l - 1];
  const double r_sr = stats.rho_SR * stats.rho_SR, r_ru = stats.rho_RU[l - 1] * stats.rho_RU[l - 1];
  KernelInput in;
  in.gamma = 1.0;
  in.delta = lambda;
  in.th1 = s_ru / (2.0 * r_ru);
  in.th2 = s_sr / (2.0 * r_sr);
  in.th3 = s_ru / (r_sr * r_ru);
  in.th4 = 1.0 / r_sr;
  in.th5 = s_sr * s_ru / (2.0 * r_sr * r_ru);
  if (cfg.mu >= 1.0) in.si = {true, cfg.m_RR, cfg.m_RR / cfg.alpha_si};

  const auto A = first_hop_law(cfg, stats);
  const auto B = second_hop_law(cfg, stats, l);
  out.residual = 1.0 - success_probability(A.atoms(), B, in, opts);
  out.value = probability_from_residual(out.residual, "asymptotic_outage_practical");
  return out;
}

}  // namespace fdnoma
