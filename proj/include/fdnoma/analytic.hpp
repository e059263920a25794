#pragma once

// Closed-form outage analysis: exact outage (nested finite sums with one
// semi-infinite Bessel-kernel integral per term), the product-form lower
// bound, high-SNR asymptotics and the error floors.
//
// Notation used below:
//   A = sum of the two largest of n_B iid Gamma(m_SR, mean omega_hat_SR)
//   B = l-th smallest of L iid Gamma(m_RU * n_R, rate m_RU / omega_hat_RU)
//   C = residual self-interference power, Gamma(m_RR, mean omega_RR)

#include <cstddef>
#include <vector>

#include "fdnoma/outage.hpp"
#include "fdnoma/quadrature.hpp"
#include "fdnoma/sysmodel.hpp"

namespace fdnoma {

/// Density term  weight * x^{order-1} e^{-rate x} / Gamma(order).
struct GammaAtom {
  double weight = 0.0;
  double rate = 0.0;
  int order = 1;
};

/// Distribution of A. The density is a finite mixture of signed Gamma atoms
/// obtained from the Laplace transform of the two-largest-sum by partial
/// fractions.
class FirstHopLaw {
 public:
  FirstHopLaw(int n_B, int m, double omega_hat);

  const std::vector<GammaAtom>& atoms() const { return atoms_; }
  double pdf(double x) const;
  double survival(double x) const;
  double cdf(double x) const { return 1.0 - survival(x); }
  double mean() const;

 private:
  std::vector<GammaAtom> atoms_;
};

/// Term  weight * x^power e^{-rate x}  (no normalization).
struct ExpPolyTerm {
  double weight = 0.0;
  double rate = 0.0;
  int power = 0;
};

/// Distribution of the l-th smallest of L iid Gamma(shape, rate) variables
/// with integer shape.
class OrderStatLaw {
 public:
  OrderStatLaw(std::size_t L, std::size_t l, int shape, double rate);

  /// Density terms: f(x) = sum weight x^power e^{-rate x}.
  const std::vector<ExpPolyTerm>& pdf_terms() const { return pdf_terms_; }
  /// Survival terms: 1 - F(x) = sum weight x^power e^{-rate x}.
  const std::vector<ExpPolyTerm>& survival_terms() const { return survival_terms_; }

  double pdf(double x) const;
  double survival(double x) const;
  double cdf(double x) const;

  int shape() const { return shape_; }
  double rate() const { return rate_; }

 private:
  std::size_t L_, l_;
  int shape_;
  double rate_;
  std::vector<ExpPolyTerm> pdf_terms_;
  std::vector<ExpPolyTerm> survival_terms_;
};

/// Parameters of
///   Phi = int_0^inf z^power (z + pi0)^expo e^{-c z} K_nu(2 sqrt(b (z + pi0))) dz.
/// expo may be a half-integer; nu is an integer of either sign.
struct PhiParams {
  int power = 0;
  double pi0 = 0.0;
  double expo = 0.0;
  double c = 1.0;
  int nu = 0;
  double b = 1.0;
};

double phi_integral(const PhiParams& p, const QuadratureSpec& q = {});
/// log(Phi), evaluated without forming Phi so that tiny integrals survive.
/// Throws NumericError if the quadrature does not converge.
double log_phi_integral(const PhiParams& p, const QuadratureSpec& q = {});

/// Where the Bessel argument of Phi picks up the first-hop pole s.
///   consistent: b = (1 + p) lambda_B * s * (2 delta / snr) * D, i.e. the pole
///               multiplies the whole Bessel argument, matching the prefactor.
///   as_printed: b = 2 delta (1 + p) lambda_B (theta3 snr + 2 theta1 theta4
///               snr^2 delta s) / snr, with s only on the second summand.
enum class BesselArgument { consistent, as_printed };

struct ExactOptions {
  QuadratureSpec quad{};
  BesselArgument bessel_arg = BesselArgument::consistent;
  /// Fault-injection hook: multiplies every first-hop weight in the exact
  /// engine only. Must stay 1 outside of tests.
  double kappa_scale = 1.0;
};

/// Exact outage of user l (1-based). Requires integer Nakagami shapes.
OutagePoint exact_outage(const SystemConfig& cfg, double snr_db, std::size_t l,
                         const ExactOptions& opts = {});

/// Product-form lower bound. Uses the ideal form W = A / C when the
/// configuration has no impairments.
OutagePoint lower_bound_outage(const SystemConfig& cfg, double snr_db, std::size_t l);

/// Survival function of W = snr A / (snr C + q_num) evaluated at x, i.e.
/// P(A > x (C + q_num / snr)). q_num = 0 selects W = A / C.
double survival_W(const FirstHopLaw& A, double m_RR, double omega_RR, double x, double q_over_snr);

/// High-SNR approximation for ideal conditions. For mu == 1 the SNR
/// independent floor is returned with snr_independent = true.
OutagePoint asymptotic_outage_ideal(const SystemConfig& cfg, double snr_db, std::size_t l);

/// Error floor under channel-estimation error and/or feedback delay.
/// Throws DomainError for an ideal configuration (no floor exists).
OutagePoint asymptotic_outage_practical(const SystemConfig& cfg, std::size_t l,
                                        const ExactOptions& opts = {});

/// min{(1 - mu) m_SR n_B, m_RU n_R l}; 0 when mu == 1.
double diversity_order(const SystemConfig& cfg, std::size_t l);

struct ArrayGain {
  double xi1 = 0.0;  // first-hop (self-interference limited) gain
  double xi2 = 0.0;  // second-hop gain
  double value = 0.0;
};

/// Array gain of the asymptote (G_ag snr)^{-G_do}. For mu == 1 only xi2 is
/// meaningful and value == xi2.
ArrayGain array_gain(const SystemConfig& cfg, std::size_t l);

}  // namespace fdnoma
