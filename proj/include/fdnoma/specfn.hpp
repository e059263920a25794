#pragma once

// Special functions and small combinatorial kernels used by the closed-form
// outage expressions. Everything here is pure and thread-safe.

#include <array>
#include <cstddef>
#include <vector>

#include "fdnoma/errors.hpp"

namespace fdnoma::specfn {

/// Argument at which bessel_k_int switches from the power series to
/// Steed's continued fraction.
inline constexpr double kBesselSeriesCrossover = 2.0;

/// log Gamma(x) for x > 0. Accurate to a few ulp on [0.5, 300].
double ln_gamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double lower_incomplete_gamma_reg(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// without cancellation in the upper tail.
double upper_incomplete_gamma_reg(double a, double x);

/// Modified Bessel function of the second kind K_v(x) for integer order.
/// Negative orders use K_{-v} = K_v. Underflows to 0 for x beyond ~705.
double bessel_k_int(int v, double x);

/// log K_v(x). Does not overflow for large orders at small x nor underflow
/// at large x.
double log_bessel_k_int(int v, double x);

/// log of n choose k; n, k >= 0 and k <= n.
double ln_binomial(int n, int k);
double binomial(int n, int k);

/// Coefficients of a polynomial in y; coeffs[n] multiplies y^n.
struct PolyCoeffs {
  std::vector<double> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double operator[](std::size_t n) const { return coeffs[n]; }
  double evaluate(double y) const;
};

PolyCoeffs convolve(const PolyCoeffs& lhs, const PolyCoeffs& rhs);

/// Coefficients of (sum_{k=0}^{m-1} (lambda y)^k / k!)^r, obtained by r-fold
/// convolution of the truncated exponential series. coeffs[0] == 1.
PolyCoeffs poly_power_coeffs(int m, double lambda, int r);

/// Partial fraction data for (s + s1)^{-a1} (s + s2)^{-a2}:
///
///   sum_{t1 < T} sum_{t2 = 1}^{mult[t1]} kappa[t1][t2 - 1] (s + pole[t1])^{-t2}
struct PfdForm {
  int T = 1;
  std::array<double, 2> pole{};
  std::array<int, 2> mult{};
  /// Held in extended precision: the expansion cancels strongly away from the
  /// poles, and the extra digits keep pointwise reconstruction accurate.
  std::array<std::vector<long double>, 2> kappa;

  /// kappa_{t1, t2} with 1-based t2, matching the usual notation.
  double coefficient(int t1, int t2) const { return static_cast<double>(kappa[t1][t2 - 1]); }

  /// Evaluates the partial-fraction expansion at s.
  double evaluate(double s) const;
  /// Evaluates the source product (s + s1)^{-a1} (s + s2)^{-a2} at s.
  double source(double s) const;
};

/// Repeated-pole residue formula for a product of two inverse powers.
/// When a2 == 0 the result is the single term (s + s1)^{-a1}.
/// Throws DegenerateInput if both multiplicities are positive and s1 == s2.
PfdForm pfd_two_pole(double s1, int a1, double s2, int a2);

}  // namespace fdnoma::specfn
