#include "fdnoma/specfn.hpp"

#include <math.h>  // lgamma_r

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fdnoma::specfn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr int kMaxIter = 100000;

// Returns (e^x K0(x), e^x K1(x)).
std::pair<double, double> scaled_k01(double x) {
  if (x <= kBesselSeriesCrossover) {
    const double q = 0.25 * x * x;
    const double lhalf = std::log(0.5 * x);

    double term0 = 1.0;  // q^k / (k!)^2
    double term1 = 1.0;  // q^k / (k! (k+1)!)
    double harmonic = 0.0;
    double i0 = 1.0, s0 = 0.0;
    double i1 = 1.0, s1 = 2.0 * (-kEulerGamma) + 1.0;  // psi(1) + psi(2)
    for (int k = 1; k < 200; ++k) {
      term0 *= q / (double(k) * k);
      term1 *= q / (double(k) * (k + 1));
      harmonic += 1.0 / k;
      const double psi_k1 = -kEulerGamma + harmonic;
      const double psi_k2 = psi_k1 + 1.0 / (k + 1);
      i0 += term0;
      s0 += harmonic * term0;
      i1 += term1;
      s1 += (psi_k1 + psi_k2) * term1;
      if (term0 < kEps * 1e-3 * i0 && term1 < kEps * 1e-3 * i1) break;
    }
    const double k0 = -(lhalf + kEulerGamma) * i0 + s0;
    const double k1 = 1.0 / x + lhalf * (0.5 * x * i1) - 0.25 * x * s1;
    const double ex = std::exp(x);
    return {k0 * ex, k1 * ex};
  }

  // Steed's method for the second continued fraction (Temme), order 0.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

// Series for P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - ln_gamma(a)) * h;
}

void check_incomplete_domain(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw DomainError("incomplete gamma: need a > 0 and x >= 0");
  }
}

}  // namespace

double ln_gamma(double x) {
  require_positive(x, "ln_gamma");
  int sign = 1;
  return ::lgamma_r(x, &sign);
}

double lower_incomplete_gamma_reg(double a, double x) {
  check_incomplete_domain(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double upper_incomplete_gamma_reg(double a, double x) {
  check_incomplete_domain(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double log_bessel_k_int(int v, double x) {
  require_positive(x, "bessel_k_int");
  const int order = v < 0 ? -v : v;
  auto [k0, k1] = scaled_k01(x);
  if (order == 0) return std::log(k0) - x;
  double log_scale = 0.0;
  double prev = k0, cur = k1;
  for (int n = 1; n < order; ++n) {
    const double next = prev + (2.0 * n / x) * cur;
    prev = cur;
    cur = next;
    if (cur > 1e250) {
      log_scale += std::log(cur);
      prev /= cur;
      cur = 1.0;
    }
  }
  return std::log(cur) + log_scale - x;
}

double bessel_k_int(int v, double x) { return std::exp(log_bessel_k_int(v, x)); }

double ln_binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) throw DomainError("ln_binomial: need 0 <= k <= n");
  return ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
}

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) throw DomainError("binomial: need 0 <= k <= n");
  if (k > n - k) k = n - k;
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return std::round(result);
}

double PolyCoeffs::evaluate(double y) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * y + *it;
  return acc;
}

PolyCoeffs convolve(const PolyCoeffs& lhs, const PolyCoeffs& rhs) {
  if (lhs.coeffs.empty() || rhs.coeffs.empty()) return {};
  PolyCoeffs out;
  out.coeffs.assign(lhs.coeffs.size() + rhs.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < lhs.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < rhs.coeffs.size(); ++j) {
      out.coeffs[i + j] += lhs.coeffs[i] * rhs.coeffs[j];
    }
  }
  return out;
}

PolyCoeffs poly_power_coeffs(int m, double lambda, int r) {
  if (m < 1 || r < 0) throw DomainError("poly_power_coeffs: need m >= 1 and r >= 0");
  if (!(lambda > 0.0)) throw DomainError("poly_power_coeffs: lambda must be positive");
  PolyCoeffs base;
  base.coeffs.resize(m);
  double term = 1.0;
  for (int k = 0; k < m; ++k) {
    base.coeffs[k] = term;
    term *= lambda / (k + 1);
  }
  PolyCoeffs out{{1.0}};
  for (int i = 0; i < r; ++i) out = convolve(out, base);
  return out;
}

double PfdForm::evaluate(double s) const {
  // The expansion alternates in sign and cancels for s well above the poles;
  // extended-precision accumulation keeps the check meaningful there.
  long double acc = 0.0L;
  for (int t1 = 0; t1 < T; ++t1) {
    for (int t2 = 1; t2 <= mult[t1]; ++t2) {
      acc += kappa[t1][t2 - 1] * std::pow(static_cast<long double>(s) + pole[t1], static_cast<long double>(-t2));
    }
  }
  return static_cast<double>(acc);
}

double PfdForm::source(double s) const {
  double v = std::pow(s + pole[0], -mult[0]);
  if (T == 2) v *= std::pow(s + pole[1], -mult[1]);
  return v;
}

PfdForm pfd_two_pole(double s1, int a1, double s2, int a2) {
  if (!(s1 > 0.0) || a1 < 1 || a2 < 0) {
    throw DomainError("pfd_two_pole: need s1 > 0, a1 >= 1, a2 >= 0");
  }
  PfdForm out;
  if (a2 == 0) {
    out.T = 1;
    out.pole = {s1, 0.0};
    out.mult = {a1, 0};
    out.kappa[0].assign(a1, 0.0L);
    out.kappa[0][a1 - 1] = 1.0L;
    return out;
  }
  if (!(s2 > 0.0)) throw DomainError("pfd_two_pole: s2 must be positive");
  if (s1 == s2) throw DegenerateInput("pfd_two_pole: coincident poles with two factors");

  out.T = 2;
  out.pole = {s1, s2};
  out.mult = {a1, a2};
  // Residue at a pole of order a: k-th derivative of the other factor,
  // (-1)^k C(b + k - 1, k) (p_other - p)^{-(b + k)}, with k = a - t2.
  auto fill = [](std::vector<long double>& kappa, int a, int b, long double gap) {
    kappa.assign(a, 0.0L);
    for (int t2 = 1; t2 <= a; ++t2) {
      const int k = a - t2;
      const long double sign = (k % 2 == 0) ? 1.0L : -1.0L;
      kappa[t2 - 1] = sign * static_cast<long double>(binomial(b + k - 1, k)) * std::pow(gap, static_cast<long double>(-(b + k)));
    }
  };
  fill(out.kappa[0], a1, a2, static_cast<long double>(s2) - s1);
  fill(out.kappa[1], a2, a1, static_cast<long double>(s1) - s2);
  return out;
}

}  // namespace fdnoma::specfn
