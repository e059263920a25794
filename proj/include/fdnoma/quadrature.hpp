#pragma once

// Globally adaptive 21-point Gauss-Kronrod quadrature (QUADPACK QAG
// strategy): the panel with the largest error estimate is bisected until the
// summed estimate meets max(abs_tol, rel_tol * |I|).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace fdnoma {

struct QuadratureSpec {
  enum class Transform { none, log_substitution };

  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_subdivisions = 2000;
  Transform transform = Transform::log_substitution;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// Kronrod abscissae (descending, last is the centre) and weights; the Gauss
// 10-point rule uses the odd-indexed abscissae.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525029894, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk21(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  double resabs = std::abs(resk);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    const double pair = f1[j] + f2[j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over the finite interval [a, b], starting from `initial`
/// equal panels.
template <class F>
QuadratureResult integrate_gk21(F&& f, double a, double b, const QuadratureSpec& spec, int initial = 8) {
  std::priority_queue<detail::Panel> heap;
  double total = 0.0, error = 0.0;
  const double width = (b - a) / initial;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == initial) ? b : lo + width;
    auto p = detail::gk21(f, lo, hi);
    total += p.value;
    error += p.error;
    heap.push(p);
  }
  QuadratureResult out;
  out.subdivisions = initial;
  while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (out.subdivisions >= spec.max_subdivisions) {
      out.value = total;
      out.abs_error = error;
      return out;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk21(f, worst.a, mid);
    auto right = detail::gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++out.subdivisions;
    if (error < 0.0) {
      // Guard against drift of the running sum; recompute exactly.
      error = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  // Re-add the panels from scratch to remove running-sum drift.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.abs_error = error;
  out.converged = true;
  return out;
}

/// Integrates f over (0, inf). With log_substitution the variable is
/// z = scale * e^x over x in [ln(lo/scale), ln(hi/scale)]; with none it is
/// the plain interval [lo, hi]. `lo`/`hi` must enclose all non-negligible
/// mass; `scale` should be a characteristic width of the integrand.
template <class F>
QuadratureResult integrate_half_line(F&& f, double lo, double hi, double scale, const QuadratureSpec& spec) {
  if (spec.transform == QuadratureSpec::Transform::none) {
    return integrate_gk21(f, lo, hi, spec, 16);
  }
  auto g = [&](double x) {
    const double z = scale * std::exp(x);
    return f(z) * z;
  };
  return integrate_gk21(g, std::log(lo / scale), std::log(hi / scale), spec, 16);
}

}  // namespace fdnoma
