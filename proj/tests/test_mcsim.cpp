#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fdnoma/analytic.hpp"
#include "fdnoma/mcsim.hpp"
#include "oracles.hpp"

using namespace fdnoma;

namespace {

SystemConfig ideal_config(int n_B, int n_R, double mu) {
  SystemConfig c;
  c.n_B = n_B;
  c.n_R = n_R;
  c.mu = mu;
  return c;
}

struct Moments {
  double mean = 0.0, var = 0.0;
};

template <class Draw>
Moments moments(std::size_t n, Draw draw) {
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  return {mean, s2 / n - mean * mean};
}

// Two-sample-free KS statistic of `xs` against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, F - i / n, (i + 1) / n - F});
  }
  return d;
}

// Asymptotic 1% critical value of the one-sample KS statistic.
double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace

TEST(RngStream, ReproducibleAndDistinct) {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    seen.insert(x);
    seen.insert(c());
    seen.insert(d());
  }
  EXPECT_EQ(seen.size(), 3000u);
}

TEST(RngStream, UniformOnHalfOpenInterval) {
  RngStream r(1, 0);
  const auto m = moments(1'000'000, [&] {
    const double u = r.uniform_pos();
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
    return u;
  });
  EXPECT_NEAR(m.mean, 0.5, 5 * std::sqrt(1.0 / 12.0 / 1e6));
}

TEST(DrawGamma, MeanAndVariance) {
  RngStream r(3, 1);
  for (double shape : {0.5, 1.0, 2.0, 3.7, 8.0, 40.0}) {
    const double mean = 2.5;
    const std::size_t n = 400'000;
    const auto m = moments(n, [&] { return draw_gamma(shape, mean, r); });
    const double var = mean * mean / shape;
    EXPECT_NEAR(m.mean, mean, 5.0 * std::sqrt(var / n)) << shape;
    EXPECT_NEAR(m.var / var, 1.0, 0.03) << shape;
  }
}

TEST(FirstHopSampler, TwoAntennasNoSelection) {
  auto cfg = ideal_config(2, 1, 0.25);
  const auto stats = derive_link_stats(cfg, 100.0);
  RngStream r(5, 0);
  const std::size_t n = 1'000'000;
  const auto m = moments(n, [&] { return sample_first_hop(cfg, stats, r); });
  const double sd = std::sqrt(2.0 * cfg.m_SR) * stats.omega_hat_SR / cfg.m_SR;
  EXPECT_NEAR(m.mean, 2.0 * stats.omega_hat_SR, 3.0 * sd / std::sqrt(double(n)));
}

TEST(FirstHopSampler, ThreeAntennasMatchesBruteForceSort) {
  auto cfg = ideal_config(3, 1, 0.25);
  const auto stats = derive_link_stats(cfg, 100.0);
  RngStream r(6, 0);
  std::mt19937_64 ref(6);
  std::exponential_distribution<double> expo(1.0 / stats.omega_hat_SR);
  const std::size_t n = 1'000'000;
  const auto ours = moments(n, [&] { return sample_first_hop(cfg, stats, r); });
  const auto brute = moments(n, [&] {
    std::array<double, 3> g{expo(ref), expo(ref), expo(ref)};
    std::sort(g.begin(), g.end());
    return g[1] + g[2];
  });
  const double se = std::sqrt((ours.var + brute.var) / n);
  EXPECT_NEAR(ours.mean, brute.mean, 4.0 * se);
  EXPECT_NEAR(ours.mean, stats.omega_hat_SR * (2.0 / 3.0 + 2.0), 4.0 * std::sqrt(ours.var / n));
}

TEST(FirstHopSampler, ScalesWithOmega) {
  auto cfg = ideal_config(3, 1, 0.25);
  auto stats = derive_link_stats(cfg, 100.0);
  auto doubled = stats;
  doubled.omega_hat_SR *= 2.0;
  RngStream r1(9, 0), r2(9, 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_NEAR(sample_first_hop(cfg, doubled, r2), 2.0 * sample_first_hop(cfg, stats, r1), 1e-9);
  }
}

TEST(SecondHopSampler, SingleUserKolmogorovSmirnov) {
  SystemConfig cfg = ideal_config(2, 2, 0.25);
  cfg.a = {1.0};
  cfg.gamma_th = {1.0};
  cfg.m_RU = {2.0};
  cfg.d_RU = {0.5};
  cfg.sigma2_est_RU = {0.0};
  cfg.fd_tau_RU = {0.0};
  const auto stats = derive_link_stats(cfg, 100.0);
  RngStream r(11, 0);
  const std::size_t n = 1'000'000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = sample_second_hop(cfg, stats, r).at(0);
  const double shape = cfg.m_RU[0] * cfg.n_R;
  const double rate = cfg.m_RU[0] / stats.omega_hat_RU[0];
  const double d = ks_statistic(xs, [&](double x) { return oracle::gamma_cdf(shape, rate, x); });
  EXPECT_LT(d, ks_critical_1pct(n));
}

TEST(SecondHopSampler, SortedAndMinimumMean) {
  auto cfg = ideal_config(2, 1, 0.25);
  const auto stats = derive_link_stats(cfg, 100.0);
  RngStream r(12, 0);
  const std::size_t n = 1'000'000;
  const auto m = moments(n, [&] {
    const auto b = sample_second_hop(cfg, stats, r);
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
    return b[0];
  });
  EXPECT_NEAR(m.mean, stats.omega_hat_RU[0] / 3.0, 4.0 * std::sqrt(m.var / n));
}

TEST(SelfInterference, Mean) {
  auto cfg = ideal_config(2, 1, 0.5);
  const auto stats = derive_link_stats(cfg, 100.0);
  RngStream r(13, 0);
  const std::size_t n = 500'000;
  const auto m = moments(n, [&] { return sample_self_interference(cfg, stats, r); });
  EXPECT_NEAR(m.mean, stats.omega_RR, 5.0 * std::sqrt(m.var / n));
}

TEST(EvaluateSinr, HandSubstitution) {
  SystemConfig cfg = ideal_config(2, 1, 0.25);
  cfg.a = {1.0};
  cfg.gamma_th = {1.0};
  cfg.m_RU = {1.0};
  cfg.d_RU = {0.5};
  cfg.sigma2_est_RU = {0.0};
  cfg.fd_tau_RU = {0.0};
  ChannelDraw draw{1.0, {1.0}, 0.0};
  const ThetaSet theta;  // ideal: all ones
  // (snr^2/2) A B / (snr A + snr B + 0 + 0 + 1) with snr = 2.
  const auto s = evaluate_sinr(draw, theta, cfg, 2.0, 1);
  ASSERT_EQ(s.sinr.size(), 1u);
  EXPECT_DOUBLE_EQ(s.sinr[0], 2.0 / (2.0 + 2.0 + 1.0));
}

TEST(EvaluateSinr, InterferenceLimitedCeiling) {
  const SystemConfig cfg = ideal_config(2, 1, 0.25);
  ChannelDraw draw{1e9, {1e9, 1e9, 1e9}, 0.0};
  const auto s = evaluate_sinr(draw, ThetaSet{}, cfg, 100.0, 3);
  EXPECT_NEAR(s.sinr[0], 0.5 / 0.5, 1e-6);
  EXPECT_NEAR(s.sinr[1], (1.0 / 3.0) / (1.0 / 6.0), 1e-6);
}

TEST(SimulateOutage, ZeroThresholdsNeverFail) {
  auto cfg = ideal_config(2, 1, 0.25);
  cfg.gamma_th = {0.0, 0.0, 0.0};
  McOptions opts;
  opts.trials = 100'000;
  for (const auto& p : simulate_outage_all(cfg, 10.0, opts)) EXPECT_EQ(p.value, 0.0);
}

TEST(SimulateOutage, InfeasibleAllocationBeforeSampling) {
  auto cfg = ideal_config(2, 1, 0.25);
  cfg.a = {0.5, 0.3, 0.2};
  cfg.gamma_th = {0.5, 2.0, 1.0};
  EXPECT_THROW(simulate_outage(cfg, 10.0, 1, McOptions{}), InfeasibleAllocation);
}

TEST(SimulateOutage, MatchesExactAtFig4Point) {
  const auto cfg = ideal_config(2, 1, 0.0);
  McOptions opts;
  opts.trials = 10'000'000;
  opts.confidence = 0.99;
  const auto mc = simulate_outage(cfg, 20.0, 1, opts);
  const double exact = exact_outage(cfg, 20.0, 1).value;
  ASSERT_TRUE(mc.ci.has_value());
  EXPECT_GE(exact, mc.ci->first);
  EXPECT_LE(exact, mc.ci->second);
}

TEST(SimulateOutage, IdenticalAcrossWorkerCounts) {
  SystemConfig cfg = ideal_config(3, 2, 0.25);
  cfg.sigma2_est_SR = 0.01;
  McOptions opts;
  opts.trials = 5 * kTrialsPerBlock + 123;
  opts.seed = 99;
  opts.workers = 1;
  const auto ref = simulate_outage_all(cfg, 15.0, opts);
  for (unsigned w : {2u, 4u, 16u}) {
    opts.workers = w;
    const auto got = simulate_outage_all(cfg, 15.0, opts);
    ASSERT_EQ(got.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(got[i].value, ref[i].value);
      EXPECT_EQ(got[i].trials, ref[i].trials);
    }
  }
}

TEST(SimulateOutage, WeakerUsersFailNoLessOften) {
  const auto cfg = ideal_config(2, 1, 0.25);
  McOptions opts;
  opts.trials = 1'000'000;
  const auto pts = simulate_outage_all(cfg, 10.0, opts);
  // Under the preset ordering of a and gamma_th, user 1 is the weakest link.
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE(pts[i].value, pts[i - 1].value);
}

TEST(SimulateOutage, WilsonCoverageIsCalibrated) {
  const auto cfg = ideal_config(2, 1, 0.0);
  const double exact = exact_outage(cfg, 10.0, 2).value;
  McOptions opts;
  opts.trials = 20'000;
  opts.confidence = 0.95;
  int covered = 0;
  const int runs = 200;
  for (int s = 0; s < runs; ++s) {
    opts.seed = 1000 + s;
    const auto p = simulate_outage(cfg, 10.0, 2, opts);
    covered += (exact >= p.ci->first && exact <= p.ci->second) ? 1 : 0;
  }
  const double coverage = static_cast<double>(covered) / runs;
  EXPECT_GE(coverage, 0.93);
  EXPECT_LE(coverage, 0.97);
}

TEST(WilsonInterval, Basics) {
  const auto [lo, hi] = wilson_interval(0, 1000, 0.95);
  EXPECT_EQ(lo, 0.0);
  EXPECT_GT(hi, 0.0);
  const auto mid = wilson_interval(500, 1000, 0.95);
  EXPECT_NEAR(0.5 * (mid.first + mid.second), 0.5, 1e-12);
  const double z = 1.959963984540054, n = 1000.0;
  const double half = z / (1 + z * z / n) * std::sqrt(0.25 / n + z * z / (4 * n * n));
  EXPECT_NEAR(mid.second - mid.first, 2 * half, 1e-12);
  EXPECT_EQ(wilson_interval(1000, 1000, 0.95).second, 1.0);
}

TEST(Baselines, HdIgnoresMu) {
  McOptions opts;
  opts.trials = 200'000;
  BaselineOptions equal{HdThresholdMode::equal};
  const auto a = simulate_baseline_all(ideal_config(2, 1, 0.0), 15.0, Baseline::hd_noma, opts, equal);
  const auto b = simulate_baseline_all(ideal_config(2, 1, 1.0), 15.0, Baseline::hd_noma, opts, equal);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
}

TEST(Baselines, RateMatchedInfeasibleIsCertainOutage) {
  McOptions opts;
  opts.trials = 10'000;
  // (1 + 0.9)^2 - 1 = 2.61 violates a1 > g1 (a2 + a3) with the default a.
  const auto pts = simulate_baseline_all(ideal_config(2, 1, 0.25), 30.0, Baseline::hd_noma, opts);
  for (const auto& p : pts) EXPECT_EQ(p.value, 1.0);
}

TEST(Baselines, FdOmaRuns) {
  McOptions opts;
  opts.trials = 100'000;
  const auto pts = simulate_baseline_all(ideal_config(2, 1, 0.25), 15.0, Baseline::fd_oma, opts);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto& p : pts) {
    EXPECT_GT(p.value, 0.0);
    EXPECT_LT(p.value, 1.0);
  }
}

// ---------------------------------------------------------------------------
// Symbol-level chain.

TEST(SymbolLevel, NoiselessSingleUserLoopback) {
  SystemConfig cfg = ideal_config(2, 1, 0.25);
  cfg.a = {1.0};
  cfg.gamma_th = {1.0};
  cfg.m_RU = {1.0};
  cfg.d_RU = {0.5};
  cfg.sigma2_est_RU = {0.0};
  cfg.fd_tau_RU = {0.0};
  RngStream r(21, 0);
  const auto ch = draw_fixed_channels(cfg, 20.0, r);
  SymbolValidationOptions opts;
  opts.symbols = 1 << 14;
  opts.noiseless = true;
  const auto res = symbol_level_validate(cfg, ch, 20.0, 1, opts);
  ASSERT_EQ(res.symbol_errors.size(), 1u);
  EXPECT_EQ(res.symbol_errors[0], 0u);
}

TEST(SymbolLevel, MeasuredSinrMatchesFormula) {
  for (const auto& cfg : {ideal_config(2, 1, 0.25), ideal_config(3, 2, 0.5)}) {
    RngStream r(31, 0);
    double worst = 0.0;
    for (int draw = 0; draw < 10; ++draw) {
      const auto ch = draw_fixed_channels(cfg, 15.0, r);
      SymbolValidationOptions opts;
      opts.symbols = 1 << 17;
      opts.seed = 100 + draw;
      const auto res = symbol_level_validate(cfg, ch, 15.0, cfg.users(), opts);
      for (std::size_t k = 0; k < res.measured_sinr.size(); ++k) {
        worst = std::max(worst, std::abs(res.measured_sinr[k] / res.predicted_sinr[k] - 1.0));
      }
    }
    EXPECT_LT(worst, 0.03);
  }
}

TEST(SymbolLevel, TestbedPowerCoefficients) {
  SystemConfig cfg = ideal_config(3, 2, 0.0);
  cfg.a = {0.761, 0.191, 0.048};
  cfg.gamma_th = {2.0, 2.5, 3.0};
  RngStream r(41, 0);
  const auto ch = draw_fixed_channels(cfg, 25.0, r);
  SymbolValidationOptions opts;
  opts.symbols = 1 << 16;
  const auto res = symbol_level_validate(cfg, ch, 25.0, 3, opts);
  ASSERT_EQ(res.measured_sinr.size(), 3u);
  // The measured SINRs feed the same comparator as the simulator.
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(res.measured_sinr[k] > cfg.gamma_th[k], res.predicted_sinr[k] > cfg.gamma_th[k])
        << "stage " << k + 1 << " sits on the threshold";
  }
}

TEST(SymbolLevel, RejectsBadInputs) {
  auto cfg = ideal_config(2, 1, 0.25);
  RngStream r(51, 0);
  const auto ch = draw_fixed_channels(cfg, 15.0, r);
  SymbolValidationOptions opts;
  opts.symbols = 1024;
  opts.constellation = {cplx(2.0, 0.0), cplx(-2.0, 0.0)};
  EXPECT_THROW(symbol_level_validate(cfg, ch, 15.0, 1, opts), ConfigError);
  cfg.sigma2_est_SR = 0.01;
  EXPECT_THROW(symbol_level_validate(cfg, ch, 15.0, 1, SymbolValidationOptions{}), DomainError);
}
