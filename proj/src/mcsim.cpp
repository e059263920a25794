#include "fdnoma/mcsim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <utility>

namespace fdnoma {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t x = seed;
  const std::uint64_t a = splitmix64(x);
  std::uint64_t y = stream_id ^ a;
  for (auto& word : s_) word = splitmix64(y);
}

RngStream::result_type RngStream::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform_pos() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

double draw_gamma(double shape, double mean, RngStream& rng) {
  // Small integer shapes: sum of exponentials via one logarithm.
  if (shape == std::floor(shape) && shape >= 1.0 && shape <= 16.0) {
    double prod = 1.0;
    for (int i = 0; i < static_cast<int>(shape); ++i) prod *= rng.uniform_pos();
    return -std::log(prod) * mean / shape;
  }
  std::gamma_distribution<double> dist(shape, mean / shape);
  return dist(rng);
}

double sample_first_hop(const SystemConfig& cfg, const LinkStats& stats, RngStream& rng) {
  double top1 = 0.0, top2 = 0.0;
  for (int i = 0; i < cfg.n_B; ++i) {
    const double x = draw_gamma(cfg.m_SR, stats.omega_hat_SR, rng);
    if (x > top1) {
      top2 = top1;
      top1 = x;
    } else if (x > top2) {
      top2 = x;
    }
  }
  return top1 + top2;
}

std::vector<double> sample_second_hop(const SystemConfig& cfg, const LinkStats& stats, RngStream& rng,
                                      std::size_t ref_user) {
  const std::size_t i = ref_user - 1;
  const double shape = cfg.m_RU[i] * cfg.n_R;
  const double mean = cfg.n_R * stats.omega_hat_RU[i];
  std::vector<double> b(cfg.users());
  for (auto& v : b) v = draw_gamma(shape, mean, rng);
  std::sort(b.begin(), b.end());
  return b;
}

double sample_self_interference(const SystemConfig& cfg, const LinkStats& stats, RngStream& rng) {
  if (!(stats.omega_RR > 0.0)) return 0.0;
  return draw_gamma(cfg.m_RR, stats.omega_RR, rng);
}

namespace {

double sinr_denominator(const ThetaSet& th, double g, double A, double B, double C) {
  return th.theta1 * g * A + th.theta2 * g * B + th.theta3 * g * C + th.theta4 * g * g * B * C + th.theta5;
}

std::vector<double> tail_sums(const std::vector<double>& a) {
  std::vector<double> tails(a.size());
  double tail = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) {
    tails[k] = tail;
    tail += a[k];
  }
  return tails;
}

}  // namespace

SinrBreakdown evaluate_sinr(const ChannelDraw& draw, const ThetaSet& theta, const SystemConfig& cfg,
                            double snr_bar, std::size_t l) {
  const double B = draw.B.at(l - 1);
  const double X = 0.5 * snr_bar * snr_bar * draw.A * B;
  const double den = sinr_denominator(theta, snr_bar, draw.A, B, draw.C);
  const auto tails = tail_sums(cfg.a);
  SinrBreakdown out;
  for (std::size_t k = 0; k < l; ++k) out.sinr.push_back(X * cfg.a[k] / (X * tails[k] + den));
  return out;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double confidence) {
  if (n == 0) return {0.0, 1.0};
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("wilson_interval: confidence must be in (0, 1)");
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 0.5 + 0.5 * confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  // The exact endpoints are 0 and 1 at the extremes; avoid rounding residue.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

namespace {

struct Stage {
  double a = 0.0;
  double tail = 0.0;
  double th = 0.0;
};

/// Everything needed to test one user's outage event on a shared draw.
struct UserPlan {
  std::size_t group = 0;  // index into the second-hop sampling groups
  std::size_t rank = 0;   // 0-based order statistic taken from that group
  ThetaSet theta;
  std::vector<Stage> stages;
};

struct SecondHopGroup {
  double shape = 1.0;
  double mean = 1.0;
};

struct ChainSetup {
  double snr = 1.0;
  bool self_interference = true;
  std::vector<SecondHopGroup> groups;
  std::vector<UserPlan> users;
};

/// Users with identical second-hop statistics share one ordered draw.
ChainSetup make_setup(const SystemConfig& cfg, const LinkStats& stats, double snr) {
  ChainSetup setup;
  setup.snr = snr;
  setup.self_interference = stats.omega_RR > 0.0;
  std::map<std::pair<double, double>, std::size_t> index;
  for (std::size_t i = 0; i < cfg.users(); ++i) {
    const SecondHopGroup g{cfg.m_RU[i] * cfg.n_R, cfg.n_R * stats.omega_hat_RU[i]};
    auto [it, inserted] = index.emplace(std::make_pair(g.shape, g.mean), setup.groups.size());
    if (inserted) setup.groups.push_back(g);
    UserPlan plan;
    plan.group = it->second;
    plan.rank = i;
    plan.theta = compute_theta(stats, snr, i + 1);
    setup.users.push_back(plan);
  }
  return setup;
}

std::vector<std::uint64_t> count_outages(const SystemConfig& cfg, const LinkStats& stats, const ChainSetup& setup,
                                         const McOptions& opts) {
  const std::size_t U = setup.users.size();
  const std::uint64_t blocks = (opts.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  std::vector<std::vector<std::uint64_t>> per_block(blocks, std::vector<std::uint64_t>(U, 0));
  const double g = setup.snr;
  const double half_g2 = 0.5 * g * g;

  auto run_block = [&](std::uint64_t b) {
    RngStream rng(opts.seed, b);
    const std::uint64_t begin = b * kTrialsPerBlock;
    const std::uint64_t n = std::min(kTrialsPerBlock, opts.trials - begin);
    std::vector<std::vector<double>> hop2(setup.groups.size(), std::vector<double>(cfg.users()));
    auto& counts = per_block[b];
    for (std::uint64_t t = 0; t < n; ++t) {
      const double A = sample_first_hop(cfg, stats, rng);
      for (std::size_t gi = 0; gi < setup.groups.size(); ++gi) {
        auto& v = hop2[gi];
        for (auto& x : v) x = draw_gamma(setup.groups[gi].shape, setup.groups[gi].mean, rng);
        std::sort(v.begin(), v.end());
      }
      const double C = setup.self_interference ? draw_gamma(cfg.m_RR, stats.omega_RR, rng) : 0.0;
      for (std::size_t u = 0; u < U; ++u) {
        const auto& plan = setup.users[u];
        const double B = hop2[plan.group][plan.rank];
        const double X = half_g2 * A * B;
        const double den = sinr_denominator(plan.theta, g, A, B, C);
        for (const auto& st : plan.stages) {
          if (st.a * X <= st.th * (st.tail * X + den)) {
            ++counts[u];
            break;
          }
        }
      }
    }
  };

  const unsigned workers = std::max(1u, opts.workers);
  if (workers == 1 || blocks <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::uint64_t> total(U, 0);
  for (const auto& c : per_block) {
    for (std::size_t u = 0; u < U; ++u) total[u] += c[u];
  }
  return total;
}

std::vector<OutagePoint> to_points(const std::vector<std::uint64_t>& counts, double snr_db, Method method,
                                   const McOptions& opts) {
  std::vector<OutagePoint> out;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    OutagePoint p;
    p.user = u + 1;
    p.snr_db = snr_db;
    p.method = method;
    p.trials = opts.trials;
    p.value = static_cast<double>(counts[u]) / static_cast<double>(opts.trials);
    p.residual = p.value;
    p.ci = wilson_interval(counts[u], opts.trials, opts.confidence);
    out.push_back(p);
  }
  return out;
}

void check_trials(const McOptions& opts) {
  if (opts.trials == 0) throw DomainError("simulation needs at least one trial");
}

}  // namespace

std::vector<OutagePoint> simulate_outage_all(const SystemConfig& cfg, double snr_db, const McOptions& opts) {
  validate(cfg);
  check_trials(opts);
  const double snr = db_to_linear(snr_db);
  const auto stats = derive_link_stats(cfg, snr);
  auto setup = make_setup(cfg, stats, snr);
  const auto tails = tail_sums(cfg.a);
  for (std::size_t u = 0; u < cfg.users(); ++u) {
    for (std::size_t k = 0; k <= u; ++k) setup.users[u].stages.push_back({cfg.a[k], tails[k], cfg.gamma_th[k]});
  }
  return to_points(count_outages(cfg, stats, setup, opts), snr_db, Method::monte_carlo, opts);
}

OutagePoint simulate_outage(const SystemConfig& cfg, double snr_db, std::size_t l, const McOptions& opts) {
  if (l < 1 || l > cfg.users()) throw DomainError("simulate_outage: user index out of range");
  return simulate_outage_all(cfg, snr_db, opts).at(l - 1);
}

std::vector<OutagePoint> simulate_baseline_all(const SystemConfig& cfg, double snr_db, Baseline baseline,
                                               const McOptions& opts, const BaselineOptions& bopts) {
  validate_structure(cfg);
  check_trials(opts);
  const double snr = db_to_linear(snr_db);
  auto stats = derive_link_stats(cfg, snr);
  const auto thresholds = map_baseline_thresholds(cfg, baseline, bopts.hd_thresholds);
  if (baseline == Baseline::hd_noma) stats.omega_RR = 0.0;
  auto setup = make_setup(cfg, stats, snr);
  const auto tails = tail_sums(cfg.a);
  for (std::size_t u = 0; u < cfg.users(); ++u) {
    auto& stages = setup.users[u].stages;
    if (baseline == Baseline::hd_noma) {
      for (std::size_t k = 0; k <= u; ++k) stages.push_back({cfg.a[k], tails[k], thresholds[k]});
    } else {
      stages.push_back({1.0, 0.0, thresholds.front()});
    }
  }
  const Method method = baseline == Baseline::hd_noma ? Method::hd_noma : Method::fd_oma;
  return to_points(count_outages(cfg, stats, setup, opts), snr_db, method, opts);
}

OutagePoint simulate_baseline(const SystemConfig& cfg, double snr_db, std::size_t l, Baseline baseline,
                              const McOptions& opts, const BaselineOptions& bopts) {
  if (l < 1 || l > cfg.users()) throw DomainError("simulate_baseline: user index out of range");
  return simulate_baseline_all(cfg, snr_db, baseline, opts, bopts).at(l - 1);
}

// ---------------------------------------------------------------------------
// Symbol-level chain.

namespace {

cplx nakagami_coefficient(double m, double omega, RngStream& rng) {
  const double power = draw_gamma(m, omega, rng);
  const double phase = 2.0 * std::numbers::pi * rng.uniform_pos();
  return std::polar(std::sqrt(power), phase);
}

cplx complex_gaussian(double variance, RngStream& rng) {
  // Box-Muller on two uniforms; each component has variance / 2.
  const double r = std::sqrt(-variance * std::log(rng.uniform_pos()));
  const double phase = 2.0 * std::numbers::pi * rng.uniform_pos();
  return std::polar(r, phase);
}

std::vector<cplx> qpsk() {
  const double h = std::sqrt(0.5);
  return {{h, h}, {-h, h}, {-h, -h}, {h, -h}};
}

std::size_t nearest(const std::vector<cplx>& constellation, cplx z) {
  std::size_t best = 0;
  double best_d = std::norm(z - constellation[0]);
  for (std::size_t i = 1; i < constellation.size(); ++i) {
    const double d = std::norm(z - constellation[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

FixedChannels draw_fixed_channels(const SystemConfig& cfg, double snr_db, RngStream& rng) {
  const auto stats = derive_link_stats(cfg, db_to_linear(snr_db));
  FixedChannels ch;
  for (int i = 0; i < cfg.n_B; ++i) ch.h_SR.push_back(nakagami_coefficient(cfg.m_SR, stats.omega_hat_SR, rng));
  for (std::size_t u = 0; u < cfg.users(); ++u) {
    std::vector<cplx> h;
    for (int j = 0; j < cfg.n_R; ++j) h.push_back(nakagami_coefficient(cfg.m_RU[u], stats.omega_hat_RU[u], rng));
    ch.h_RU.push_back(h);
  }
  ch.h_RR = nakagami_coefficient(cfg.m_RR, stats.omega_RR, rng);
  return ch;
}

SymbolValidationResult symbol_level_validate(const SystemConfig& cfg, const FixedChannels& channels, double snr_db,
                                             std::size_t l, const SymbolValidationOptions& opts) {
  validate(cfg);
  if (l < 1 || l > cfg.users()) throw DomainError("symbol_level_validate: user index out of range");
  if (!is_ideal(cfg)) throw DomainError("symbol_level_validate: only impairment-free configurations are supported");
  if (channels.h_SR.size() != static_cast<std::size_t>(cfg.n_B) || channels.h_RU.size() != cfg.users()) {
    throw ConfigError("symbol_level_validate: channel dimensions do not match the configuration");
  }
  for (const auto& h : channels.h_RU) {
    if (h.size() != static_cast<std::size_t>(cfg.n_R)) {
      throw ConfigError("symbol_level_validate: every user needs n_R receive coefficients");
    }
  }
  const auto constellation = opts.constellation.empty() ? qpsk() : opts.constellation;
  double energy = 0.0;
  for (const auto& c : constellation) energy += std::norm(c);
  energy /= static_cast<double>(constellation.size());
  if (std::abs(energy - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "symbol_level_validate: constellation energy is " << energy << ", expected 1";
    throw ConfigError(os.str());
  }

  const double P = db_to_linear(snr_db);  // noise variance normalized to 1
  const std::size_t L = cfg.users();

  // Transmit antenna selection: the two strongest base-station antennas.
  std::vector<std::size_t> order(channels.h_SR.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return std::norm(channels.h_SR[x]) > std::norm(channels.h_SR[y]); });
  const cplx h1 = channels.h_SR[order[0]], h2 = channels.h_SR[order[1]];
  const double A = std::norm(h1) + std::norm(h2);
  const double C = opts.noiseless ? 0.0 : std::norm(channels.h_RR);

  Eigen::VectorXcd hru(cfg.n_R);
  for (int j = 0; j < cfg.n_R; ++j) hru(j) = channels.h_RU[l - 1][j];
  const double B = hru.squaredNorm();

  const double G = std::sqrt(P / (P * A + P * C + 1.0));
  const double amp = std::sqrt(P / 2.0);
  // Effective Alamouti channels per receive antenna.
  const Eigen::VectorXcd g1 = G * amp * h1 * hru;
  const Eigen::VectorXcd g2 = G * amp * h2 * hru;
  const double gain = g1.squaredNorm() + g2.squaredNorm();

  std::vector<double> sqrt_a(L);
  for (std::size_t k = 0; k < L; ++k) sqrt_a[k] = std::sqrt(cfg.a[k]);

  SymbolValidationResult res;
  res.user = l;
  res.A = A;
  res.B = B;
  res.C = std::norm(channels.h_RR);
  std::vector<double> err_power(l, 0.0);
  res.symbol_errors.assign(l, 0);

  RngStream rng(opts.seed, 0);
  const std::size_t blocks = std::max<std::size_t>(1, opts.symbols / 2);
  std::vector<std::array<std::size_t, 2>> sym(L);
  Eigen::VectorXcd y1(cfg.n_R), y2(cfg.n_R);
  const double noise_var = opts.noiseless ? 0.0 : 1.0;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    std::array<cplx, 2> x{};
    for (std::size_t k = 0; k < L; ++k) {
      for (int i = 0; i < 2; ++i) {
        sym[k][i] = static_cast<std::size_t>(rng() % constellation.size());
        x[i] += sqrt_a[k] * constellation[sym[k][i]];
      }
    }
    // Relay input over the two slots: Alamouti codeword, residual
    // self-interference (independent of the current block) and noise.
    cplx r1 = amp * (h1 * x[0] + h2 * x[1]);
    cplx r2 = amp * (-h1 * std::conj(x[1]) + h2 * std::conj(x[0]));
    if (!opts.noiseless) {
      r1 += channels.h_RR * complex_gaussian(P, rng) + complex_gaussian(1.0, rng);
      r2 += channels.h_RR * complex_gaussian(P, rng) + complex_gaussian(1.0, rng);
    }
    for (int j = 0; j < cfg.n_R; ++j) {
      y1(j) = G * hru(j) * r1;
      y2(j) = G * hru(j) * r2;
      if (noise_var > 0.0) {
        y1(j) += complex_gaussian(noise_var, rng);
        y2(j) += complex_gaussian(noise_var, rng);
      }
    }
    // Alamouti combining summed over receive antennas (MRC).
    const cplx z1 = (g1.adjoint() * y1)(0) + (g2.transpose() * y2.conjugate())(0);
    const cplx z2 = (g2.adjoint() * y1)(0) - (g1.transpose() * y2.conjugate())(0);
    const std::array<cplx, 2> z{z1 / gain, z2 / gain};

    for (int i = 0; i < 2; ++i) {
      cplx residual = z[i];
      for (std::size_t k = 0; k < l; ++k) {
        const std::size_t decided = nearest(constellation, residual / sqrt_a[k]);
        if (decided != sym[k][i]) ++res.symbol_errors[k];
        residual -= sqrt_a[k] * constellation[sym[k][i]];  // perfect SIC
        err_power[k] += std::norm(residual);
      }
    }
  }

  ThetaSet ideal;
  ChannelDraw draw{A, std::vector<double>(L, 0.0), C};
  draw.B[l - 1] = B;
  res.predicted_sinr = evaluate_sinr(draw, ideal, cfg, P, l).sinr;
  const double n = 2.0 * static_cast<double>(blocks);
  for (std::size_t k = 0; k < l; ++k) {
    const double mean_err = err_power[k] / n;
    res.measured_sinr.push_back(mean_err > 0.0 ? cfg.a[k] / mean_err : std::numeric_limits<double>::infinity());
  }
  return res;
}

}  // namespace fdnoma
