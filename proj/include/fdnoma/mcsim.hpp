#pragma once

// Monte Carlo engine: samples (A, B, C), evaluates the per-stage SINRs and
// counts joint SIC outage events. Also hosts the HD-NOMA / FD-OMA baselines
// and a symbol-level Alamouti / AF / MRC chain used to validate the SINR
// expression on fixed channels.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "fdnoma/outage.hpp"
#include "fdnoma/sysmodel.hpp"

namespace fdnoma {

/// xoshiro256** seeded through splitmix64 from (seed, stream_id). Each
/// (seed, stream_id) pair yields an independent, reproducible sequence.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on (0, 1].
  double uniform_pos();

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Gamma variate with the given shape and mean.
double draw_gamma(double shape, double mean, RngStream& rng);

struct ChannelDraw {
  double A = 0.0;           // sum of the two largest first-hop gains
  std::vector<double> B;    // ordered second-hop gains, nondecreasing
  double C = 0.0;           // residual self-interference gain
};

/// Sum of the two largest of n_B Gamma(m_SR, mean omega_hat_SR) draws.
double sample_first_hop(const SystemConfig& cfg, const LinkStats& stats, RngStream& rng);

/// L iid Gamma(m_RU n_R, mean n_R omega_hat_RU) draws sorted ascending. The
/// per-user statistics of `ref_user` (1-based) are used for every draw.
std::vector<double> sample_second_hop(const SystemConfig& cfg, const LinkStats& stats, RngStream& rng,
                                      std::size_t ref_user = 1);

/// Gamma(m_RR, mean omega_RR); 0 when omega_RR == 0.
double sample_self_interference(const SystemConfig& cfg, const LinkStats& stats, RngStream& rng);

struct SinrBreakdown {
  std::vector<double> sinr;  // entry k-1 is the SINR of decoding user k at user l
};

SinrBreakdown evaluate_sinr(const ChannelDraw& draw, const ThetaSet& theta, const SystemConfig& cfg,
                            double snr_bar, std::size_t l);

struct McOptions {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double confidence = 0.95;
};

/// Trials are processed in blocks of this size; block b always uses
/// RngStream(seed, b), which makes results independent of the worker count.
inline constexpr std::uint64_t kTrialsPerBlock = 1u << 16;

/// Two-sided Wilson score interval for `successes` out of `n`.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double confidence);

/// Outage estimates for every user from one shared set of draws.
std::vector<OutagePoint> simulate_outage_all(const SystemConfig& cfg, double snr_db, const McOptions& opts);

/// Outage estimate for user l (1-based). Validates feasibility first.
OutagePoint simulate_outage(const SystemConfig& cfg, double snr_db, std::size_t l, const McOptions& opts);

struct BaselineOptions {
  HdThresholdMode hd_thresholds = HdThresholdMode::rate_matched;
};

/// HD_NOMA: same chain without self-interference and with mapped thresholds.
/// FD_OMA: user l served alone (a = 1, no NOMA interference) against the
/// product-mapped threshold. Infeasible mapped thresholds simply yield
/// outage probability 1.
std::vector<OutagePoint> simulate_baseline_all(const SystemConfig& cfg, double snr_db, Baseline baseline,
                                               const McOptions& opts, const BaselineOptions& bopts = {});
OutagePoint simulate_baseline(const SystemConfig& cfg, double snr_db, std::size_t l, Baseline baseline,
                              const McOptions& opts, const BaselineOptions& bopts = {});

// ---------------------------------------------------------------------------
// Symbol-level validation.

using cplx = std::complex<double>;

struct FixedChannels {
  std::vector<cplx> h_SR;               // n_B base-station antennas
  std::vector<std::vector<cplx>> h_RU;  // per user, n_R receive antennas
  cplx h_RR{0.0, 0.0};
};

/// Nakagami-m channel coefficients with the configured mean powers; the
/// self-interference power depends on snr_db through alpha snr^{mu - 1}.
FixedChannels draw_fixed_channels(const SystemConfig& cfg, double snr_db, RngStream& rng);

struct SymbolValidationOptions {
  std::size_t symbols = 1u << 20;  // superposed symbols (two per Alamouti block)
  bool noiseless = false;          // drop relay noise, user noise and self-interference
  std::vector<cplx> constellation; // per-user symbol alphabet; empty selects unit-energy 4-QAM
  std::uint64_t seed = 1;
};

struct SymbolValidationResult {
  std::size_t user = 1;
  std::vector<double> measured_sinr;   // per SIC stage k = 1..l
  std::vector<double> predicted_sinr;  // the closed-form SINR on the same channels
  std::vector<std::size_t> symbol_errors;  // hard-decision errors per stage
  double A = 0.0, B = 0.0, C = 0.0;
};

/// Runs Alamouti encoding of the superposed symbols on the two strongest
/// antennas, AF relaying with gain G, MRC/Alamouti combining at user l and
/// perfect SIC. Ideal (impairment-free) configurations only.
SymbolValidationResult symbol_level_validate(const SystemConfig& cfg, const FixedChannels& channels, double snr_db,
                                             std::size_t l, const SymbolValidationOptions& opts = {});

}  // namespace fdnoma
