#include <gtest/gtest.h>

#include <sstream>

#include "fdnoma/opcli.hpp"

using namespace fdnoma;

namespace {

std::string sweep_csv(SweepSpec spec, const std::vector<Variant>& variants, unsigned workers) {
  spec.workers = workers;
  std::ostringstream out;
  write_csv(out, spec, run_sweep(spec, variants));
  return out.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Grid, ColonAndListForms) {
  EXPECT_EQ(parse_grid("0:30:5"), (std::vector<double>{0, 5, 10, 15, 20, 25, 30}));
  EXPECT_EQ(parse_grid("10, 20,35"), (std::vector<double>{10, 20, 35}));
  const auto mu = parse_grid("0:1:0.1");
  ASSERT_EQ(mu.size(), 11u);
  EXPECT_EQ(mu[3], 0.3);
  EXPECT_EQ(mu.back(), 1.0);
  EXPECT_EQ(parse_grid("0.1:0.9:0.05").size(), 17u);
}

TEST(Grid, RejectsMalformed) {
  EXPECT_THROW(parse_grid("0:10"), UsageError);
  EXPECT_THROW(parse_grid("0:10:0"), UsageError);
  EXPECT_THROW(parse_grid("10:0:1"), UsageError);
  EXPECT_THROW(parse_grid("1,1,2"), UsageError);
  EXPECT_THROW(parse_grid("3,2"), UsageError);
  EXPECT_THROW(parse_grid("a:b:c"), UsageError);
}

TEST(Parsing, AxesMethodsUsers) {
  EXPECT_EQ(parse_axis("d_SR"), Axis::d_SR);
  EXPECT_THROW(parse_axis("distance"), UsageError);
  EXPECT_EQ(parse_methods("exact,monte_carlo,exact"), (std::vector<Method>{Method::exact, Method::monte_carlo}));
  EXPECT_THROW(parse_methods("exact,magic"), UsageError);
  EXPECT_EQ(parse_users("3,1"), (std::vector<std::size_t>{1, 3}));
  EXPECT_THROW(parse_users("0"), UsageError);
}

TEST(Axis, RelayPlacementMovesUsers) {
  const auto cfg = apply_axis(SystemConfig{}, Axis::d_SR, 0.3);
  EXPECT_EQ(cfg.d_SR, 0.3);
  for (double d : cfg.d_RU) EXPECT_DOUBLE_EQ(d, 0.7);
  const auto ru = apply_axis(SystemConfig{}, Axis::sigma2_est_RU, 0.05);
  for (double s : ru.sigma2_est_RU) EXPECT_EQ(s, 0.05);
}

TEST(Presets, CaptionParameters) {
  const auto fig3 = figure_preset("fig3");
  for (const auto& v : fig3.variants) {
    EXPECT_EQ(v.cfg.mu, 1.0);
    EXPECT_EQ(v.cfg.m_SR, 1.0);
    EXPECT_EQ(v.cfg.m_RR, 1.0);
    EXPECT_TRUE(is_ideal(v.cfg));
  }
  const auto fig6 = figure_preset("fig6");
  for (const auto& v : fig6.variants) {
    EXPECT_EQ(v.cfg.sigma2_est_SR, 0.01);
    EXPECT_EQ(v.cfg.sigma2_est_RU[0], 0.01);
    EXPECT_EQ(v.cfg.fd_tau_SR, 0.03);
    EXPECT_EQ(v.cfg.mu, 0.25);
  }
  const auto fig10 = figure_preset("fig10");
  EXPECT_EQ(fig10.sweep.axis, Axis::sigma2_est_SR);
  EXPECT_EQ(fig10.sweep.snr_db, 15.0);
  EXPECT_EQ(fig10.variants[0].cfg.fd_tau_SR, 0.03);
  EXPECT_EQ(figure_preset("fig9").sweep.hd_thresholds, HdThresholdMode::equal);
}

TEST(Presets, UnknownNameListsPresets) {
  try {
    figure_preset("fig99");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("fig3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("fig12"), std::string::npos);
  }
}

TEST(Sweep, SinglePointExactGivesOneRowPerUser) {
  SweepSpec spec;
  spec.grid = {15.0};
  const auto rows = run_sweep(spec, {{"default", SystemConfig{}}});
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].user, i + 1);
    ASSERT_TRUE(rows[i].op.has_value());
    EXPECT_GE(*rows[i].op, 0.0);
    EXPECT_LE(*rows[i].op, 1.0);
    EXPECT_FALSE(rows[i].ci.has_value());
    EXPECT_TRUE(rows[i].error.empty());
  }
}

TEST(Sweep, FailuresBecomeRows) {
  SweepSpec spec;
  spec.grid = {10.0, 20.0};
  spec.methods = {Method::exact, Method::asymptotic_practical};
  const auto rows = run_sweep(spec, {{"default", SystemConfig{}}});
  ASSERT_EQ(rows.size(), 12u);
  for (const auto& r : rows) {
    if (r.method == Method::asymptotic_practical) {
      EXPECT_FALSE(r.error.empty());
      EXPECT_FALSE(r.op.has_value());
    } else {
      EXPECT_TRUE(r.error.empty());
    }
  }
  std::ostringstream out;
  write_csv(out, spec, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kCsvHeader);
}

TEST(Sweep, ByteIdenticalAcrossWorkerCounts) {
  auto preset = figure_preset("fig5");
  preset.sweep.grid = {0.0, 10.0, 20.0};
  preset.sweep.trials = 100'000;
  preset.sweep.methods = {Method::exact, Method::monte_carlo, Method::fd_oma};
  const auto one = sweep_csv(preset.sweep, preset.variants, 1);
  EXPECT_EQ(count_lines(one), 1u + 2u * 3u * 3u * 3u);
  EXPECT_EQ(one, sweep_csv(preset.sweep, preset.variants, 1));
  EXPECT_EQ(one, sweep_csv(preset.sweep, preset.variants, 4));
  EXPECT_EQ(one, sweep_csv(preset.sweep, preset.variants, 16));
}

TEST(Sweep, CsvFieldsEmptyUnlessSimulated) {
  SweepSpec spec;
  spec.grid = {10.0};
  spec.users = {2};
  spec.trials = 1000;
  spec.methods = {Method::exact, Method::monte_carlo};
  std::ostringstream out;
  write_csv(out, spec, run_sweep(spec, {{"v", SystemConfig{}}}));
  std::istringstream in(out.str());
  std::string header, exact, mc;
  std::getline(in, header);
  std::getline(in, exact);
  std::getline(in, mc);
  EXPECT_NE(exact.find(",exact,"), std::string::npos);
  EXPECT_NE(exact.find(",,,,,"), std::string::npos);  // ci_low..error empty
  EXPECT_NE(mc.find(",1000,,"), std::string::npos);   // trials set, wall_ms empty
}

// ---------------------------------------------------------------------------
// Validation report.

TEST(Validation, PassingRun) {
  ValidationSpec vs;
  vs.snr_grid = {5.0, 15.0};
  vs.trials = 200'000;
  SystemConfig cfg;
  cfg.mu = 0.0;
  const auto report = run_validation(cfg, vs);
  EXPECT_TRUE(report.passed());
  std::size_t slopes = 0;
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.status, CheckStatus::ok) << r.check << " " << r.snr_db << " " << r.user << " " << r.detail;
    slopes += r.check == "slope";
  }
  EXPECT_EQ(slopes, 3u);
}

TEST(Validation, RareEventsAreInsufficientNotFailures) {
  SystemConfig cfg;
  cfg.mu = 0.0;
  ValidationSpec vs;
  vs.snr_grid = {40.0};  // OP around 1e-7 .. 1e-3
  vs.users = {3};
  vs.trials = 1000;
  const auto report = run_validation(cfg, vs);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.rows.front().check, "mc_agreement");
  EXPECT_EQ(report.rows.front().status, CheckStatus::insufficient_trials);
}

TEST(Validation, CorruptedKappaTripsBoundOrdering) {
  SystemConfig cfg;
  ValidationSpec vs;
  vs.snr_grid = {10.0};
  vs.trials = 20'000;
  vs.exact.kappa_scale = 1.25;
  const auto report = run_validation(cfg, vs);
  EXPECT_FALSE(report.passed());
  bool bound_fired = false;
  for (const auto& r : report.rows) bound_fired |= (r.check == "bound_order" && r.status == CheckStatus::fail);
  EXPECT_TRUE(bound_fired);
  std::ostringstream out;
  write_report(out, report);
  EXPECT_NE(out.str().find("result: FAIL"), std::string::npos);
}
