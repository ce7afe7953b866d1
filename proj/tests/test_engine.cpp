#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "oracles.hpp"
#include "psdcuts/engine.hpp"
#include "psdcuts/harness.hpp"
#include "psdcuts/lp.hpp"

using namespace psdcuts;

namespace {

QcqpProblem parabola() {
  QcqpProblem p = QcqpProblem::zeros(1, 0);
  p.q0(0, 0) = -1.0;
  p.a0[0] = 1.0;
  return p;
}

// Replays a fixed objective sequence at a fixed non-PSD point and reports
// every added cut as slack by `slack` at the optimum.
class ScriptedLp final : public LpBackend {
 public:
  ScriptedLp(std::vector<double> z, Vector point, double slack = 1.0)
      : z_(std::move(z)), point_(std::move(point)), slack_(slack) {}

  std::vector<RowHandle> load(const Vector&, const Vector&, const Vector&,
                              const std::vector<LinearRow>& rows) override {
    std::vector<RowHandle> h;
    for (const auto& r : rows) h.push_back(add_row(r));
    return h;
  }
  RowHandle add_row(const LinearRow& row) override {
    rows_.emplace(next_, row);
    return next_++;
  }
  void remove_rows(std::span<const RowHandle> handles) override {
    for (auto h : handles) {
      rows_.erase(h);
      ++removed;
    }
  }
  LpStatus solve() override {
    ++solves;
    return LpStatus::kOptimal;
  }
  double objective_value() const override {
    return z_[std::min<std::size_t>(static_cast<std::size_t>(solves - 1), z_.size() - 1)];
  }
  const Vector& primal() const override { return point_; }
  double row_activity(RowHandle h) const override { return rows_.at(h).lower + slack_; }
  std::size_t num_rows() const override { return rows_.size(); }

  int solves = 0;
  int removed = 0;

 private:
  std::vector<double> z_;
  Vector point_;
  double slack_;
  std::map<RowHandle, LinearRow> rows_;
  RowHandle next_ = 1;
};

Vector parabola_rlt_point() {
  Vector v(2);
  v << 0.5, 0.0;
  return v;
}

}  // namespace

TEST(TailingOff, Thresholds) {
  EXPECT_FALSE(tailing_off(std::vector<double>(49, 1.0)));
  EXPECT_FALSE(tailing_off(std::vector<double>(50, 1.0)));
  EXPECT_TRUE(tailing_off(std::vector<double>(51, 1.0)));
  std::vector<double> z(51, 100.0);
  z.back() = 99.9899;
  EXPECT_FALSE(tailing_off(z));
  z.back() = 99.99;
  EXPECT_TRUE(tailing_off(z));
  EXPECT_TRUE(tailing_off(std::vector<double>{3.0, 3.0, 3.0}, 2, 1e-4));
}

TEST(StrategyNames, RoundTrip) {
  for (auto s : {Strategy::kS, Strategy::kS1M, Strategy::kS2M, Strategy::kSparse1, Strategy::kSparse2})
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_EQ(parse_strategy("S2M"), Strategy::kS2M);
  EXPECT_FALSE(parse_strategy("s3m"));
}

TEST(LoopConfigTest, Defaults) {
  const LoopConfig a = LoopConfig::for_strategy(Strategy::kS1M);
  EXPECT_EQ(a.max_iterations, 1000);
  EXPECT_EQ(a.time_limit_seconds, 600.0);
  EXPECT_EQ(a.sparsify.pct_viol, 0.6);
  EXPECT_EQ(a.sparsify.pct_nz, 0.2);
  const LoopConfig b = LoopConfig::for_strategy(Strategy::kSparse2);
  EXPECT_EQ(b.sparsify.pct_nz, 0.4);
  LoopConfig bad;
  bad.max_iterations = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Run, ParabolaConvergence) {
  const ExtendedModel model = lift(parabola());
  LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS);
  cfg.max_iterations = 30;
  DualSimplex lp;
  const RunTrace trace = run(model, cfg, lp);
  ASSERT_FALSE(trace.records.empty());
  EXPECT_NEAR(trace.records.front().objective, 0.5, 1e-12);
  EXPECT_LE(trace.records.back().objective, 0.2501);
  for (const auto& r : trace.records) EXPECT_GE(r.objective, 0.25 - 1e-9);
  // First cut is the tangent at x = 1/2 of the most negative eigenvector of
  // [[1, .5], [.5, 0]]: bound 1 − 1/√2.
  EXPECT_NEAR(trace.records[1].objective, 1.0 - 1.0 / std::sqrt(2.0), 1e-9);
}

TEST(Run, PsdFeasibleAtStart) {
  QcqpProblem p = QcqpProblem::zeros(2, 0);
  p.a0 << 1.0, 1.0;  // linear objective: the RLT optimum is the vertex (1,1,X=1)
  const ExtendedModel model = lift(p);
  DualSimplex lp;
  LoopConfig cfg;
  const RunTrace trace = run(model, cfg, lp);
  EXPECT_EQ(trace.status, RunStatus::kPsdFeasible);
  ASSERT_EQ(trace.records.size(), 1u);
  EXPECT_EQ(trace.records[0].cuts_added(), 0);
}

TEST(Run, IterationCap) {
  const ExtendedModel model = lift(gen_boxqp(6, 0.8, 4));
  for (int cap : {1, 3, 10}) {
    LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS2M);
    cfg.max_iterations = cap;
    DualSimplex lp;
    const RunTrace trace = run(model, cfg, lp);
    EXPECT_LE(trace.records.size(), static_cast<std::size_t>(cap));
    if (trace.status == RunStatus::kIterationLimit)
      EXPECT_EQ(trace.records.size(), static_cast<std::size_t>(cap));
  }
}

TEST(Run, TimeLimitWithInjectedClock) {
  const ExtendedModel model = lift(parabola());
  LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS);
  double ticks = 0.0;
  cfg.clock = [&ticks] { return ticks += 1.0; };
  cfg.time_limit_seconds = 5.5;
  DualSimplex lp;
  const RunTrace trace = run(model, cfg, lp);
  // Calls: start, then per iteration one for the record and one for the
  // time check; the check at t reads start + 2t.
  EXPECT_EQ(trace.status, RunStatus::kTimeLimit);
  EXPECT_EQ(trace.records.size(), 3u);
  EXPECT_EQ(trace.records[0].seconds, 1.0);
  EXPECT_EQ(trace.records[2].seconds, 5.0);
}

TEST(Run, TailingOffFixture) {
  const ExtendedModel model = lift(parabola());
  ScriptedLp lp(std::vector<double>(200, 1.0), parabola_rlt_point(), 0.0);
  LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS);
  cfg.purge_enabled = false;
  const RunTrace trace = run(model, cfg, lp);
  EXPECT_EQ(trace.status, RunStatus::kTailingOff);
  EXPECT_EQ(trace.records.size(), 51u);

  std::vector<double> falling;
  for (int t = 0; t < 200; ++t) falling.push_back(100.0 - 0.011 * t);
  ScriptedLp lp2(falling, parabola_rlt_point(), 0.0);
  cfg.max_iterations = 120;
  const RunTrace t2 = run(model, cfg, lp2);
  // 0.55 over 50 iterations exceeds 0.01% of ~100, so the run continues.
  EXPECT_EQ(t2.status, RunStatus::kIterationLimit);
  EXPECT_EQ(t2.records.size(), 120u);
}

TEST(Run, UntilStall) {
  const ExtendedModel model = lift(parabola());
  ScriptedLp lp(std::vector<double>(200, 1.0), parabola_rlt_point(), 0.0);
  LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS);
  cfg.until_stall = StallRule{1e-4, 10};
  const RunTrace trace = run(model, cfg, lp);
  EXPECT_EQ(trace.status, RunStatus::kStalled);
  EXPECT_EQ(trace.records.size(), 11u);
}

TEST(Run, PurgeTrigger) {
  const ExtendedModel model = lift(parabola());
  // z drops 1% per step for three steps, then stays flat.
  const std::vector<double> z = {1.0, 0.99, 0.98, 0.97, 0.97, 0.97};
  ScriptedLp lp(z, parabola_rlt_point(), 1.0);
  LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS);
  cfg.max_iterations = 6;
  const RunTrace trace = run(model, cfg, lp);
  ASSERT_EQ(trace.records.size(), 6u);
  for (int t = 0; t < 4; ++t) EXPECT_EQ(trace.records[static_cast<std::size_t>(t)].cuts_purged, 0);
  EXPECT_GT(trace.records[4].cuts_purged, 0);
  EXPECT_EQ(static_cast<std::size_t>(trace.records[4].cuts_purged), trace.records[3].pool_size);

  // Tight cuts are never purged.
  ScriptedLp tight(z, parabola_rlt_point(), 0.0);
  const RunTrace t2 = run(model, cfg, tight);
  for (const auto& r : t2.records) EXPECT_EQ(r.cuts_purged, 0);

  // Disabled purging.
  ScriptedLp off(z, parabola_rlt_point(), 1.0);
  cfg.purge_enabled = false;
  const RunTrace t3 = run(model, cfg, off);
  for (const auto& r : t3.records) EXPECT_EQ(r.cuts_purged, 0);
}

TEST(Run, PermanentRowsNeverRemoved) {
  for (auto s : {Strategy::kS, Strategy::kS1M, Strategy::kS2M, Strategy::kSparse1, Strategy::kSparse2}) {
    const ExtendedModel model = lift(gen_boxqp(8, 0.6, 21));
    LoopConfig cfg = LoopConfig::for_strategy(s);
    cfg.max_iterations = 15;
    DualSimplex lp;
    const RunTrace trace = run(model, cfg, lp);
    EXPECT_EQ(trace.permanent_rows, model.rows().size());
    for (const auto& r : trace.records) EXPECT_EQ(r.lp_rows, trace.permanent_rows + r.pool_size);
  }
}

TEST(Run, BoundsAreMonotoneAndValid) {
  const QcqpProblem p = gen_boxqp(3, 1.0, 5);
  const double opt = oracle::box_qp_max(p.q0, p.a0, p.x_lower, p.x_upper);
  const ExtendedModel model = lift(p);
  for (auto s : {Strategy::kS, Strategy::kS1M, Strategy::kS2M}) {
    LoopConfig cfg = LoopConfig::for_strategy(s);
    cfg.max_iterations = 40;
    DualSimplex lp;
    const RunTrace trace = run(model, cfg, lp);
    for (const auto& r : trace.records) EXPECT_GE(r.objective, opt - 1e-6);
  }
}

TEST(Run, Deterministic) {
  const ExtendedModel model = lift(gen_boxqp(10, 0.7, 9));
  LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS2M);
  cfg.max_iterations = 8;
  DualSimplex a, b;
  const auto ta = run(model, cfg, a).objectives();
  const auto tb = run(model, cfg, b).objectives();
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_NEAR(ta[i], tb[i], 1e-9);
}

TEST(GenerateCuts, OriginsPerStrategy) {
  Vector x(6);
  x << 0.2, 0.5, 0.9, 0.4, 0.1, 0.7;
  Matrix X = x * x.transpose();
  X(0, 3) += 0.3;
  X(3, 0) += 0.3;
  X(1, 2) -= 0.4;
  X(2, 1) -= 0.4;
  X(4, 4) -= 0.005;
  const XtildeView xt(x, X);
  const auto spectrum = sym_eigen(xt.matrix());
  const auto count = [&](Strategy s) {
    std::array<int, 4> c{};
    for (const auto& cut : generate_cuts(s, spectrum, xt, {0.3, 0.8}, 1e-8, Rng(1)))
      ++c[static_cast<std::size_t>(cut.origin)];
    return c;
  };
  const auto s = count(Strategy::kS);
  EXPECT_GT(s[0], 0);
  EXPECT_EQ(s[1] + s[2] + s[3], 0);
  const auto s1m = count(Strategy::kS1M);
  EXPECT_EQ(s1m[0], s[0]);
  EXPECT_EQ(s1m[2], 0);
  EXPECT_GT(s1m[1], 0);
  EXPECT_GT(s1m[3], 0);
  const auto s2m = count(Strategy::kS2M);
  EXPECT_EQ(s2m[1], 0);
  EXPECT_GT(s2m[2], 0);
  const auto sp1 = count(Strategy::kSparse1);
  EXPECT_EQ(sp1[3], 0);
  EXPECT_EQ(sp1[1], s1m[1]);
}

TEST(TraceCsv, RoundTrip) {
  const ExtendedModel model = lift(gen_boxqp(5, 0.8, 2));
  LoopConfig cfg = LoopConfig::for_strategy(Strategy::kS1M);
  cfg.max_iterations = 6;
  DualSimplex lp;
  const RunTrace trace = run(model, cfg, lp);
  TraceMetadata meta{"b5", 5, 0, 0, "s1m", 12.5, "supplied"};
  std::stringstream ss;
  write_trace_csv(ss, trace, meta);
  const LoadedTrace back = read_trace_csv(ss);
  EXPECT_EQ(back.meta.instance, "b5");
  EXPECT_EQ(back.meta.n, 5);
  EXPECT_EQ(back.meta.opt, 12.5);
  EXPECT_EQ(back.meta.strategy, "s1m");
  EXPECT_EQ(back.trace.status, trace.status);
  ASSERT_EQ(back.trace.records.size(), trace.records.size());
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    EXPECT_EQ(back.trace.records[i].objective, trace.records[i].objective);
    EXPECT_EQ(back.trace.records[i].seconds, trace.records[i].seconds);
    EXPECT_EQ(back.trace.records[i].cuts_added(), trace.records[i].cuts_added());
  }
  std::stringstream bad("iter,seconds,objective,cuts_added,cuts_purged,pool_size,min_eig\n1,x,2,0,0,0,0\n");
  EXPECT_THROW(read_trace_csv(bad), std::runtime_error);
}
