#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "psdcuts/harness.hpp"

using namespace psdcuts;

namespace {

RunTrace make_trace(std::vector<double> z, double step_seconds = 1.0) {
  RunTrace t;
  for (std::size_t i = 0; i < z.size(); ++i) {
    IterationRecord r;
    r.iter = static_cast<int>(i + 1);
    r.objective = z[i];
    r.seconds = step_seconds * static_cast<double>(i + 1);
    t.records.push_back(r);
  }
  t.elapsed_seconds = step_seconds * static_cast<double>(z.size());
  t.status = RunStatus::kIterationLimit;
  return t;
}

InstanceResult result(std::string name, std::vector<double> z, double opt = 0.0) {
  InstanceResult r;
  r.name = std::move(name);
  r.n = 2;
  r.trace = make_trace(std::move(z));
  r.opt = opt;
  return r;
}

}  // namespace

TEST(GapClosed, Examples) {
  EXPECT_EQ(*gap_closed({100, 20, 0}), 80.0);
  EXPECT_EQ(*gap_closed({100, 100, 0}), 0.0);
  EXPECT_EQ(*gap_closed({100, 7, 7}), 100.0);
  EXPECT_FALSE(gap_closed({5, 5, 5}));
}

TEST(GapClosed, AffineInvariant) {
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const double opt = rng.uniform(-10, 10);
    const double rlt = opt + rng.uniform(0.1, 10);
    const double bnd = rng.uniform(opt, rlt);
    const double s = rng.uniform(0.01, 100), c = rng.uniform(-100, 100);
    EXPECT_NEAR(*gap_closed({rlt, bnd, opt}), *gap_closed({s * rlt + c, s * bnd + c, s * opt + c}),
                1e-8);
    EXPECT_NEAR(*gap_closed({rlt, bnd, opt}), oracle::gap(rlt, bnd, opt), 1e-12);
  }
}

TEST(Checkpoints, Parse) {
  const auto cps = parse_checkpoints("1,5,2.5s,30s");
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[0].kind, Checkpoint::Kind::kIteration);
  EXPECT_EQ(cps[1].value, 5.0);
  EXPECT_EQ(cps[2].kind, Checkpoint::Kind::kSeconds);
  EXPECT_EQ(cps[2].value, 2.5);
  EXPECT_EQ(cps[3].label(), "30s");
  EXPECT_EQ(cps[1].label(), "5");
  EXPECT_THROW(parse_checkpoints("1,x"), std::invalid_argument);
  EXPECT_THROW(parse_checkpoints("1.5"), std::invalid_argument);
  EXPECT_THROW(parse_checkpoints(""), std::invalid_argument);
}

TEST(BoundAt, IterationAndSeconds) {
  const RunTrace t = make_trace({10, 8, 7, 6}, 2.0);
  EXPECT_EQ(bound_at(t, Checkpoint::iteration(0)), 10.0);
  EXPECT_EQ(bound_at(t, Checkpoint::iteration(3)), 6.0);
  EXPECT_FALSE(bound_at(t, Checkpoint::iteration(4)));
  EXPECT_EQ(bound_at(t, Checkpoint::seconds(5.0)), 8.0);
  EXPECT_EQ(bound_at(t, Checkpoint::seconds(8.0)), 6.0);
  EXPECT_FALSE(bound_at(t, Checkpoint::seconds(8.5)));
  EXPECT_FALSE(bound_at(t, Checkpoint::seconds(1.0)));
}

TEST(Compare, ThresholdArithmetic) {
  const std::vector<Checkpoint> cp = {Checkpoint::iteration(1)};
  const std::vector<InstanceResult> a = {result("p", {100, 50})};
  const std::vector<InstanceResult> b = {result("p", {100, 48})};
  const auto r1 = compare(a, b, cp, 1.0).rows[0];
  EXPECT_EQ(r1.b_wins, 1);
  EXPECT_EQ(r1.ties, 0);
  const auto r5 = compare(a, b, cp, 5.0).rows[0];
  EXPECT_EQ(r5.ties, 1);
  EXPECT_EQ(r5.b_wins, 0);
  EXPECT_EQ(r5.improvement, 2.0);
}

TEST(Compare, ShortTraceIsIncomparable) {
  std::vector<double> za(41, 50.0), zb(60, 40.0);
  za[0] = zb[0] = 100.0;
  const std::vector<Checkpoint> cp = {Checkpoint::iteration(40), Checkpoint::iteration(50)};
  const auto rep = compare({result("q", za)}, {result("q", zb)}, cp, 1.0);
  EXPECT_EQ(rep.rows[0].b_wins, 1);
  EXPECT_EQ(rep.rows[1].incomparable, 1);
  EXPECT_EQ(rep.rows[1].improvement, 0.0);
}

TEST(Compare, FixtureCountsAndCsv) {
  const std::vector<InstanceResult> a = {
      result("i1", {100, 50}), result("i2", {100, 40}), result("i3", {100, 90}),
      result("i4", {100}), result("i5", {30, 30}, 30.0)};
  const std::vector<InstanceResult> b = {
      result("i1", {100, 48}), result("i2", {100, 39.5}), result("i3", {100, 95}),
      result("i4", {100, 10}), result("i5", {30, 30}, 30.0)};
  const std::vector<Checkpoint> cp = {Checkpoint::iteration(0), Checkpoint::iteration(1)};
  const ComparisonReport rep = compare(a, b, cp, 1.0);
  ASSERT_EQ(rep.rows.size(), 2u);
  // Checkpoint 0: every comparable instance has gap 0 on both sides.
  EXPECT_EQ(rep.rows[0].ties, 4);
  EXPECT_EQ(rep.rows[0].incomparable, 1);
  const auto& r = rep.rows[1];
  EXPECT_EQ(r.a_wins, 1);
  EXPECT_EQ(r.b_wins, 1);
  EXPECT_EQ(r.ties, 1);
  EXPECT_EQ(r.incomparable, 2);
  EXPECT_EQ(r.total(), 5);
  EXPECT_DOUBLE_EQ(r.improvement, (2.0 + 0.5 - 5.0) / 3.0);

  std::ostringstream os;
  write_comparison_csv(os, rep);
  EXPECT_EQ(os.str(),
            "checkpoint,A_wins,B_wins,tie,inc,impr\n"
            "0,0.00,0.00,80.00,20.00,0.00\n"
            "1,20.00,20.00,20.00,40.00,-0.83\n");

  const auto r5 = compare(a, b, cp, 5.0).rows[1];
  EXPECT_EQ(r5.a_wins, 1);
  EXPECT_EQ(r5.b_wins, 0);
  EXPECT_EQ(r5.ties, 2);
}

TEST(Compare, MismatchedInstances) {
  const std::vector<Checkpoint> cp = {Checkpoint::iteration(1)};
  try {
    compare({result("x", {1, 0}), result("y", {1, 0})}, {result("x", {1, 0})}, cp, 1.0);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
  }
}

TEST(InstanceTable, Format) {
  InstanceResult r = result("i1", {100, 50, 40});
  r.long_run_bound = 20.0;
  InstanceResult s = result("i2", {10});
  const std::vector<Checkpoint> cp = {Checkpoint::iteration(1), Checkpoint::iteration(2)};
  std::ostringstream os;
  write_instance_table(os, {r, s}, cp);
  EXPECT_EQ(os.str(),
            "instance,n,m,bound,gap@1,gap@2\n"
            "i1,2,0,80.00,50.00,60.00\n"
            "i2,2,0,,,\n");
}

TEST(Tune, ConstantEvaluatorReturnsCentre) {
  int calls = 0;
  const TuneEvaluator constant = [&](double, double) {
    ++calls;
    return std::vector<InstanceResult>{result("c", {100, 50})};
  };
  TuneOptions opts;
  opts.checkpoints = {Checkpoint::iteration(1)};
  const TuneResult r = tune(constant, opts);
  EXPECT_EQ(r.pct_viol, 0.5);
  EXPECT_EQ(r.pct_nz, 0.5);
  EXPECT_FALSE(r.hit_round_cap);
  EXPECT_EQ(r.rounds.size(), 5u);
  EXPECT_LE(r.rounds.back().viol_high - r.rounds.back().viol_low, 0.2);
  EXPECT_LE(r.rounds.back().nz_high - r.rounds.back().nz_low, 0.1);
}

TEST(Tune, MonotoneInNonzeros) {
  const TuneEvaluator stub = [](double, double nz) {
    return std::vector<InstanceResult>{result("m", {100, 100 - 100 * nz})};
  };
  TuneOptions opts;
  opts.checkpoints = {Checkpoint::iteration(1)};
  const TuneResult r = tune(stub, opts);
  EXPECT_GE(r.pct_nz, 0.95);
  EXPECT_FALSE(r.hit_round_cap);
}

TEST(Tune, RejectsEmptyInstanceSet) {
  const TuneEvaluator none = [](double, double) { return std::vector<InstanceResult>{}; };
  EXPECT_THROW(tune(none), std::invalid_argument);
}

TEST(GenBoxqp, DensityOneIsFull) {
  const QcqpProblem p = gen_boxqp(6, 1.0, 3);
  for (Index i = 0; i < 6; ++i) {
    EXPECT_NE(p.a0[i], 0.0);
    for (Index j = 0; j < 6; ++j) EXPECT_NE(p.q0(i, j), 0.0);
  }
}

TEST(GenBoxqp, DeterministicAndInRange) {
  const QcqpProblem a = gen_boxqp(20, 0.3, 77), b = gen_boxqp(20, 0.3, 77);
  EXPECT_EQ(a.q0, b.q0);
  EXPECT_EQ(a.a0, b.a0);
  EXPECT_NE(gen_boxqp(20, 0.3, 78).q0, a.q0);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const QcqpProblem p = gen_boxqp(20, 0.3, seed);
    EXPECT_EQ(p.q0, p.q0.transpose());
    EXPECT_EQ(p.m(), 0);
    EXPECT_EQ(p.p(), 0);
    EXPECT_TRUE((p.x_lower.array() == 0.0).all());
    EXPECT_TRUE((p.x_upper.array() == 1.0).all());
    int present = 0;
    for (Index i = 0; i < 20; ++i)
      for (Index j = i + 1; j < 20; ++j) {
        const double v = p.q0(i, j);
        EXPECT_LE(std::abs(v), 50.0);
        EXPECT_EQ(v, std::round(v));
        present += v != 0.0;
      }
    EXPECT_NEAR(present / 190.0, 0.3, 0.1);
  }
  EXPECT_THROW(gen_boxqp(1, 0.5, 1), std::invalid_argument);
  EXPECT_THROW(gen_boxqp(5, 0.0, 1), std::invalid_argument);
}

TEST(BruteForce, Examples) {
  QcqpProblem p = QcqpProblem::zeros(1, 0);
  p.q0(0, 0) = -1.0;
  p.a0[0] = 1.0;
  EXPECT_NEAR(brute_force_opt(p, 1e-3), 0.25, 1e-12);
  p.a0[0] = 0.0;
  p.q0(0, 0) = 1.0;
  EXPECT_EQ(brute_force_opt(p, 1e-3), 1.0);
  EXPECT_THROW(brute_force_opt(gen_boxqp(4, 0.5, 1), 0.1), std::invalid_argument);
}

TEST(BruteForce, MatchesFaceEnumeration) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    for (Index n : {2, 3}) {
      const QcqpProblem p = gen_boxqp(n, 0.8, seed);
      const double exact = oracle::box_qp_max(p.q0, p.a0, p.x_lower, p.x_upper);
      EXPECT_NEAR(brute_force_opt(p, n == 2 ? 1e-3 : 1e-2), exact, 1e-4);
    }
  }
}

TEST(BruteForce, LinearPartChosenOptimally) {
  QcqpProblem p = QcqpProblem::zeros(1, 2);
  p.q0(0, 0) = -1.0;
  p.b0 << 2.0, -3.0;
  p.y_lower << -1.0, -1.0;
  p.y_upper << 1.0, 2.0;
  EXPECT_NEAR(brute_force_opt(p, 1e-3), 0.0 + 2.0 + 3.0, 1e-12);
}
