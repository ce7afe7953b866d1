#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psdcuts/lp.hpp"
#include "psdcuts/random.hpp"

using namespace psdcuts;

namespace {

LinearRow dense_row(const Vector& a, double lo, double hi) {
  LinearRow r;
  for (Index j = 0; j < a.size(); ++j)
    if (a[j] != 0.0) r.terms.emplace_back(j, a[j]);
  r.lower = lo;
  r.upper = hi;
  return r;
}

struct RandomLp {
  oracle::DenseLp dense;
  std::vector<LinearRow> rows;
};

RandomLp random_lp(Rng& rng, Index dim, Index nrows) {
  RandomLp lp;
  auto& d = lp.dense;
  d.lower.resize(dim);
  d.upper.resize(dim);
  d.c.resize(dim);
  for (Index j = 0; j < dim; ++j) {
    d.lower[j] = rng.uniform(-2, 0);
    d.upper[j] = d.lower[j] + rng.uniform(0.5, 3);
    d.c[j] = rng.uniform(-1, 1);
  }
  d.a.resize(nrows, dim);
  d.row_lo.resize(nrows);
  d.row_hi.resize(nrows);
  // Rows are built around a point inside the box so the LP is feasible.
  Vector center = 0.5 * (d.lower + d.upper);
  for (Index r = 0; r < nrows; ++r) {
    for (Index j = 0; j < dim; ++j) d.a(r, j) = rng.below(4) == 0 ? 0.0 : rng.uniform(-1, 1);
    const double at = d.a.row(r).dot(center);
    const int kind = static_cast<int>(rng.below(3));
    d.row_lo[r] = kind == 1 ? -kInf : at - rng.uniform(0, 0.5);
    d.row_hi[r] = kind == 0 ? kInf : at + rng.uniform(0, 0.5);
    lp.rows.push_back(dense_row(d.a.row(r).transpose(), d.row_lo[r], d.row_hi[r]));
  }
  return lp;
}

void check_primal(const DualSimplex& s, const oracle::DenseLp& d) {
  const Vector& x = s.primal();
  for (Index j = 0; j < x.size(); ++j) {
    EXPECT_GE(x[j], d.lower[j] - 1e-7);
    EXPECT_LE(x[j], d.upper[j] + 1e-7);
  }
  for (Index r = 0; r < d.a.rows(); ++r) {
    const double v = d.a.row(r).dot(x);
    EXPECT_GE(v, d.row_lo[r] - 1e-7);
    EXPECT_LE(v, d.row_hi[r] + 1e-7);
  }
  EXPECT_NEAR(d.c.dot(x), s.objective_value(), 1e-9);
}

}  // namespace

TEST(DualSimplex, BoxOnly) {
  DualSimplex s;
  Vector lo(2), hi(2), c(2);
  lo << 0, -1;
  hi << 1, 3;
  c << 2, -1;
  s.load(lo, hi, c, {});
  ASSERT_EQ(s.solve(), LpStatus::kOptimal);
  EXPECT_DOUBLE_EQ(s.objective_value(), 3.0);
}

TEST(DualSimplex, RandomAgainstVertexEnumeration) {
  Rng rng(101);
  for (int k = 0; k < 200; ++k) {
    const Index dim = 2 + static_cast<Index>(rng.below(3));
    const Index nrows = 1 + static_cast<Index>(rng.below(4));
    const RandomLp lp = random_lp(rng, dim, nrows);
    DualSimplex s;
    s.load(lp.dense.lower, lp.dense.upper, lp.dense.c, lp.rows);
    ASSERT_EQ(s.solve(), LpStatus::kOptimal);
    EXPECT_NEAR(s.objective_value(), oracle::vertex_max(lp.dense), 1e-8);
    check_primal(s, lp.dense);
  }
}

TEST(DualSimplex, WarmStartAddAndRemove) {
  Rng rng(202);
  for (int k = 0; k < 100; ++k) {
    const Index dim = 3 + static_cast<Index>(rng.below(2));
    RandomLp lp = random_lp(rng, dim, 6);
    oracle::DenseLp head = lp.dense;
    head.a = lp.dense.a.topRows(2);
    head.row_lo = lp.dense.row_lo.head(2);
    head.row_hi = lp.dense.row_hi.head(2);
    DualSimplex s;
    auto handles = s.load(head.lower, head.upper, head.c, {lp.rows[0], lp.rows[1]});
    ASSERT_EQ(s.solve(), LpStatus::kOptimal);
    EXPECT_NEAR(s.objective_value(), oracle::vertex_max(head), 1e-8);

    for (std::size_t r = 2; r < 6; ++r) handles.push_back(s.add_row(lp.rows[r]));
    ASSERT_EQ(s.solve(), LpStatus::kOptimal);
    EXPECT_NEAR(s.objective_value(), oracle::vertex_max(lp.dense), 1e-8);
    check_primal(s, lp.dense);
    for (std::size_t r = 0; r < 6; ++r)
      EXPECT_NEAR(s.row_activity(handles[r]), lp.dense.a.row(static_cast<Index>(r)).dot(s.primal()), 1e-9);

    // Drop rows 1 and 4, then compare against the reduced problem.
    const std::vector<RowHandle> drop = {handles[1], handles[4]};
    s.remove_rows(drop);
    EXPECT_EQ(s.num_rows(), 4u);
    oracle::DenseLp rest = lp.dense;
    const std::vector<Index> keep = {0, 2, 3, 5};
    rest.a.resize(4, dim);
    rest.row_lo.resize(4);
    rest.row_hi.resize(4);
    for (Index i = 0; i < 4; ++i) {
      rest.a.row(i) = lp.dense.a.row(keep[static_cast<std::size_t>(i)]);
      rest.row_lo[i] = lp.dense.row_lo[keep[static_cast<std::size_t>(i)]];
      rest.row_hi[i] = lp.dense.row_hi[keep[static_cast<std::size_t>(i)]];
    }
    ASSERT_EQ(s.solve(), LpStatus::kOptimal);
    EXPECT_NEAR(s.objective_value(), oracle::vertex_max(rest), 1e-8);
    check_primal(s, rest);
  }
}

TEST(DualSimplex, Infeasible) {
  DualSimplex s;
  Vector lo = Vector::Zero(2), hi = Vector::Ones(2), c = Vector::Ones(2);
  Vector a(2);
  a << 1, 1;
  s.load(lo, hi, c, {dense_row(a, 3.0, kInf)});
  EXPECT_EQ(s.solve(), LpStatus::kInfeasible);
}

TEST(DualSimplex, RejectsInfiniteColumnBound) {
  DualSimplex s;
  Vector lo = Vector::Zero(1), hi(1), c = Vector::Ones(1);
  hi << kInf;
  EXPECT_THROW(s.load(lo, hi, c, {}), std::invalid_argument);
}

TEST(DualSimplex, ParabolaModel) {
  QcqpProblem p = QcqpProblem::zeros(1, 0);
  p.q0(0, 0) = -1.0;
  p.a0[0] = 1.0;
  const ExtendedModel model = lift(p);
  DualSimplex s;
  load_model(s, model);
  ASSERT_EQ(s.solve(), LpStatus::kOptimal);
  EXPECT_NEAR(s.objective_value(), 0.5, 1e-12);
  // Tangent at x = 1/2: X ≥ x − 1/4.
  LinearRow cut;
  cut.terms = {{0, -1.0}, {1, 1.0}};
  cut.lower = -0.25;
  s.add_row(cut);
  ASSERT_EQ(s.solve(), LpStatus::kOptimal);
  EXPECT_NEAR(s.objective_value(), 0.25, 1e-12);
}
