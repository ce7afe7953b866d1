#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "psdcuts/linalg.hpp"
#include "psdcuts/random.hpp"

using namespace psdcuts;

namespace {

Matrix random_symmetric(Rng& rng, Index d, double scale = 1.0) {
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) m(i, j) = m(j, i) = scale * rng.uniform(-1.0, 1.0);
  return m;
}

double reconstruction_error(const Matrix& m, const std::vector<EigenPair>& spec) {
  Matrix r = Matrix::Zero(m.rows(), m.cols());
  for (const auto& e : spec) r += e.value * e.vector * e.vector.transpose();
  return (m - r).cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

TEST(SymEigen, Identity) {
  const auto spec = sym_eigen(Matrix::Identity(3, 3));
  ASSERT_EQ(spec.size(), 3u);
  for (const auto& e : spec) EXPECT_NEAR(e.value, 1.0, 1e-14);
}

TEST(SymEigen, Swap2x2) {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  const auto spec = sym_eigen(m);
  EXPECT_NEAR(spec[0].value, -1.0, 1e-14);
  EXPECT_NEAR(spec[1].value, 1.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(spec[0].vector[0], h, 1e-14);
  EXPECT_NEAR(spec[0].vector[1], -h, 1e-14);
  EXPECT_NEAR(spec[1].vector[0], h, 1e-14);
  EXPECT_NEAR(spec[1].vector[1], h, 1e-14);
}

TEST(SymEigen, CharacteristicPolynomial) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  const auto spec = sym_eigen(m);
  EXPECT_NEAR(spec[0].value, -1.0, 1e-14);
  EXPECT_NEAR(spec[1].value, 3.0, 1e-14);

  Rng rng(17);
  for (int k = 0; k < 500; ++k) {
    const Index d = 2 + static_cast<Index>(k % 2);
    const Matrix a = random_symmetric(rng, d, 5.0);
    const auto roots = oracle::char_poly_roots(a);
    const auto got = sym_eigen(a);
    for (Index i = 0; i < d; ++i)
      EXPECT_NEAR(got[static_cast<std::size_t>(i)].value, roots[static_cast<std::size_t>(i)], 1e-10);
  }
}

TEST(SymEigen, ReconstructionUpTo101) {
  Rng rng(23);
  for (Index d : {1, 2, 5, 17, 40, 101}) {
    for (double scale : {1e-3, 1.0, 1e3}) {
      const Matrix m = random_symmetric(rng, d, scale);
      const auto spec = sym_eigen(m);
      const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
      EXPECT_LE(reconstruction_error(m, spec), 1e-7 * std::max(1.0, norm));
      for (std::size_t i = 1; i < spec.size(); ++i) EXPECT_LE(spec[i - 1].value, spec[i].value);
      for (const auto& e : spec) EXPECT_NEAR(e.vector.norm(), 1.0, 1e-12);
    }
  }
}

TEST(SymEigen, MinEigenScalar) {
  Matrix m(1, 1);
  m << -4.5;
  const auto e = min_eigen(m);
  EXPECT_EQ(e.value, -4.5);
  EXPECT_EQ(e.vector[0], 1.0);
}

TEST(PrincipalMinor, FullAndCorner) {
  Rng rng(1);
  const Matrix m = random_symmetric(rng, 3);
  EXPECT_EQ(principal_minor(m, Support::full(3)), m);
  const Matrix c = principal_minor(m, Support({0, 2}));
  ASSERT_EQ(c.rows(), 2);
  EXPECT_EQ(c(0, 0), m(0, 0));
  EXPECT_EQ(c(0, 1), m(0, 2));
  EXPECT_EQ(c(1, 1), m(2, 2));
  EXPECT_THROW(principal_minor(m, Support()), std::invalid_argument);
  EXPECT_THROW(principal_minor(m, Support({0, 3})), std::out_of_range);
}

TEST(PrincipalMinor, InterlacingOnPsd) {
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const Matrix b = random_symmetric(rng, 6);
    const Matrix psd = b * b.transpose();
    std::vector<Index> idx;
    for (Index i = 0; i < 6; ++i)
      if (rng.below(2) == 0) idx.push_back(i);
    if (idx.empty()) idx.push_back(3);
    EXPECT_GE(sym_eigen(principal_minor(psd, Support(idx))).front().value, -1e-9);
  }
}

TEST(LiftVector, EmbedsIntoFullSpace) {
  Vector w(1);
  w << 1.0;
  Vector e = Vector::Zero(4);
  e[2] = 1.0;
  EXPECT_EQ(lift_vector(w, Support({2}), 4), e);
  const Vector v = Vector::LinSpaced(4, 1, 4);
  EXPECT_EQ(lift_vector(v, Support::full(4), 4), v);
}

TEST(LiftVector, QuadraticFormIdentity) {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const Matrix m = random_symmetric(rng, 7);
    std::vector<Index> idx;
    for (Index i = 0; i < 7; ++i)
      if (rng.below(3) != 0) idx.push_back(i);
    if (idx.empty()) idx.push_back(0);
    const Support s(idx);
    Vector w(s.size());
    for (Index i = 0; i < s.size(); ++i) w[i] = rng.uniform(-1, 1);
    const Vector full = lift_vector(w, s, 7);
    EXPECT_NEAR(oracle::dense_form(full, m), oracle::dense_form(w, principal_minor(m, s)), 1e-12);
  }
}

TEST(SupportTest, OfVector) {
  Vector w(5);
  w << 0, 2, 0, -1, 0;
  EXPECT_EQ(Support::of(w).indices(), (std::vector<Index>{1, 3}));
  EXPECT_THROW(Support({2, 1}), std::invalid_argument);
}

TEST(CanonicalSign, FirstNonzeroPositive) {
  Vector v(3);
  v << 0, -2, 1;
  canonicalize_sign(v);
  EXPECT_EQ(v[1], 2.0);
  EXPECT_EQ(v[2], -1.0);
}
