#include "psdcuts/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace psdcuts {
namespace {

double inf_norm(const Matrix& m) {
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::SelfAdjointEigenSolver<Matrix> decompose(const Matrix& m, double tol) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw std::invalid_argument("sym_eigen: matrix must be square and non-empty");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw EigenError("sym_eigen: eigensolver did not converge (d=" +
                     std::to_string(m.rows()) + ")");
  const double scale = std::max(1.0, inf_norm(m));
  const Matrix& v = solver.eigenvectors();
  const double residual =
      (m * v - v * solver.eigenvalues().asDiagonal()).cwiseAbs().maxCoeff();
  if (!(residual <= tol * scale))
    throw EigenError("sym_eigen: residual " + std::to_string(residual) +
                     " exceeds tolerance");
  return solver;
}

}  // namespace

void canonicalize_sign(Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

std::vector<EigenPair> sym_eigen(const Matrix& m, double tol) {
  const auto solver = decompose(m, tol);
  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(m.rows()));
  for (Index k = 0; k < m.rows(); ++k) {
    EigenPair p{solver.eigenvalues()[k], solver.eigenvectors().col(k)};
    canonicalize_sign(p.vector);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

EigenPair min_eigen(const Matrix& m, double tol) {
  if (m.rows() == 1) return {m(0, 0), Vector::Ones(1)};
  const auto solver = decompose(m, tol);
  EigenPair p{solver.eigenvalues()[0], solver.eigenvectors().col(0)};
  canonicalize_sign(p.vector);
  return p;
}

Support::Support(std::vector<Index> indices) : indices_(std::move(indices)) {
  for (std::size_t a = 0; a < indices_.size(); ++a) {
    if (indices_[a] < 0 || (a > 0 && indices_[a] <= indices_[a - 1]))
      throw std::invalid_argument("Support: indices must be strictly increasing");
  }
}

Support Support::of(const Vector& w) {
  std::vector<Index> idx;
  for (Index i = 0; i < w.size(); ++i)
    if (w[i] != 0.0) idx.push_back(i);
  return Support(std::move(idx));
}

Support Support::full(Index dim) {
  std::vector<Index> idx(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) idx[static_cast<std::size_t>(i)] = i;
  return Support(std::move(idx));
}

Matrix principal_minor(const Matrix& m, const Support& s) {
  if (s.empty()) throw std::invalid_argument("principal_minor: empty support");
  if (s[s.size() - 1] >= m.rows())
    throw std::out_of_range("principal_minor: support index out of range");
  Matrix out(s.size(), s.size());
  for (Index a = 0; a < s.size(); ++a)
    for (Index b = 0; b < s.size(); ++b) out(a, b) = m(s[a], s[b]);
  return out;
}

Vector lift_vector(const Vector& w_minor, const Support& s, Index dim) {
  if (w_minor.size() != s.size())
    throw std::invalid_argument("lift_vector: vector and support sizes differ");
  if (!s.empty() && s[s.size() - 1] >= dim)
    throw std::out_of_range("lift_vector: support index out of range");
  Vector out = Vector::Zero(dim);
  for (Index a = 0; a < s.size(); ++a) out[s[a]] = w_minor[a];
  return out;
}

}  // namespace psdcuts
