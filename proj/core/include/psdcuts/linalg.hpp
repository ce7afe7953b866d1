#pragma once

#include <stdexcept>
#include <vector>

#include "psdcuts/model.hpp"

namespace psdcuts {

struct EigenPair {
  double value = 0.0;
  Vector vector;  // unit norm, first nonzero entry positive
};

/// Raised when the eigensolver fails to converge or its result misses the
/// requested accuracy.
class EigenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigendecomposition of a dense symmetric matrix, ascending by eigenvalue.
///
/// Eigenvectors are orthonormal and sign-canonicalized so that repeated
/// calls on the same input produce identical output. The result is checked
/// against `tol` (relative to max(1, ‖M‖∞)); a miss throws EigenError.
std::vector<EigenPair> sym_eigen(const Matrix& m, double tol = 1e-8);

/// Most negative eigenpair only. Same contract as sym_eigen.
EigenPair min_eigen(const Matrix& m, double tol = 1e-8);

/// Strictly increasing set of row/column indices.
class Support {
 public:
  Support() = default;
  /// Throws std::invalid_argument unless `indices` is strictly increasing
  /// and non-negative.
  explicit Support(std::vector<Index> indices);

  /// Indices of the entries of `w` with |w_i| > 0.
  static Support of(const Vector& w);
  static Support full(Index dim);

  const std::vector<Index>& indices() const { return indices_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  Index operator[](Index a) const { return indices_[static_cast<std::size_t>(a)]; }

  friend bool operator==(const Support&, const Support&) = default;

 private:
  std::vector<Index> indices_;
};

/// M restricted to the rows and columns in `s`.
Matrix principal_minor(const Matrix& m, const Support& s);

/// Embeds a vector indexed by `s` into dimension `dim`, zeros elsewhere.
Vector lift_vector(const Vector& w_minor, const Support& s, Index dim);

/// Flips the sign of `v` so its first nonzero entry is positive.
void canonicalize_sign(Vector& v);

}  // namespace psdcuts
