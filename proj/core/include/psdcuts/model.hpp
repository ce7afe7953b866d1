#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace psdcuts {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One quadratic constraint  Q•xxᵀ + aᵀx + bᵀy <= rhs.
struct QuadraticConstraint {
  Matrix q;
  Vector a;
  Vector b;
  double rhs = 0.0;
};

/// A maximization QCQP over bounded variables x (quadratic) and y (linear).
///
/// Construct by filling the fields and calling normalize(), which symmetrizes
/// every Q as (Q + Qᵀ)/2 and validates dimensions and bounds.
struct QcqpProblem {
  Matrix q0;
  Vector a0;
  Vector b0;
  std::vector<QuadraticConstraint> constraints;
  Vector x_lower;
  Vector x_upper;
  Vector y_lower;
  Vector y_upper;

  Index n() const { return x_lower.size(); }
  Index m() const { return y_lower.size(); }
  Index p() const { return static_cast<Index>(constraints.size()); }

  /// Empty problem with n x-variables and m y-variables, all data zero and
  /// bounds [0, 1].
  static QcqpProblem zeros(Index n, Index m);

  /// Symmetrizes the quadratic matrices and checks shapes and bounds.
  /// Throws std::invalid_argument on non-finite bounds, lower > upper, or a
  /// dimension mismatch.
  void normalize();

  double objective(const Vector& x, const Vector& y) const;
  /// Left-hand side of constraint k at (x, y).
  double constraint_lhs(Index k, const Vector& x, const Vector& y) const;
};

/// Sparse linear row  lower <= Σ coef·col <= upper  over ExtendedModel columns.
struct LinearRow {
  std::vector<std::pair<Index, double>> terms;
  double lower = -kInf;
  double upper = kInf;

  double activity(const Vector& values) const;
  friend bool operator==(const LinearRow&, const LinearRow&) = default;
};

enum class RowKind { kConstraint, kRlt };

/// Bounds on the lifted variables X_ij for i <= j; both matrices symmetric.
struct ProductBounds {
  Matrix lower;
  Matrix upper;
};

/// Interval bounds of x_i x_j over the box, with L_ii clamped to be
/// non-negative.
ProductBounds x_bounds(const Vector& x_lower, const Vector& x_upper);

/// A single McCormick inequality in the three scalars (x_i, x_j, X_ij):
///   X_ij + coef_i x_i + coef_j x_j  (>= or <=)  rhs.
struct RltInequality {
  enum class Sense { kGreater, kLess };
  double coef_i = 0.0;
  double coef_j = 0.0;
  double rhs = 0.0;
  Sense sense = Sense::kGreater;

  double slack(double xi, double xj, double xij) const;
  friend bool operator==(const RltInequality&, const RltInequality&) = default;
};

/// The four McCormick inequalities for the pair (i, j) given the bounds of
/// x_i and x_j, in the order: two lower envelopes then two upper envelopes.
std::array<RltInequality, 4> rlt_bound_cuts(double l_i, double u_i, double l_j,
                                            double u_j);

/// EXT+RLT linear relaxation of a QcqpProblem.
///
/// Column layout: x_0..x_{n-1}, then X_ij for i <= j in row-major upper
/// triangular order, then y_0..y_{m-1}. X_ij and X_ji share one column.
/// All rows held here are permanent; cutting planes live elsewhere.
class ExtendedModel {
 public:
  Index n() const { return n_; }
  Index m() const { return m_; }
  Index num_columns() const { return n_ * (n_ + 3) / 2 + m_; }

  Index x_col(Index i) const { return i; }
  Index X_col(Index i, Index j) const;
  Index y_col(Index j) const { return n_ + n_ * (n_ + 1) / 2 + j; }

  const Vector& column_lower() const { return col_lower_; }
  const Vector& column_upper() const { return col_upper_; }
  /// Maximized objective coefficients.
  const Vector& objective() const { return objective_; }

  const std::vector<LinearRow>& rows() const { return rows_; }
  const std::vector<RowKind>& row_kinds() const { return row_kinds_; }
  Index num_rlt_rows() const;
  Index num_constraint_rows() const;

  const ProductBounds& bounds() const { return bounds_; }

  /// Column vector for the lifted point (x, X = xxᵀ, y).
  Vector lifted_point(const Vector& x, const Vector& y) const;
  /// Column vector for an arbitrary (x, X, y); X is read from its upper
  /// triangle.
  Vector pack(const Vector& x, const Matrix& X, const Vector& y) const;
  Vector unpack_x(const Vector& columns) const;
  Matrix unpack_X(const Vector& columns) const;

  double objective_value(const Vector& columns) const {
    return objective_.dot(columns);
  }

 private:
  friend ExtendedModel lift(QcqpProblem problem);

  Index n_ = 0;
  Index m_ = 0;
  Vector col_lower_;
  Vector col_upper_;
  Vector objective_;
  std::vector<LinearRow> rows_;
  std::vector<RowKind> row_kinds_;
  ProductBounds bounds_;
};

/// Builds the EXT+RLT relaxation: linearized objective and constraints, the
/// McCormick rows for every pair i <= j (exact duplicates within a pair
/// dropped), and X column bounds from x_bounds().
ExtendedModel lift(QcqpProblem problem);

/// Symmetric (n+1)x(n+1) matrix [[1, xᵀ], [x, X]].
class XtildeView {
 public:
  XtildeView(const Vector& x, const Matrix& X);

  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }
  double operator()(Index r, Index c) const { return matrix_(r, c); }

  /// vᵀ X̃ v.
  double quadratic_form(const Vector& v) const;

 private:
  Matrix matrix_;
};

XtildeView assemble_xtilde(const Vector& x, const Matrix& X);
XtildeView assemble_xtilde(const ExtendedModel& model, const Vector& columns);

}  // namespace psdcuts
