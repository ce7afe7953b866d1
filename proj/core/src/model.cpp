#include "psdcuts/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace psdcuts {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_bounds(const Vector& lower, const Vector& upper, const char* name) {
  require(lower.size() == upper.size(),
          std::string(name) + " bound vectors differ in length");
  for (Index i = 0; i < lower.size(); ++i) {
    require(std::isfinite(lower[i]) && std::isfinite(upper[i]),
            std::string(name) + " bound " + std::to_string(i + 1) +
                " is not finite");
    require(lower[i] <= upper[i], std::string(name) + " bound " +
                                      std::to_string(i + 1) +
                                      " has lower > upper");
  }
}

void symmetrize(Matrix& q, Index n, const char* name) {
  require(q.rows() == n && q.cols() == n,
          std::string(name) + " has the wrong shape");
  Matrix sym = 0.5 * (q + q.transpose());
  q = std::move(sym);
}

}  // namespace

QcqpProblem QcqpProblem::zeros(Index n, Index m) {
  QcqpProblem p;
  p.q0 = Matrix::Zero(n, n);
  p.a0 = Vector::Zero(n);
  p.b0 = Vector::Zero(m);
  p.x_lower = Vector::Zero(n);
  p.x_upper = Vector::Ones(n);
  p.y_lower = Vector::Zero(m);
  p.y_upper = Vector::Ones(m);
  return p;
}

void QcqpProblem::normalize() {
  const Index nx = n();
  const Index ny = m();
  check_bounds(x_lower, x_upper, "x");
  check_bounds(y_lower, y_upper, "y");
  symmetrize(q0, nx, "Q_0");
  require(a0.size() == nx, "a_0 has the wrong length");
  require(b0.size() == ny, "b_0 has the wrong length");
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    auto& con = constraints[k];
    const std::string tag = "constraint " + std::to_string(k + 1);
    symmetrize(con.q, nx, tag.c_str());
    require(con.a.size() == nx, tag + ": a has the wrong length");
    require(con.b.size() == ny, tag + ": b has the wrong length");
    require(std::isfinite(con.rhs), tag + ": right-hand side is not finite");
  }
}

double QcqpProblem::objective(const Vector& x, const Vector& y) const {
  return x.dot(q0 * x) + a0.dot(x) + b0.dot(y);
}

double QcqpProblem::constraint_lhs(Index k, const Vector& x,
                                   const Vector& y) const {
  const auto& con = constraints.at(static_cast<std::size_t>(k));
  return x.dot(con.q * x) + con.a.dot(x) + con.b.dot(y);
}

double LinearRow::activity(const Vector& values) const {
  double s = 0.0;
  for (const auto& [col, coef] : terms) s += coef * values[col];
  return s;
}

ProductBounds x_bounds(const Vector& x_lower, const Vector& x_upper) {
  check_bounds(x_lower, x_upper, "x");
  const Index n = x_lower.size();
  ProductBounds b{Matrix(n, n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const std::array<double, 4> products = {
          x_lower[i] * x_lower[j], x_lower[i] * x_upper[j],
          x_upper[i] * x_lower[j], x_upper[i] * x_upper[j]};
      double lo = *std::min_element(products.begin(), products.end());
      const double hi = *std::max_element(products.begin(), products.end());
      if (i == j) lo = std::max(lo, 0.0);
      b.lower(i, j) = b.lower(j, i) = lo;
      b.upper(i, j) = b.upper(j, i) = hi;
    }
  }
  return b;
}

double RltInequality::slack(double xi, double xj, double xij) const {
  const double lhs = xij + coef_i * xi + coef_j * xj;
  return sense == Sense::kGreater ? lhs - rhs : rhs - lhs;
}

std::array<RltInequality, 4> rlt_bound_cuts(double l_i, double u_i, double l_j,
                                            double u_j) {
  using S = RltInequality::Sense;
  // (x_i - l_i)(x_j - l_j) >= 0, (u_i - x_i)(u_j - x_j) >= 0,
  // (x_i - l_i)(u_j - x_j) >= 0, (u_i - x_i)(x_j - l_j) >= 0.
  return {{
      {-l_j, -l_i, -l_i * l_j, S::kGreater},
      {-u_j, -u_i, -u_i * u_j, S::kGreater},
      {-u_j, -l_i, -l_i * u_j, S::kLess},
      {-l_j, -u_i, -u_i * l_j, S::kLess},
  }};
}

Index ExtendedModel::X_col(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  // Offset of row i in the packed upper triangle.
  return n_ + i * n_ - i * (i - 1) / 2 + (j - i);
}

Index ExtendedModel::num_rlt_rows() const {
  return std::count(row_kinds_.begin(), row_kinds_.end(), RowKind::kRlt);
}

Index ExtendedModel::num_constraint_rows() const {
  return std::count(row_kinds_.begin(), row_kinds_.end(),
                    RowKind::kConstraint);
}

Vector ExtendedModel::pack(const Vector& x, const Matrix& X,
                           const Vector& y) const {
  Vector cols(num_columns());
  for (Index i = 0; i < n_; ++i) {
    cols[x_col(i)] = x[i];
    for (Index j = i; j < n_; ++j) cols[X_col(i, j)] = X(i, j);
  }
  for (Index j = 0; j < m_; ++j) cols[y_col(j)] = y[j];
  return cols;
}

Vector ExtendedModel::lifted_point(const Vector& x, const Vector& y) const {
  return pack(x, x * x.transpose(), y);
}

Vector ExtendedModel::unpack_x(const Vector& columns) const {
  return columns.head(n_);
}

Matrix ExtendedModel::unpack_X(const Vector& columns) const {
  Matrix X(n_, n_);
  for (Index i = 0; i < n_; ++i)
    for (Index j = i; j < n_; ++j) X(i, j) = X(j, i) = columns[X_col(i, j)];
  return X;
}

namespace {

// Q•X over the packed columns: diagonal once, off-diagonal pairs twice.
void add_quadratic_terms(const ExtendedModel& model, const Matrix& q,
                         std::vector<std::pair<Index, double>>& terms) {
  for (Index i = 0; i < model.n(); ++i) {
    for (Index j = i; j < model.n(); ++j) {
      const double c = (i == j) ? q(i, i) : 2.0 * q(i, j);
      if (c != 0.0) terms.emplace_back(model.X_col(i, j), c);
    }
  }
}

LinearRow rlt_row(const ExtendedModel& model, Index i, Index j,
                  const RltInequality& ineq) {
  LinearRow row;
  if (i == j) {
    const double c = ineq.coef_i + ineq.coef_j;
    if (c != 0.0) row.terms.emplace_back(model.x_col(i), c);
  } else {
    if (ineq.coef_i != 0.0) row.terms.emplace_back(model.x_col(i), ineq.coef_i);
    if (ineq.coef_j != 0.0) row.terms.emplace_back(model.x_col(j), ineq.coef_j);
  }
  row.terms.emplace_back(model.X_col(i, j), 1.0);
  std::sort(row.terms.begin(), row.terms.end());
  if (ineq.sense == RltInequality::Sense::kGreater)
    row.lower = ineq.rhs;
  else
    row.upper = ineq.rhs;
  return row;
}

}  // namespace

ExtendedModel lift(QcqpProblem problem) {
  problem.normalize();
  ExtendedModel model;
  model.n_ = problem.n();
  model.m_ = problem.m();
  const Index n = model.n_;
  const Index ncols = model.num_columns();

  model.bounds_ = x_bounds(problem.x_lower, problem.x_upper);
  model.col_lower_.resize(ncols);
  model.col_upper_.resize(ncols);
  for (Index i = 0; i < n; ++i) {
    model.col_lower_[model.x_col(i)] = problem.x_lower[i];
    model.col_upper_[model.x_col(i)] = problem.x_upper[i];
    for (Index j = i; j < n; ++j) {
      model.col_lower_[model.X_col(i, j)] = model.bounds_.lower(i, j);
      model.col_upper_[model.X_col(i, j)] = model.bounds_.upper(i, j);
    }
  }
  for (Index j = 0; j < model.m_; ++j) {
    model.col_lower_[model.y_col(j)] = problem.y_lower[j];
    model.col_upper_[model.y_col(j)] = problem.y_upper[j];
  }

  model.objective_ = Vector::Zero(ncols);
  {
    std::vector<std::pair<Index, double>> terms;
    add_quadratic_terms(model, problem.q0, terms);
    for (const auto& [col, c] : terms) model.objective_[col] += c;
    for (Index i = 0; i < n; ++i) model.objective_[model.x_col(i)] += problem.a0[i];
    for (Index j = 0; j < model.m_; ++j)
      model.objective_[model.y_col(j)] += problem.b0[j];
  }

  for (const auto& con : problem.constraints) {
    LinearRow row;
    add_quadratic_terms(model, con.q, row.terms);
    for (Index i = 0; i < n; ++i)
      if (con.a[i] != 0.0) row.terms.emplace_back(model.x_col(i), con.a[i]);
    for (Index j = 0; j < model.m_; ++j)
      if (con.b[j] != 0.0) row.terms.emplace_back(model.y_col(j), con.b[j]);
    std::sort(row.terms.begin(), row.terms.end());
    row.upper = con.rhs;
    model.rows_.push_back(std::move(row));
    model.row_kinds_.push_back(RowKind::kConstraint);
  }

  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const auto ineqs =
          rlt_bound_cuts(problem.x_lower[i], problem.x_upper[i],
                         problem.x_lower[j], problem.x_upper[j]);
      std::vector<LinearRow> pair_rows;
      for (const auto& ineq : ineqs) {
        LinearRow row = rlt_row(model, i, j, ineq);
        if (std::find(pair_rows.begin(), pair_rows.end(), row) == pair_rows.end())
          pair_rows.push_back(std::move(row));
      }
      for (auto& row : pair_rows) {
        model.rows_.push_back(std::move(row));
        model.row_kinds_.push_back(RowKind::kRlt);
      }
    }
  }
  return model;
}

XtildeView::XtildeView(const Vector& x, const Matrix& X) {
  const Index n = x.size();
  if (X.rows() != n || X.cols() != n)
    throw std::invalid_argument("XtildeView: X must be n x n");
  matrix_.resize(n + 1, n + 1);
  matrix_(0, 0) = 1.0;
  matrix_.block(1, 0, n, 1) = x;
  matrix_.block(0, 1, 1, n) = x.transpose();
  matrix_.block(1, 1, n, n) = 0.5 * (X + X.transpose());
}

double XtildeView::quadratic_form(const Vector& v) const {
  return v.dot(matrix_ * v);
}

XtildeView assemble_xtilde(const Vector& x, const Matrix& X) {
  return XtildeView(x, X);
}

XtildeView assemble_xtilde(const ExtendedModel& model, const Vector& columns) {
  return XtildeView(model.unpack_x(columns), model.unpack_X(columns));
}

}  // namespace psdcuts
