#include "psdcuts/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psdcuts {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kNumericalFailure: return "numerical-failure";
  }
  return "?";
}

std::vector<RowHandle> load_model(LpBackend& lp, const ExtendedModel& model) {
  return lp.load(model.column_lower(), model.column_upper(), model.objective(),
                 model.rows());
}

std::vector<RowHandle> DualSimplex::load(const Vector& column_lower,
                                         const Vector& column_upper,
                                         const Vector& objective,
                                         const std::vector<LinearRow>& rows) {
  if (column_lower.size() != column_upper.size() ||
      column_lower.size() != objective.size())
    throw std::invalid_argument("DualSimplex::load: column data size mismatch");
  for (Index j = 0; j < column_lower.size(); ++j) {
    if (!std::isfinite(column_lower[j]) || !std::isfinite(column_upper[j]))
      throw std::invalid_argument("DualSimplex::load: column bounds must be finite");
    if (column_lower[j] > column_upper[j])
      throw std::invalid_argument("DualSimplex::load: column lower > upper");
  }
  ncols_ = column_lower.size();
  lower_ = column_lower;
  upper_ = column_upper;
  cost_ = -objective;
  rows_.clear();
  row_of_handle_.clear();
  row_status_.clear();
  row_pos_.clear();
  std::vector<RowHandle> handles;
  handles.reserve(rows.size());
  for (const auto& row : rows) handles.push_back(add_row(row));
  reset_basis();
  return handles;
}

RowHandle DualSimplex::add_row(const LinearRow& row) {
  for (const auto& [col, coef] : row.terms) {
    if (col < 0 || col >= ncols_)
      throw std::out_of_range("DualSimplex::add_row: column index out of range");
    if (!std::isfinite(coef))
      throw std::invalid_argument("DualSimplex::add_row: non-finite coefficient");
  }
  if (row.lower > row.upper)
    throw std::invalid_argument("DualSimplex::add_row: lower > upper");
  const RowHandle h = next_handle_++;
  row_of_handle_[h] = static_cast<Index>(rows_.size());
  rows_.push_back({row, h});
  row_status_.push_back(Status::kBasic);
  row_pos_.push_back(-1);
  columns_dirty_ = true;
  return h;
}

void DualSimplex::remove_rows(std::span<const RowHandle> handles) {
  if (handles.empty()) return;
  if (columns_dirty_) rebuild_columns();
  std::vector<bool> doomed(rows_.size(), false);
  for (RowHandle h : handles) {
    const auto it = row_of_handle_.find(h);
    if (it == row_of_handle_.end())
      throw std::invalid_argument("DualSimplex::remove_rows: unknown handle");
    doomed[static_cast<std::size_t>(it->second)] = true;
  }
  // Rows with a nonbasic slack leave the kernel together with one basic
  // column, which becomes nonbasic at its nearer bound.
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (!doomed[r] || row_pos_[r] < 0) continue;
    drop_kernel_row(row_pos_[r]);
  }

  std::vector<Index> new_index(rows_.size(), -1);
  std::vector<Row> kept;
  std::vector<Status> kept_status;
  kept.reserve(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (doomed[r]) continue;
    new_index[r] = static_cast<Index>(kept.size());
    kept.push_back(std::move(rows_[r]));
    kept_status.push_back(row_status_[r]);
  }
  rows_ = std::move(kept);
  row_status_ = std::move(kept_status);
  row_of_handle_.clear();
  for (std::size_t r = 0; r < rows_.size(); ++r)
    row_of_handle_[rows_[r].handle] = static_cast<Index>(r);
  for (auto& r : kernel_rows_) r = new_index[static_cast<std::size_t>(r)];
  row_pos_.assign(rows_.size(), -1);
  for (std::size_t a = 0; a < kernel_rows_.size(); ++a)
    row_pos_[static_cast<std::size_t>(kernel_rows_[a])] = static_cast<Index>(a);
  columns_dirty_ = true;
}

double DualSimplex::row_activity(RowHandle handle) const {
  const auto it = row_of_handle_.find(handle);
  if (it == row_of_handle_.end())
    throw std::invalid_argument("DualSimplex::row_activity: unknown handle");
  return rows_[static_cast<std::size_t>(it->second)].data.activity(x_);
}

void DualSimplex::reset_basis() {
  col_status_.assign(static_cast<std::size_t>(ncols_), Status::kAtLower);
  for (Index j = 0; j < ncols_; ++j)
    if (cost_[j] < 0.0) col_status_[static_cast<std::size_t>(j)] = Status::kAtUpper;
  row_status_.assign(rows_.size(), Status::kBasic);
  kernel_cols_.clear();
  kernel_rows_.clear();
  col_pos_.assign(static_cast<std::size_t>(ncols_), -1);
  row_pos_.assign(rows_.size(), -1);
  inverse_.resize(0, 0);
  updates_since_refactor_ = 0;
}

void DualSimplex::rebuild_columns() {
  columns_.assign(static_cast<std::size_t>(ncols_), {});
  for (std::size_t r = 0; r < rows_.size(); ++r)
    for (const auto& [col, coef] : rows_[r].data.terms)
      columns_[static_cast<std::size_t>(col)].emplace_back(static_cast<Index>(r), coef);
  columns_dirty_ = false;
}

bool DualSimplex::refactor() {
  const auto k = static_cast<Index>(kernel_cols_.size());
  updates_since_refactor_ = 0;
  if (k == 0) {
    inverse_.resize(0, 0);
    return true;
  }
  Matrix kernel = Matrix::Zero(k, k);
  for (Index a = 0; a < k; ++a)
    for (const auto& [col, coef] : rows_[static_cast<std::size_t>(kernel_rows_[static_cast<std::size_t>(a)])].data.terms) {
      const Index b = col_pos_[static_cast<std::size_t>(col)];
      if (b >= 0) kernel(a, b) += coef;
    }
  Eigen::FullPivLU<Matrix> lu(kernel);
  if (!lu.isInvertible()) return false;
  inverse_ = lu.inverse();
  return true;
}

void DualSimplex::compute_primal() {
  x_.resize(ncols_);
  for (Index j = 0; j < ncols_; ++j) {
    const auto s = col_status_[static_cast<std::size_t>(j)];
    if (s == Status::kAtLower) x_[j] = lower_[j];
    else if (s == Status::kAtUpper) x_[j] = upper_[j];
  }
  const auto k = static_cast<Index>(kernel_rows_.size());
  if (k > 0) {
    Vector rhs(k);
    for (Index a = 0; a < k; ++a) {
      const Index r = kernel_rows_[static_cast<std::size_t>(a)];
      double v = row_status_[static_cast<std::size_t>(r)] == Status::kAtLower
                     ? row_lower(r)
                     : row_upper(r);
      for (const auto& [col, coef] : rows_[static_cast<std::size_t>(r)].data.terms)
        if (col_pos_[static_cast<std::size_t>(col)] < 0) v -= coef * x_[col];
      rhs[a] = v;
    }
    const Vector xk = inverse_ * rhs;
    for (Index b = 0; b < k; ++b) x_[kernel_cols_[static_cast<std::size_t>(b)]] = xk[b];
  }
  activity_.resize(static_cast<Index>(rows_.size()));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto s = row_status_[r];
    if (s == Status::kAtLower) activity_[static_cast<Index>(r)] = rows_[r].data.lower;
    else if (s == Status::kAtUpper) activity_[static_cast<Index>(r)] = rows_[r].data.upper;
    else activity_[static_cast<Index>(r)] = rows_[r].data.activity(x_);
  }
}

void DualSimplex::compute_duals() {
  const auto k = static_cast<Index>(kernel_cols_.size());
  Vector ck(k);
  for (Index b = 0; b < k; ++b) ck[b] = cost_[kernel_cols_[static_cast<std::size_t>(b)]];
  pi_ = inverse_.transpose() * ck;
  col_dual_ = cost_;
  for (Index a = 0; a < k; ++a) {
    const double p = pi_[a];
    if (p == 0.0) continue;
    for (const auto& [col, coef] : rows_[static_cast<std::size_t>(kernel_rows_[static_cast<std::size_t>(a)])].data.terms)
      col_dual_[col] -= p * coef;
  }
}

bool DualSimplex::repair_dual_feasibility() {
  for (Index j = 0; j < ncols_; ++j) {
    auto& s = col_status_[static_cast<std::size_t>(j)];
    if (s == Status::kBasic || lower_[j] == upper_[j]) continue;
    if (s == Status::kAtLower && col_dual_[j] < -options_.dual_tol) s = Status::kAtUpper;
    else if (s == Status::kAtUpper && col_dual_[j] > options_.dual_tol) s = Status::kAtLower;
  }
  for (std::size_t a = 0; a < kernel_rows_.size(); ++a) {
    const Index r = kernel_rows_[a];
    auto& s = row_status_[static_cast<std::size_t>(r)];
    const double lo = row_lower(r), up = row_upper(r);
    if (lo == up) continue;
    const double d = pi_[static_cast<Index>(a)];
    if (s == Status::kAtLower && d < -options_.dual_tol) {
      if (!std::isfinite(up)) return false;
      s = Status::kAtUpper;
    } else if (s == Status::kAtUpper && d > options_.dual_tol) {
      if (!std::isfinite(lo)) return false;
      s = Status::kAtLower;
    }
  }
  return true;
}

void DualSimplex::grow_kernel(Index row, Index col) {
  const auto k = static_cast<Index>(kernel_cols_.size());
  Vector b = Vector::Zero(k);
  for (const auto& [r, coef] : columns_[static_cast<std::size_t>(col)]) {
    const Index a = row_pos_[static_cast<std::size_t>(r)];
    if (a >= 0) b[a] += coef;
  }
  Vector g = Vector::Zero(k);
  double delta = 0.0;
  for (const auto& [c, coef] : rows_[static_cast<std::size_t>(row)].data.terms) {
    if (c == col) delta += coef;
    const Index pos = col_pos_[static_cast<std::size_t>(c)];
    if (pos >= 0) g[pos] += coef;
  }
  const Vector w = inverse_ * b;
  const Vector u = inverse_.transpose() * g;
  const double schur = delta - g.dot(w);
  Matrix next(k + 1, k + 1);
  next.topLeftCorner(k, k) = inverse_ + (w / schur) * u.transpose();
  next.topRightCorner(k, 1) = -w / schur;
  next.bottomLeftCorner(1, k) = -u.transpose() / schur;
  next(k, k) = 1.0 / schur;
  inverse_ = std::move(next);
  kernel_cols_.push_back(col);
  kernel_rows_.push_back(row);
  col_pos_[static_cast<std::size_t>(col)] = k;
  row_pos_[static_cast<std::size_t>(row)] = k;
}

void DualSimplex::replace_kernel_row(Index kernel_pos, Index row) {
  const auto k = static_cast<Index>(kernel_cols_.size());
  Vector g = Vector::Zero(k);
  for (const auto& [c, coef] : rows_[static_cast<std::size_t>(row)].data.terms) {
    const Index pos = col_pos_[static_cast<std::size_t>(c)];
    if (pos >= 0) g[pos] += coef;
  }
  Vector u = inverse_.transpose() * g;
  const double pivot = u[kernel_pos];
  u[kernel_pos] -= 1.0;
  const Vector col = inverse_.col(kernel_pos) / pivot;
  inverse_.noalias() -= col * u.transpose();
  row_pos_[static_cast<std::size_t>(kernel_rows_[static_cast<std::size_t>(kernel_pos)])] = -1;
  kernel_rows_[static_cast<std::size_t>(kernel_pos)] = row;
  row_pos_[static_cast<std::size_t>(row)] = kernel_pos;
}

void DualSimplex::replace_kernel_col(Index kernel_pos, Index col) {
  const auto k = static_cast<Index>(kernel_cols_.size());
  Vector b = Vector::Zero(k);
  for (const auto& [r, coef] : columns_[static_cast<std::size_t>(col)]) {
    const Index a = row_pos_[static_cast<std::size_t>(r)];
    if (a >= 0) b[a] += coef;
  }
  Vector w = inverse_ * b;
  const double pivot = w[kernel_pos];
  w[kernel_pos] -= 1.0;
  const Eigen::RowVectorXd row = inverse_.row(kernel_pos) / pivot;
  inverse_.noalias() -= w * row;
  col_pos_[static_cast<std::size_t>(kernel_cols_[static_cast<std::size_t>(kernel_pos)])] = -1;
  kernel_cols_[static_cast<std::size_t>(kernel_pos)] = col;
  col_pos_[static_cast<std::size_t>(col)] = kernel_pos;
}

void DualSimplex::shrink_kernel(Index kernel_row_pos, Index kernel_col_pos) {
  const auto k = static_cast<Index>(kernel_cols_.size());
  const Index last = k - 1;
  // inverse_ rows follow kernel columns, inverse_ columns follow kernel rows.
  if (kernel_col_pos != last) {
    inverse_.row(kernel_col_pos).swap(inverse_.row(last));
    std::swap(kernel_cols_[static_cast<std::size_t>(kernel_col_pos)], kernel_cols_.back());
    col_pos_[static_cast<std::size_t>(kernel_cols_[static_cast<std::size_t>(kernel_col_pos)])] = kernel_col_pos;
  }
  if (kernel_row_pos != last) {
    inverse_.col(kernel_row_pos).swap(inverse_.col(last));
    std::swap(kernel_rows_[static_cast<std::size_t>(kernel_row_pos)], kernel_rows_.back());
    row_pos_[static_cast<std::size_t>(kernel_rows_[static_cast<std::size_t>(kernel_row_pos)])] = kernel_row_pos;
  }
  const double pivot = inverse_(last, last);
  const Vector left = inverse_.col(last).head(last) / pivot;
  const Eigen::RowVectorXd top = inverse_.row(last).head(last);
  inverse_.topLeftCorner(last, last).noalias() -= left * top;
  inverse_.conservativeResize(last, last);
  col_pos_[static_cast<std::size_t>(kernel_cols_.back())] = -1;
  row_pos_[static_cast<std::size_t>(kernel_rows_.back())] = -1;
  kernel_cols_.pop_back();
  kernel_rows_.pop_back();
}

void DualSimplex::drop_kernel_row(Index kernel_row_pos) {
  Index best = 0;
  inverse_.col(kernel_row_pos).cwiseAbs().maxCoeff(&best);
  const Index col = kernel_cols_[static_cast<std::size_t>(best)];
  const double x = x_.size() == ncols_ ? x_[col] : lower_[col];
  col_status_[static_cast<std::size_t>(col)] =
      (x - lower_[col] <= upper_[col] - x) ? Status::kAtLower : Status::kAtUpper;
  const Index row = kernel_rows_[static_cast<std::size_t>(kernel_row_pos)];
  row_status_[static_cast<std::size_t>(row)] = Status::kBasic;
  shrink_kernel(kernel_row_pos, best);
  ++updates_since_refactor_;
}

LpStatus DualSimplex::solve() {
  if (columns_dirty_) rebuild_columns();
  diagnostics_.clear();
  last_iterations_ = 0;
  if (!refactor()) {
    reset_basis();
    refactor();
  }

  const auto bound_tol = [&](double b) {
    return options_.primal_tol * (1.0 + std::abs(b));
  };

  bool repaired = false;
  std::vector<double> alpha(static_cast<std::size_t>(ncols_));
  while (true) {
    if (last_iterations_ >= options_.max_iterations) {
      diagnostics_ = "dual simplex iteration limit reached";
      return LpStatus::kIterationLimit;
    }
    compute_duals();
    if (!repaired) {
      if (!repair_dual_feasibility()) {
        reset_basis();
        refactor();
        compute_duals();
      }
      repaired = true;
    }
    compute_primal();

    // Leaving variable: largest bound violation among basic variables.
    enum class Kind { kNone, kColumn, kRow } kind = Kind::kNone;
    Index leave = -1;
    double worst = 0.0;
    int direction = 0;
    for (std::size_t b = 0; b < kernel_cols_.size(); ++b) {
      const Index j = kernel_cols_[b];
      const double v = x_[j];
      if (v < lower_[j] - bound_tol(lower_[j]) && lower_[j] - v > worst) {
        worst = lower_[j] - v; kind = Kind::kColumn; leave = j; direction = 1;
      } else if (v > upper_[j] + bound_tol(upper_[j]) && v - upper_[j] > worst) {
        worst = v - upper_[j]; kind = Kind::kColumn; leave = j; direction = -1;
      }
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (row_pos_[r] >= 0) continue;
      const double v = activity_[static_cast<Index>(r)];
      const double lo = rows_[r].data.lower, up = rows_[r].data.upper;
      if (v < lo - bound_tol(lo) && lo - v > worst) {
        worst = lo - v; kind = Kind::kRow; leave = static_cast<Index>(r); direction = 1;
      } else if (v > up + bound_tol(up) && v - up > worst) {
        worst = v - up; kind = Kind::kRow; leave = static_cast<Index>(r); direction = -1;
      }
    }

    if (kind == Kind::kNone) {
      if (updates_since_refactor_ > 0) {
        // Confirm optimality on a fresh factorization.
        if (!refactor()) {
          reset_basis();
          refactor();
          repaired = false;
        }
        compute_duals();
        compute_primal();
        bool clean = true;
        for (Index j = 0; j < ncols_ && clean; ++j)
          clean = x_[j] >= lower_[j] - bound_tol(lower_[j]) &&
                  x_[j] <= upper_[j] + bound_tol(upper_[j]);
        for (std::size_t r = 0; r < rows_.size() && clean; ++r)
          clean = activity_[static_cast<Index>(r)] >= rows_[r].data.lower - bound_tol(rows_[r].data.lower) &&
                  activity_[static_cast<Index>(r)] <= rows_[r].data.upper + bound_tol(rows_[r].data.upper);
        if (!clean) continue;
      }
      objective_value_ = -cost_.dot(x_);
      total_iterations_ += last_iterations_;
      return LpStatus::kOptimal;
    }

    // Row of the tableau: derivative of the leaving variable with respect to
    // each nonbasic structural (alpha) and each kernel slack (y).
    const auto k = static_cast<Index>(kernel_cols_.size());
    Vector y;
    std::fill(alpha.begin(), alpha.end(), 0.0);
    if (kind == Kind::kColumn) {
      y = inverse_.row(col_pos_[static_cast<std::size_t>(leave)]).transpose();
    } else {
      Vector g = Vector::Zero(k);
      for (const auto& [c, coef] : rows_[static_cast<std::size_t>(leave)].data.terms) {
        alpha[static_cast<std::size_t>(c)] += coef;
        const Index pos = col_pos_[static_cast<std::size_t>(c)];
        if (pos >= 0) g[pos] += coef;
      }
      y = inverse_.transpose() * g;
    }
    for (Index a = 0; a < k; ++a) {
      const double ya = y[a];
      if (ya == 0.0) continue;
      for (const auto& [c, coef] : rows_[static_cast<std::size_t>(kernel_rows_[static_cast<std::size_t>(a)])].data.terms)
        alpha[static_cast<std::size_t>(c)] -= ya * coef;
    }

    // Harris two-pass ratio test over nonbasic structurals and kernel slacks.
    struct Candidate {
      bool is_row;
      Index index;  // column, or kernel position for rows
      double ratio;
      double magnitude;
    };
    std::vector<Candidate> candidates;
    double theta_max = kInf;
    for (Index j = 0; j < ncols_; ++j) {
      const auto s = col_status_[static_cast<std::size_t>(j)];
      if (s == Status::kBasic || lower_[j] == upper_[j]) continue;
      const double a = alpha[static_cast<std::size_t>(j)];
      const double sigma = s == Status::kAtLower ? 1.0 : -1.0;
      if (direction * sigma * a <= options_.pivot_tol) continue;
      const double dd = std::max(sigma * col_dual_[j], 0.0);
      const double mag = std::abs(a);
      candidates.push_back({false, j, dd / mag, mag});
      theta_max = std::min(theta_max, (dd + options_.dual_tol) / mag);
    }
    for (Index a = 0; a < k; ++a) {
      const Index r = kernel_rows_[static_cast<std::size_t>(a)];
      if (row_lower(r) == row_upper(r)) continue;
      const double sigma =
          row_status_[static_cast<std::size_t>(r)] == Status::kAtLower ? 1.0 : -1.0;
      if (direction * sigma * y[a] <= options_.pivot_tol) continue;
      const double dd = std::max(sigma * pi_[a], 0.0);
      const double mag = std::abs(y[a]);
      candidates.push_back({true, a, dd / mag, mag});
      theta_max = std::min(theta_max, (dd + options_.dual_tol) / mag);
    }
    if (candidates.empty()) {
      std::ostringstream os;
      os << "LP infeasible: basic "
         << (kind == Kind::kColumn ? "column " : "row ") << leave
         << " violates its bound by " << worst << " with no entering candidate";
      diagnostics_ = os.str();
      total_iterations_ += last_iterations_;
      return LpStatus::kInfeasible;
    }
    const Candidate* enter = nullptr;
    for (const auto& c : candidates)
      if (c.ratio <= theta_max && (!enter || c.magnitude > enter->magnitude)) enter = &c;

    const Status leave_status = direction > 0 ? Status::kAtLower : Status::kAtUpper;
    if (kind == Kind::kRow) {
      row_status_[static_cast<std::size_t>(leave)] = leave_status;
      if (!enter->is_row) {
        col_status_[static_cast<std::size_t>(enter->index)] = Status::kBasic;
        grow_kernel(leave, enter->index);
      } else {
        const Index r = kernel_rows_[static_cast<std::size_t>(enter->index)];
        row_status_[static_cast<std::size_t>(r)] = Status::kBasic;
        replace_kernel_row(enter->index, leave);
      }
    } else {
      const Index pos = col_pos_[static_cast<std::size_t>(leave)];
      col_status_[static_cast<std::size_t>(leave)] = leave_status;
      if (!enter->is_row) {
        col_status_[static_cast<std::size_t>(enter->index)] = Status::kBasic;
        replace_kernel_col(pos, enter->index);
      } else {
        const Index r = kernel_rows_[static_cast<std::size_t>(enter->index)];
        row_status_[static_cast<std::size_t>(r)] = Status::kBasic;
        shrink_kernel(enter->index, pos);
      }
    }
    ++last_iterations_;
    if (++updates_since_refactor_ >= options_.refactor_every) {
      if (!refactor()) {
        reset_basis();
        refactor();
        repaired = false;
      }
    }
  }
}

}  // namespace psdcuts
