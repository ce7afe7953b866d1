#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "psdcuts/model.hpp"

namespace psdcuts {

using RowHandle = std::uint64_t;

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit, kNumericalFailure };

std::string to_string(LpStatus status);

/// What the cutting-plane loop needs from an LP solver: a maximization LP
/// over bounded columns whose rows can be added and removed between solves,
/// with warm starts across edits.
class LpBackend {
 public:
  virtual ~LpBackend() = default;

  /// Replaces the current LP. Returns one handle per row, in order.
  virtual std::vector<RowHandle> load(const Vector& column_lower,
                                      const Vector& column_upper,
                                      const Vector& objective,
                                      const std::vector<LinearRow>& rows) = 0;
  virtual RowHandle add_row(const LinearRow& row) = 0;
  virtual void remove_rows(std::span<const RowHandle> handles) = 0;

  virtual LpStatus solve() = 0;
  /// Valid after solve() returned kOptimal.
  virtual double objective_value() const = 0;
  virtual const Vector& primal() const = 0;
  virtual double row_activity(RowHandle handle) const = 0;

  virtual std::size_t num_rows() const = 0;
  virtual std::string diagnostics() const { return {}; }
};

/// Loads the permanent rows of an EXT+RLT model.
std::vector<RowHandle> load_model(LpBackend& lp, const ExtendedModel& model);

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_every = 100;
  long max_iterations = 200000;
};

/// Bounded-variable dual simplex over dense working-basis inverses.
///
/// Every column must have finite bounds, which makes the all-slack basis dual
/// feasible: the solver cold-starts from it and warm-starts after row edits.
/// Only rows whose slack is nonbasic enter the working kernel, so its size is
/// bounded by the number of basic structural columns.
class DualSimplex final : public LpBackend {
 public:
  explicit DualSimplex(SimplexOptions options = {}) : options_(options) {}

  std::vector<RowHandle> load(const Vector& column_lower,
                              const Vector& column_upper,
                              const Vector& objective,
                              const std::vector<LinearRow>& rows) override;
  RowHandle add_row(const LinearRow& row) override;
  void remove_rows(std::span<const RowHandle> handles) override;

  LpStatus solve() override;
  double objective_value() const override { return objective_value_; }
  const Vector& primal() const override { return x_; }
  double row_activity(RowHandle handle) const override;

  std::size_t num_rows() const override { return rows_.size(); }
  std::string diagnostics() const override { return diagnostics_; }

  long last_iterations() const { return last_iterations_; }
  long total_iterations() const { return total_iterations_; }

 private:
  enum class Status : std::uint8_t { kBasic, kAtLower, kAtUpper };

  struct Row {
    LinearRow data;
    RowHandle handle;
  };

  void reset_basis();
  void rebuild_columns();
  bool refactor();
  void compute_primal();
  void compute_duals();
  bool repair_dual_feasibility();
  double reduced_cost_slack(Index row) const;

  void grow_kernel(Index row, Index col);
  void replace_kernel_row(Index kernel_pos, Index row);
  void replace_kernel_col(Index kernel_pos, Index col);
  void shrink_kernel(Index kernel_row_pos, Index kernel_col_pos);
  void drop_kernel_row(Index kernel_row_pos);

  double row_lower(Index r) const { return rows_[static_cast<std::size_t>(r)].data.lower; }
  double row_upper(Index r) const { return rows_[static_cast<std::size_t>(r)].data.upper; }

  SimplexOptions options_;
  Index ncols_ = 0;
  Vector lower_;
  Vector upper_;
  Vector cost_;  // minimized: negated objective
  std::vector<Row> rows_;
  std::unordered_map<RowHandle, Index> row_of_handle_;
  RowHandle next_handle_ = 1;
  std::vector<std::vector<std::pair<Index, double>>> columns_;  // column-wise A
  bool columns_dirty_ = true;

  std::vector<Status> col_status_;
  std::vector<Status> row_status_;
  std::vector<Index> kernel_cols_;  // basic structurals, kernel column order
  std::vector<Index> kernel_rows_;  // rows with nonbasic slack, kernel row order
  std::vector<Index> col_pos_;      // column -> position in kernel_cols_ or -1
  std::vector<Index> row_pos_;      // row -> position in kernel_rows_ or -1
  Matrix inverse_;                  // (A[kernel_rows_, kernel_cols_])⁻¹
  int updates_since_refactor_ = 0;

  Vector x_;
  Vector activity_;
  Vector pi_;        // kernel row order
  Vector col_dual_;  // reduced costs of structurals
  double objective_value_ = 0.0;
  long last_iterations_ = 0;
  long total_iterations_ = 0;
  std::string diagnostics_;
};

}  // namespace psdcuts
