#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "psdcuts/linalg.hpp"
#include "psdcuts/model.hpp"
#include "psdcuts/random.hpp"

namespace psdcuts {

enum class CutOrigin { kPsd, kSparse1, kSparse2, kMinor };

std::string_view to_string(CutOrigin origin);

/// The PSD inequality  vᵀ X̃ v >= 0  written over (1, x, X):
///   v0² + Σ 2 v0 v_i x_i + Σ v_i² X_ii + Σ_{i<j} 2 v_i v_j X_ij >= 0.
struct Cut {
  Vector generator;
  CutOrigin origin = CutOrigin::kPsd;
  /// −vᵀX̃*v at the point it was separated from.
  double violation = 0.0;

  double constant() const { return generator[0] * generator[0]; }
  /// vᵀX̃v.
  double evaluate(const XtildeView& xt) const;
  /// The cut as a model row; `lower` is −v0² so that activity + v0² = vᵀX̃v.
  LinearRow row(const ExtendedModel& model) const;
};

/// Throws std::invalid_argument for the zero vector. Violation is left at 0.
Cut cut_from_vector(Vector v, CutOrigin origin);

/// Like cut_from_vector, and records the violation −vᵀX̃v at `xt`.
Cut cut_at(Vector v, CutOrigin origin, const XtildeView& xt);

/// One PSDCUT per eigenpair with λ < −eig_tol.
std::vector<Cut> separate_psd(const XtildeView& xt, double eig_tol = 1e-8);
std::vector<Cut> separate_psd(const std::vector<EigenPair>& spectrum,
                              const XtildeView& xt, double eig_tol = 1e-8);

struct SparsifyParams {
  double pct_viol = 0.6;
  double pct_nz = 0.2;

  static SparsifyParams sparse1_defaults() { return {0.6, 0.2}; }
  static SparsifyParams sparse2_defaults() { return {0.6, 0.4}; }
  /// Throws std::invalid_argument unless both fractions lie in [0, 1].
  void validate() const;
};

struct ViolationUpdate {
  double violation;
  Vector m;
};

/// Violation −w'ᵀX̃w' and the updated m after setting w_ℓ := 0, in O(d),
/// where m_j = w_j (X̃w)_j and d = −wᵀX̃w describe the current w.
ViolationUpdate violation_update(double d, const Vector& m, const Vector& w,
                                 Index l, const Matrix& xt);

/// Incremental bookkeeping for zeroing entries of w one at a time.
class ViolationTracker {
 public:
  ViolationTracker(Vector w, const Matrix& xt);

  double violation() const { return violation_; }
  const Vector& weights() const { return w_; }
  const Vector& m() const { return m_; }
  Index nonzeros() const { return nnz_; }

  /// Violation after zeroing entry l, without committing. O(1).
  double violation_if_zeroed(Index l) const {
    return violation_ + 2.0 * m_[l] - w_[l] * w_[l] * xt_(l, l);
  }
  /// Commits w_l := 0. O(d).
  void zero(Index l);

 private:
  const Matrix& xt_;
  Vector w_;
  Vector m_;
  double violation_;
  Index nnz_;
};

/// SPARSE1: zero entries of v in a random cyclic order, from every start
/// position, keeping the violation above pct_viol of the original. Emits each
/// distinct result with fewer than ⌊d·pct_nz⌋ nonzeros.
/// Throws std::invalid_argument when vᵀX̃v >= 0.
std::vector<Vector> sparsify1(const Vector& v, const XtildeView& xt,
                              const SparsifyParams& params, Rng rng);

/// SPARSE2: as sparsify1, but each candidate is the most negative eigenvector
/// of the principal minor on the current support with entry perm[j] zeroed.
std::vector<Vector> sparsify2(const Vector& v, const XtildeView& xt,
                              const SparsifyParams& params, Rng rng,
                              double eig_tol = 1e-8);

/// MINOR cuts: one cut per negative eigenpair of X̃ restricted to supp(w),
/// lifted back to full dimension.
std::vector<Cut> minor_cuts(const Vector& w, const XtildeView& xt,
                            double eig_tol = 1e-8);

/// Rejects cuts whose unit-normalized generator matches one already seen.
class CutDeduplicator {
 public:
  explicit CutDeduplicator(double tol = 1e-12) : tol_(tol) {}

  /// Returns true and records the cut if it is new.
  bool insert(const Vector& generator);
  bool contains(const Vector& generator) const;
  void erase(const Vector& generator);
  void clear() { buckets_.clear(); }

 private:
  static Vector normalized(const Vector& generator);

  double tol_;
  std::map<std::vector<Index>, std::vector<Vector>> buckets_;
};

/// True when z_t >= (1 − eps)·z_prev, the bound barely moved.
bool purge_triggered(double z_t, double z_prev, double eps = 1e-4);

/// Cutting planes currently in the LP, keyed by LP row handle.
/// Permanent model rows never enter the pool.
class CutPool {
 public:
  struct Entry {
    Cut cut;
    std::uint64_t handle;
  };

  void add(Cut cut, std::uint64_t handle);
  bool contains(const Vector& generator) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// If purge_triggered(z_t, z_prev, eps), drops every cut whose slack
  /// (aligned with entries()) exceeds slack_tol. Returns the handles removed.
  std::vector<std::uint64_t> purge(std::span<const double> slacks, double z_t,
                                   double z_prev, double slack_tol = 1e-7,
                                   double eps = 1e-4);

 private:
  std::vector<Entry> entries_;
  CutDeduplicator dedup_;
};

}  // namespace psdcuts
