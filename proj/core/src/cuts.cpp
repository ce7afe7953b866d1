#include "psdcuts/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psdcuts {

std::string_view to_string(CutOrigin origin) {
  switch (origin) {
    case CutOrigin::kPsd: return "PSDCUT";
    case CutOrigin::kSparse1: return "SPARSE1";
    case CutOrigin::kSparse2: return "SPARSE2";
    case CutOrigin::kMinor: return "MINOR";
  }
  return "?";
}

double Cut::evaluate(const XtildeView& xt) const {
  return xt.quadratic_form(generator);
}

LinearRow Cut::row(const ExtendedModel& model) const {
  const Vector& v = generator;
  const Index n = model.n();
  LinearRow row;
  for (Index i = 0; i < n; ++i) {
    const double vi = v[i + 1];
    if (vi == 0.0) continue;
    if (v[0] != 0.0) row.terms.emplace_back(model.x_col(i), 2.0 * v[0] * vi);
    row.terms.emplace_back(model.X_col(i, i), vi * vi);
    for (Index j = i + 1; j < n; ++j) {
      const double vj = v[j + 1];
      if (vj != 0.0) row.terms.emplace_back(model.X_col(i, j), 2.0 * vi * vj);
    }
  }
  std::sort(row.terms.begin(), row.terms.end());
  row.lower = -constant();
  return row;
}

Cut cut_from_vector(Vector v, CutOrigin origin) {
  if (v.size() == 0 || v.isZero(0.0))
    throw std::invalid_argument("cut_from_vector: zero generating vector");
  return Cut{std::move(v), origin, 0.0};
}

Cut cut_at(Vector v, CutOrigin origin, const XtildeView& xt) {
  Cut c = cut_from_vector(std::move(v), origin);
  c.violation = -c.evaluate(xt);
  return c;
}

std::vector<Cut> separate_psd(const std::vector<EigenPair>& spectrum,
                              const XtildeView& xt, double eig_tol) {
  std::vector<Cut> cuts;
  for (const auto& pair : spectrum) {
    if (pair.value >= -eig_tol) break;  // ascending order
    cuts.push_back(cut_at(pair.vector, CutOrigin::kPsd, xt));
  }
  return cuts;
}

std::vector<Cut> separate_psd(const XtildeView& xt, double eig_tol) {
  return separate_psd(sym_eigen(xt.matrix(), 1e-8), xt, eig_tol);
}

void SparsifyParams::validate() const {
  if (!(pct_viol >= 0.0 && pct_viol <= 1.0 && pct_nz >= 0.0 && pct_nz <= 1.0))
    throw std::invalid_argument("sparsify: pct_viol and pct_nz must be in [0,1]");
}

ViolationUpdate violation_update(double d, const Vector& m, const Vector& w,
                                 Index l, const Matrix& xt) {
  // −w'ᵀX̃w' = −wᵀX̃w + 2 w_l (X̃w)_l − w_l² X̃_ll.
  const double wl = w[l];
  ViolationUpdate out{d + 2.0 * m[l] - wl * wl * xt(l, l), m};
  if (wl == 0.0) return out;
  for (Index j = 0; j < w.size(); ++j) out.m[j] -= w[j] * wl * xt(j, l);
  out.m[l] = 0.0;
  return out;
}

ViolationTracker::ViolationTracker(Vector w, const Matrix& xt)
    : xt_(xt), w_(std::move(w)) {
  const Vector xw = xt_ * w_;
  m_ = w_.cwiseProduct(xw);
  violation_ = -m_.sum();
  nnz_ = static_cast<Index>((w_.array() != 0.0).count());
}

void ViolationTracker::zero(Index l) {
  const double wl = w_[l];
  if (wl == 0.0) return;
  violation_ = violation_if_zeroed(l);
  for (Index j = 0; j < w_.size(); ++j) m_[j] -= w_[j] * wl * xt_(j, l);
  m_[l] = 0.0;
  w_[l] = 0.0;
  --nnz_;
}

namespace {

struct SparsifyBudget {
  double min_viol;
  Index max_nz;
};

SparsifyBudget budget_for(const Vector& v, const XtildeView& xt,
                          const SparsifyParams& params) {
  params.validate();
  if (v.size() != xt.dim())
    throw std::invalid_argument("sparsify: vector and matrix sizes differ");
  const double violation = -xt.quadratic_form(v);
  if (!(violation > 0.0))
    throw std::invalid_argument("sparsify: input vector is not violated");
  return {violation * params.pct_viol,
          static_cast<Index>(std::floor(static_cast<double>(v.size()) *
                                        params.pct_nz))};
}

Index count_nonzeros(const Vector& w) {
  return static_cast<Index>((w.array() != 0.0).count());
}

// Emission test on the dense form.
void maybe_emit(const Vector& w, const XtildeView& xt,
                const SparsifyBudget& budget, std::vector<Vector>& out) {
  if (count_nonzeros(w) >= budget.max_nz) return;
  if (!(-xt.quadratic_form(w) > budget.min_viol)) return;
  for (const auto& prev : out)
    if (prev == w) return;
  out.push_back(w);
}

}  // namespace

std::vector<Vector> sparsify1(const Vector& v, const XtildeView& xt,
                              const SparsifyParams& params, Rng rng) {
  const auto budget = budget_for(v, xt, params);
  std::vector<Vector> out;
  if (budget.max_nz == 0) return out;
  const Index len = v.size();
  const auto perm = rng.permutation(static_cast<std::size_t>(len));

  for (Index start = 0; start < len; ++start) {
    const Index kept = (start + len - 1) % len;  // never zeroed from this start
    ViolationTracker tracker(v, xt.matrix());
    for (Index step = 0; step < len; ++step) {
      const Index pos = (start + step) % len;
      if (pos == kept) continue;
      const auto l = static_cast<Index>(perm[static_cast<std::size_t>(pos)]);
      if (tracker.weights()[l] == 0.0) continue;
      if (tracker.violation_if_zeroed(l) > budget.min_viol) tracker.zero(l);
    }
    maybe_emit(tracker.weights(), xt, budget, out);
  }
  return out;
}

std::vector<Vector> sparsify2(const Vector& v, const XtildeView& xt,
                              const SparsifyParams& params, Rng rng,
                              double eig_tol) {
  const auto budget = budget_for(v, xt, params);
  std::vector<Vector> out;
  if (budget.max_nz == 0) return out;
  const Index len = v.size();
  const auto perm = rng.permutation(static_cast<std::size_t>(len));

  for (Index start = 0; start < len; ++start) {
    const Index kept = (start + len - 1) % len;
    Vector w = v;
    for (Index step = 0; step < len; ++step) {
      const Index pos = (start + step) % len;
      if (pos == kept) continue;
      const auto l = static_cast<Index>(perm[static_cast<std::size_t>(pos)]);
      if (w[l] == 0.0) continue;
      // Minor on the support of w, entry l still included.
      const Support supp = Support::of(w);
      const EigenPair minor = min_eigen(principal_minor(xt.matrix(), supp), eig_tol);
      Vector z = lift_vector(minor.vector, supp, len);
      z[l] = 0.0;
      if (z.isZero(0.0)) continue;
      if (-xt.quadratic_form(z) > budget.min_viol) w = std::move(z);
    }
    maybe_emit(w, xt, budget, out);
  }
  return out;
}

std::vector<Cut> minor_cuts(const Vector& w, const XtildeView& xt,
                            double eig_tol) {
  const Support supp = Support::of(w);
  if (supp.empty()) throw std::invalid_argument("minor_cuts: empty support");
  std::vector<Cut> cuts;
  for (const auto& pair : sym_eigen(principal_minor(xt.matrix(), supp))) {
    if (pair.value >= -eig_tol) break;
    cuts.push_back(
        cut_at(lift_vector(pair.vector, supp, xt.dim()), CutOrigin::kMinor, xt));
  }
  return cuts;
}

Vector CutDeduplicator::normalized(const Vector& generator) {
  Vector v = generator / generator.norm();
  canonicalize_sign(v);
  return v;
}

bool CutDeduplicator::insert(const Vector& generator) {
  Vector v = normalized(generator);
  auto& bucket = buckets_[Support::of(generator).indices()];
  for (const auto& prev : bucket)
    if ((prev - v).cwiseAbs().maxCoeff() <= tol_) return false;
  bucket.push_back(std::move(v));
  return true;
}

bool CutDeduplicator::contains(const Vector& generator) const {
  const auto it = buckets_.find(Support::of(generator).indices());
  if (it == buckets_.end()) return false;
  const Vector v = normalized(generator);
  for (const auto& prev : it->second)
    if ((prev - v).cwiseAbs().maxCoeff() <= tol_) return true;
  return false;
}

void CutDeduplicator::erase(const Vector& generator) {
  const auto it = buckets_.find(Support::of(generator).indices());
  if (it == buckets_.end()) return;
  const Vector v = normalized(generator);
  auto& bucket = it->second;
  for (auto b = bucket.begin(); b != bucket.end(); ++b) {
    if ((*b - v).cwiseAbs().maxCoeff() <= tol_) {
      bucket.erase(b);
      break;
    }
  }
  if (bucket.empty()) buckets_.erase(it);
}

bool purge_triggered(double z_t, double z_prev, double eps) {
  return z_t >= (1.0 - eps) * z_prev;
}

void CutPool::add(Cut cut, std::uint64_t handle) {
  dedup_.insert(cut.generator);
  entries_.push_back({std::move(cut), handle});
}

bool CutPool::contains(const Vector& generator) const {
  return dedup_.contains(generator);
}

std::vector<std::uint64_t> CutPool::purge(std::span<const double> slacks,
                                          double z_t, double z_prev,
                                          double slack_tol, double eps) {
  if (slacks.size() != entries_.size())
    throw std::invalid_argument("CutPool::purge: one slack per cut required");
  std::vector<std::uint64_t> removed;
  if (!purge_triggered(z_t, z_prev, eps)) return removed;
  std::vector<Entry> kept;
  kept.reserve(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (slacks[k] > slack_tol) {
      removed.push_back(entries_[k].handle);
      dedup_.erase(entries_[k].cut.generator);
    } else {
      kept.push_back(std::move(entries_[k]));
    }
  }
  entries_ = std::move(kept);
  return removed;
}

}  // namespace psdcuts
