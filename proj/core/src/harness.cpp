#include "psdcuts/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "psdcuts/random.hpp"

namespace psdcuts {

std::optional<double> gap_closed(const GapRecord& rec) {
  const double initial = rec.rlt - rec.opt;
  if (initial == 0.0) return std::nullopt;
  return 100.0 * (rec.rlt - rec.bnd) / initial;
}

std::string Checkpoint::label() const {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  return kind == Kind::kSeconds ? s + "s" : s;
}

std::vector<Checkpoint> parse_checkpoints(const std::string& list) {
  std::vector<Checkpoint> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    Checkpoint cp;
    std::string_view num = item;
    if (num.back() == 's') {
      cp.kind = Checkpoint::Kind::kSeconds;
      num.remove_suffix(1);
    }
    const auto res = std::from_chars(num.data(), num.data() + num.size(), cp.value);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size() || cp.value < 0.0)
      throw std::invalid_argument("bad checkpoint '" + item + "'");
    if (cp.kind == Checkpoint::Kind::kIteration && cp.value != std::floor(cp.value))
      throw std::invalid_argument("iteration checkpoint must be an integer: '" + item + "'");
    out.push_back(cp);
  }
  if (out.empty()) throw std::invalid_argument("empty checkpoint list");
  return out;
}

std::optional<double> bound_at(const RunTrace& trace, const Checkpoint& cp) {
  const auto& recs = trace.records;
  if (cp.kind == Checkpoint::Kind::kIteration) {
    const auto idx = static_cast<std::size_t>(cp.value);
    if (idx >= recs.size()) return std::nullopt;
    return recs[idx].objective;
  }
  if (trace.elapsed_seconds < cp.value) return std::nullopt;  // stopped earlier
  std::optional<double> z;
  for (const auto& r : recs) {
    if (r.seconds > cp.value) break;
    z = r.objective;
  }
  return z;
}

std::optional<double> InstanceResult::gap_at(const Checkpoint& cp) const {
  if (trace.records.empty()) return std::nullopt;
  const auto bnd = bound_at(trace, cp);
  if (!bnd) return std::nullopt;
  return gap_closed({rlt(), *bnd, opt});
}

ComparisonReport compare(const std::vector<InstanceResult>& a,
                         const std::vector<InstanceResult>& b,
                         std::span<const Checkpoint> checkpoints, double g) {
  std::map<std::string, const InstanceResult*> by_name_b;
  for (const auto& r : b) by_name_b[r.name] = &r;
  std::map<std::string, const InstanceResult*> by_name_a;
  for (const auto& r : a) by_name_a[r.name] = &r;
  for (const auto& [name, _] : by_name_a)
    if (!by_name_b.count(name))
      throw std::invalid_argument("instance '" + name + "' missing from set B");
  for (const auto& [name, _] : by_name_b)
    if (!by_name_a.count(name))
      throw std::invalid_argument("instance '" + name + "' missing from set A");

  ComparisonReport report;
  report.g = g;
  for (const auto& cp : checkpoints) {
    ComparisonRow row;
    row.checkpoint = cp;
    double improvement_sum = 0.0;
    int comparable = 0;
    for (const auto& [name, ra] : by_name_a) {
      const auto ga = ra->gap_at(cp);
      const auto gb = by_name_b.at(name)->gap_at(cp);
      if (!ga || !gb) {
        ++row.incomparable;
        continue;
      }
      ++comparable;
      improvement_sum += *gb - *ga;
      if (*gb - *ga >= g) ++row.b_wins;
      else if (*ga - *gb >= g) ++row.a_wins;
      else ++row.ties;
    }
    row.improvement = comparable > 0 ? improvement_sum / comparable : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  out << "checkpoint,A_wins,B_wins,tie,inc,impr\n";
  for (const auto& r : report.rows) {
    out << r.checkpoint.label() << ',' << fixed2(r.percent(r.a_wins)) << ','
        << fixed2(r.percent(r.b_wins)) << ',' << fixed2(r.percent(r.ties)) << ','
        << fixed2(r.percent(r.incomparable)) << ',' << fixed2(r.improvement) << '\n';
  }
}

void write_instance_table(std::ostream& out, const std::vector<InstanceResult>& results,
                          std::span<const Checkpoint> checkpoints) {
  out << "instance,n,m,bound";
  for (const auto& cp : checkpoints) out << ",gap@" << cp.label();
  out << '\n';
  for (const auto& r : results) {
    out << r.name << ',' << r.n << ',' << r.m << ',';
    if (r.long_run_bound && !r.trace.records.empty())
      if (const auto gap = gap_closed({r.rlt(), *r.long_run_bound, r.opt}))
        out << fixed2(*gap);
    for (const auto& cp : checkpoints) {
      out << ',';
      if (const auto gap = r.gap_at(cp)) out << fixed2(*gap);
    }
    out << '\n';
  }
}

// -- tuning ------------------------------------------------------------------

namespace {

struct Axis {
  double low, mid, high;

  static Axis around(double centre, double span) {
    return {std::max(0.0, centre - span / 2), centre, std::min(1.0, centre + span / 2)};
  }
  double at(int k) const { return k == 0 ? low : (k == 1 ? mid : high); }
  double width() const { return high - low; }
};

}  // namespace

TuneResult tune(const TuneEvaluator& evaluator, const TuneOptions& options) {
  if (options.viol_low < 0 || options.viol_high > 1 || options.nz_low < 0 ||
      options.nz_high > 1 || options.viol_low > options.viol_high ||
      options.nz_low > options.nz_high)
    throw std::invalid_argument("tune: ranges must lie within [0,1]");

  Axis viol{options.viol_low, 0.5 * (options.viol_low + options.viol_high), options.viol_high};
  Axis nz{options.nz_low, 0.5 * (options.nz_low + options.nz_high), options.nz_high};
  double viol_span = viol.width();
  double nz_span = nz.width();

  std::map<std::pair<double, double>, std::vector<InstanceResult>> cache;
  const auto results_for = [&](double v, double z) -> const std::vector<InstanceResult>& {
    auto it = cache.find({v, z});
    if (it == cache.end()) {
      auto res = evaluator(v, z);
      if (res.empty()) throw std::invalid_argument("tune: empty instance set");
      it = cache.emplace(std::make_pair(v, z), std::move(res)).first;
    }
    return it->second;
  };

  TuneResult result;
  for (int round = 0; round < options.max_rounds; ++round) {
    std::array<int, 9> wins{};
    for (int p = 0; p < 9; ++p) {
      for (int q = p + 1; q < 9; ++q) {
        const auto report = compare(results_for(viol.at(p / 3), nz.at(p % 3)),
                                    results_for(viol.at(q / 3), nz.at(q % 3)),
                                    options.checkpoints, options.g);
        for (const auto& row : report.rows) {
          wins[static_cast<std::size_t>(p)] += row.a_wins;
          wins[static_cast<std::size_t>(q)] += row.b_wins;
        }
      }
    }
    // Most wins; ties toward the centre (index 4), then grid order.
    int best = 4;
    for (int p = 0; p < 9; ++p) {
      const auto dist = [](int k) { return std::abs(k / 3 - 1) + std::abs(k % 3 - 1); };
      const int wp = wins[static_cast<std::size_t>(p)];
      const int wb = wins[static_cast<std::size_t>(best)];
      if (wp > wb || (wp == wb && dist(p) < dist(best))) best = p;
    }
    const double best_viol = viol.at(best / 3);
    const double best_nz = nz.at(best % 3);
    result.rounds.push_back({viol.low, viol.mid, viol.high, nz.low, nz.mid, nz.high, best_viol,
                             best_nz, wins[static_cast<std::size_t>(best)]});
    result.pct_viol = best_viol;
    result.pct_nz = best_nz;

    constexpr double kSlack = 1e-12;
    if (best == 4 && viol.width() <= options.viol_stop_width + kSlack &&
        nz.width() <= options.nz_stop_width + kSlack)
      return result;

    viol_span /= 2;
    nz_span /= 2;
    viol = Axis::around(best_viol, viol_span);
    nz = Axis::around(best_nz, nz_span);
  }
  result.hit_round_cap = true;
  return result;
}

TuneEvaluator make_engine_evaluator(std::vector<TuneInstance> instances, LoopConfig base,
                                    double time_limit_seconds) {
  auto models = std::make_shared<std::vector<std::pair<TuneInstance, ExtendedModel>>>();
  for (auto& inst : instances) {
    ExtendedModel model = lift(inst.problem);
    models->emplace_back(std::move(inst), std::move(model));
  }
  base.time_limit_seconds = time_limit_seconds;
  return [models, base](double pct_viol, double pct_nz) {
    std::vector<InstanceResult> out;
    for (const auto& [inst, model] : *models) {
      LoopConfig cfg = base;
      cfg.sparsify = {pct_viol, pct_nz};
      DualSimplex lp;
      InstanceResult r;
      r.name = inst.name;
      r.n = inst.problem.n();
      r.m = inst.problem.m();
      r.opt = inst.opt;
      r.trace = run(model, cfg, lp);
      out.push_back(std::move(r));
    }
    return out;
  };
}

// -- instances ---------------------------------------------------------------

QcqpProblem gen_boxqp(Index n, double density, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_boxqp: n must be at least 2");
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("gen_boxqp: density must be in (0,1]");
  Rng rng(seed);
  const auto entry = [&]() -> double {
    if (!(rng.uniform() < density)) return 0.0;
    const auto magnitude = static_cast<double>(rng.between(1, 50));
    return (rng.below(2) == 0) ? magnitude : -magnitude;
  };
  QcqpProblem p = QcqpProblem::zeros(n, 0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double v = entry();
      p.q0(i, j) = p.q0(j, i) = v;
    }
  }
  for (Index i = 0; i < n; ++i) p.a0[i] = entry();
  return p;
}

namespace {

// Exact maximum of f along coordinate i with the others fixed.
double best_coordinate(const QcqpProblem& p, const Vector& x, Index i) {
  const double quad = p.q0(i, i);
  double lin = p.a0[i];
  for (Index j = 0; j < x.size(); ++j)
    if (j != i) lin += 2.0 * p.q0(i, j) * x[j];
  const auto f = [&](double t) { return quad * t * t + lin * t; };
  double best_t = p.x_lower[i];
  double best_f = f(best_t);
  if (f(p.x_upper[i]) > best_f) {
    best_t = p.x_upper[i];
    best_f = f(best_t);
  }
  if (quad < 0.0) {
    const double t = std::clamp(-lin / (2.0 * quad), p.x_lower[i], p.x_upper[i]);
    if (f(t) > best_f) best_t = t;
  }
  return best_t;
}

}  // namespace

double brute_force_opt(const QcqpProblem& problem, double grid_step) {
  if (problem.n() > 3) throw std::invalid_argument("brute_force_opt: n must be at most 3");
  if (problem.p() > 0)
    throw std::invalid_argument("brute_force_opt: quadratic constraints not supported");
  if (!(grid_step > 0.0)) throw std::invalid_argument("brute_force_opt: step must be positive");
  QcqpProblem p = problem;
  p.normalize();
  const Index n = p.n();

  double y_part = 0.0;
  for (Index j = 0; j < p.m(); ++j)
    y_part += std::max(p.b0[j] * p.y_lower[j], p.b0[j] * p.y_upper[j]);

  const auto f = [&](const Vector& x) { return x.dot(p.q0 * x) + p.a0.dot(x); };
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto& ax = axes[static_cast<std::size_t>(i)];
    const double lo = p.x_lower[i], hi = p.x_upper[i];
    const auto steps = static_cast<long>(std::floor((hi - lo) / grid_step));
    for (long s = 0; s <= steps; ++s) ax.push_back(lo + static_cast<double>(s) * grid_step);
    if (ax.back() < hi) ax.push_back(hi);
  }

  Vector x(n), best_x(n);
  double best = -kInf;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    for (Index i = 0; i < n; ++i) x[i] = axes[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    Index i = 0;
    for (; i < n; ++i) {
      auto& k = idx[static_cast<std::size_t>(i)];
      if (++k < axes[static_cast<std::size_t>(i)].size()) break;
      k = 0;
    }
    if (i == n) break;
  }

  x = best_x;
  for (int sweep = 0; sweep < 1000; ++sweep) {
    const double before = f(x);
    for (Index i = 0; i < n; ++i) x[i] = best_coordinate(p, x, i);
    if (f(x) <= before + 1e-15) break;
  }
  return std::max(best, f(x)) + y_part;
}

}  // namespace psdcuts
