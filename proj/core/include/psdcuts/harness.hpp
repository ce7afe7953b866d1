#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psdcuts/engine.hpp"
#include "psdcuts/model.hpp"

namespace psdcuts {

struct GapRecord {
  double rlt = 0.0;  // EXT+RLT bound
  double bnd = 0.0;  // bound at a checkpoint
  double opt = 0.0;  // optimal or best known value
};

/// 100·(RLT − BND)/(RLT − OPT); empty when the initial gap is zero.
std::optional<double> gap_closed(const GapRecord& rec);

/// A comparison point: after `value` rounds of cuts, or at `value` seconds.
struct Checkpoint {
  enum class Kind { kIteration, kSeconds };
  Kind kind = Kind::kIteration;
  double value = 0.0;

  std::string label() const;
  static Checkpoint iteration(int rounds) { return {Kind::kIteration, static_cast<double>(rounds)}; }
  static Checkpoint seconds(double s) { return {Kind::kSeconds, s}; }
};

/// Parses "1,5,10,2s,30s": bare numbers are iteration counts, an `s` suffix
/// marks seconds. Throws std::invalid_argument on malformed entries.
std::vector<Checkpoint> parse_checkpoints(const std::string& list);

/// Bound reported by `trace` at a checkpoint, if the run reached it.
///
/// Iteration c refers to the LP value after c rounds of cuts (record c+1);
/// a run that ended earlier has no value there. A time checkpoint T takes the
/// last LP value obtained by T and requires that the run was still going at T.
std::optional<double> bound_at(const RunTrace& trace, const Checkpoint& cp);

enum class OptSource { kSupplied, kBruteForced };

/// One algorithm's result on one instance.
struct InstanceResult {
  std::string name;
  Index n = 0;
  Index m = 0;
  RunTrace trace;
  double opt = 0.0;
  OptSource opt_source = OptSource::kSupplied;
  /// Long-run bound (s) used for the "bound" column, if computed.
  std::optional<double> long_run_bound;

  double rlt() const { return trace.records.front().objective; }
  std::optional<double> gap_at(const Checkpoint& cp) const;
};

struct ComparisonRow {
  Checkpoint checkpoint;
  int a_wins = 0;
  int b_wins = 0;
  int ties = 0;
  int incomparable = 0;
  /// Mean of gapB − gapA over comparable instances (0 when none).
  double improvement = 0.0;

  int total() const { return a_wins + b_wins + ties + incomparable; }
  double percent(int count) const {
    return total() == 0 ? 0.0 : 100.0 * count / total();
  }
};

struct ComparisonReport {
  double g = 1.0;
  std::vector<ComparisonRow> rows;
};

/// Pairwise accounting of B against A per checkpoint. Instances are matched
/// by name; a mismatch throws std::invalid_argument naming the instance.
/// B wins when its gap closed exceeds A's by at least g points, and vice
/// versa; otherwise a tie. Missing checkpoint values or a zero initial gap
/// make an instance incomparable.
ComparisonReport compare(const std::vector<InstanceResult>& a,
                         const std::vector<InstanceResult>& b,
                         std::span<const Checkpoint> checkpoints, double g);

/// `checkpoint,A_wins,B_wins,tie,inc,impr`, percentages with two decimals.
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

/// `instance,n,m,bound,gap@c1,...` one row per instance; empty cells where a
/// value is not available.
void write_instance_table(std::ostream& out, const std::vector<InstanceResult>& results,
                          std::span<const Checkpoint> checkpoints);

// -- parameter tuning -------------------------------------------------------

using TuneEvaluator =
    std::function<std::vector<InstanceResult>(double pct_viol, double pct_nz)>;

struct TuneOptions {
  double viol_low = 0.0;
  double viol_high = 1.0;
  double nz_low = 0.0;
  double nz_high = 1.0;
  std::vector<Checkpoint> checkpoints = {Checkpoint::seconds(1),  Checkpoint::seconds(2),
                                         Checkpoint::seconds(5),  Checkpoint::seconds(10),
                                         Checkpoint::seconds(20), Checkpoint::seconds(30)};
  double g = 1.0;
  double viol_stop_width = 0.2;
  double nz_stop_width = 0.1;
  int max_rounds = 20;
};

struct TuneRound {
  double viol_low, viol_mid, viol_high;
  double nz_low, nz_mid, nz_high;
  double best_viol, best_nz;
  int best_wins;
};

struct TuneResult {
  double pct_viol = 0.0;
  double pct_nz = 0.0;
  std::vector<TuneRound> rounds;
  bool hit_round_cap = false;
};

/// Grid search over {LOW, MID, UP}² with recentering and halving of both
/// ranges, until the centre wins and the ranges are narrow enough. The
/// winner of a round has the most pairwise wins summed over all checkpoints;
/// ties go to the grid point nearest the centre.
TuneResult tune(const TuneEvaluator& evaluator, const TuneOptions& options = {});

/// Evaluator that runs the cutting-plane loop on each instance with the
/// given parameters, capped at the last time checkpoint.
struct TuneInstance {
  std::string name;
  QcqpProblem problem;
  double opt = 0.0;
};
TuneEvaluator make_engine_evaluator(std::vector<TuneInstance> instances, LoopConfig base,
                                    double time_limit_seconds);

// -- instances --------------------------------------------------------------

/// Random BoxQP: maximize xᵀQx + aᵀx over [0,1]ⁿ. Each upper-triangular entry
/// of Q and each entry of a is present with probability `density` and then a
/// nonzero integer in [−50, 50]. Deterministic in `seed`.
QcqpProblem gen_boxqp(Index n, double density, std::uint64_t seed);

/// Maximum of the objective for tiny instances without quadratic
/// constraints: a grid scan of the x-box with the given step, refined by
/// exact coordinate ascent; y is set optimally per coordinate.
/// Throws std::invalid_argument when n > 3 or p > 0.
double brute_force_opt(const QcqpProblem& problem, double grid_step);

}  // namespace psdcuts
