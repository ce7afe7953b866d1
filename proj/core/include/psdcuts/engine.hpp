#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psdcuts/cuts.hpp"
#include "psdcuts/lp.hpp"
#include "psdcuts/model.hpp"

namespace psdcuts {

/// Cut families used per iteration. Every strategy includes the dense
/// PSDCUTs; the sparse variants add sparsified cuts and, for S1M/S2M, the
/// MINOR cuts of each sparsified vector.
enum class Strategy { kS, kS1M, kS2M, kSparse1, kSparse2 };

std::string_view to_string(Strategy s);
/// Accepts s, s1m, s2m, sparse1, sparse2 (case-insensitive).
std::optional<Strategy> parse_strategy(std::string_view text);

enum class RunStatus {
  kRunning,
  kIterationLimit,
  kTimeLimit,
  kTailingOff,
  kStalled,
  kPsdFeasible,
  kLpError,
};

std::string_view to_string(RunStatus s);
std::optional<RunStatus> parse_run_status(std::string_view text);

struct StallRule {
  double eps = 1e-4;
  int window = 10;
};

struct LoopConfig {
  int max_iterations = 1000;
  double time_limit_seconds = 600.0;
  int tail_window = 50;
  double tail_eps = 1e-4;
  bool purge_enabled = true;
  double purge_eps = 1e-4;
  double slack_tol = 1e-7;
  double eig_tol = 1e-8;
  /// Cuts violated by less than this at creation are not added.
  double min_violation = 1e-8;
  Strategy strategy = Strategy::kS2M;
  SparsifyParams sparsify = SparsifyParams::sparse2_defaults();
  std::uint64_t seed = 1;
  /// Extra stop: z_t >= (1 − eps)·z_{t−window}. Used for long runs that
  /// approximate the full PSD+RLT bound.
  std::optional<StallRule> until_stall;
  /// Seconds since an arbitrary epoch; steady clock when empty.
  std::function<double()> clock;

  /// Defaults for a strategy, including its tuned sparsify parameters.
  static LoopConfig for_strategy(Strategy s);
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double seconds = 0.0;
  double objective = 0.0;
  /// Indexed by CutOrigin.
  std::array<int, 4> added_by_origin{};
  int cuts_purged = 0;
  std::size_t pool_size = 0;
  std::size_t lp_rows = 0;
  double min_eig = 0.0;

  int cuts_added() const {
    return added_by_origin[0] + added_by_origin[1] + added_by_origin[2] +
           added_by_origin[3];
  }
};

struct RunTrace {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::kRunning;
  double elapsed_seconds = 0.0;
  std::size_t permanent_rows = 0;
  std::string diagnostics;
  std::vector<std::string> warnings;

  std::vector<double> objectives() const;
};

/// True iff the history holds more than `window` values and the last one is
/// at least (1 − eps) times the value `window` iterations earlier.
bool tailing_off(std::span<const double> z_history, int window = 50,
                 double eps = 1e-4);

/// Runs the cutting-plane loop on `model` through `lp`. The backend is
/// reloaded with the model's permanent rows first.
///
/// Iteration t solves the LP (z_t; z_1 is the EXT+RLT bound), purges cuts if
/// the bound stalled, separates X̃* and adds the violated cuts. The loop stops
/// when X̃* is PSD, on the iteration/time caps, on tailing off, or on an LP
/// failure.
RunTrace run(const ExtendedModel& model, const LoopConfig& config,
             LpBackend& lp);

/// Cuts for one iteration under `strategy`, before deduplication.
std::vector<Cut> generate_cuts(Strategy strategy, const std::vector<EigenPair>& spectrum,
                               const XtildeView& xt, const SparsifyParams& params,
                               double eig_tol, Rng rng);

struct TraceMetadata {
  std::string instance;
  Index n = 0;
  Index m = 0;
  Index p = 0;
  std::string strategy;
  std::optional<double> opt;
  std::string opt_source;  // "supplied" or "brute-forced"
};

/// Writes `iter,seconds,objective,cuts_added,cuts_purged,pool_size,min_eig`
/// rows, leading `# key=value` metadata comments and a trailing
/// `# status=<...>` line.
void write_trace_csv(std::ostream& out, const RunTrace& trace,
                     const TraceMetadata& meta = {});

struct LoadedTrace {
  RunTrace trace;
  TraceMetadata meta;
};

/// Reads what write_trace_csv produced. Throws std::runtime_error with a
/// line number on malformed input.
LoadedTrace read_trace_csv(std::istream& in);

}  // namespace psdcuts
