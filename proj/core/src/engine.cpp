#include "psdcuts/engine.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace psdcuts {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kS: return "s";
    case Strategy::kS1M: return "s1m";
    case Strategy::kS2M: return "s2m";
    case Strategy::kSparse1: return "sparse1";
    case Strategy::kSparse2: return "sparse2";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto s : {Strategy::kS, Strategy::kS1M, Strategy::kS2M, Strategy::kSparse1,
                 Strategy::kSparse2})
    if (lower == to_string(s)) return s;
  return std::nullopt;
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kIterationLimit: return "iteration-limit";
    case RunStatus::kTimeLimit: return "time-limit";
    case RunStatus::kTailingOff: return "tailing-off";
    case RunStatus::kStalled: return "stalled";
    case RunStatus::kPsdFeasible: return "psd-feasible";
    case RunStatus::kLpError: return "lp-error";
  }
  return "?";
}

std::optional<RunStatus> parse_run_status(std::string_view text) {
  for (auto s : {RunStatus::kRunning, RunStatus::kIterationLimit, RunStatus::kTimeLimit,
                 RunStatus::kTailingOff, RunStatus::kStalled, RunStatus::kPsdFeasible,
                 RunStatus::kLpError})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

LoopConfig LoopConfig::for_strategy(Strategy s) {
  LoopConfig c;
  c.strategy = s;
  c.sparsify = (s == Strategy::kS1M || s == Strategy::kSparse1)
                   ? SparsifyParams::sparse1_defaults()
                   : SparsifyParams::sparse2_defaults();
  return c;
}

void LoopConfig::validate() const {
  if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(time_limit_seconds > 0.0))
    throw std::invalid_argument("time_limit_seconds must be positive");
  if (tail_window <= 0) throw std::invalid_argument("tail_window must be positive");
  if (until_stall && until_stall->window <= 0)
    throw std::invalid_argument("stall window must be positive");
  sparsify.validate();
}

std::vector<double> RunTrace::objectives() const {
  std::vector<double> z;
  z.reserve(records.size());
  for (const auto& r : records) z.push_back(r.objective);
  return z;
}

bool tailing_off(std::span<const double> z_history, int window, double eps) {
  const auto t = z_history.size();
  const auto w = static_cast<std::size_t>(window);
  if (t <= w) return false;
  return z_history[t - 1] >= (1.0 - eps) * z_history[t - 1 - w];
}

std::vector<Cut> generate_cuts(Strategy strategy, const std::vector<EigenPair>& spectrum,
                               const XtildeView& xt, const SparsifyParams& params,
                               double eig_tol, Rng rng) {
  std::vector<Cut> cuts = separate_psd(spectrum, xt, eig_tol);
  if (strategy == Strategy::kS) return cuts;

  const bool second = strategy == Strategy::kS2M || strategy == Strategy::kSparse2;
  const bool minors = strategy == Strategy::kS1M || strategy == Strategy::kS2M;
  const CutOrigin origin = second ? CutOrigin::kSparse2 : CutOrigin::kSparse1;
  const std::size_t dense_count = cuts.size();
  for (std::size_t e = 0; e < dense_count; ++e) {
    const Vector v = cuts[e].generator;
    const Rng stream = rng.derive(e);
    const auto sparse = second ? sparsify2(v, xt, params, stream, eig_tol)
                               : sparsify1(v, xt, params, stream);
    for (const auto& w : sparse) {
      cuts.push_back(cut_at(w, origin, xt));
      if (minors)
        for (auto& c : minor_cuts(w, xt, eig_tol)) cuts.push_back(std::move(c));
    }
  }
  return cuts;
}

RunTrace run(const ExtendedModel& model, const LoopConfig& config, LpBackend& lp) {
  config.validate();
  const auto steady_start = std::chrono::steady_clock::now();
  const auto now = [&]() -> double {
    if (config.clock) return config.clock();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - steady_start)
        .count();
  };
  const double start = now();

  RunTrace trace;
  load_model(lp, model);
  trace.permanent_rows = lp.num_rows();

  CutPool pool;
  const Rng root(config.seed);
  std::vector<double> z_history;
  bool warned_nonpositive = false;

  for (int t = 1;; ++t) {
    IterationRecord rec;
    rec.iter = t;
    const LpStatus lp_status = lp.solve();
    if (lp_status != LpStatus::kOptimal) {
      trace.status = RunStatus::kLpError;
      trace.diagnostics = "iteration " + std::to_string(t) + ": LP " +
                          to_string(lp_status) + ": " + lp.diagnostics();
      break;
    }
    rec.objective = lp.objective_value();
    rec.seconds = now() - start;
    z_history.push_back(rec.objective);
    if (rec.objective <= 0.0 && !warned_nonpositive) {
      trace.warnings.push_back(
          "z_t <= 0 at iteration " + std::to_string(t) +
          ": multiplicative tailing-off and purge tests are applied to the raw value");
      warned_nonpositive = true;
    }

    const Vector columns = lp.primal();
    if (config.purge_enabled && t > 1 && !pool.empty()) {
      std::vector<double> slacks;
      slacks.reserve(pool.size());
      for (const auto& entry : pool.entries())
        slacks.push_back(lp.row_activity(entry.handle) + entry.cut.constant());
      const auto removed = pool.purge(slacks, rec.objective, z_history[z_history.size() - 2],
                                      config.slack_tol, config.purge_eps);
      lp.remove_rows(removed);
      rec.cuts_purged = static_cast<int>(removed.size());
    }

    const XtildeView xt = assemble_xtilde(model, columns);
    const auto spectrum = sym_eigen(xt.matrix());
    rec.min_eig = spectrum.front().value;

    RunStatus stop = RunStatus::kRunning;
    if (rec.min_eig >= -config.eig_tol) stop = RunStatus::kPsdFeasible;
    else if (t >= config.max_iterations) stop = RunStatus::kIterationLimit;
    else if (now() - start >= config.time_limit_seconds) stop = RunStatus::kTimeLimit;
    else if (tailing_off(z_history, config.tail_window, config.tail_eps))
      stop = RunStatus::kTailingOff;
    else if (config.until_stall &&
             tailing_off(z_history, config.until_stall->window, config.until_stall->eps))
      stop = RunStatus::kStalled;

    if (stop == RunStatus::kRunning) {
      auto cuts = generate_cuts(config.strategy, spectrum, xt, config.sparsify,
                                config.eig_tol, root.derive(static_cast<std::uint64_t>(t)));
      CutDeduplicator batch;
      for (auto& cut : cuts) {
        cut.violation = -cut.evaluate(xt);
        if (!(cut.violation >= config.min_violation)) continue;
        if (pool.contains(cut.generator) || !batch.insert(cut.generator)) continue;
        const RowHandle h = lp.add_row(cut.row(model));
        ++rec.added_by_origin[static_cast<std::size_t>(cut.origin)];
        pool.add(std::move(cut), h);
      }
    }
    rec.pool_size = pool.size();
    rec.lp_rows = lp.num_rows();
    trace.records.push_back(rec);
    if (stop != RunStatus::kRunning) {
      trace.status = stop;
      break;
    }
  }
  trace.elapsed_seconds = now() - start;
  return trace;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::runtime_error("trace line " + std::to_string(line) +
                             ": bad number '" + std::string(s) + "'");
  }
  return v;
}

constexpr std::string_view kTraceHeader =
    "iter,seconds,objective,cuts_added,cuts_purged,pool_size,min_eig";

}  // namespace

void write_trace_csv(std::ostream& out, const RunTrace& trace, const TraceMetadata& meta) {
  if (!meta.instance.empty()) out << "# instance=" << meta.instance << '\n';
  if (meta.n > 0 || meta.m > 0)
    out << "# n=" << meta.n << " m=" << meta.m << " p=" << meta.p << '\n';
  if (!meta.strategy.empty()) out << "# strategy=" << meta.strategy << '\n';
  if (meta.opt)
    out << "# opt=" << format_double(*meta.opt) << " source="
        << (meta.opt_source.empty() ? "supplied" : meta.opt_source) << '\n';
  out << "# elapsed=" << format_double(trace.elapsed_seconds) << '\n';
  for (const auto& w : trace.warnings) out << "# warning=" << w << '\n';
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.iter << ',' << format_double(r.seconds) << ',' << format_double(r.objective)
        << ',' << r.cuts_added() << ',' << r.cuts_purged << ',' << r.pool_size << ','
        << format_double(r.min_eig) << '\n';
  }
  if (!trace.diagnostics.empty()) out << "# diagnostics=" << trace.diagnostics << '\n';
  out << "# status=" << to_string(trace.status) << '\n';
}

LoadedTrace read_trace_csv(std::istream& in) {
  LoadedTrace loaded;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  bool status_seen = false;
  const auto fail = [&](const std::string& what) {
    throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "instance") loaded.meta.instance = value;
        else if (key == "n") loaded.meta.n = static_cast<Index>(parse_double(value, lineno));
        else if (key == "m") loaded.meta.m = static_cast<Index>(parse_double(value, lineno));
        else if (key == "p") loaded.meta.p = static_cast<Index>(parse_double(value, lineno));
        else if (key == "strategy") loaded.meta.strategy = value;
        else if (key == "opt") loaded.meta.opt = parse_double(value, lineno);
        else if (key == "source") loaded.meta.opt_source = value;
        else if (key == "elapsed") loaded.trace.elapsed_seconds = parse_double(value, lineno);
        else if (key == "status") {
          const auto s = parse_run_status(value);
          if (!s) fail("unknown status '" + value + "'");
          loaded.trace.status = *s;
          status_seen = true;
        }
        // Free-text keys (warning, diagnostics) span the rest of the line.
        if (key == "warning" || key == "diagnostics") {
          const std::string rest = line.substr(line.find('=') + 1);
          if (key == "warning") loaded.trace.warnings.push_back(rest);
          else loaded.trace.diagnostics = rest;
          break;
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != kTraceHeader) fail("expected header '" + std::string(kTraceHeader) + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) fail("expected 7 columns");
    IterationRecord r;
    r.iter = static_cast<int>(parse_double(cells[0], lineno));
    r.seconds = parse_double(cells[1], lineno);
    r.objective = parse_double(cells[2], lineno);
    r.added_by_origin[0] = static_cast<int>(parse_double(cells[3], lineno));
    r.cuts_purged = static_cast<int>(parse_double(cells[4], lineno));
    r.pool_size = static_cast<std::size_t>(parse_double(cells[5], lineno));
    r.min_eig = parse_double(cells[6], lineno);
    if (!loaded.trace.records.empty() && r.iter <= loaded.trace.records.back().iter)
      fail("iterations must be strictly increasing");
    loaded.trace.records.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("trace: missing header line");
  if (!status_seen) throw std::runtime_error("trace: missing '# status=' line");
  return loaded;
}

}  // namespace psdcuts
