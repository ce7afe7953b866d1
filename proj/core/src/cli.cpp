#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "psdcuts/engine.hpp"
#include "psdcuts/harness.hpp"
#include "psdcuts/io.hpp"
#include "psdcuts/lp.hpp"

namespace psdcuts {
namespace {

namespace fs = std::filesystem;

constexpr double kBruteForceStep = 1e-2;

struct SolveArgs {
  std::string instance;
  std::string strategy = "s2m";
  std::optional<int> max_iters;
  std::optional<double> time_limit;
  std::optional<double> pct_viol;
  std::optional<double> pct_nz;
  std::uint64_t seed = 1;
  std::string trace;
  std::optional<double> opt;
  std::string until_stall;
  std::string export_mps;
};

struct CompareArgs {
  std::string a, b;
  double g = 1.0;
  std::string checkpoints = "1,2,5,10,20,30s";
  std::string out;
  std::string detail;
  std::string bound;
};

struct TuneArgs {
  std::string strategy = "sparse2";
  std::string instances;
  std::string clock = "1,2,5,10,20,30";
  double g = 1.0;
  std::uint64_t seed = 1;
  int max_iters = 1000;
};

struct GenArgs {
  int n = 0;
  double density = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Strategy strategy_arg(const std::string& text) {
  const auto s = parse_strategy(text);
  if (!s) throw std::invalid_argument("unknown strategy '" + text + "'");
  return *s;
}

StallRule stall_arg(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--until-stall expects EPS,WIN");
  StallRule rule;
  const char* b = text.data();
  const auto r1 = std::from_chars(b, b + comma, rule.eps);
  const auto r2 = std::from_chars(b + comma + 1, b + text.size(), rule.window);
  if (r1.ec != std::errc() || r1.ptr != b + comma || r2.ec != std::errc() ||
      r2.ptr != b + text.size() || rule.eps < 0.0 || rule.window < 1)
    throw std::invalid_argument("--until-stall expects EPS,WIN, got '" + text + "'");
  return rule;
}

std::vector<fs::path> sorted_files(const std::string& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && (ext.empty() || e.path().extension() == ext))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(a.instance);
  QcqpProblem problem;
  try {
    problem = parse_instance(text);
  } catch (const ParseError& e) {
    throw std::runtime_error(a.instance + ":" + e.what());
  }
  const Strategy strategy = strategy_arg(a.strategy);
  LoopConfig cfg = LoopConfig::for_strategy(strategy);
  if (a.max_iters) cfg.max_iterations = *a.max_iters;
  if (a.time_limit) cfg.time_limit_seconds = *a.time_limit;
  if (a.pct_viol) cfg.sparsify.pct_viol = *a.pct_viol;
  if (a.pct_nz) cfg.sparsify.pct_nz = *a.pct_nz;
  cfg.seed = a.seed;
  if (!a.until_stall.empty()) cfg.until_stall = stall_arg(a.until_stall);
  cfg.validate();

  TraceMetadata meta;
  meta.instance = fs::path(a.instance).stem().string();
  meta.n = problem.n();
  meta.m = problem.m();
  meta.p = problem.p();
  meta.strategy = std::string(to_string(strategy));
  if (a.opt) {
    meta.opt = a.opt;
    meta.opt_source = "supplied";
  } else if (const auto v = find_opt_comment(text)) {
    meta.opt = v;
    meta.opt_source = "supplied";
  } else if (problem.n() <= 3 && problem.p() == 0) {
    meta.opt = brute_force_opt(problem, kBruteForceStep);
    meta.opt_source = "brute-forced";
  }

  const ExtendedModel model = lift(problem);
  if (!a.export_mps.empty()) {
    std::ofstream mps(a.export_mps);
    if (!mps) throw std::runtime_error("cannot write '" + a.export_mps + "'");
    write_mps(mps, model, meta.instance);
  }
  DualSimplex lp;
  const RunTrace trace = run(model, cfg, lp);
  for (const auto& w : trace.warnings) err << "warning: " << w << '\n';

  if (a.trace.empty()) {
    write_trace_csv(out, trace, meta);
  } else {
    std::ofstream csv(a.trace);
    if (!csv) throw std::runtime_error("cannot write '" + a.trace + "'");
    write_trace_csv(csv, trace, meta);
    const auto& last = trace.records.back();
    out << "status=" << to_string(trace.status) << " iterations=" << trace.records.size()
        << " bound=" << last.objective << " seconds=" << trace.elapsed_seconds << '\n';
  }
  if (trace.status == RunStatus::kLpError) {
    err << "error: LP failure: " << trace.diagnostics << '\n';
    return 1;
  }
  return 0;
}

std::map<std::string, LoadedTrace> load_traces(const std::string& dir) {
  std::map<std::string, LoadedTrace> traces;
  for (const auto& path : sorted_files(dir, ".csv")) {
    std::ifstream in(path);
    LoadedTrace t;
    try {
      t = read_trace_csv(in);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": " + e.what());
    }
    if (t.trace.records.empty()) throw std::runtime_error(path.string() + ": empty trace");
    std::string name = t.meta.instance.empty() ? path.stem().string() : t.meta.instance;
    if (traces.count(name)) throw std::runtime_error("duplicate instance '" + name + "' in " + dir);
    traces.emplace(std::move(name), std::move(t));
  }
  return traces;
}

std::vector<InstanceResult> to_results(const std::map<std::string, LoadedTrace>& traces,
                                       const std::string& dir) {
  std::vector<InstanceResult> results;
  for (const auto& [name, t] : traces) {
    if (!t.meta.opt)
      throw std::runtime_error("trace for instance '" + name + "' in " + dir +
                               " has no '# opt=' line");
    InstanceResult r;
    r.name = name;
    r.n = t.meta.n;
    r.m = t.meta.m;
    r.trace = t.trace;
    r.opt = *t.meta.opt;
    r.opt_source = t.meta.opt_source == "brute-forced" ? OptSource::kBruteForced
                                                       : OptSource::kSupplied;
    results.push_back(std::move(r));
  }
  return results;
}

void write_detail(const std::string& path, const std::vector<InstanceResult>& results,
                  std::span<const Checkpoint> cps) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  write_instance_table(f, results, cps);
}

int do_compare(const CompareArgs& a, std::ostream& out) {
  const auto cps = parse_checkpoints(a.checkpoints);
  auto ra = to_results(load_traces(a.a), a.a);
  auto rb = to_results(load_traces(a.b), a.b);
  const ComparisonReport report = compare(ra, rb, cps, a.g);
  if (a.out.empty()) {
    write_comparison_csv(out, report);
  } else {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot write '" + a.out + "'");
    write_comparison_csv(f, report);
  }
  if (!a.detail.empty()) {
    if (!a.bound.empty()) {
      const auto bounds = load_traces(a.bound);
      for (auto* rs : {&ra, &rb})
        for (auto& r : *rs)
          if (const auto it = bounds.find(r.name); it != bounds.end())
            r.long_run_bound = it->second.trace.records.back().objective;
    }
    write_detail(a.detail + "_a.csv", ra, cps);
    write_detail(a.detail + "_b.csv", rb, cps);
  }
  return 0;
}

int do_tune(const TuneArgs& a, std::ostream& out) {
  const Strategy strategy = strategy_arg(a.strategy);
  std::vector<TuneInstance> instances;
  for (const auto& path : sorted_files(a.instances, ".qcqp")) {
    const std::string text = read_file(path);
    TuneInstance inst;
    inst.name = path.stem().string();
    try {
      inst.problem = parse_instance(text);
    } catch (const ParseError& e) {
      throw std::runtime_error(path.string() + ":" + e.what());
    }
    if (const auto v = find_opt_comment(text)) {
      inst.opt = *v;
    } else if (inst.problem.n() <= 3 && inst.problem.p() == 0) {
      inst.opt = brute_force_opt(inst.problem, kBruteForceStep);
    } else {
      throw std::runtime_error(path.string() + ": no '# opt=' comment and too large to brute-force");
    }
    instances.push_back(std::move(inst));
  }
  if (instances.empty()) throw std::runtime_error("no .qcqp instances in '" + a.instances + "'");

  TuneOptions opts;
  opts.g = a.g;
  opts.checkpoints.clear();
  std::stringstream ss(a.clock);
  for (std::string item; std::getline(ss, item, ',');) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size() || !(v > 0.0))
      throw std::invalid_argument("--clock expects positive seconds, got '" + item + "'");
    opts.checkpoints.push_back(Checkpoint::seconds(v));
  }
  if (opts.checkpoints.empty()) throw std::invalid_argument("--clock is empty");
  double horizon = 0.0;
  for (const auto& c : opts.checkpoints) horizon = std::max(horizon, c.value);

  LoopConfig base = LoopConfig::for_strategy(strategy);
  base.seed = a.seed;
  base.max_iterations = a.max_iters;
  const TuneResult result = tune(make_engine_evaluator(std::move(instances), base, horizon), opts);
  out << "round,viol_low,viol_mid,viol_high,nz_low,nz_mid,nz_high,best_viol,best_nz,wins\n";
  for (std::size_t k = 0; k < result.rounds.size(); ++k) {
    const auto& r = result.rounds[k];
    out << k + 1 << ',' << r.viol_low << ',' << r.viol_mid << ',' << r.viol_high << ','
        << r.nz_low << ',' << r.nz_mid << ',' << r.nz_high << ',' << r.best_viol << ','
        << r.best_nz << ',' << r.best_wins << '\n';
  }
  out << "# pct_viol=" << result.pct_viol << " pct_nz=" << result.pct_nz
      << (result.hit_round_cap ? " (round cap reached)" : "") << '\n';
  return 0;
}

int do_gen(const GenArgs& a, std::ostream& out) {
  const QcqpProblem p = gen_boxqp(a.n, a.density, a.seed);
  if (a.out.empty()) {
    out << serialize_instance(p);
  } else {
    write_instance_file(a.out, p);
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cutting planes for LP relaxations of the PSD cone", "psdcuts"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run the cutting-plane loop on one instance");
  s->add_option("--instance", solve.instance, "Instance file")->required();
  s->add_option("--strategy", solve.strategy, "s, s1m, s2m, sparse1 or sparse2")
      ->capture_default_str();
  s->add_option("--max-iters", solve.max_iters, "Iteration cap (default 1000)");
  s->add_option("--time-limit", solve.time_limit, "Seconds (default 600)");
  s->add_option("--pct-viol", solve.pct_viol, "Sparsify violation fraction");
  s->add_option("--pct-nz", solve.pct_nz, "Sparsify nonzero fraction");
  s->add_option("--seed", solve.seed)->capture_default_str();
  s->add_option("--trace", solve.trace, "Trace CSV (stdout if omitted)");
  s->add_option("--opt", solve.opt, "Known optimal value");
  s->add_option("--until-stall", solve.until_stall, "EPS,WIN extra stop rule");
  s->add_option("--export-mps", solve.export_mps, "Write the lifted LP as MPS");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "Compare two directories of traces");
  c->add_option("--a", cmp.a, "Traces of algorithm A")->required();
  c->add_option("--b", cmp.b, "Traces of algorithm B")->required();
  c->add_option("--g", cmp.g, "Win threshold in gap points")->capture_default_str();
  c->add_option("--checkpoints", cmp.checkpoints, "e.g. 1,5,10 or 2s,30s")
      ->capture_default_str();
  c->add_option("--out", cmp.out, "Report CSV (stdout if omitted)");
  c->add_option("--detail", cmp.detail, "Prefix for per-instance tables");
  c->add_option("--bound", cmp.bound, "Traces of long runs for the bound column");

  TuneArgs tn;
  auto* t = app.add_subcommand("tune", "Grid search for the sparsify parameters");
  t->add_option("--strategy", tn.strategy)->capture_default_str();
  t->add_option("--instances", tn.instances, "Directory of .qcqp files")->required();
  t->add_option("--clock", tn.clock, "Clocked times in seconds")->capture_default_str();
  t->add_option("--g", tn.g)->capture_default_str();
  t->add_option("--seed", tn.seed)->capture_default_str();
  t->add_option("--max-iters", tn.max_iters)->capture_default_str();

  GenArgs gen;
  auto* g = app.add_subcommand("gen-boxqp", "Write a random BoxQP instance");
  g->add_option("--n", gen.n)->required();
  g->add_option("--density", gen.density)->required();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--out", gen.out, "Output file (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (s->parsed()) return do_solve(solve, out, err);
    if (c->parsed()) return do_compare(cmp, out);
    if (t->parsed()) return do_tune(tn, out);
    if (g->parsed()) return do_gen(gen, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace psdcuts
