// Command-line harness: run, verify, sweep, test-candidate, report.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "groveropt/io.hpp"

namespace fs = std::filesystem;
using namespace groveropt;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("GROVEROPT_SEED");
  if (env == nullptr || *env == '\0') {
    return 0;
  }
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("GROVEROPT_SEED is not an unsigned integer: '") + env + "'");
  }
}

// Flags shared by run and sweep; each mirrors one config or instance key.
struct RunFlags {
  std::string config;
  std::optional<int> n;
  std::optional<int> m;
  std::vector<int> marked;
  std::optional<std::string> retraction;
  std::optional<std::string> step;
  std::optional<double> t;
  std::optional<double> eps;
  std::optional<int> max_iters;
  std::optional<double> l_rie;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
  std::optional<std::string> criterion;
  bool minimize = false;
  std::optional<int> lipschitz_samples;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file (flags override its values)")
        ->check(CLI::ExistingFile);
    app->add_option("--n", n, "dimension N");
    app->add_option("--m", m, "number of marked states (the first m basis states)");
    app->add_option("--marked", marked, "explicit marked indices");
    app->add_option("--retraction", retraction, "exp | product5")
        ->check(CLI::IsMember({"exp", "product5"}));
    app->add_option("--step", step, "fixed | one-shot | inv-lipschitz")
        ->check(CLI::IsMember({"fixed", "one-shot", "one_shot", "inv-lipschitz",
                               "inv_lipschitz"}));
    app->add_option("--t", t, "step size for --step fixed");
    app->add_option("--eps", eps, "stopping tolerance");
    app->add_option("--max-iters", max_iters, "iteration cap");
    app->add_option("--l-rie", l_rie, "Lipschitz constant override");
    app->add_option("--seed", seed, "seed (default: $GROVEROPT_SEED or 0)");
    app->add_option("--engine", engine, "dense | plane | both")
        ->check(CLI::IsMember({"dense", "plane", "both"}));
    app->add_option("--criterion", criterion, "grad | gap")
        ->check(CLI::IsMember({"grad", "gap"}));
    app->add_flag("--minimize", minimize, "descend toward f = 0 instead of ascending");
    app->add_option("--lipschitz-samples", lipschitz_samples, "samples for the L estimate");
  }

  Json merged_json() const {
    Json j = config.empty() ? Json::object() : Json::parse(read_text_file(config));
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    if (n) j["n"] = *n;
    if (m) {
      j.erase("marked");
      j["m"] = *m;
    }
    if (!marked.empty()) {
      j.erase("m");
      j["marked"] = marked;
    }
    if (retraction) j["retraction"] = *retraction;
    if (step || t) {
      Json sp = j.contains("step_policy") ? j["step_policy"] : Json::object();
      if (step) sp["kind"] = *step;
      if (t) sp["t"] = *t;
      if (!sp.contains("kind")) sp["kind"] = "fixed";
      j["step_policy"] = sp;
    }
    if (eps) j["epsilon"] = *eps;
    if (max_iters) j["max_iters"] = *max_iters;
    if (l_rie) j["l_rie"] = *l_rie;
    j["seed"] = seed ? *seed : (j.contains("seed") ? j["seed"].get<std::uint64_t>()
                                                   : default_seed());
    if (engine) j["engine"] = *engine;
    if (criterion) j["criterion"] = *criterion;
    if (minimize) j["minimize"] = true;
    if (lipschitz_samples) j["lipschitz_samples"] = *lipschitz_samples;
    if (!j.contains("n")) throw UsageError("no instance: give --n and --m (or --config)");
    if (!j.contains("m") && !j.contains("marked") && !j.contains("h")) j["m"] = 1;
    return j;
  }
};

fs::path summary_path_for(const fs::path& trace) {
  fs::path p = trace;
  p.replace_extension(".json");
  return p;
}

// ---------------------------------------------------------------------------

struct RunCmd {
  RunFlags flags;
  std::string out = "trace.csv";
  std::string summary;

  int exec() const {
    const Json j = flags.merged_json();
    const SearchInstance inst = instance_from_json(j);
    const OptimizerConfig cfg = config_from_json(j);
    const Trace trace = run(inst, cfg);
    const fs::path summary_file = summary.empty() ? summary_path_for(out) : fs::path(summary);
    Json s = trace_summary_json(trace);
    s["instance_spec"] = instance_to_json(inst);
    atomic_write(out, trace_csv(trace.records));
    atomic_write(summary_file, s.dump(2) + "\n");
    const auto& last = trace.records.back();
    std::cout << std::setprecision(12) << "k=" << last.k << " q=" << last.q
              << " grad_norm=" << last.grad_norm << " outcome=" << to_string(trace.outcome)
              << "\n";
    if (!trace.diagnostic.empty()) {
      std::cerr << trace.diagnostic << "\n";
    }
    if (trace.outcome == Outcome::smoothness_violation ||
        trace.outcome == Outcome::engine_mismatch) {
      return kFailed;
    }
    return kOk;
  }
};

// ---------------------------------------------------------------------------

struct VerifyCmd {
  std::string suite;
  int n = 16;
  int m = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::vector<int> dims;
  bool inject_fault = false;
  std::string out_dir = "reports";
  bool n_given = false;

  std::vector<SuiteReport> reports_for(const std::string& name, std::uint64_t s) const {
    const SearchInstance inst = make_instance(n, first_marked());
    std::vector<SuiteReport> out;
    if (name == "gradient") {
      out.push_back(gradient_suite(inst, trials.value_or(100), s, inject_fault));
    } else if (name == "plane") {
      out.push_back(merge_reports(
          "plane", {plane_invariance_suite(inst, trials.value_or(200), s, inject_fault),
                    engine_equivalence_suite(inst, 50, s)}));
    } else if (name == "retraction-bounds") {
      out.push_back(bounds_suite(inst, trials.value_or(200), {10.0, 1.0, 1e-2, 1e-4}, s,
                                 inject_fault));
      out.back().suite = "retraction-bounds";
    } else if (name == "commutator") {
      const std::vector<int> d = dims.empty() ? std::vector<int>{2, 8, 16} : dims;
      out.push_back(commutator_suite(d, trials.value_or(50), s, inject_fault));
    } else if (name == "complexity") {
      std::vector<ComplexityCell> base = baseline_cells();
      std::vector<ComplexityCell> pl = pl_cells();
      if (n_given) {
        base = {{n, m, 0.1}, {n, m, 0.05}};
        pl = {{n, m, 1e-2}, {n, m, 1e-3}};
      }
      const int samples = 200;
      out.push_back(merge_reports("complexity",
                                  {complexity_suite(base, pl, s, samples),
                                   lipschitz_scaling_suite({16, 64, 256}, 1, samples, s)}));
    } else if (name == "candidate-p123") {
      SuiteReport r = candidate_suite(inst, builtin_product5(),
                                      {builtin_single_factor(), builtin_swapped_product5()},
                                      1e-6, 1e-4);
      if (inject_fault) {
        // Swap roles: the tester must reject the broken product as a positive.
        r = candidate_suite(inst, builtin_swapped_product5(), {builtin_single_factor()}, 1e-6,
                            1e-4);
      }
      r.suite = "candidate-p123";
      out.push_back(r);
    }
    return out;
  }

  std::vector<int> first_marked() const {
    std::vector<int> v(m);
    std::iota(v.begin(), v.end(), 0);
    return v;
  }

  int exec() const {
    const std::uint64_t s = seed ? *seed : default_seed();
    std::vector<std::string> names;
    if (suite == "all") {
      names = {"gradient", "plane", "retraction-bounds", "commutator", "complexity",
               "candidate-p123"};
    } else {
      names = {suite};
    }
    bool all_pass = true;
    for (const auto& name : names) {
      for (const SuiteReport& r : reports_for(name, s)) {
        atomic_write(fs::path(out_dir) / (name + ".json"), suite_report_json(r).dump(2) + "\n");
        all_pass = all_pass && r.passed();
        std::cout << name << ": " << (r.passed() ? "pass" : "FAIL") << " (" << r.trials
                  << " trials, " << r.failures.size() << " failures)\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(r.failures.size(), 3); ++i) {
          const auto& f = r.failures[i];
          std::cout << "  " << f.what << " [" << f.digest << "] observed " << f.observed
                    << ", expected " << f.expected << "\n";
        }
      }
    }
    return all_pass ? kOk : kFailed;
  }
};

// ---------------------------------------------------------------------------

struct SweepCmd {
  RunFlags flags;
  std::vector<std::string> sweeps;
  std::string out = "sweep.csv";

  int exec() const {
    if (sweeps.size() != 1) {
      throw UsageError("sweep needs exactly one --sweep KEY=V1,V2,... (got " +
                       std::to_string(sweeps.size()) + ")");
    }
    const std::string& spec = sweeps.front();
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--sweep must look like KEY=V1,V2,...");
    }
    const std::string key = spec.substr(0, eq);
    static const std::map<std::string, std::string> kKeys = {
        {"n", "n"},     {"m", "m"},     {"eps", "epsilon"}, {"seed", "seed"},
        {"t", "t"},     {"l-rie", "l_rie"},
        {"max-iters", "max_iters"}, {"lipschitz-samples", "lipschitz_samples"}};
    const auto key_it = kKeys.find(key);
    if (key_it == kKeys.end()) {
      throw UsageError("cannot sweep '" + key + "'");
    }
    std::vector<double> values;
    std::stringstream list(spec.substr(eq + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
      if (item.empty()) continue;
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size()) throw UsageError("bad sweep value '" + item + "'");
      values.push_back(v);
    }
    if (values.empty()) {
      throw UsageError("empty value list for --sweep " + key);
    }

    const Json base = flags.merged_json();
    std::ostringstream csv;
    csv << std::setprecision(12);
    csv << key << ",n,m,l_hat,l_rie,iterations,bound,within_bound,outcome,q,grad_norm,gap";
    const bool sweep_n = key == "n";
    if (sweep_n) csv << ",slope";
    csv << "\n";

    struct Row {
      double value;
      int n, m;
      double l_hat;
      std::optional<double> l_rie;
      int iterations;
      std::optional<long> bound;
      bool within;
      Outcome outcome;
      IterationRecord last;
    };
    std::vector<Row> rows;
    bool ok = true;
    for (double v : values) {
      Json j = base;
      const std::string& k = key_it->second;
      if (k == "t") {
        j["step_policy"] = {{"kind", "fixed"}, {"t", v}};
      } else if (k == "n" || k == "m" || k == "max_iters" || k == "lipschitz_samples") {
        if (v != std::floor(v)) throw UsageError(key + " values must be integers");
        j[k] = static_cast<int>(v);
        if (k == "m") j.erase("marked");
      } else if (k == "seed") {
        if (v != std::floor(v) || v < 0) throw UsageError("seed values must be non-negative");
        j[k] = static_cast<std::uint64_t>(v);
      } else {
        j[k] = v;
      }
      const SearchInstance inst = instance_from_json(j);
      const OptimizerConfig cfg = config_from_json(j);
      const Trace trace = run(inst, cfg);
      Row r{v, inst.n, inst.m, 0.0, trace.l_rie, trace.iterations(), std::nullopt, true,
            trace.outcome, trace.records.back()};
      if (sweep_n || !trace.l_rie) {
        r.l_hat = inst.degenerate() ? 0.0
                                    : estimate_lipschitz(inst, cfg.lipschitz_samples, cfg.seed);
      } else {
        r.l_hat = cfg.l_rie ? *cfg.l_rie : *trace.l_rie / kLipschitzSafety;
      }
      const bool converged =
          trace.outcome == Outcome::converged_grad || trace.outcome == Outcome::converged_gap;
      if (cfg.step.kind == StepPolicyKind::one_shot) {
        r.bound = 1;
      } else if (trace.l_rie) {
        r.bound = cfg.criterion == StopCriterion::gradient
                      ? baseline_iteration_bound(*trace.l_rie, cfg.epsilon)
                      : pl_iteration_bound(*trace.l_rie, cfg.epsilon);
      }
      if (r.bound) {
        r.within = converged && r.iterations <= *r.bound;
        ok = ok && r.within;
      }
      rows.push_back(r);
    }
    double slope = std::nan("");
    if (sweep_n && rows.size() >= 2) {
      std::vector<double> x, y;
      for (const auto& r : rows) {
        x.push_back(static_cast<double>(r.n) / r.m);
        y.push_back(r.l_hat);
      }
      slope = loglog_slope(x, y);
    }
    auto format = [](double v) {
      std::ostringstream o;
      o << std::setprecision(12) << v;
      return o.str();
    };
    for (const auto& r : rows) {
      csv << r.value << ',' << r.n << ',' << r.m << ',' << r.l_hat << ','
          << (r.l_rie ? format(*r.l_rie) : "") << ',' << r.iterations << ','
          << (r.bound ? std::to_string(*r.bound) : "") << ',' << (r.within ? 1 : 0) << ','
          << to_string(r.outcome) << ',' << r.last.q << ',' << r.last.grad_norm << ','
          << r.last.gap;
      if (sweep_n) csv << ',' << slope;
      csv << "\n";
    }
    atomic_write(out, csv.str());
    std::cout << csv.str();
    return ok ? kOk : kFailed;
  }
};

// ---------------------------------------------------------------------------

struct CandidateCmd {
  std::string candidate;
  std::string builtin = "product5";
  int n = 4;
  int m = 1;
  double h = 1e-6;
  double eps = 1e-4;
  std::vector<std::string> seeds;
  std::string out = "candidate_report.json";

  int exec() const {
    CandidateProduct cand;
    if (!candidate.empty()) {
      cand = candidate_from_json(Json::parse(read_text_file(candidate)),
                                 fs::path(candidate).stem().string());
    } else if (builtin == "product5") {
      cand = builtin_product5();
    } else if (builtin == "single_factor") {
      cand = builtin_single_factor();
    } else {
      cand = builtin_swapped_product5();
    }
    std::vector<std::pair<double, double>> grid;
    for (const auto& s : seeds) {
      const auto comma = s.find(',');
      if (comma == std::string::npos) throw UsageError("--seed-point must be X,Y");
      try {
        grid.emplace_back(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
      } catch (const std::exception&) {
        throw UsageError("bad --seed-point '" + s + "'");
      }
    }
    if (grid.empty()) grid = candidate_seed_grid();
    std::vector<int> marked(m);
    std::iota(marked.begin(), marked.end(), 0);
    const SearchInstance inst = make_instance(n, marked);
    const VelocityReport rep = check_velocity(inst, cand, grid, h, eps);
    atomic_write(out, velocity_report_json(rep).dump(2) + "\n");
    for (const auto& s : rep.seeds) {
      std::cout << "(" << s.x << ", " << s.y << ") P1=" << (s.p1 ? "pass" : "fail")
                << " P2=" << (s.p2 ? "pass" : "fail") << " P3=" << (s.p3 ? "pass" : "fail")
                << " err=" << s.err << "\n";
    }
    std::cout << cand.name << ": " << (rep.verdict ? "pass" : "FAIL") << "\n";
    return rep.verdict ? kOk : kFailed;
  }
};

// ---------------------------------------------------------------------------

struct ReportCmd {
  std::string trace;
  std::string summary;
  std::string out;

  int exec() const {
    std::istringstream in(read_text_file(trace));
    const std::vector<IterationRecord> records = read_trace_csv(in);
    ReportContext ctx;
    fs::path s = summary.empty() ? summary_path_for(trace) : fs::path(summary);
    if (!summary.empty() || fs::exists(s)) {
      ctx = report_context_from_summary(Json::parse(read_text_file(s)));
    }
    const std::string md = render_markdown_report(records, ctx);
    if (out.empty()) {
      std::cout << md;
    } else {
      atomic_write(out, md);
    }
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian gradient ascent for Grover search on U(N)"};
  app.require_subcommand(1, 1);

  RunCmd run_cmd;
  auto* run_app = app.add_subcommand("run", "run the optimizer and write a CSV trace");
  run_cmd.flags.attach(run_app);
  run_app->add_option("--out", run_cmd.out, "trace CSV path");
  run_app->add_option("--summary", run_cmd.summary, "summary JSON path (default: the trace path with a .json extension)");

  VerifyCmd verify_cmd;
  auto* verify_app = app.add_subcommand("verify", "run verification suites");
  verify_app->add_option("--suite", verify_cmd.suite)
      ->required()
      ->check(CLI::IsMember({"gradient", "plane", "retraction-bounds", "commutator",
                             "complexity", "candidate-p123", "all"}));
  auto* n_opt = verify_app->add_option("--n", verify_cmd.n, "dimension N");
  verify_app->add_option("--m", verify_cmd.m, "number of marked states");
  verify_app->add_option("--seed", verify_cmd.seed, "seed (default: $GROVEROPT_SEED or 0)");
  verify_app->add_option("--trials", verify_cmd.trials, "trials (or steps) per suite");
  verify_app->add_option("--dim", verify_cmd.dims, "dimensions for the commutator suite");
  verify_app->add_flag("--inject-fault", verify_cmd.inject_fault, "negative control");
  verify_app->add_option("--out-dir", verify_cmd.out_dir, "directory for report JSON");

  SweepCmd sweep_cmd;
  auto* sweep_app = app.add_subcommand("sweep", "sweep one flag over a value list");
  sweep_cmd.flags.attach(sweep_app);
  sweep_app->add_option("--sweep", sweep_cmd.sweeps, "KEY=V1,V2,... (exactly one)");
  sweep_app->add_option("--out", sweep_cmd.out, "aggregated CSV path");

  CandidateCmd cand_cmd;
  auto* cand_app = app.add_subcommand("test-candidate", "check P1-P3 for a factor product");
  cand_app->add_option("--candidate", cand_cmd.candidate, "candidate JSON file")
      ->check(CLI::ExistingFile);
  cand_app->add_option("--builtin", cand_cmd.builtin, "product5 | single_factor | swapped")
      ->check(CLI::IsMember({"product5", "single_factor", "swapped"}));
  cand_app->add_option("--n", cand_cmd.n, "dimension N");
  cand_app->add_option("--m", cand_cmd.m, "number of marked states");
  cand_app->add_option("--fd-step", cand_cmd.h, "finite-difference step h");
  cand_app->add_option("--eps", cand_cmd.eps, "velocity tolerance");
  cand_app->add_option("--seed-point", cand_cmd.seeds, "X,Y seed (repeatable)");
  cand_app->add_option("--out", cand_cmd.out, "report JSON path");

  ReportCmd report_cmd;
  auto* report_app = app.add_subcommand("report", "render a Markdown report from a trace");
  report_app->add_option("trace", report_cmd.trace, "trace CSV")->required();
  report_app->add_option("--summary", report_cmd.summary, "run summary JSON");
  report_app->add_option("--out", report_cmd.out, "Markdown path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  verify_cmd.n_given = n_opt->count() > 0;

  try {
    if (run_app->parsed()) return run_cmd.exec();
    if (verify_app->parsed()) return verify_cmd.exec();
    if (sweep_app->parsed()) return sweep_cmd.exec();
    if (cand_app->parsed()) return cand_cmd.exec();
    if (report_app->parsed()) return report_cmd.exec();
  } catch (const DegenerateInstance& e) {
    std::cerr << "degenerate instance: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
