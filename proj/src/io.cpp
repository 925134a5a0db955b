#include "groveropt/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <system_error>

namespace groveropt {

namespace {

const std::set<std::string> kInstanceKeys = {"n", "m", "marked", "h", "psi0"};
const std::set<std::string> kConfigKeys = {
    "retraction", "step_policy", "epsilon", "max_iters", "l_rie", "seed",
    "engine",     "criterion",   "minimize", "lipschitz_samples"};

template <typename T>
T get_as(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("'") + key + "': " + e.what());
  }
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) {
    return {j.get<double>(), 0.0};
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(where + ": expected a number or a [re, im] pair");
}

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

double parse_double(const std::string& cell, int row, const char* column) {
  if (cell.empty()) {
    throw CsvError(row, std::string("empty value in column '") + column + "'");
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw CsvError(row, std::string("column '") + column + "': not a number: '" + cell + "'");
  }
  if (used != cell.size()) {
    throw CsvError(row, std::string("column '") + column + "': trailing characters in '" +
                            cell + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// instances

SearchInstance instance_from_json(const Json& j) {
  if (!j.is_object()) {
    throw ConfigError("instance: expected a JSON object");
  }
  if (!j.contains("n")) {
    throw ConfigError("instance: missing 'n'");
  }
  const int n = get_as<int>(j, "n");
  if (j.contains("h") || j.contains("psi0")) {
    if (!j.contains("h") || !j.contains("psi0")) {
      throw ConfigError("instance: 'h' and 'psi0' must be given together");
    }
    const Json& jh = j.at("h");
    const Json& jp = j.at("psi0");
    if (n < 1 || !jh.is_array() || jh.size() != static_cast<std::size_t>(n) * n) {
      throw ConfigError("instance: 'h' must hold n*n entries in row-major order");
    }
    if (!jp.is_array() || jp.size() != static_cast<std::size_t>(n)) {
      throw ConfigError("instance: 'psi0' must hold n entries");
    }
    CMatrix h(n, n);
    CVector psi(n);
    for (int r = 0; r < n; ++r) {
      psi(r) = complex_from_json(jp[r], "psi0[" + std::to_string(r) + "]");
      for (int c = 0; c < n; ++c) {
        h(r, c) = complex_from_json(jh[r * n + c], "h[" + std::to_string(r * n + c) + "]");
      }
    }
    try {
      return make_instance(std::move(h), std::move(psi));
    } catch (const DegenerateInstance&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  std::vector<int> marked;
  if (j.contains("marked")) {
    if (j.contains("m")) {
      throw ConfigError("instance: give either 'marked' or 'm', not both");
    }
    marked = get_as<std::vector<int>>(j, "marked");
  } else if (j.contains("m")) {
    const int m = get_as<int>(j, "m");
    if (m < 0) {
      throw ConfigError("instance: 'm' must be non-negative");
    }
    for (int i = 0; i < m; ++i) marked.push_back(i);
  } else {
    throw ConfigError("instance: missing 'marked' (or 'm')");
  }
  try {
    return make_instance(n, std::move(marked));
  } catch (const DegenerateInstance&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Json instance_to_json(const SearchInstance& inst) {
  Json j;
  j["n"] = inst.n;
  if (!inst.marked.empty() || inst.m == 0) {
    j["marked"] = inst.marked;
  } else {
    Json h = Json::array();
    for (int r = 0; r < inst.n; ++r) {
      for (int c = 0; c < inst.n; ++c) h.push_back(complex_to_json(inst.h(r, c)));
    }
    Json p = Json::array();
    for (int r = 0; r < inst.n; ++r) p.push_back(complex_to_json(inst.psi0_ket(r)));
    j["h"] = std::move(h);
    j["psi0"] = std::move(p);
  }
  return j;
}

// ---------------------------------------------------------------------------
// configs

OptimizerConfig config_from_json(const Json& j, OptimizerConfig cfg) {
  if (!j.is_object()) {
    throw ConfigError("config: expected a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.count(key) && !kInstanceKeys.count(key)) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  try {
    if (j.contains("retraction")) {
      cfg.retraction = parse_retraction_kind(get_as<std::string>(j, "retraction"));
    }
    if (j.contains("step_policy")) {
      const Json& sp = j.at("step_policy");
      if (!sp.is_object() || !sp.contains("kind")) {
        throw ConfigError("config: 'step_policy' needs a 'kind'");
      }
      cfg.step.kind = parse_step_policy(get_as<std::string>(sp, "kind"));
      if (sp.contains("t") && !sp.at("t").is_null()) {
        cfg.step.t = get_as<double>(sp, "t");
      }
    }
    if (j.contains("epsilon")) cfg.epsilon = get_as<double>(j, "epsilon");
    if (j.contains("max_iters")) cfg.max_iters = get_as<int>(j, "max_iters");
    if (j.contains("l_rie")) {
      if (j.at("l_rie").is_null()) {
        cfg.l_rie.reset();
      } else {
        cfg.l_rie = get_as<double>(j, "l_rie");
      }
    }
    if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j, "seed");
    if (j.contains("engine")) cfg.engine = parse_engine(get_as<std::string>(j, "engine"));
    if (j.contains("criterion")) {
      cfg.criterion = parse_criterion(get_as<std::string>(j, "criterion"));
    }
    if (j.contains("minimize")) cfg.minimize = get_as<bool>(j, "minimize");
    if (j.contains("lipschitz_samples")) {
      cfg.lipschitz_samples = get_as<int>(j, "lipschitz_samples");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

Json config_to_json(const OptimizerConfig& cfg) {
  Json j;
  j["retraction"] = to_string(cfg.retraction);
  Json sp;
  sp["kind"] = to_string(cfg.step.kind);
  if (cfg.step.kind == StepPolicyKind::fixed) {
    sp["t"] = cfg.step.t;
  }
  j["step_policy"] = sp;
  j["epsilon"] = cfg.epsilon;
  j["max_iters"] = cfg.max_iters;
  j["l_rie"] = cfg.l_rie ? Json(*cfg.l_rie) : Json(nullptr);
  j["seed"] = cfg.seed;
  j["engine"] = to_string(cfg.engine);
  j["criterion"] = to_string(cfg.criterion);
  j["minimize"] = cfg.minimize;
  j["lipschitz_samples"] = cfg.lipschitz_samples;
  return j;
}

// ---------------------------------------------------------------------------
// traces

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << kTraceHeader << '\n';
  for (const auto& r : records) {
    out << r.k << ',' << format_double(r.q) << ',' << format_double(r.f) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.x) << ','
        << format_double(r.y) << ',' << format_double(r.t) << ','
        << format_double(r.plane_residual) << ',' << format_double(r.gap) << '\n';
  }
}

std::string trace_csv(const std::vector<IterationRecord>& records) {
  std::ostringstream out;
  write_trace_csv(out, records);
  return out.str();
}

std::vector<IterationRecord> read_trace_csv(std::istream& in) {
  static const char* kColumns[] = {"k", "q", "f", "grad_norm", "x", "y", "t",
                                   "plane_residual", "gap"};
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError(1, "missing header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) {
    throw CsvError(1, std::string("header must be '") + kTraceHeader + "'");
  }
  std::vector<IterationRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      continue;
    }
    // Writers always terminate rows; a final row without a newline was cut short.
    if (in.eof()) {
      throw CsvError(row, "truncated row (missing line terminator)");
    }
    const auto cells = split_csv(line);
    if (cells.size() != 9) {
      throw CsvError(row, "expected 9 columns, found " + std::to_string(cells.size()));
    }
    double v[9];
    for (int c = 0; c < 9; ++c) {
      v[c] = parse_double(cells[c], row, kColumns[c]);
    }
    IterationRecord r;
    if (v[0] != std::floor(v[0]) || v[0] < 0) {
      throw CsvError(row, "column 'k' must be a non-negative integer");
    }
    r.k = static_cast<int>(v[0]);
    r.q = v[1];
    r.f = v[2];
    r.grad_norm = v[3];
    r.x = v[4];
    r.y = v[5];
    r.t = v[6];
    r.plane_residual = v[7];
    r.gap = v[8];
    if (!out.empty() && r.k != out.back().k + 1) {
      throw CsvError(row, "iteration index out of sequence");
    }
    out.push_back(r);
  }
  if (out.empty()) {
    throw CsvError(row + 1, "no records");
  }
  return out;
}

Json trace_summary_json(const Trace& trace) {
  Json j;
  j["config"] = config_to_json(trace.config);
  Json inst;
  inst["n"] = trace.instance.n;
  inst["m"] = trace.instance.m;
  inst["q0"] = trace.instance.q0;
  inst["c0"] = trace.instance.c0;
  j["instance"] = inst;
  j["l_rie"] = trace.l_rie ? Json(*trace.l_rie) : Json(nullptr);
  j["outcome"] = to_string(trace.outcome);
  if (!trace.diagnostic.empty()) {
    j["diagnostic"] = trace.diagnostic;
  }
  j["iterations"] = trace.iterations();
  if (!trace.records.empty()) {
    const auto& r = trace.records.back();
    j["final"] = {{"k", r.k}, {"q", r.q}, {"f", r.f}, {"grad_norm", r.grad_norm}, {"gap", r.gap}};
  }
  if (trace.l_rie) {
    const double eps = trace.config.epsilon;
    if (trace.config.criterion == StopCriterion::gradient) {
      j["bound"] = baseline_iteration_bound(*trace.l_rie, eps);
    } else if (eps < 1.0) {
      j["bound"] = pl_iteration_bound(*trace.l_rie, eps);
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// candidates and reports

CandidateProduct candidate_from_json(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("factors") || !j.at("factors").is_array()) {
    throw ConfigError("candidate: expected {\"factors\": [...]}");
  }
  CandidateProduct c;
  c.name = j.contains("name") ? get_as<std::string>(j, "name") : name;
  int index = 0;
  for (const auto& f : j.at("factors")) {
    const std::string where = "candidate factor " + std::to_string(index++);
    if (!f.is_object() || !f.contains("gen") || !f.contains("coef")) {
      throw ConfigError(where + ": needs 'gen' and 'coef'");
    }
    const std::string gen = get_as<std::string>(f, "gen");
    Generator g;
    if (gen == "H") {
      g = Generator::h;
    } else if (gen == "psi0") {
      g = Generator::psi0;
    } else {
      throw ConfigError(where + ": 'gen' must be \"H\" or \"psi0\"");
    }
    try {
      c.factors.push_back({g, Expression::parse(get_as<std::string>(f, "coef"))});
    } catch (const CandidateError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (c.factors.empty()) {
    throw ConfigError("candidate: no factors");
  }
  return c;
}

Json velocity_report_json(const VelocityReport& report) {
  Json j;
  j["candidate"] = report.candidate;
  j["h"] = report.h;
  j["eps"] = report.eps;
  Json seeds = Json::array();
  for (const auto& s : report.seeds) {
    Json e;
    e["seed"] = Json::array({s.x, s.y});
    e["p1"] = s.p1;
    e["p2"] = s.p2;
    e["p3"] = s.p3;
    e["err"] = std::isfinite(s.err) ? Json(s.err) : Json(nullptr);
    seeds.push_back(e);
  }
  j["seeds"] = seeds;
  j["verdict"] = report.verdict ? "pass" : "fail";
  return j;
}

Json suite_report_json(const SuiteReport& report) {
  Json j;
  j["suite"] = report.suite;
  j["trials"] = report.trials;
  j["verdict"] = report.passed() ? "pass" : "fail";
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"input", f.digest},
                        {"what", f.what},
                        {"observed", f.observed},
                        {"expected", f.expected},
                        {"tolerance", f.tolerance}});
  }
  j["failures"] = failures;
  Json metrics = Json::object();
  for (const auto& [k, v] : report.metrics) {
    metrics[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
  }
  j["metrics"] = metrics;
  j["notes"] = report.notes;
  return j;
}

ReportContext report_context_from_summary(const Json& summary) {
  ReportContext ctx;
  try {
    if (summary.contains("config")) {
      const OptimizerConfig cfg = config_from_json(summary.at("config"));
      ctx.policy = cfg.step.kind;
      ctx.criterion = cfg.criterion;
      ctx.epsilon = cfg.epsilon;
    }
    if (summary.contains("l_rie") && summary.at("l_rie").is_number()) {
      ctx.l_rie = summary.at("l_rie").get<double>();
    }
    if (summary.contains("instance")) {
      const auto& inst = summary.at("instance");
      ctx.title = "Run report: N = " + std::to_string(inst.value("n", 0)) +
                  ", M = " + std::to_string(inst.value("m", 0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("summary: ") + e.what());
  }
  return ctx;
}

std::string render_markdown_report(const std::vector<IterationRecord>& records,
                                   const ReportContext& ctx) {
  if (records.empty()) {
    throw ConfigError("report: no records");
  }
  std::ostringstream md;
  md << "# " << ctx.title << "\n\n";
  const auto& last = records.back();
  const int iterations = last.k;
  md << "Iterations: " << iterations << "  \n";
  md << "Final q: " << format_double(last.q) << "  \n";
  md << "Final gradient norm: " << format_double(last.grad_norm) << "  \n";
  md << "Final gap: " << format_double(last.gap) << "\n\n";

  md << "## Convergence\n\n";
  md << "| k | q | grad_norm | gap | t |\n";
  md << "|---|---|---|---|---|\n";
  md << std::setprecision(6);
  for (const auto& r : records) {
    md << "| " << r.k << " | " << r.q << " | " << r.grad_norm << " | " << r.gap << " | " << r.t
       << " |\n";
  }
  md << "\n## Iteration bounds\n\n";
  if (ctx.policy == StepPolicyKind::one_shot) {
    md << "One-shot step: iterations used " << iterations << " <= bound 1 ("
       << (iterations <= 1 ? "within" : "exceeded") << ")\n";
  } else if (ctx.l_rie && ctx.epsilon) {
    const double l = *ctx.l_rie;
    const double eps = *ctx.epsilon;
    const bool pl = ctx.criterion == StopCriterion::gap;
    long bound = 0;
    if (pl) {
      bound = pl_iteration_bound(l, eps);
      md << "PL bound ceil(6 L ln(1/eps)) with L = " << l << ", eps = " << eps << ": " << bound
         << "\n\n";
    } else {
      bound = baseline_iteration_bound(l, eps);
      md << "Baseline bound ceil(2 L / eps^2) with L = " << l << ", eps = " << eps << ": "
         << bound << "\n\n";
    }
    const double ratio = static_cast<double>(iterations) / static_cast<double>(bound);
    md << "Iterations used / bound: " << iterations << " / " << bound << " = " << ratio << " ("
       << (ratio <= 1.0 ? "within" : "exceeded") << ")\n";
  } else {
    md << "No Lipschitz constant or tolerance available; bound comparison skipped.\n";
  }

  md << "\n## Data\n\n```text\nk,q,grad_norm,gap\n";
  for (const auto& r : records) {
    md << r.k << ',' << format_double(r.q) << ',' << format_double(r.grad_norm) << ','
       << format_double(r.gap) << '\n';
  }
  md << "```\n";
  return md.str();
}

// ---------------------------------------------------------------------------
// files

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open '" + path.string() + "'");
  }
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(dir);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

}  // namespace groveropt
