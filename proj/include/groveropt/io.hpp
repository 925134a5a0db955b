#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "groveropt/verify.hpp"

namespace groveropt {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent user input (config, instance, candidate, CSV).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CsvError : public ConfigError {
 public:
  CsvError(int row, const std::string& message)
      : ConfigError("row " + std::to_string(row) + ": " + message), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

/// {"n", "marked"} or {"n", "m"} (first m basis states), or {"n", "h", "psi0"} with complex
/// entries as [re, im] pairs and h row-major.
SearchInstance instance_from_json(const Json& j);
Json instance_to_json(const SearchInstance& inst);

/// Overlays the optimizer keys present in `j` onto `base`. Instance keys are ignored;
/// anything else unknown is an error.
OptimizerConfig config_from_json(const Json& j, OptimizerConfig base = {});
Json config_to_json(const OptimizerConfig& cfg);

inline constexpr const char* kTraceHeader = "k,q,f,grad_norm,x,y,t,plane_residual,gap";

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& records);
std::string trace_csv(const std::vector<IterationRecord>& records);
/// Row numbers in errors count the header as row 1.
std::vector<IterationRecord> read_trace_csv(std::istream& in);

/// Effective config, instance summary, outcome and final record of a run.
Json trace_summary_json(const Trace& trace);

CandidateProduct candidate_from_json(const Json& j, const std::string& name);
Json velocity_report_json(const VelocityReport& report);
Json suite_report_json(const SuiteReport& report);

struct ReportContext {
  std::optional<StepPolicyKind> policy;
  std::optional<StopCriterion> criterion;
  std::optional<double> l_rie;
  std::optional<double> epsilon;
  std::string title = "Run report";
};

/// Reads the fields of a run summary that the report needs.
ReportContext report_context_from_summary(const Json& summary);

/// Convergence table, iteration-bound comparison and a plain CSV data block.
std::string render_markdown_report(const std::vector<IterationRecord>& records,
                                   const ReportContext& ctx);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace groveropt
