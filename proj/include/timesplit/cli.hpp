#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace timesplit::cli {

enum class Method { cmc, res_notime, res_time };
enum class OutputFormat { json, csv };

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kModelError = 2;
inline constexpr int kBudgetDiagnostic = 3;

struct RunConfig {
    std::string model_path;
    double bound = 0.0;
    Method method = Method::cmc;
    std::uint32_t depth = 10;
    std::uint32_t effort = 16;
    std::optional<std::uint64_t> runs;
    std::optional<double> seconds;
    std::uint64_t seed = 0;
    /// Confidence level of the interval, 1 - delta.
    double confidence = 0.95;
    double clip_quantile = 1e-5;
    unsigned workers = 0;
    OutputFormat output = OutputFormat::json;
    /// estimate: file for the state-class graph (.dot or .json).
    /// analyze: output directory.
    std::string export_scg;
    /// CSV trace of one sample path.
    std::string trace;
};

std::string to_string(Method method);

/// Writes the report to `out`; diagnostics go to `err`.
int cmd_estimate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Writes locations.{dot,json}, scg.{dot,json}, classes.csv and
/// importance_histogram.csv into config.export_scg (default "analysis").
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parse, compile, validate and flatten; prints counts.
int cmd_validate(const std::string& model_path, double clip_quantile, std::ostream& out, std::ostream& err);

/// Command-line front end: `timesplit <estimate|analyze|validate> [flags]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace timesplit::cli
