#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cmsbm/params.hpp"
#include "cmsbm/rounding.hpp"
#include "cmsbm/statistics.hpp"

namespace cmsbm {

enum class ExperimentKind { Detection, Recovery };

struct ArmSpec {
    std::string id;
    ModelParams params;
};

struct ExperimentPlan {
    ExperimentKind kind = ExperimentKind::Detection;
    std::vector<ArmSpec> arms;
    int trials = 100;
    std::uint64_t seed = 0;
    StatisticConfig statistic;
    // "all" for the full family, "color<c>" for the monochromatic family of
    // color c.
    std::vector<std::string> variants{"all"};
    ProjectionConfig projection;
    bool project = true;
    bool round = true;
    bool record_timings = false;
};

// Plan files are JSON (or TOML) objects:
//   kind, seed, trials, aleph, backend, c, b_collision_correction, variants,
//   base (model parameters), arms (list of overrides, each with an id and
//   either model fields or target_F), projection {floor, max_iters, tol},
//   project, round, record_timings.
ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan(const std::filesystem::path& path);

struct ExperimentRecord {
    std::string arm_id;
    char hypothesis = 'P';  // 'P' planted, 'Q' null
    std::uint64_t seed = 0;
    std::string variant;
    double value = 0.0;
    double f_intro = 0.0;
    double f_sec3 = 0.0;
    double sigma_plus = 0.0;
    std::optional<double> auc;
    std::optional<double> cosine;
    std::optional<double> elapsed;
};

struct ArmSummary {
    std::string arm_id;
    std::string variant;
    double f_intro = 0.0;
    double f_sec3 = 0.0;
    double sigma_plus = 0.0;
    std::optional<double> auc;
    double mean_value = 0.0;
    double se_value = 0.0;
    std::optional<double> mean_cosine;
    std::optional<double> se_cosine;
    int trials = 0;
    int failures = 0;  // trials whose value is not finite
};

// Feasibility report of one projected trial; not part of the CSV.
struct ProjectionTrial {
    std::string arm_id;
    std::uint64_t seed = 0;
    bool converged = false;
    ProjectionDiagnostics diagnostics;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;
    std::vector<ArmSummary> summary;
    std::vector<ProjectionTrial> projections;  // recovery runs with projection, in trial order
};

std::uint64_t trial_seed(std::uint64_t base, std::size_t arm, std::size_t trial);

ExperimentResult run_detection_experiment(const ExperimentPlan& plan, int threads);
ExperimentResult run_recovery_experiment(const ExperimentPlan& plan, int threads);
ExperimentResult run_experiment(const ExperimentPlan& plan, int threads);

// Area under the ROC curve, positives against negatives, ties counted half.
double auc_rank(const std::vector<double>& positives, const std::vector<double>& negatives);
double auc_trapezoid(const std::vector<double>& positives, const std::vector<double>& negatives);

inline constexpr const char* kCsvSchema = "#cmsbm-csv-v1";

std::string records_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_records_csv(const std::string& text);
std::string summary_csv(const std::vector<ArmSummary>& summary);

// Renders plots from a records CSV: ROC curves and AUC against F for
// detection, cosine against F for recovery. Returns (file name, SVG text).
std::vector<std::pair<std::string, std::string>> emit_plots(const std::string& records_csv_text);

// Writes records.csv, summary.csv and, when plots is set, the SVG files.
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result, bool plots);

// Thread count from CMSBM_THREADS, else hardware concurrency (at least 1).
int default_threads();

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace cmsbm
