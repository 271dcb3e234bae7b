#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcvi/bayes.hpp"
#include "bcvi/clustering.hpp"
#include "bcvi/cvi.hpp"
#include "bcvi/datasets.hpp"

namespace bcvi {

enum class Algorithm { kmeans, fcm };
enum class IndexKind { db, str, wi, xb, kwon2, wp };

Algorithm parse_algorithm(const std::string& s);
IndexKind parse_index(const std::string& s);
const char* to_string(Algorithm a);
const char* to_string(IndexKind i);

/// K-means pairs with db/str/wi, FCM with xb/kwon2/wp.
Algorithm algorithm_for(IndexKind index);

/// Either a named profile (Dirichlet only) or explicit weights. A single
/// explicit value is broadcast over every k.
struct PriorSpec {
    PriorKind kind = PriorKind::dirichlet;
    std::optional<PriorProfile> profile;
    double in_weight = 20.0;
    double out_weight = 1.0;
    std::vector<double> alpha{1.0};
    std::vector<double> beta;
};

struct PipelineConfig {
    std::optional<std::filesystem::path> data_path;
    std::optional<std::string> label_column;
    std::optional<MixtureSpec> mixture;

    Algorithm algorithm = Algorithm::kmeans;
    IndexKind index = IndexKind::wi;
    double fuzziness = 2.0;
    int max_k = 10;
    double q = 2.0;
    double t = 2.0;
    std::optional<double> gamma; // WP exponent, defaults to fuzziness
    PriorSpec prior;
    RunOptions run;
    int top_m = 3;
    std::optional<double> require_accuracy;
};

/// Throws ConfigError on inconsistent settings that do not depend on the data.
void validate(const PipelineConfig& config);

struct KRecord {
    int k = 0;
    double gi_value = 0.0;
    double ratio = 0.0;
    double posterior_mean = 0.0;
    double posterior_sd = 0.0;
    int rank = 0;
};

struct ReportBundle {
    std::vector<KRecord> records;

    std::string dataset;
    long long n = 0;
    long long p = 0;
    Algorithm algorithm = Algorithm::kmeans;
    double fuzziness = 2.0;
    IndexKind index = IndexKind::wi;
    Direction direction = Direction::larger_is_better;
    int max_k = 0;
    double q = 2.0;
    double t = 2.0;
    std::optional<double> gamma;
    std::optional<SlopeCase> slope_case;
    std::vector<double> correlation_profile;

    PriorKind prior_kind = PriorKind::dirichlet;
    std::optional<PriorProfile> prior_profile;
    std::vector<double> prior_alpha;
    std::vector<double> prior_beta;
    std::vector<double> posterior_alpha;
    std::vector<double> posterior_beta;

    std::uint64_t seed = 0;
    int restarts = 0;
    bool degenerate_series = false;
    std::vector<double> objectives; // best objective per fitted k = 2..K+1

    std::optional<double> accuracy;
    std::optional<int> accuracy_k;
    ConfidenceSet confidence;
};

/// Loads or generates the data named by `config`.
Dataset load_input(const PipelineConfig& config);

/// Fits k = 2..K+1, evaluates the index, forms ratios and the posterior.
ReportBundle run_pipeline(const Dataset& data, const PipelineConfig& config);
ReportBundle run_pipeline(const PipelineConfig& config);

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const ReportBundle& report);

/// Throws DataError naming the first schema violation.
void validate_report_json(const ordered_json& report);

/// Per-k records of a serialized report.
std::vector<KRecord> records_from_json(const ordered_json& report);

struct PlotRow {
    int k = 0;
    double mean = 0.0;
    double lo = 0.0; // mean - 2 sd, clamped at 0
    double hi = 0.0; // mean + 2 sd, clamped at 1
};

std::vector<PlotRow> plot_rows(std::span<const KRecord> records);
std::string plot_csv(std::span<const PlotRow> rows);
void emit_plot_data(const ReportBundle& report, const std::filesystem::path& path);

} // namespace bcvi
