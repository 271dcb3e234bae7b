#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bcvi/pipeline.hpp"

namespace bcvi {

namespace {

ordered_json optional_number(const std::optional<double>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw DataError("report schema: " + what);
}

void require_number_array(const ordered_json& j, const char* key)
{
    require(j.contains(key) && j[key].is_array(), std::string("'") + key + "' must be an array");
    for (const auto& v : j[key])
        require(v.is_number(), std::string("'") + key + "' must hold numbers");
}

} // namespace

ordered_json to_json(const ReportBundle& r)
{
    ordered_json meta;
    meta["dataset"] = r.dataset;
    meta["n"] = r.n;
    meta["p"] = r.p;
    meta["algorithm"] = to_string(r.algorithm);
    meta["fuzziness"] = r.fuzziness;
    meta["index"] = to_string(r.index);
    meta["direction"] = to_string(r.direction);
    meta["max_k"] = r.max_k;
    meta["db_q"] = r.q;
    meta["db_t"] = r.t;
    meta["gamma"] = optional_number(r.gamma);
    meta["slope_case"] = r.slope_case ? ordered_json(static_cast<int>(*r.slope_case)) : ordered_json(nullptr);
    meta["correlation_profile"] = r.correlation_profile;

    ordered_json prior;
    prior["kind"] = to_string(r.prior_kind);
    prior["profile"] = r.prior_profile ? ordered_json(to_string(*r.prior_profile)) : ordered_json(nullptr);
    prior["alpha"] = r.prior_alpha;
    prior["beta"] = r.prior_beta;
    prior["posterior_alpha"] = r.posterior_alpha;
    prior["posterior_beta"] = r.posterior_beta;
    meta["prior"] = std::move(prior);

    meta["seed"] = r.seed;
    meta["restarts"] = r.restarts;
    meta["degenerate_series"] = r.degenerate_series;
    meta["objectives"] = r.objectives;
    meta["accuracy"] = optional_number(r.accuracy);
    meta["accuracy_k"] = r.accuracy_k ? ordered_json(*r.accuracy_k) : ordered_json(nullptr);
    meta["confidence_set"] = {{"members", r.confidence.members}, {"mass", r.confidence.mass}};

    ordered_json records = ordered_json::array();
    for (const auto& rec : r.records)
        records.push_back({{"k", rec.k},
                           {"gi_value", rec.gi_value},
                           {"r", rec.ratio},
                           {"posterior_mean", rec.posterior_mean},
                           {"posterior_sd", rec.posterior_sd},
                           {"rank", rec.rank}});

    ordered_json out;
    out["format"] = "bcvi-report";
    out["version"] = 1;
    out["metadata"] = std::move(meta);
    out["records"] = std::move(records);
    return out;
}

void validate_report_json(const ordered_json& j)
{
    require(j.is_object(), "top level must be an object");
    require(j.value("format", "") == "bcvi-report", "format must be 'bcvi-report'");
    require(j.contains("version") && j["version"] == 1, "version must be 1");
    require(j.contains("metadata") && j["metadata"].is_object(), "missing metadata object");
    require(j.contains("records") && j["records"].is_array(), "missing records array");

    const auto& m = j["metadata"];
    for (const char* key : {"n", "p", "max_k", "restarts"})
        require(m.contains(key) && m[key].is_number_integer(), std::string("'") + key + "' must be an integer");
    for (const char* key : {"dataset", "algorithm", "index", "direction"})
        require(m.contains(key) && m[key].is_string(), std::string("'") + key + "' must be a string");
    for (const char* key : {"fuzziness", "db_q", "db_t"})
        require(m.contains(key) && m[key].is_number(), std::string("'") + key + "' must be a number");
    require(m.contains("seed") && m["seed"].is_number_unsigned(), "'seed' must be an unsigned integer");
    require(m.contains("degenerate_series") && m["degenerate_series"].is_boolean(),
            "'degenerate_series' must be a boolean");
    for (const char* key : {"gamma", "accuracy", "slope_case", "accuracy_k"})
        require(m.contains(key) && (m[key].is_null() || m[key].is_number()),
                std::string("'") + key + "' must be a number or null");
    const std::string dir = m["direction"];
    require(dir == "A" || dir == "B", "direction must be A or B");
    require_number_array(m, "correlation_profile");
    require_number_array(m, "objectives");

    require(m.contains("prior") && m["prior"].is_object(), "missing prior object");
    const auto& prior = m["prior"];
    require(prior.contains("kind") && (prior["kind"] == "dirichlet" || prior["kind"] == "gd"),
            "prior kind must be dirichlet or gd");
    require(prior.contains("profile") && (prior["profile"].is_null() || prior["profile"].is_string()),
            "prior profile must be a string or null");
    for (const char* key : {"alpha", "beta", "posterior_alpha", "posterior_beta"})
        require_number_array(prior, key);

    require(m.contains("confidence_set") && m["confidence_set"].is_object(), "missing confidence_set");
    require(m["confidence_set"].contains("members") && m["confidence_set"]["members"].is_array(),
            "confidence_set.members must be an array");
    require(m["confidence_set"].contains("mass") && m["confidence_set"]["mass"].is_number(),
            "confidence_set.mass must be a number");

    const int max_k = m["max_k"];
    const auto& recs = j["records"];
    require(recs.size() == static_cast<std::size_t>(max_k - 1), "records must cover k = 2..max_k");
    double total = 0.0;
    std::vector<int> ranks;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& rec = recs[i];
        require(rec.is_object(), "record must be an object");
        for (const char* key : {"k", "rank"})
            require(rec.contains(key) && rec[key].is_number_integer(), std::string("record '") + key + "' must be an integer");
        for (const char* key : {"gi_value", "r", "posterior_mean", "posterior_sd"})
            require(rec.contains(key) && rec[key].is_number(), std::string("record '") + key + "' must be a number");
        require(rec["k"] == static_cast<int>(i) + 2, "records must be ordered by k starting at 2");
        total += rec["posterior_mean"].get<double>();
        ranks.push_back(rec["rank"]);
    }
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < ranks.size(); ++i)
        require(ranks[i] == static_cast<int>(i) + 1, "ranks must be a permutation of 1..K-1");
    require(std::abs(total - 1.0) <= 1e-10, "posterior means must sum to 1");
}

std::vector<KRecord> records_from_json(const ordered_json& j)
{
    validate_report_json(j);
    std::vector<KRecord> out;
    for (const auto& rec : j["records"])
        out.push_back({rec["k"], rec["gi_value"], rec["r"], rec["posterior_mean"], rec["posterior_sd"], rec["rank"]});
    return out;
}

std::vector<PlotRow> plot_rows(std::span<const KRecord> records)
{
    std::vector<PlotRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        const double spread = 2.0 * r.posterior_sd;
        rows.push_back({r.k, r.posterior_mean, std::max(0.0, r.posterior_mean - spread),
                        std::min(1.0, r.posterior_mean + spread)});
    }
    return rows;
}

std::string plot_csv(std::span<const PlotRow> rows)
{
    std::ostringstream out;
    out.precision(17);
    out << "k,mean,lo,hi\n";
    for (const auto& r : rows)
        out << r.k << ',' << r.mean << ',' << r.lo << ',' << r.hi << '\n';
    return out.str();
}

void emit_plot_data(const ReportBundle& report, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << plot_csv(plot_rows(report.records));
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace bcvi
