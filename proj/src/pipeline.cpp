#include "bcvi/pipeline.hpp"

#include <cmath>
#include <map>

#include "bcvi/cvi_hard.hpp"
#include "bcvi/cvi_soft.hpp"
#include "bcvi/parallel.hpp"

namespace bcvi {

Algorithm parse_algorithm(const std::string& s)
{
    if (s == "kmeans")
        return Algorithm::kmeans;
    if (s == "fcm")
        return Algorithm::fcm;
    throw ConfigError("unknown algorithm '" + s + "' (expected kmeans or fcm)");
}

IndexKind parse_index(const std::string& s)
{
    static const std::map<std::string, IndexKind> names{
        {"db", IndexKind::db}, {"str", IndexKind::str},     {"wi", IndexKind::wi},
        {"xb", IndexKind::xb}, {"kwon2", IndexKind::kwon2}, {"wp", IndexKind::wp}};
    auto it = names.find(s);
    if (it == names.end())
        throw ConfigError("unknown index '" + s + "' (expected db, str, wi, xb, kwon2 or wp)");
    return it->second;
}

const char* to_string(Algorithm a) { return a == Algorithm::kmeans ? "kmeans" : "fcm"; }

const char* to_string(IndexKind i)
{
    switch (i) {
    case IndexKind::db: return "db";
    case IndexKind::str: return "str";
    case IndexKind::wi: return "wi";
    case IndexKind::xb: return "xb";
    case IndexKind::kwon2: return "kwon2";
    case IndexKind::wp: return "wp";
    }
    return "unknown";
}

Algorithm algorithm_for(IndexKind index)
{
    switch (index) {
    case IndexKind::db:
    case IndexKind::str:
    case IndexKind::wi: return Algorithm::kmeans;
    default: return Algorithm::fcm;
    }
}

void validate(const PipelineConfig& c)
{
    if (c.data_path.has_value() == c.mixture.has_value())
        throw ConfigError("exactly one data source (CSV path or mixture) is required");
    if (algorithm_for(c.index) != c.algorithm)
        throw ConfigError(std::string("index ") + to_string(c.index) + " requires algorithm " +
                          to_string(algorithm_for(c.index)));
    if (c.max_k < 3)
        throw ConfigError("max-k must be at least 3");
    if (c.algorithm == Algorithm::fcm && !(c.fuzziness > 1.0))
        throw ConfigError("fuzziness must exceed 1");
    if (!(c.q >= 1.0) || !(c.t >= 1.0))
        throw ConfigError("DB orders q and t must be at least 1");
    if (c.gamma && !(*c.gamma > 0.0))
        throw ConfigError("gamma must be positive");
    if (c.top_m < 1 || c.top_m > c.max_k - 1)
        throw ConfigError("top-m must lie in [1, K-1]");
    validate(c.run);

    const auto& p = c.prior;
    if (p.kind == PriorKind::generalized_dirichlet) {
        if (c.max_k < 4)
            throw ConfigError("generalized Dirichlet prior needs max-k >= 4");
        if (p.profile)
            throw ConfigError("named profiles apply to Dirichlet priors only");
        const std::size_t m = static_cast<std::size_t>(c.max_k - 2);
        if ((p.alpha.size() != 1 && p.alpha.size() != m) || (p.beta.size() != 1 && p.beta.size() != m))
            throw ConfigError("GD prior needs " + std::to_string(m) + " alpha and beta values (k=2..K-1)");
    } else if (!p.profile) {
        const std::size_t m = static_cast<std::size_t>(c.max_k - 1);
        if (p.alpha.size() != 1 && p.alpha.size() != m)
            throw ConfigError("Dirichlet prior needs " + std::to_string(m) + " alpha values (k=2..K)");
    }
}

Dataset load_input(const PipelineConfig& config)
{
    if (config.data_path)
        return load_csv(*config.data_path, config.label_column);
    if (config.mixture)
        return generate_mixture(*config.mixture);
    throw ConfigError("no data source configured");
}

namespace {

Eigen::VectorXd broadcast(const std::vector<double>& v, Eigen::Index size)
{
    if (v.size() == 1)
        return Eigen::VectorXd::Constant(size, v.front());
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

template <typename Fit>
auto fit_path(int max_k, Fit&& fit)
{
    using Result = decltype(fit(2));
    std::vector<Result> fits(static_cast<std::size_t>(max_k));
    detail::parallel_for(fits.size(), [&](std::size_t i) {
        const int k = static_cast<int>(i) + 2;
        try {
            fits[i] = fit(k);
        } catch (const Error& e) {
            throw Error(e.error_class(), std::string(e.what()) + " (at k=" + std::to_string(k) + ")");
        }
    });
    std::map<int, Result> path;
    for (std::size_t i = 0; i < fits.size(); ++i)
        path.emplace(static_cast<int>(i) + 2, std::move(fits[i]));
    return path;
}

Eigen::VectorXi hard_labels(const SoftClustering<double>& s)
{
    Eigen::VectorXi a(s.membership.rows());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        s.membership.row(i).maxCoeff(&a(i));
    return a;
}

double accuracy_of(const Dataset& data, const Eigen::VectorXi& assignments)
{
    const auto& labels = *data.labels();
    return clustering_accuracy(labels, std::span<const int>(assignments.data(), static_cast<std::size_t>(assignments.size())));
}

} // namespace

ReportBundle run_pipeline(const Dataset& data, const PipelineConfig& config)
{
    validate(config);
    const int max_k = config.max_k;
    const auto& x = data.points();
    if (max_k + 1 > data.size())
        throw ConfigError("max-k + 1 = " + std::to_string(max_k + 1) + " exceeds the " +
                          std::to_string(data.size()) + " data points");
    if (data.size() < 3)
        throw DataError("need at least 3 points");

    ReportBundle rep;
    rep.dataset = data.name();
    rep.n = data.size();
    rep.p = data.dims();
    rep.algorithm = config.algorithm;
    rep.fuzziness = config.fuzziness;
    rep.index = config.index;
    rep.max_k = max_k;
    rep.q = config.q;
    rep.t = config.t;
    rep.seed = config.run.seed;
    rep.restarts = config.run.restarts;

    CviSeries series;
    std::optional<Eigen::VectorXi> accuracy_assignments;
    const int classes = data.num_classes();

    if (config.algorithm == Algorithm::kmeans) {
        const auto path = fit_path(max_k, [&](int k) { return kmeans(x, k, config.run); });
        for (const auto& [k, h] : path)
            rep.objectives.push_back(h.objective);
        switch (config.index) {
        case IndexKind::db: series = db_series(x, path, max_k, config.q, config.t); break;
        case IndexKind::str: series = str_series(x, path, max_k); break;
        default: series = wi_series(x, path, max_k); break;
        }
        if (classes >= 1) {
            auto it = path.find(classes);
            accuracy_assignments = it != path.end() ? it->second.assignments
                                                    : kmeans(x, classes, config.run).assignments;
        }
    } else {
        const double m = config.fuzziness;
        const auto path = fit_path(max_k, [&](int k) { return fcm(x, k, m, config.run); });
        for (const auto& [k, s] : path)
            rep.objectives.push_back(s.objective);
        switch (config.index) {
        case IndexKind::xb: series = xb_series(x, path, max_k); break;
        case IndexKind::kwon2: series = kwon2_series(x, path, max_k); break;
        default:
            rep.gamma = config.gamma.value_or(m);
            series = wp_series(x, path, max_k, *rep.gamma);
            break;
        }
        if (classes >= 2) {
            auto it = path.find(classes);
            accuracy_assignments = hard_labels(it != path.end() ? it->second : fcm(x, classes, m, config.run));
        }
    }
    rep.direction = series.direction;
    rep.slope_case = series.slope_case;
    rep.correlation_profile = to_vector(series.profile);

    if (accuracy_assignments) {
        rep.accuracy = accuracy_of(data, *accuracy_assignments);
        rep.accuracy_k = classes;
    }
    if (config.require_accuracy) {
        if (!rep.accuracy)
            throw DataError("accuracy gate requested but the data has no labels");
        if (*rep.accuracy < *config.require_accuracy)
            throw DataError("clustering accuracy " + std::to_string(*rep.accuracy) + " at k=" +
                            std::to_string(classes) + " is below the required " +
                            std::to_string(*config.require_accuracy));
    }

    const auto ratios = compute_ratios(series, static_cast<double>(data.size()));
    rep.degenerate_series = ratios.degenerate;

    BcviResult post;
    const auto& ps = config.prior;
    rep.prior_kind = ps.kind;
    if (ps.kind == PriorKind::dirichlet) {
        DirichletPrior prior{2, {}};
        if (ps.profile) {
            rep.prior_profile = ps.profile;
            prior = profile_prior(*ps.profile, max_k, static_cast<double>(data.size()), ps.in_weight, ps.out_weight);
        } else {
            prior.alpha = broadcast(ps.alpha, max_k - 1);
        }
        rep.prior_alpha = to_vector(prior.alpha);
        post = dirichlet_posterior(prior, ratios);
    } else {
        GDPrior prior{2, broadcast(ps.alpha, max_k - 2), broadcast(ps.beta, max_k - 2)};
        rep.prior_alpha = to_vector(prior.alpha);
        rep.prior_beta = to_vector(prior.beta);
        post = gd_posterior(prior, ratios);
    }
    rep.posterior_alpha = to_vector(post.alpha_post);
    rep.posterior_beta = to_vector(post.beta_post);
    rep.confidence = bcvi_rank(post, config.top_m);

    std::vector<int> rank_of(static_cast<std::size_t>(max_k + 1), 0);
    for (std::size_t pos = 0; pos < post.ranking.size(); ++pos)
        rank_of[static_cast<std::size_t>(post.ranking[pos])] = static_cast<int>(pos) + 1;
    for (int k = 2; k <= max_k; ++k) {
        const auto i = k - 2;
        rep.records.push_back({k, series.values(i), ratios.r(i), post.mean(i), std::sqrt(post.variance(i)),
                               rank_of[static_cast<std::size_t>(k)]});
    }
    return rep;
}

ReportBundle run_pipeline(const PipelineConfig& config)
{
    validate(config);
    return run_pipeline(load_input(config), config);
}

} // namespace bcvi
