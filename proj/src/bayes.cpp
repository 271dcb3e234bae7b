#include "bcvi/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bcvi {

namespace {

void require_positive(const Eigen::VectorXd& v, const char* what)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!(v(i) > 0.0) || !std::isfinite(v(i)))
            throw BayesError(std::string(what) + " entry " + std::to_string(i) + " must be positive and finite");
}

} // namespace

RatioVector compute_ratios(const CviSeries& series, double n)
{
    const auto& gi = series.values;
    if (gi.size() < 2)
        throw BayesError("ratio vector needs an index series over at least k = 2..3");
    if (!gi.allFinite())
        throw BayesError("index series '" + series.index_name + "' has non-finite values");
    if (!(n >= 0.0) || !std::isfinite(n))
        throw BayesError("data size must be finite and nonnegative");

    RatioVector out;
    out.k_min = series.k_min;
    out.n = n;
    const double lo = gi.minCoeff(), hi = gi.maxCoeff();
    if (lo == hi) {
        out.r = Eigen::VectorXd::Constant(gi.size(), 1.0 / static_cast<double>(gi.size()));
        out.degenerate = true;
        return out;
    }
    const Eigen::VectorXd gap = series.direction == Direction::larger_is_better
                                    ? Eigen::VectorXd(gi.array() - lo)
                                    : Eigen::VectorXd(hi - gi.array());
    out.r = gap / gap.sum();
    return out;
}

BcviResult dirichlet_posterior(const DirichletPrior& prior, const RatioVector& r)
{
    if (prior.k_min != r.k_min || prior.alpha.size() != r.r.size())
        throw BayesError("Dirichlet prior covers k=" + std::to_string(prior.k_min) + ".." +
                         std::to_string(prior.k_min + prior.alpha.size() - 1) + ", ratios cover k=" +
                         std::to_string(r.k_min) + ".." + std::to_string(r.max_k()));
    require_positive(prior.alpha, "alpha");

    BcviResult out;
    out.kind = PriorKind::dirichlet;
    out.k_min = r.k_min;
    out.degenerate = r.degenerate;
    out.alpha_post = prior.alpha + r.n * r.r;
    const double total = out.alpha_post.sum();
    out.mean = out.alpha_post / total;
    out.variance = (out.alpha_post.array() * (total - out.alpha_post.array()) /
                    (total * total * (total + 1.0)))
                       .matrix();
    out.ranking = rank_by_mean(out.mean, out.k_min);
    return out;
}

BcviResult gd_posterior(const GDPrior& prior, const RatioVector& r)
{
    const Eigen::Index m = prior.alpha.size(); // K - 2
    if (m < 2)
        throw BayesError("GD prior needs K >= 4");
    if (prior.beta.size() != m || prior.k_min != r.k_min || r.r.size() != m + 1)
        throw BayesError("GD prior covers k=" + std::to_string(prior.k_min) + ".." +
                         std::to_string(prior.k_min + m - 1) + " (plus implied last), ratios cover k=" +
                         std::to_string(r.k_min) + ".." + std::to_string(r.max_k()));
    require_positive(prior.alpha, "alpha");
    require_positive(prior.beta, "beta");

    BcviResult out;
    out.kind = PriorKind::generalized_dirichlet;
    out.k_min = r.k_min;
    out.degenerate = r.degenerate;

    const Eigen::VectorXd mass = r.n * r.r;
    out.alpha_post = prior.alpha + mass.head(m);
    out.beta_post.resize(m);
    double tail = mass(m);
    for (Eigen::Index k = m - 1; k >= 0; --k) {
        out.beta_post(k) = prior.beta(k) + tail;
        tail += mass(k);
    }

    // Var = E[p]^2 (prod(1 + eps) - 1), accumulated through log1p/expm1.
    out.mean.resize(m + 1);
    out.variance.resize(m + 1);
    double stick = 1.0;     // prod_{i<k} beta'/(alpha'+beta')
    double stick_log = 0.0; // sum_{i<k} log1p(alpha'/(beta'(alpha'+beta'+1)))
    for (Eigen::Index k = 0; k < m; ++k) {
        const double a = out.alpha_post(k), b = out.beta_post(k);
        const double mean = a / (a + b) * stick;
        const double excess = stick_log + std::log1p(b / (a * (a + b + 1.0)));
        out.mean(k) = mean;
        out.variance(k) = mean * mean * std::expm1(excess);
        stick *= b / (a + b);
        stick_log += std::log1p(a / (b * (a + b + 1.0)));
    }
    out.mean(m) = stick;
    out.variance(m) = stick * stick * std::expm1(stick_log);
    out.ranking = rank_by_mean(out.mean, out.k_min);
    return out;
}

double gd_moment(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, std::span<const int> exponents)
{
    if (beta.size() != alpha.size() || static_cast<Eigen::Index>(exponents.size()) != alpha.size())
        throw BayesError("GD moment: parameter and exponent lengths differ");
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    if (std::any_of(exponents.begin(), exponents.end(), [](int s) { return s < 0; }))
        throw BayesError("GD moment: exponents must be nonnegative");

    double log_moment = 0.0;
    double delta = 0.0; // sum of exponents after k
    for (Eigen::Index k = alpha.size() - 1; k >= 0; --k) {
        const double a = alpha(k), b = beta(k), s = exponents[static_cast<std::size_t>(k)];
        log_moment += std::lgamma(a + b) + std::lgamma(a + s) + std::lgamma(b + delta) - std::lgamma(a) -
                      std::lgamma(b) - std::lgamma(a + b + s + delta);
        delta += s;
    }
    const double value = std::exp(log_moment);
    if (!std::isfinite(log_moment) || !std::isfinite(value))
        throw BayesError("GD moment overflows");
    return value;
}

double gd_last_moment(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, int s)
{
    if (beta.size() != alpha.size())
        throw BayesError("GD moment: parameter lengths differ");
    if (s < 0)
        throw BayesError("GD moment: exponent must be nonnegative");
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    double log_moment = 0.0;
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        const double a = alpha(k), b = beta(k);
        log_moment += std::lgamma(a + b) + std::lgamma(b + s) - std::lgamma(b) - std::lgamma(a + b + s);
    }
    const double value = std::exp(log_moment);
    if (!std::isfinite(log_moment) || !std::isfinite(value))
        throw BayesError("GD moment overflows");
    return value;
}

std::vector<int> rank_by_mean(const Eigen::VectorXd& mean, int k_min)
{
    std::vector<int> ks(static_cast<std::size_t>(mean.size()));
    std::iota(ks.begin(), ks.end(), k_min);
    std::stable_sort(ks.begin(), ks.end(), [&](int a, int b) { return mean(a - k_min) > mean(b - k_min); });
    return ks;
}

ConfidenceSet bcvi_rank(const BcviResult& result, int top_m)
{
    if (top_m < 1 || top_m > result.mean.size())
        throw BayesError("top_m must lie in [1, " + std::to_string(result.mean.size()) + "]");
    ConfidenceSet out;
    out.ranking = rank_by_mean(result.mean, result.k_min);
    out.members.assign(out.ranking.begin(), out.ranking.begin() + top_m);
    for (int k : out.members)
        out.mass += result.mean(k - result.k_min);
    return out;
}

PriorProfile parse_profile(const std::string& name)
{
    if (name == "small")
        return PriorProfile::small;
    if (name == "moderate")
        return PriorProfile::moderate;
    if (name == "large")
        return PriorProfile::large;
    throw ConfigError("unknown prior profile '" + name + "' (expected small, moderate or large)");
}

const char* to_string(PriorProfile p)
{
    switch (p) {
    case PriorProfile::small: return "small";
    case PriorProfile::moderate: return "moderate";
    case PriorProfile::large: return "large";
    }
    return "unknown";
}

DirichletPrior profile_prior(PriorProfile profile, int max_k, double n, double in_weight, double out_weight)
{
    if (max_k < 3)
        throw ConfigError("prior profile needs K >= 3");
    if (!(in_weight > 0.0) || !(out_weight > 0.0))
        throw ConfigError("profile weights must be positive");
    if (!(n > 0.0))
        throw ConfigError("profile weights scale with sqrt(n); n must be positive");
    int lo = 2, hi = 4;
    if (profile == PriorProfile::moderate) {
        lo = 5;
        hi = 7;
    } else if (profile == PriorProfile::large) {
        lo = 8;
        hi = 10;
    }
    const double scale = std::sqrt(n);
    DirichletPrior prior{2, Eigen::VectorXd(max_k - 1)};
    for (int k = 2; k <= max_k; ++k)
        prior.alpha(k - 2) = (k >= lo && k <= hi ? in_weight : out_weight) * scale;
    return prior;
}

GDPrior gd_from_dirichlet(const DirichletPrior& prior)
{
    const Eigen::Index m = prior.alpha.size() - 1;
    if (m < 1)
        throw BayesError("need at least two Dirichlet weights");
    GDPrior gd{prior.k_min, prior.alpha.head(m), Eigen::VectorXd(m)};
    double tail = prior.alpha(m);
    for (Eigen::Index k = m - 1; k >= 0; --k) {
        gd.beta(k) = tail;
        tail += prior.alpha(k);
    }
    return gd;
}

} // namespace bcvi
