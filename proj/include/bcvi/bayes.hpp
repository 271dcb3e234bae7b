#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcvi/cvi.hpp"
#include "bcvi/error.hpp"

namespace bcvi {

/// Normalized, nonnegative transform of an index series over k = k_min..max_k().
struct RatioVector {
    int k_min = 2;
    Eigen::VectorXd r;
    double n = 0.0;          // data size multiplying r in the posterior update
    bool degenerate = false; // all index values equal, r is uniform

    int max_k() const noexcept { return k_min + static_cast<int>(r.size()) - 1; }
};

/// Condition A: r_k = (GI(k) - min GI) / sum. Condition B: r_k = (max GI - GI(k)) / sum.
RatioVector compute_ratios(const CviSeries& series, double n);

/// Dirichlet weights for k = k_min..K.
struct DirichletPrior {
    int k_min = 2;
    Eigen::VectorXd alpha;
};

/// Generalized Dirichlet parameters for k = k_min..K-1; p_K is implied.
struct GDPrior {
    int k_min = 2;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
};

enum class PriorKind { dirichlet, generalized_dirichlet };

inline const char* to_string(PriorKind k)
{
    return k == PriorKind::dirichlet ? "dirichlet" : "gd";
}

/// Posterior of the cluster-count probabilities. `mean(k - k_min)` is BCVI(k).
struct BcviResult {
    PriorKind kind = PriorKind::dirichlet;
    int k_min = 2;
    Eigen::VectorXd alpha_post; // K-1 entries (Dirichlet) or K-2 (GD)
    Eigen::VectorXd beta_post;  // GD only
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
    std::vector<int> ranking; // k values by mean, descending
    bool degenerate = false;  // ratios came from a constant series

    int max_k() const noexcept { return k_min + static_cast<int>(mean.size()) - 1; }
};

BcviResult dirichlet_posterior(const DirichletPrior& prior, const RatioVector& r);
BcviResult gd_posterior(const GDPrior& prior, const RatioVector& r);

/// E[p_2^s_2 ... p_{K-1}^s_{K-1}] under GD(alpha, beta), summed in log-Gamma form.
double gd_moment(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, std::span<const int> exponents);

/// E[p_K^s] for the implied last coordinate.
double gd_last_moment(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, int s);

/// k values sorted by `mean` descending; ties go to the smaller k.
std::vector<int> rank_by_mean(const Eigen::VectorXd& mean, int k_min);

struct ConfidenceSet {
    std::vector<int> ranking;
    std::vector<int> members; // the top_m values of ranking
    double mass = 0.0;        // summed posterior mean of members
};

ConfidenceSet bcvi_rank(const BcviResult& result, int top_m);

/// Named prior scenarios: preferred counts 2..4, 5..7 or 8..10.
enum class PriorProfile { small, moderate, large };

PriorProfile parse_profile(const std::string& name);
const char* to_string(PriorProfile p);

/// Dirichlet weights `in_weight * sqrt(n)` on the profile's preferred counts
/// and `out_weight * sqrt(n)` elsewhere, for k = 2..max_k.
DirichletPrior profile_prior(PriorProfile profile, int max_k, double n, double in_weight, double out_weight);

/// GD parameters whose posterior matches the Dirichlet with weights `alpha`
/// (beta_k = alpha_{k+1} + beta_{k+1}, beta_{K-1} = alpha_K).
GDPrior gd_from_dirichlet(const DirichletPrior& prior);

} // namespace bcvi
