#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcvi/clustering.hpp"
#include "bcvi/cvi.hpp"
#include "bcvi/paircorr.hpp"

namespace bcvi {

template <typename Scalar>
using HardPath = std::map<int, HardClustering<Scalar>>;

namespace detail {

template <typename Scalar>
Eigen::VectorXi cluster_sizes(const HardClustering<Scalar>& h)
{
    Eigen::VectorXi sizes = Eigen::VectorXi::Zero(h.k);
    for (Eigen::Index i = 0; i < h.assignments.size(); ++i)
        ++sizes(h.assignments(i));
    return sizes;
}

} // namespace detail

/// Davies-Bouldin value with scatter order q and Minkowski order t.
template <typename Derived>
double db_value(const Eigen::MatrixBase<Derived>& x, const HardClustering<typename Derived::Scalar>& h,
                double q = 2.0, double t = 2.0)
{
    if (!(q >= 1.0) || !(t >= 1.0))
        throw ConfigError("DB orders q and t must be at least 1");
    const int k = h.k;
    if (k < 2)
        throw IndexError("DB needs k >= 2");
    const Eigen::VectorXi sizes = detail::cluster_sizes(h);
    Eigen::VectorXd scatter = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double d = static_cast<double>((x.row(i) - h.centroids.row(h.assignments(i))).norm());
        scatter(h.assignments(i)) += std::pow(d, q);
    }
    for (int j = 0; j < k; ++j) {
        if (sizes(j) == 0)
            throw IndexError("DB: cluster " + std::to_string(j + 1) + " is empty at k=" + std::to_string(k));
        scatter(j) = std::pow(scatter(j) / sizes(j), 1.0 / q);
    }
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            if (j == i)
                continue;
            const double sep = std::pow(
                (h.centroids.row(i) - h.centroids.row(j)).template cast<double>().array().abs().pow(t).sum(),
                1.0 / t);
            if (sep == 0.0)
                throw IndexError("DB: centroids " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                 " coincide at k=" + std::to_string(k));
            worst = std::max(worst, (scatter(i) + scatter(j)) / sep);
        }
        total += worst;
    }
    return total / k;
}

template <typename Derived>
CviSeries db_series(const Eigen::MatrixBase<Derived>& x, const HardPath<typename Derived::Scalar>& path,
                    int max_k, double q = 2.0, double t = 2.0)
{
    CviSeries s{"db", Direction::smaller_is_better, 2, Eigen::VectorXd(max_k - 1), {}, {}};
    for (int k = 2; k <= max_k; ++k) {
        auto it = path.find(k);
        if (it == path.end())
            throw IndexError("DB: missing clustering for k=" + std::to_string(k));
        s.values(k - 2) = db_value(x, it->second, q, t);
    }
    return s;
}

/// E(k): total distance to the global centroid over total distance to own centroids.
template <typename Derived>
double starczewski_e(const Eigen::MatrixBase<Derived>& x, const HardClustering<typename Derived::Scalar>& h)
{
    const auto center = x.colwise().mean();
    double spread = 0.0, within = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        spread += static_cast<double>((x.row(i) - center).norm());
        within += static_cast<double>((x.row(i) - h.centroids.row(h.assignments(i))).norm());
    }
    if (within == 0.0)
        throw IndexError("STR: zero within-cluster distance at k=" + std::to_string(h.k));
    return spread / within;
}

/// D(k): largest over smallest centroid separation.
template <typename Scalar>
double starczewski_d(const HardClustering<Scalar>& h)
{
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < h.k; ++i)
        for (int j = i + 1; j < h.k; ++j) {
            const double d = static_cast<double>((h.centroids.row(i) - h.centroids.row(j)).norm());
            hi = std::max(hi, d);
            lo = std::min(lo, d);
        }
    if (!(lo > 0.0))
        throw IndexError("STR: coincident centroids at k=" + std::to_string(h.k));
    return hi / lo;
}

/// STR(k) = [E(k) - E(k-1)][D(k+1) - D(k)] for k = 2..K from
/// e = (E(1), ..., E(K)) and d = (D(2), ..., D(K+1)).
inline CviSeries str_series_from_profile(const Eigen::VectorXd& e, const Eigen::VectorXd& d)
{
    if (e.size() < 2 || d.size() != e.size())
        throw IndexError("STR: need E over 1..K and D over 2..K+1");
    const Eigen::Index kmax = e.size();
    CviSeries s{"str", Direction::larger_is_better, 2, Eigen::VectorXd(kmax - 1), {}, {}};
    for (Eigen::Index k = 2; k <= kmax; ++k)
        s.values(k - 2) = (e(k - 1) - e(k - 2)) * (d(k - 1) - d(k - 2));
    return s;
}

/// `path` must hold k = 2..max_k+1; E(1) = 1 since the only centroid is the global one.
template <typename Derived>
CviSeries str_series(const Eigen::MatrixBase<Derived>& x, const HardPath<typename Derived::Scalar>& path,
                     int max_k)
{
    Eigen::VectorXd e(max_k), d(max_k);
    e(0) = 1.0;
    for (int k = 2; k <= max_k + 1; ++k) {
        auto it = path.find(k);
        if (it == path.end())
            throw IndexError("STR: missing clustering for k=" + std::to_string(k));
        if (k <= max_k)
            e(k - 1) = starczewski_e(x, it->second);
        d(k - 2) = starczewski_d(it->second);
    }
    return str_series_from_profile(e, d);
}

/// Builds the WI series from a ready NC profile over k = 1..K+1.
inline CviSeries wi_from_profile(const Eigen::VectorXd& nc, std::string name = "wi")
{
    auto resolved = resolve_slope_index(nc);
    CviSeries s{std::move(name), Direction::larger_is_better, 2, std::move(resolved.values), nc,
                resolved.slope_case};
    return s;
}

/// Correlation profile: entry 0 is the baseline dispersion, entry k-1 the
/// correlation between point distances and centroid distances at k.
template <typename Derived>
Eigen::VectorXd nc_profile(const Eigen::MatrixBase<Derived>& x, const HardPath<typename Derived::Scalar>& path,
                           int max_k)
{
    Eigen::VectorXd nc(max_k + 1);
    nc(0) = baseline_dispersion(x).value;
    bool all_degenerate = true;
    for (int k = 2; k <= max_k + 1; ++k) {
        auto it = path.find(k);
        if (it == path.end())
            throw IndexError("WI: missing clustering for k=" + std::to_string(k));
        const auto corr = pair_distance_correlation(x, centroid_representatives(it->second));
        all_degenerate = all_degenerate && corr.degenerate;
        nc(k - 1) = corr.value;
    }
    if (all_degenerate)
        throw IndexError("WI: index undefined, correlation is degenerate at every k");
    return nc;
}

template <typename Derived>
CviSeries wi_series(const Eigen::MatrixBase<Derived>& x, const HardPath<typename Derived::Scalar>& path,
                    int max_k)
{
    return wi_from_profile(nc_profile(x, path, max_k), "wi");
}

} // namespace bcvi
