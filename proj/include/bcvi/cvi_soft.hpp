#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "bcvi/clustering.hpp"
#include "bcvi/cvi.hpp"
#include "bcvi/cvi_hard.hpp"
#include "bcvi/paircorr.hpp"

namespace bcvi {

template <typename Scalar>
using SoftPath = std::map<int, SoftClustering<Scalar>>;

namespace detail {

template <typename Scalar>
double min_centroid_separation_sq(const SoftClustering<Scalar>& s, const char* index)
{
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.c; ++i)
        for (int j = i + 1; j < s.c; ++j)
            lo = std::min(lo, static_cast<double>((s.centroids.row(i) - s.centroids.row(j)).squaredNorm()));
    if (!(lo > 0.0))
        throw IndexError(std::string(index) + ": coincident centroids at k=" + std::to_string(s.c));
    return lo;
}

template <typename Derived>
double weighted_scatter(const Eigen::MatrixBase<Derived>& x, const SoftClustering<typename Derived::Scalar>& s,
                        double exponent)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (int j = 0; j < s.c; ++j)
            total += std::pow(static_cast<double>(s.membership(i, j)), exponent) *
                     static_cast<double>((x.row(i) - s.centroids.row(j)).squaredNorm());
    return total;
}

} // namespace detail

/// Xie-Beni: membership-squared scatter over n times the smallest squared separation.
template <typename Derived>
double xb_value(const Eigen::MatrixBase<Derived>& x, const SoftClustering<typename Derived::Scalar>& s)
{
    if (s.c < 2)
        throw IndexError("XB needs k >= 2");
    const double sep = detail::min_centroid_separation_sq(s, "XB");
    return detail::weighted_scatter(x, s, 2.0) / (static_cast<double>(x.rows()) * sep);
}

/// Membership exponent used by KWON2, 2^sqrt(m/2).
inline double kwon2_exponent(double m) { return std::pow(2.0, std::sqrt(m / 2.0)); }

/// KWON2 with fuzziness taken from the clustering.
template <typename Derived>
double kwon2_value(const Eigen::MatrixBase<Derived>& x, const SoftClustering<typename Derived::Scalar>& s)
{
    const double n = static_cast<double>(x.rows());
    const double k = s.c;
    const double m = static_cast<double>(s.fuzziness);
    if (s.c < 2 || k > n)
        throw IndexError("KWON2 needs 2 <= k <= n, got k=" + std::to_string(s.c));
    const double sep = detail::min_centroid_separation_sq(s, "KWON2");

    const auto center = x.colwise().mean();
    double spread_sum = 0.0, spread_max = 0.0;
    for (int j = 0; j < s.c; ++j) {
        const double d = static_cast<double>((s.centroids.row(j) - center).squaredNorm());
        spread_sum += d;
        spread_max = std::max(spread_max, d);
    }
    if (!(spread_max > 0.0))
        throw IndexError("KWON2: every centroid equals the data centroid at k=" + std::to_string(s.c));

    const double w1 = (n - k + 1.0) / n;
    const double w2 = std::pow(k / (k - 1.0), std::sqrt(2.0));
    const double w3 = n * k / ((n - k + 1.0) * (n - k + 1.0));
    const double scatter = detail::weighted_scatter(x, s, kwon2_exponent(m));
    const double numerator = w1 * (w2 * scatter + spread_sum / spread_max + w3);
    const double denominator = sep + 1.0 / k + 1.0 / std::pow(k, m - 1.0);
    return numerator / denominator;
}

template <typename Derived>
CviSeries xb_series(const Eigen::MatrixBase<Derived>& x, const SoftPath<typename Derived::Scalar>& path,
                    int max_k)
{
    CviSeries s{"xb", Direction::smaller_is_better, 2, Eigen::VectorXd(max_k - 1), {}, {}};
    for (int k = 2; k <= max_k; ++k) {
        auto it = path.find(k);
        if (it == path.end())
            throw IndexError("XB: missing clustering for k=" + std::to_string(k));
        s.values(k - 2) = xb_value(x, it->second);
    }
    return s;
}

template <typename Derived>
CviSeries kwon2_series(const Eigen::MatrixBase<Derived>& x, const SoftPath<typename Derived::Scalar>& path,
                       int max_k)
{
    CviSeries s{"kwon2", Direction::smaller_is_better, 2, Eigen::VectorXd(max_k - 1), {}, {}};
    for (int k = 2; k <= max_k; ++k) {
        auto it = path.find(k);
        if (it == path.end())
            throw IndexError("KWON2: missing clustering for k=" + std::to_string(k));
        s.values(k - 2) = kwon2_value(x, it->second);
    }
    return s;
}

/// WPC profile over k = 1..max_k+1 using fuzzy representatives with exponent gamma.
template <typename Derived>
Eigen::VectorXd wpc_profile(const Eigen::MatrixBase<Derived>& x, const SoftPath<typename Derived::Scalar>& path,
                            int max_k, typename Derived::Scalar gamma)
{
    Eigen::VectorXd wpc(max_k + 1);
    wpc(0) = baseline_dispersion(x).value;
    bool all_degenerate = true;
    for (int k = 2; k <= max_k + 1; ++k) {
        auto it = path.find(k);
        if (it == path.end())
            throw IndexError("WP: missing clustering for k=" + std::to_string(k));
        const auto corr = pair_distance_correlation(x, fuzzy_representatives(it->second, gamma));
        all_degenerate = all_degenerate && corr.degenerate;
        wpc(k - 1) = corr.value;
    }
    if (all_degenerate)
        throw IndexError("WP: index undefined, correlation is degenerate at every k");
    return wpc;
}

template <typename Derived>
CviSeries wp_series(const Eigen::MatrixBase<Derived>& x, const SoftPath<typename Derived::Scalar>& path,
                    int max_k, typename Derived::Scalar gamma)
{
    return wi_from_profile(wpc_profile(x, path, max_k, gamma), "wp");
}

} // namespace bcvi
