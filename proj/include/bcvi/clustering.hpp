#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcvi/error.hpp"
#include "bcvi/parallel.hpp"

namespace bcvi {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct RunOptions {
    int max_iterations = 200;
    double tolerance = 1e-6; // on the largest centroid displacement
    int restarts = 20;
    std::uint64_t seed = 0;
};

inline void validate(const RunOptions& opts)
{
    if (opts.max_iterations < 1)
        throw ConfigError("max_iterations must be positive");
    if (!(opts.tolerance > 0.0))
        throw ConfigError("tolerance must be positive");
    if (opts.restarts < 1)
        throw ConfigError("restarts must be positive");
}

/// K-means result. `assignments` are 0-based cluster ids in [0, k).
template <typename Scalar>
struct HardClustering {
    int k = 0;
    Eigen::VectorXi assignments;
    MatrixX<Scalar> centroids; // k x p
    Scalar objective = 0;      // within-cluster sum of squares
    int iterations = 0;
    bool converged = false;
    std::vector<Scalar> objective_trace;
};

/// Fuzzy c-means result.
template <typename Scalar>
struct SoftClustering {
    int c = 0;
    MatrixX<Scalar> membership; // n x c, rows sum to 1
    MatrixX<Scalar> centroids;  // c x p
    Scalar fuzziness = 2;
    Scalar objective = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<Scalar> objective_trace;
};

/// Seed of restart `index`, a splitmix64 step away from `base`.
constexpr std::uint64_t restart_seed(std::uint64_t base, std::uint64_t index) noexcept
{
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {

inline std::vector<Eigen::Index> sample_distinct(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng)
{
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = 0; i < k; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

template <typename Derived, typename Scalar>
Eigen::Index nearest_centroid(const Eigen::MatrixBase<Derived>& point, const MatrixX<Scalar>& centroids)
{
    Eigen::Index best = 0;
    Scalar best_d = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
        const Scalar d = (centroids.row(j) - point).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

} // namespace detail

/// Argmin-distance assignment of every row of `x` (ties go to the lower id).
template <typename Derived>
Eigen::VectorXi assign_nearest(const Eigen::MatrixBase<Derived>& x,
                               const MatrixX<typename Derived::Scalar>& centroids)
{
    Eigen::VectorXi a(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        a(i) = static_cast<int>(detail::nearest_centroid(x.row(i), centroids));
    return a;
}

template <typename Derived>
typename Derived::Scalar within_cluster_ss(const Eigen::MatrixBase<Derived>& x,
                                           const Eigen::VectorXi& assignments,
                                           const MatrixX<typename Derived::Scalar>& centroids)
{
    typename Derived::Scalar total = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        total += (x.row(i) - centroids.row(assignments(i))).squaredNorm();
    return total;
}

/// Cluster means of an assignment. Rows of empty clusters are left as in `fallback`.
template <typename Derived>
MatrixX<typename Derived::Scalar> cluster_means(const Eigen::MatrixBase<Derived>& x,
                                                const Eigen::VectorXi& assignments, int k,
                                                const MatrixX<typename Derived::Scalar>& fallback)
{
    using Scalar = typename Derived::Scalar;
    MatrixX<Scalar> sums = MatrixX<Scalar>::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        sums.row(assignments(i)) += x.row(i);
        ++counts(assignments(i));
    }
    for (int j = 0; j < k; ++j)
        sums.row(j) = counts(j) > 0 ? MatrixX<Scalar>(sums.row(j) / static_cast<Scalar>(counts(j)))
                                    : MatrixX<Scalar>(fallback.row(j));
    return sums;
}

/// One Lloyd run from `k` distinct data points drawn with `init_seed`.
/// Empty clusters are reseeded with the point farthest from its centroid.
template <typename Derived>
HardClustering<typename Derived::Scalar> kmeans_once(const Eigen::MatrixBase<Derived>& x, int k,
                                                     std::uint64_t init_seed, const RunOptions& opts)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.rows();
    if (k < 1 || k > n)
        throw ClusteringError("k-means: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    validate(opts);

    std::mt19937_64 rng(init_seed);
    const auto seeds = detail::sample_distinct(n, k, rng);
    HardClustering<Scalar> out;
    out.k = k;
    out.centroids.resize(k, x.cols());
    for (int j = 0; j < k; ++j)
        out.centroids.row(j) = x.row(seeds[static_cast<std::size_t>(j)]);

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        out.iterations = iter;
        out.assignments = assign_nearest(x, out.centroids);

        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i)
            ++counts(out.assignments(i));
        for (int j = 0; j < k; ++j) {
            if (counts(j) > 0)
                continue;
            Eigen::Index far = -1;
            Scalar far_d = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                const int a = out.assignments(i);
                if (counts(a) < 2)
                    continue;
                const Scalar d = (x.row(i) - out.centroids.row(a)).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            --counts(out.assignments(far));
            out.assignments(far) = j;
            counts(j) = 1;
            out.centroids.row(j) = x.row(far);
        }

        MatrixX<Scalar> updated = cluster_means(x, out.assignments, k, out.centroids);
        const Scalar shift = (updated - out.centroids).rowwise().norm().maxCoeff();
        out.centroids = std::move(updated);
        out.objective = within_cluster_ss(x, out.assignments, out.centroids);
        out.objective_trace.push_back(out.objective);

        if (shift < static_cast<Scalar>(opts.tolerance) &&
            assign_nearest(x, out.centroids) == out.assignments) {
            out.converged = true;
            break;
        }
    }
    return out;
}

/// Closed-form FCM membership update for fixed centroids. A point sitting on
/// one or more centroids gets its membership split evenly over those.
template <typename Derived>
MatrixX<typename Derived::Scalar> fcm_memberships(const Eigen::MatrixBase<Derived>& x,
                                                  const MatrixX<typename Derived::Scalar>& centroids,
                                                  typename Derived::Scalar m)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index c = centroids.rows();
    const Scalar power = Scalar(1) / (m - Scalar(1));
    MatrixX<Scalar> u(x.rows(), c);
    VectorX<Scalar> d2(c);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < c; ++j)
            d2(j) = (x.row(i) - centroids.row(j)).squaredNorm();
        const Scalar dmin = d2.minCoeff();
        if (dmin == Scalar(0)) {
            const auto hits = (d2.array() == Scalar(0)).count();
            for (Eigen::Index j = 0; j < c; ++j)
                u(i, j) = d2(j) == Scalar(0) ? Scalar(1) / static_cast<Scalar>(hits) : Scalar(0);
            continue;
        }
        // (d_min / d_j)^(2/(m-1)) lies in (0, 1], so the sum cannot overflow.
        for (Eigen::Index j = 0; j < c; ++j)
            u(i, j) = std::pow(dmin / d2(j), power);
        u.row(i) /= u.row(i).sum();
    }
    return u;
}

template <typename Derived>
typename Derived::Scalar fcm_objective(const Eigen::MatrixBase<Derived>& x,
                                       const MatrixX<typename Derived::Scalar>& membership,
                                       const MatrixX<typename Derived::Scalar>& centroids,
                                       typename Derived::Scalar m)
{
    typename Derived::Scalar total = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < centroids.rows(); ++j)
            total += std::pow(membership(i, j), m) * (x.row(i) - centroids.row(j)).squaredNorm();
    return total;
}

/// One fuzzy c-means run started from `c` distinct data points. The returned
/// membership is recomputed from the final centroids.
template <typename Derived>
SoftClustering<typename Derived::Scalar> fcm_once(const Eigen::MatrixBase<Derived>& x, int c,
                                                  typename Derived::Scalar m, std::uint64_t init_seed,
                                                  const RunOptions& opts)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.rows();
    if (c < 2 || c > n)
        throw ClusteringError("fcm: c=" + std::to_string(c) + " outside [2, " + std::to_string(n) + "]");
    if (!(m > Scalar(1)))
        throw ClusteringError("fcm: fuzziness must exceed 1");
    validate(opts);

    std::mt19937_64 rng(init_seed);
    const auto seeds = detail::sample_distinct(n, c, rng);
    SoftClustering<Scalar> out;
    out.c = c;
    out.fuzziness = m;
    out.centroids.resize(c, x.cols());
    for (int j = 0; j < c; ++j)
        out.centroids.row(j) = x.row(seeds[static_cast<std::size_t>(j)]);

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        out.iterations = iter;
        out.membership = fcm_memberships(x, out.centroids, m);
        const MatrixX<Scalar> w = out.membership.array().pow(m).matrix();
        MatrixX<Scalar> updated = w.transpose() * x;
        for (int j = 0; j < c; ++j) {
            const Scalar mass = w.col(j).sum();
            if (mass > Scalar(0))
                updated.row(j) /= mass;
            else
                updated.row(j) = out.centroids.row(j);
        }
        const Scalar shift = (updated - out.centroids).rowwise().norm().maxCoeff();
        out.centroids = std::move(updated);
        out.objective = fcm_objective(x, out.membership, out.centroids, m);
        out.objective_trace.push_back(out.objective);
        if (shift < static_cast<Scalar>(opts.tolerance)) {
            out.converged = true;
            break;
        }
    }
    out.membership = fcm_memberships(x, out.centroids, m);
    out.objective = fcm_objective(x, out.membership, out.centroids, m);
    out.objective_trace.push_back(out.objective);
    return out;
}

/// Runs `opts.restarts` fits, restart r seeded with restart_seed(opts.seed, r),
/// and keeps the smallest objective (lowest restart index on ties).
template <typename Fit>
auto best_of_restarts(Fit&& fit, const RunOptions& opts)
{
    validate(opts);
    using Result = decltype(fit(std::uint64_t{}));
    std::vector<Result> runs(static_cast<std::size_t>(opts.restarts));
    detail::parallel_for(runs.size(), [&](std::size_t r) { runs[r] = fit(restart_seed(opts.seed, r)); });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].objective < runs[best].objective)
            best = r;
    return std::move(runs[best]);
}

template <typename Derived>
HardClustering<typename Derived::Scalar> kmeans(const Eigen::MatrixBase<Derived>& x, int k,
                                                const RunOptions& opts)
{
    return best_of_restarts([&](std::uint64_t s) { return kmeans_once(x, k, s, opts); }, opts);
}

template <typename Derived>
SoftClustering<typename Derived::Scalar> fcm(const Eigen::MatrixBase<Derived>& x, int c,
                                             typename Derived::Scalar m, const RunOptions& opts)
{
    return best_of_restarts([&](std::uint64_t s) { return fcm_once(x, c, m, s, opts); }, opts);
}

/// 0/1 membership matrix of a hard partition.
template <typename Scalar = double>
MatrixX<Scalar> crisp_membership(const Eigen::VectorXi& assignments, int k)
{
    MatrixX<Scalar> u = MatrixX<Scalar>::Zero(assignments.size(), k);
    for (Eigen::Index i = 0; i < assignments.size(); ++i)
        u(i, assignments(i)) = Scalar(1);
    return u;
}

/// Views a hard partition as a crisp soft clustering with fuzziness `m`.
template <typename Scalar>
SoftClustering<Scalar> as_soft(const HardClustering<Scalar>& hard, Scalar m)
{
    SoftClustering<Scalar> s;
    s.c = hard.k;
    s.membership = crisp_membership<Scalar>(hard.assignments, hard.k);
    s.centroids = hard.centroids;
    s.fuzziness = m;
    s.objective = hard.objective;
    s.iterations = hard.iterations;
    s.converged = hard.converged;
    return s;
}

} // namespace bcvi
