#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcvi/clustering.hpp"
#include "bcvi/error.hpp"
#include "bcvi/parallel.hpp"

namespace bcvi {

/// Pearson correlation of the two all-pairs distance streams.
/// `degenerate` is set (and `value` is 0) when either stream is constant.
struct CorrValue {
    double value = 0.0;
    bool degenerate = false;
    std::uint64_t pair_count = 0;
};

/// SD(d_v) / (max d_v - min d_v) with d_v the distances to the global centroid.
struct Dispersion {
    double value = 0.0;
    bool degenerate = false;
};

namespace detail {

/// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) noexcept
    {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    double value() const noexcept { return sum + carry; }
};

/// Shifted sufficient statistics of a paired stream (a_t, b_t).
struct PairMoments {
    CompensatedSum a, b, aa, bb, ab;
    std::uint64_t count = 0;
    double max_a = 0.0, max_b = 0.0;

    void merge(const PairMoments& o) noexcept
    {
        a.add(o.a.value());
        b.add(o.b.value());
        aa.add(o.aa.value());
        bb.add(o.bb.value());
        ab.add(o.ab.value());
        count += o.count;
        max_a = std::max(max_a, o.max_a);
        max_b = std::max(max_b, o.max_b);
    }
};

template <typename Scalar>
double column_distance(const Scalar* u, const Scalar* v, Eigen::Index p) noexcept
{
    double s = 0.0;
    for (Eigen::Index d = 0; d < p; ++d) {
        const double diff = static_cast<double>(u[d]) - static_cast<double>(v[d]);
        s += diff * diff;
    }
    return std::sqrt(s);
}

/// Splits rows 0..n-2 into `blocks` ranges of roughly equal pair counts.
inline std::vector<Eigen::Index> pair_block_bounds(Eigen::Index n, std::size_t blocks)
{
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    std::vector<Eigen::Index> bounds{0};
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        acc += static_cast<double>(n - 1 - i);
        if (acc >= total * static_cast<double>(bounds.size()) / static_cast<double>(blocks) &&
            bounds.size() < blocks)
            bounds.push_back(i + 1);
    }
    if (bounds.back() != n - 1)
        bounds.push_back(n - 1);
    return bounds;
}

} // namespace detail

/// Streams all C(n,2) unordered pairs i<j once. Only per-block sufficient
/// statistics are stored; blocks are fixed by row range and merged in block
/// order, so the result does not depend on the number of threads.
template <typename DerivedX, typename DerivedR>
CorrValue pair_distance_correlation(const Eigen::MatrixBase<DerivedX>& x,
                                    const Eigen::MatrixBase<DerivedR>& reps)
{
    using Scalar = typename DerivedX::Scalar;
    const Eigen::Index n = x.rows();
    if (reps.rows() != n || reps.cols() != x.cols())
        throw IndexError("representative map is " + std::to_string(reps.rows()) + "x" +
                         std::to_string(reps.cols()) + ", data is " + std::to_string(n) + "x" +
                         std::to_string(x.cols()));
    if (n < 3)
        throw IndexError("pair correlation needs at least 3 points");

    const Eigen::Index p = x.cols();
    // Column-major p x n copies keep each point contiguous.
    const MatrixX<Scalar> xt = x.transpose();
    const MatrixX<Scalar> rt = reps.template cast<Scalar>().transpose();
    const double shift_a = detail::column_distance(xt.data(), xt.data() + p, p);
    const double shift_b = detail::column_distance(rt.data(), rt.data() + p, p);

    constexpr std::size_t kBlocks = 64;
    const auto bounds = detail::pair_block_bounds(n, kBlocks);
    std::vector<detail::PairMoments> partial(bounds.size() - 1);
    detail::parallel_for(partial.size(), [&](std::size_t blk) {
        auto& m = partial[blk];
        for (Eigen::Index i = bounds[blk]; i < bounds[blk + 1]; ++i) {
            const Scalar* xi = xt.data() + i * p;
            const Scalar* ri = rt.data() + i * p;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double a = detail::column_distance(xi, xt.data() + j * p, p);
                const double b = detail::column_distance(ri, rt.data() + j * p, p);
                const double da = a - shift_a;
                const double db = b - shift_b;
                m.a.add(da);
                m.b.add(db);
                m.aa.add(da * da);
                m.bb.add(db * db);
                m.ab.add(da * db);
                m.max_a = std::max(m.max_a, a);
                m.max_b = std::max(m.max_b, b);
            }
            m.count += static_cast<std::uint64_t>(n - 1 - i);
        }
    });
    detail::PairMoments total;
    for (const auto& m : partial)
        total.merge(m);

    CorrValue out;
    out.pair_count = total.count;
    const double count = static_cast<double>(total.count);
    const double sa = total.a.value(), sb = total.b.value();
    const double sxx = total.aa.value() - sa * sa / count;
    const double syy = total.bb.value() - sb * sb / count;
    const double sxy = total.ab.value() - sa * sb / count;
    const auto flat = [count](double ss, double scale) {
        return scale == 0.0 || !(ss > 0.0) || std::sqrt(ss / count) <= 1e-12 * scale;
    };
    if (flat(sxx, total.max_a) || flat(syy, total.max_b)) {
        out.degenerate = true;
        return out;
    }
    out.value = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return out;
}

template <typename Derived>
Dispersion baseline_dispersion(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = x.rows();
    if (n < 2)
        throw IndexError("baseline dispersion needs at least 2 points");
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> center = x.colwise().mean();
    const VectorX<Scalar> dv = (x.rowwise() - center).rowwise().norm();
    const double range = static_cast<double>(dv.maxCoeff() - dv.minCoeff());
    if (!(range > 1e-12 * static_cast<double>(dv.maxCoeff())))
        return {0.0, true};
    const double mean = static_cast<double>(dv.mean());
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = static_cast<double>(dv(i)) - mean;
        ss += d * d;
    }
    return {std::sqrt(ss / static_cast<double>(n - 1)) / range, false};
}

/// Row i is the centroid of the cluster holding point i.
template <typename Scalar>
MatrixX<Scalar> centroid_representatives(const HardClustering<Scalar>& hard)
{
    MatrixX<Scalar> reps(hard.assignments.size(), hard.centroids.cols());
    for (Eigen::Index i = 0; i < reps.rows(); ++i)
        reps.row(i) = hard.centroids.row(hard.assignments(i));
    return reps;
}

/// Row i is o_i = sum_j u_ij^gamma v_j / sum_j u_ij^gamma.
template <typename Scalar>
MatrixX<Scalar> fuzzy_representatives(const SoftClustering<Scalar>& soft, Scalar gamma)
{
    if (!(gamma > Scalar(0)))
        throw IndexError("fuzzy representative exponent must be positive");
    MatrixX<Scalar> w = soft.membership.array().pow(gamma).matrix();
    const VectorX<Scalar> mass = w.rowwise().sum();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        if (!(mass(i) > Scalar(0)))
            throw IndexError("membership row " + std::to_string(i + 1) + " has zero mass");
        w.row(i) /= mass(i);
    }
    return w * soft.centroids;
}

} // namespace bcvi
