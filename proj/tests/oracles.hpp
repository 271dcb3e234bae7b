#pragma once

// Reference computations used only by tests. Each one follows the textbook
// definition directly and shares no code with the library path it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Max over injective cluster->class maps of matched/n, by enumeration.
inline double brute_force_accuracy(const std::vector<int>& labels, const std::vector<int>& clusters)
{
    std::vector<int> cls(labels.begin(), labels.end());
    std::vector<int> clu(clusters.begin(), clusters.end());
    std::set<int> cls_ids(cls.begin(), cls.end()), clu_ids(clu.begin(), clu.end());
    std::vector<int> a(cls_ids.begin(), cls_ids.end());
    std::vector<int> b(clu_ids.begin(), clu_ids.end());
    // Pad classes with dummies so every cluster can take a distinct target.
    while (a.size() < b.size())
        a.push_back(std::numeric_limits<int>::min() + static_cast<int>(a.size()));
    std::sort(a.begin(), a.end());
    double best = 0.0;
    do {
        std::map<int, int> m;
        for (std::size_t j = 0; j < b.size(); ++j)
            m[b[j]] = a[j];
        double hit = 0;
        for (std::size_t i = 0; i < cls.size(); ++i)
            hit += m[clu[i]] == cls[i];
        best = std::max(best, hit / static_cast<double>(cls.size()));
    } while (std::next_permutation(a.begin(), a.end()));
    return best;
}

/// Minimum within-cluster sum of squares over all partitions of x into
/// exactly k nonempty groups (k^n enumeration, small n only).
inline double brute_force_wcss(const Eigen::MatrixXd& x, int k)
{
    const int n = static_cast<int>(x.rows());
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        for (int v : a)
            ++count[static_cast<std::size_t>(v)];
        if (std::all_of(count.begin(), count.end(), [](int c) { return c > 0; })) {
            double total = 0.0;
            for (int j = 0; j < k; ++j) {
                Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
                for (int i = 0; i < n; ++i)
                    if (a[static_cast<std::size_t>(i)] == j)
                        mean += x.row(i);
                mean /= count[static_cast<std::size_t>(j)];
                for (int i = 0; i < n; ++i)
                    if (a[static_cast<std::size_t>(i)] == j)
                        total += (x.row(i) - mean).squaredNorm();
            }
            best = std::min(best, total);
        }
        int pos = 0;
        while (pos < n && ++a[static_cast<std::size_t>(pos)] == k)
            a[static_cast<std::size_t>(pos++)] = 0;
        if (pos == n)
            break;
    }
    return best;
}

/// Plain FCM fixed-point iteration on 1-D data using the ratio form of the
/// membership update, run until centroids move less than `tol`.
inline std::vector<double> fcm_fixed_point_1d(const std::vector<double>& x, std::vector<double> v, double m,
                                              double tol = 1e-10, int max_iter = 100000)
{
    const std::size_t c = v.size();
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> num(c, 0.0), den(c, 0.0);
        for (double xi : x) {
            for (std::size_t j = 0; j < c; ++j) {
                double s = 0.0;
                for (std::size_t l = 0; l < c; ++l)
                    s += std::pow(std::abs(xi - v[j]) / std::abs(xi - v[l]), 2.0 / (m - 1.0));
                const double u = 1.0 / s;
                num[j] += std::pow(u, m) * xi;
                den[j] += std::pow(u, m);
            }
        }
        double shift = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            const double nv = num[j] / den[j];
            shift = std::max(shift, std::abs(nv - v[j]));
            v[j] = nv;
        }
        if (shift < tol)
            break;
    }
    std::sort(v.begin(), v.end());
    return v;
}

/// Materializes both distance vectors and applies the two-pass Pearson formula.
inline double naive_pair_correlation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& reps)
{
    std::vector<double> a, b;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
            a.push_back((x.row(i) - x.row(j)).norm());
            b.push_back((reps.row(i) - reps.row(j)).norm());
        }
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        sab += (a[t] - ma) * (b[t] - mb);
        saa += (a[t] - ma) * (a[t] - ma);
        sbb += (b[t] - mb) * (b[t] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// NCI1 / NCI2 for one k straight from the definitions, with +-inf for a zero
/// NCI1 denominator.
struct SlopeTerms {
    double ratio;
    double difference;
};
inline SlopeTerms slope_terms(double prev, double cur, double next)
{
    const double num = (cur - prev) * (1 - cur);
    const double den = std::max(0.0, next - cur) * (1 - prev);
    const double inf = std::numeric_limits<double>::infinity();
    const double ratio = den == 0.0 ? (num > 0 ? inf : (num < 0 ? -inf : 0.0)) : num / den;
    return {ratio, (cur - prev) / (1 - prev) - (next - cur) / (1 - cur)};
}

/// Dirichlet draw via normalized Gamma variates.
inline Eigen::VectorXd sample_dirichlet(const Eigen::VectorXd& alpha, std::mt19937_64& rng)
{
    Eigen::VectorXd g(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
        g(i) = std::gamma_distribution<double>(alpha(i), 1.0)(rng);
    return g / g.sum();
}

inline double sample_beta(double a, double b, std::mt19937_64& rng)
{
    const double x = std::gamma_distribution<double>(a, 1.0)(rng);
    const double y = std::gamma_distribution<double>(b, 1.0)(rng);
    return x / (x + y);
}

/// GD draw by sequential stick breaking: p_k = Z_k prod_{i<k}(1 - Z_i),
/// Z_k ~ Beta(alpha_k, beta_k); the last coordinate takes the remainder.
inline Eigen::VectorXd sample_gd(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, std::mt19937_64& rng)
{
    Eigen::VectorXd p(alpha.size() + 1);
    double stick = 1.0;
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        const double z = sample_beta(alpha(k), beta(k), rng);
        p(k) = z * stick;
        stick *= 1.0 - z;
    }
    p(alpha.size()) = stick;
    return p;
}

/// Posterior means and variances of GD(alpha', beta') from the explicit
/// product formulas (no log-space accumulation).
inline void gd_direct_moments(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& mean,
                              Eigen::VectorXd& var)
{
    const Eigen::Index m = a.size();
    mean.resize(m + 1);
    var.resize(m + 1);
    for (Eigen::Index k = 0; k <= m; ++k) {
        double m1 = 1.0, m2 = 1.0;
        for (Eigen::Index i = 0; i < std::min(k, m); ++i) {
            m1 *= b(i) / (a(i) + b(i));
            m2 *= (b(i) + 1) * b(i) / ((a(i) + b(i) + 1) * (a(i) + b(i)));
        }
        if (k < m) {
            m1 *= a(k) / (a(k) + b(k));
            m2 *= (a(k) + 1) * a(k) / ((a(k) + b(k) + 1) * (a(k) + b(k)));
        }
        mean(k) = m1;
        var(k) = m2 - m1 * m1;
    }
}

inline Eigen::MatrixXd random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, double scale = 1.0)
{
    std::normal_distribution<double> z(0.0, scale);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            x(i, j) = z(rng);
    return x;
}

} // namespace oracle
