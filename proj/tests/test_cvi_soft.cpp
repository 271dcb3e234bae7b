#include "doctest.h"

#include <random>

#include "bcvi/cvi_hard.hpp"
#include "bcvi/cvi_soft.hpp"
#include "oracles.hpp"

using namespace bcvi;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> v)
{
    Eigen::MatrixXd x(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double d : v)
        x(i++, 0) = d;
    return x;
}

SoftClustering<double> crisp(std::vector<int> labels, std::initializer_list<double> centers, double m = 2.0)
{
    HardClustering<double> h;
    h.assignments = Eigen::Map<Eigen::VectorXi>(labels.data(), static_cast<Eigen::Index>(labels.size()));
    h.k = static_cast<int>(centers.size());
    h.centroids = column(centers);
    return as_soft(h, m);
}

// Scalar loops straight from the definitions.
double xb_oracle(const Eigen::MatrixXd& x, const SoftClustering<double>& s)
{
    double num = 0.0, sep = 1e300;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (int j = 0; j < s.c; ++j)
            num += s.membership(i, j) * s.membership(i, j) * (x.row(i) - s.centroids.row(j)).squaredNorm();
    for (int a = 0; a < s.c; ++a)
        for (int b = 0; b < s.c; ++b)
            if (a != b)
                sep = std::min(sep, (s.centroids.row(a) - s.centroids.row(b)).squaredNorm());
    return num / (static_cast<double>(x.rows()) * sep);
}

double kwon2_oracle(const Eigen::MatrixXd& x, const SoftClustering<double>& s)
{
    const double n = static_cast<double>(x.rows()), k = s.c, m = s.fuzziness;
    Eigen::RowVectorXd v0 = Eigen::RowVectorXd::Zero(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        v0 += x.row(i) / n;
    double scatter = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (int j = 0; j < s.c; ++j)
            scatter += std::pow(s.membership(i, j), std::pow(2.0, std::sqrt(m / 2.0))) *
                       (x.row(i) - s.centroids.row(j)).squaredNorm();
    double sum = 0.0, mx = 0.0, sep = 1e300;
    for (int j = 0; j < s.c; ++j) {
        const double d = (s.centroids.row(j) - v0).squaredNorm();
        sum += d;
        mx = std::max(mx, d);
        for (int l = 0; l < s.c; ++l)
            if (l != j)
                sep = std::min(sep, (s.centroids.row(j) - s.centroids.row(l)).squaredNorm());
    }
    const double w1 = (n - k + 1) / n;
    const double w2 = std::pow(k / (k - 1), std::sqrt(2.0));
    const double w3 = n * k / ((n - k + 1) * (n - k + 1));
    return w1 * (w2 * scatter + sum / mx + w3) / (sep + 1 / k + 1 / std::pow(k, m - 1));
}

} // namespace

TEST_CASE("XB hand values")
{
    const auto x = column({0, 2, 10, 12});
    const auto s = crisp({0, 0, 1, 1}, {1, 11});
    CHECK(xb_value(x, s) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(xb_value(x, s) == doctest::Approx(xb_oracle(x, s)).epsilon(1e-14));

    const auto y = column({0, 2});
    CHECK(xb_value(y, crisp({0, 1}, {0, 2})) == 0.0);

    const auto z = column({0, 1, 9, 10});
    CHECK(xb_value(z, crisp({0, 0, 1, 1}, {0.5, 9.5})) == doctest::Approx(1.0 / 324.0).epsilon(1e-12));

    CHECK_THROWS_AS(xb_value(x, crisp({0, 0, 1, 1}, {5, 5})), IndexError);
}

TEST_CASE("KWON2 hand values")
{
    const auto x = column({0, 2, 10, 12});
    const auto s = crisp({0, 0, 1, 1}, {1, 11});
    CHECK(kwon2_exponent(2.0) == 2.0);
    CHECK(kwon2_value(x, s) == doctest::Approx(0.100615).epsilon(1e-6));
    CHECK(std::abs(kwon2_value(x, s) - kwon2_oracle(x, s)) < 1e-14);

    const auto y = column({0, 2});
    CHECK(kwon2_value(y, crisp({0, 1}, {0, 2})) == doctest::Approx(0.6).epsilon(1e-12));

    const auto z = column({0, 1, 9, 10});
    CHECK(kwon2_value(z, crisp({0, 0, 1, 1}, {0.5, 9.5})) == doctest::Approx(0.050799).epsilon(1e-5));

    // Both centroids at the data mean.
    CHECK_THROWS_AS(kwon2_value(x, crisp({0, 0, 1, 1}, {6, 6})), IndexError);
}

TEST_CASE("soft indices match the loop oracles on FCM output and ignore relabeling")
{
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::MatrixXd x = oracle::random_points(rng, 50, 2);
        const int c = 2 + trial % 4;
        const double m = 1.5 + 0.25 * (trial % 5);
        RunOptions opts;
        opts.restarts = 2;
        opts.seed = static_cast<std::uint64_t>(trial);
        const auto s = fcm(x, c, m, opts);
        const double xb = xb_value(x, s);
        const double kw = kwon2_value(x, s);
        CHECK(xb == doctest::Approx(xb_oracle(x, s)).epsilon(1e-12));
        CHECK(kw == doctest::Approx(kwon2_oracle(x, s)).epsilon(1e-12));

        auto flipped = s;
        flipped.membership = s.membership.rowwise().reverse();
        flipped.centroids = s.centroids.colwise().reverse();
        CHECK(xb_value(x, flipped) == doctest::Approx(xb).epsilon(1e-12));
        CHECK(kwon2_value(x, flipped) == doctest::Approx(kw).epsilon(1e-12));
    }
}

TEST_CASE("WP from profile matches the WI arithmetic")
{
    Eigen::VectorXd wpc(4);
    wpc << 0.3, 0.6, 0.9, 0.95;
    const auto s = wi_from_profile(wpc, "wp");
    CHECK(s.index_name == "wp");
    CHECK(s.values(0) == doctest::Approx(0.571429).epsilon(1e-6));
    CHECK(s.values(1) == doctest::Approx(1.5).epsilon(1e-12));

    Eigen::VectorXd falling(4);
    falling << 0.3, 0.9, 0.8, 0.7;
    const auto c3 = wi_from_profile(falling, "wp");
    CHECK(c3.slope_case == SlopeCase::all_infinite);
    CHECK(c3.values.allFinite());
}

TEST_CASE("WP on crisp memberships equals WI on the hard partitions")
{
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd x = oracle::random_points(rng, 80, 1 + trial % 3);
        RunOptions opts;
        opts.restarts = 3;
        opts.seed = static_cast<std::uint64_t>(trial);
        const int max_k = 5;
        HardPath<double> hard;
        SoftPath<double> soft;
        for (int k = 2; k <= max_k + 1; ++k) {
            hard.emplace(k, kmeans(x, k, opts));
            soft.emplace(k, as_soft(hard.at(k), 2.0));
        }
        const double gamma = 0.5 + trial % 4;
        const auto wi = wi_series(x, hard, max_k);
        const auto wp = wp_series(x, soft, max_k, gamma);
        CHECK((wi.values - wp.values).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((wi.profile - wp.profile).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("WPC profile uses fuzzy representatives")
{
    std::mt19937_64 rng(71);
    const Eigen::MatrixXd x = oracle::random_points(rng, 40, 2);
    RunOptions opts;
    SoftPath<double> path;
    for (int k = 2; k <= 4; ++k)
        path.emplace(k, fcm(x, k, 2.0, opts));
    const auto wpc = wpc_profile(x, path, 3, 2.0);
    CHECK(wpc(0) == doctest::Approx(baseline_dispersion(x).value));
    for (int k = 2; k <= 4; ++k) {
        // o_i computed here with explicit sums.
        const auto& s = path.at(k);
        Eigen::MatrixXd reps(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(x.cols());
            double den = 0.0;
            for (int j = 0; j < k; ++j) {
                const double w = s.membership(i, j) * s.membership(i, j);
                num += w * s.centroids.row(j);
                den += w;
            }
            reps.row(i) = num / den;
        }
        CHECK(wpc(k - 1) == doctest::Approx(oracle::naive_pair_correlation(x, reps)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(wpc_profile(x, path, 4, 2.0), IndexError);
}

TEST_CASE("soft series directions")
{
    std::mt19937_64 rng(81);
    const Eigen::MatrixXd x = oracle::random_points(rng, 30, 2);
    RunOptions opts;
    opts.restarts = 2;
    SoftPath<double> path;
    for (int k = 2; k <= 5; ++k)
        path.emplace(k, fcm(x, k, 2.0, opts));
    CHECK(xb_series(x, path, 4).direction == Direction::smaller_is_better);
    CHECK(kwon2_series(x, path, 4).direction == Direction::smaller_is_better);
    const auto wp = wp_series(x, path, 4, 2.0);
    CHECK(wp.direction == Direction::larger_is_better);
    CHECK(wp.values.size() == 3);
    CHECK(wp.values.allFinite());
}
