#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "bcvi/error.hpp"

namespace bcvi {

/// Condition A: the largest value marks the best k. Condition B: the smallest.
enum class Direction { larger_is_better, smaller_is_better };

inline const char* to_string(Direction d)
{
    return d == Direction::larger_is_better ? "A" : "B";
}

/// Which rule produced the final values of a correlation-slope index.
enum class SlopeCase {
    finite = 1,         // no +inf ratio: ratios, with -inf replaced by the smallest finite one
    has_positive_inf,   // ratio + difference, infinities replaced by finite extremes
    all_infinite,       // no finite ratio: difference term only
};

/// Index values over k = k_min .. max_k().
struct CviSeries {
    std::string index_name;
    Direction direction = Direction::larger_is_better;
    int k_min = 2;
    Eigen::VectorXd values;

    // Correlation-based indices keep their profile (k = 1 .. max_k()+1) and case.
    Eigen::VectorXd profile;
    std::optional<SlopeCase> slope_case;

    int max_k() const noexcept { return k_min + static_cast<int>(values.size()) - 1; }
    double at(int k) const { return values(k - k_min); }
};

/// Slope-ratio (first) and slope-difference (second) transforms of a
/// correlation profile, resolved to finite values over k = 2..K.
struct SlopeIndex {
    Eigen::VectorXd ratio;      // NCI1, may hold +-inf
    Eigen::VectorXd difference; // NCI2, may hold NaN where undefined
    Eigen::VectorXd values;     // resolved, finite
    SlopeCase slope_case = SlopeCase::finite;
};

/// Denominators below this magnitude count as zero.
inline constexpr double kZeroDenominator = 1e-15;

/// `profile(j)` holds the correlation at k = j+1 for k = 1..K+1 (K >= 2).
inline SlopeIndex resolve_slope_index(const Eigen::VectorXd& profile)
{
    const Eigen::Index kmax = profile.size() - 1; // K
    if (kmax < 2)
        throw IndexError("correlation profile must cover k = 1..K+1 with K >= 2");
    const auto nc = [&](Eigen::Index k) { return profile(k - 1); };
    const double inf = std::numeric_limits<double>::infinity();

    SlopeIndex out;
    out.ratio.resize(kmax - 1);
    out.difference.resize(kmax - 1);
    for (Eigen::Index k = 2; k <= kmax; ++k) {
        const double num = (nc(k) - nc(k - 1)) * (1.0 - nc(k));
        const double den = std::max(0.0, nc(k + 1) - nc(k)) * (1.0 - nc(k - 1));
        double ratio;
        if (std::abs(den) < kZeroDenominator)
            ratio = num > 0.0 ? inf : (num < 0.0 ? -inf : 0.0);
        else
            ratio = num / den;
        out.ratio(k - 2) = ratio;

        const double left = 1.0 - nc(k - 1);
        const double right = 1.0 - nc(k);
        if (std::abs(left) < kZeroDenominator || std::abs(right) < kZeroDenominator)
            out.difference(k - 2) = std::numeric_limits<double>::quiet_NaN();
        else
            out.difference(k - 2) = (nc(k) - nc(k - 1)) / left - (nc(k + 1) - nc(k)) / right;
    }

    double lo = inf, hi = -inf;
    bool any_pos_inf = false;
    for (double r : out.ratio) {
        if (std::isfinite(r)) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        } else if (r > 0) {
            any_pos_inf = true;
        }
    }
    const bool any_finite = std::isfinite(lo);
    out.slope_case = !any_finite ? SlopeCase::all_infinite
                   : any_pos_inf ? SlopeCase::has_positive_inf
                                 : SlopeCase::finite;

    out.values.resize(out.ratio.size());
    for (Eigen::Index i = 0; i < out.ratio.size(); ++i) {
        const double r = out.ratio(i);
        const double clipped = std::isfinite(r) ? r : (r > 0 ? hi : lo);
        double v = 0.0;
        switch (out.slope_case) {
        case SlopeCase::finite: v = clipped; break;
        case SlopeCase::has_positive_inf: v = clipped + out.difference(i); break;
        case SlopeCase::all_infinite: v = out.difference(i); break;
        }
        if (!std::isfinite(v))
            throw IndexError("index undefined at k=" + std::to_string(i + 2) +
                             " (correlation profile reaches 1)");
        out.values(i) = v;
    }
    return out;
}

} // namespace bcvi
