#pragma once

// Least-squares affine maps from source-map pixels to (lon, lat) degrees, and
// their geodesic error measures.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lagl/error.hpp"
#include "lagl/geodesy.hpp"

namespace lagl::affine {

using geodesy::GeoPoint;

/// Source-map position: x1 is the column (rightward), x2 the row (downward).
struct PixelPoint {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
    friend auto operator<=>(const PixelPoint&, const PixelPoint&) = default;
};

/// y1 = a1 x1 + a2 x2 + b1 (longitude), y2 = a3 x1 + a4 x2 + b2 (latitude).
struct AffineParams {
    double a1 = 1.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;

    static constexpr std::size_t size = 6;
    static constexpr std::array<std::string_view, size> names{"a1", "a2", "a3", "a4", "b1", "b2"};

    double operator[](std::size_t k) const {
        switch (k) {
            case 0: return a1;
            case 1: return a2;
            case 2: return a3;
            case 3: return a4;
            case 4: return b1;
            default: return b2;
        }
    }

    double& operator[](std::size_t k) {
        switch (k) {
            case 0: return a1;
            case 1: return a2;
            case 2: return a3;
            case 3: return a4;
            case 4: return b1;
            default: return b2;
        }
    }

    bool finite() const {
        return std::isfinite(a1) && std::isfinite(a2) && std::isfinite(a3) && std::isfinite(a4) &&
               std::isfinite(b1) && std::isfinite(b2);
    }

    static AffineParams constant(double v) { return {v, v, v, v, v, v}; }

    friend bool operator==(const AffineParams&, const AffineParams&) = default;
};

struct Correspondence {
    PixelPoint source;
    GeoPoint target;
    std::string label;
};

struct CorrespondenceSet {
    std::string name;
    std::vector<Correspondence> pairs;
    std::string note;
};

/// The two linear forms without any normalisation, in degrees.
inline std::pair<double, double> evaluate(const AffineParams& t, const PixelPoint& x) {
    return {t.a1 * x.x1 + t.a2 * x.x2 + t.b1, t.a3 * x.x1 + t.a4 * x.x2 + t.b2};
}

inline GeoPoint apply_affine(const AffineParams& t, const PixelPoint& x) {
    const auto [lon, lat] = evaluate(t, x);
    if (!std::isfinite(lon) || !std::isfinite(lat) || lat < -90.0 || lat > 90.0) {
        throw Error(ErrorCategory::range, "affine image of pixel (" + std::to_string(x.x1) + ", " +
                                              std::to_string(x.x2) + ") has latitude " + std::to_string(lat) +
                                              " outside [-90, 90]");
    }
    return GeoPoint{geodesy::normalize_longitude(lon), lat};
}

/// Sum of squared residuals in degree space, the quantity minimised by fit_affine.
inline double objective(const AffineParams& t, const CorrespondenceSet& set) {
    double sum = 0.0;
    for (const auto& pair : set.pairs) {
        const auto [y1, y2] = evaluate(t, pair.source);
        const double r1 = pair.target.lon - y1;
        const double r2 = pair.target.lat - y2;
        sum += r1 * r1 + r2 * r2;
    }
    return sum;
}

/// The 6x6 normal system in unknown order (a1, a2, b1, a3, a4, b2), assembled from raw moments.
struct NormalSystem {
    Eigen::Matrix<double, 6, 6> matrix;
    Eigen::Matrix<double, 6, 1> rhs;
};

inline NormalSystem normal_system(const CorrespondenceSet& set) {
    double s11 = 0, s12 = 0, s1 = 0, s22 = 0, s2 = 0;
    double y1x1 = 0, y1x2 = 0, y1 = 0, y2x1 = 0, y2x2 = 0, y2 = 0;
    for (const auto& p : set.pairs) {
        const double x1 = p.source.x1;
        const double x2 = p.source.x2;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s1 += x1;
        s22 += x2 * x2;
        s2 += x2;
        y1x1 += p.target.lon * x1;
        y1x2 += p.target.lon * x2;
        y1 += p.target.lon;
        y2x1 += p.target.lat * x1;
        y2x2 += p.target.lat * x2;
        y2 += p.target.lat;
    }
    const double n = static_cast<double>(set.pairs.size());
    Eigen::Matrix3d block;
    block << s11, s12, s1, s12, s22, s2, s1, s2, n;
    NormalSystem sys;
    sys.matrix.setZero();
    sys.matrix.topLeftCorner<3, 3>() = block;
    sys.matrix.bottomRightCorner<3, 3>() = block;
    sys.rhs << y1x1, y1x2, y1, y2x1, y2x2, y2;
    return sys;
}

/// Identical source points collapse into one pair with the mean target.
inline std::vector<Correspondence> deduplicated(std::span<const Correspondence> pairs) {
    std::map<PixelPoint, std::pair<std::size_t, std::size_t>> index;  // first position, multiplicity
    std::vector<Correspondence> out;
    std::vector<std::pair<double, double>> sums;
    for (const auto& p : pairs) {
        auto [it, inserted] = index.try_emplace(p.source, out.size(), 0);
        if (inserted) {
            out.push_back(p);
            sums.emplace_back(0.0, 0.0);
        }
        auto& [pos, count] = it->second;
        ++count;
        sums[pos].first += p.target.lon;
        sums[pos].second += p.target.lat;
    }
    for (const auto& [src, slot] : index) {
        const auto [pos, count] = slot;
        out[pos].target.lon = sums[pos].first / static_cast<double>(count);
        out[pos].target.lat = sums[pos].second / static_cast<double>(count);
    }
    return out;
}

/// Least-squares affine fit of a correspondence set.
///
/// Sources are centred before the moments are accumulated; the block-diagonal
/// normal system then splits into two 3x3 solves sharing one matrix, and the
/// translation is moved back to the original origin afterwards.
inline AffineParams fit_affine(const CorrespondenceSet& set) {
    const auto pairs = deduplicated(set.pairs);
    if (pairs.size() < 3) {
        throw Error(ErrorCategory::degenerate, "correspondence set '" + set.name + "' has " +
                                                   std::to_string(pairs.size()) +
                                                   " distinct source points, at least 3 are required");
    }
    const double n = static_cast<double>(pairs.size());
    double c1 = 0.0;
    double c2 = 0.0;
    for (const auto& p : pairs) {
        c1 += p.source.x1;
        c2 += p.source.x2;
    }
    c1 /= n;
    c2 /= n;

    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Matrix<double, 3, 2> rhs = Eigen::Matrix<double, 3, 2>::Zero();
    for (const auto& p : pairs) {
        const Eigen::Vector3d row(p.source.x1 - c1, p.source.x2 - c2, 1.0);
        m += row * row.transpose();
        rhs.col(0) += row * p.target.lon;
        rhs.col(1) += row * p.target.lat;
    }

    // Collinear sources make the centred 2x2 scatter block singular.
    const double scatter_det = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
    const double scale = m(0, 0) + m(1, 1);
    if (!(scale > 0.0) || scatter_det <= 1e-12 * scale * scale) {
        throw Error(ErrorCategory::degenerate,
                    "correspondence set '" + set.name + "' has collinear source points (singular normal matrix)");
    }

    const Eigen::Matrix<double, 3, 2> sol = m.ldlt().solve(rhs);
    AffineParams t;
    t.a1 = sol(0, 0);
    t.a2 = sol(1, 0);
    t.b1 = sol(2, 0) - t.a1 * c1 - t.a2 * c2;
    t.a3 = sol(0, 1);
    t.a4 = sol(1, 1);
    t.b2 = sol(2, 1) - t.a3 * c1 - t.a4 * c2;
    if (!t.finite()) {
        throw Error(ErrorCategory::degenerate, "correspondence set '" + set.name + "' produced non-finite parameters");
    }
    return t;
}

/// Geodesic residuals D_E(y_i, T(x_i)) in metres, one per pair.
inline std::vector<double> residuals(const AffineParams& t, const CorrespondenceSet& set) {
    std::vector<double> out;
    out.reserve(set.pairs.size());
    for (const auto& p : set.pairs) {
        out.push_back(geodesy::geodesic_distance(p.target, apply_affine(t, p.source)));
    }
    return out;
}

/// Root-mean-square of residuals in kilometres.
inline double rms_km(std::span<const double> residuals_m) {
    if (residuals_m.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double r : residuals_m) {
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(residuals_m.size())) / 1000.0;
}

inline double max_km(std::span<const double> residuals_m) {
    double worst = 0.0;
    for (double r : residuals_m) {
        worst = std::max(worst, r);
    }
    return worst / 1000.0;
}

/// RMS geodesic error of `t` on `set` [km].
inline double mean_error(const AffineParams& t, const CorrespondenceSet& set) {
    return rms_km(residuals(t, set));
}

/// Largest geodesic error of `t` on `set` [km].
inline double max_error(const AffineParams& t, const CorrespondenceSet& set) {
    return max_km(residuals(t, set));
}

/// Union of several sets, used for the global transform.
inline CorrespondenceSet merged(std::span<const CorrespondenceSet> sets, std::string name) {
    CorrespondenceSet out;
    out.name = std::move(name);
    for (const auto& s : sets) {
        out.pairs.insert(out.pairs.end(), s.pairs.begin(), s.pairs.end());
    }
    return out;
}

}  // namespace lagl::affine
