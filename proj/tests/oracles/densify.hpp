#pragma once

// Brute-force references: distances to a segment or curve measured against
// points placed densely along the geodesics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lagl/curves.hpp"
#include "lagl/geodesy.hpp"

namespace oracle {

using lagl::geodesy::GeoPoint;
using lagl::geodesy::GeoSegment;

inline double min_distance_densified(const GeoPoint& p, const GeoSegment& s, double step) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : lagl::geodesy::densify(s.start, s.end, step)) {
        best = std::min(best, lagl::geodesy::geodesic_distance(p, q));
    }
    return best;
}

/// 10 m scan of the whole segment, then 0.1 m steps within 20 m of the coarse minimum.
inline double min_distance_two_stage(const GeoPoint& p, const GeoSegment& s) {
    using namespace lagl::geodesy;
    const auto inv = inverse(s.start, s.end);
    const double length = inv.distance;
    const auto at = [&](double t) { return direct(s.start, inv.azimuth1, std::clamp(t, 0.0, length)).point; };
    double best_t = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (double t = 0.0;; t += 10.0) {
        const double d = geodesic_distance(p, at(t));
        if (d < best) {
            best = d;
            best_t = t;
        }
        if (t >= length) break;
    }
    for (double t = best_t - 20.0; t <= best_t + 20.0; t += 0.1) {
        best = std::min(best, geodesic_distance(p, at(t)));
    }
    return best;
}

/// Anchor distances of A to B with every edge of B densified at `step` metres.
/// Chords bound geodesics from below and only serve to skip hopeless points.
inline std::vector<double> densified_anchor_distances(const lagl::curves::DiscreteCurve& a,
                                                      const lagl::curves::DiscreteCurve& b, double step) {
    namespace cd = lagl::curves::detail;
    std::vector<GeoPoint> dense;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        auto part = lagl::geodesy::densify(b.points()[k], b.points()[k + 1], step);
        dense.insert(dense.end(), part.begin() + (k ? 1 : 0), part.end());
    }
    std::vector<cd::Ecef> ecef;
    ecef.reserve(dense.size());
    for (const auto& q : dense) ecef.push_back(cd::to_ecef(q));
    std::vector<double> out;
    for (const auto& p : a.points()) {
        const auto pe = cd::to_ecef(p);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < dense.size(); ++k) {
            if (cd::chord(pe, ecef[k]) - 1e-6 >= best) continue;
            best = std::min(best, lagl::geodesy::geodesic_distance(p, dense[k]));
        }
        out.push_back(best);
    }
    return out;
}

struct DenseMetrics {
    double mean = 0.0;
    double max = 0.0;
};

inline DenseMetrics densified_hausdorff(const lagl::curves::DiscreteCurve& a, const lagl::curves::DiscreteCurve& b,
                                        double step) {
    auto directed = [&](const lagl::curves::DiscreteCurve& x, const lagl::curves::DiscreteCurve& y) {
        const auto d = densified_anchor_distances(x, y, step);
        double sum = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) sum += x.segment_lengths()[i] * d[i];
        return DenseMetrics{sum / x.length(), *std::max_element(d.begin(), d.end())};
    };
    const auto ab = directed(a, b);
    const auto ba = directed(b, a);
    return {(a.length() * ab.mean + b.length() * ba.mean) / (a.length() + b.length()), std::max(ab.max, ba.max)};
}

}  // namespace oracle
