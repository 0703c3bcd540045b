#pragma once

// Discrete river curves on the ellipsoid and the Hausdorff-type measures used
// to compare them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lagl/error.hpp"
#include "lagl/geodesy.hpp"

namespace lagl::curves {

using geodesy::GeoPoint;
using geodesy::GeoSegment;

/// An ordered polyline with its midpoint-split segment lengths.
///
/// Segment i is the half-edge ending at point i followed by the half-edge
/// starting there; the first and last segments are single half-edges. Edge
/// midpoints are geodesic midpoints.
class DiscreteCurve {
public:
    DiscreteCurve() = default;

    const std::string& name() const { return name_; }
    void rename(std::string name) { name_ = std::move(name); }

    std::span<const GeoPoint> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    const GeoPoint& source() const { return points_.front(); }

    /// Segment lengths, one per point [m].
    std::span<const double> segment_lengths() const { return segment_lengths_; }
    /// Geodesic lengths of the edges between consecutive points [m].
    std::span<const double> edge_lengths() const { return edge_lengths_; }
    std::span<const GeoPoint> midpoints() const { return midpoints_; }

    /// Sum of segment lengths [m].
    double length() const { return length_; }

    GeoSegment edge(std::size_t k) const { return {points_[k], points_[k + 1]}; }

    friend DiscreteCurve build_segments(std::vector<GeoPoint> points, std::string name);

private:
    std::string name_;
    std::vector<GeoPoint> points_;
    std::vector<GeoPoint> midpoints_;
    std::vector<double> edge_lengths_;
    std::vector<double> segment_lengths_;
    double length_ = 0.0;
};

/// Build a curve from ordered points; consecutive duplicates are dropped.
inline DiscreteCurve build_segments(std::vector<GeoPoint> points, std::string name = {}) {
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 2) {
        throw Error(ErrorCategory::degenerate,
                    "curve '" + name + "' needs at least 2 distinct points, has " + std::to_string(points.size()));
    }
    DiscreteCurve c;
    c.name_ = std::move(name);
    c.points_ = std::move(points);
    const std::size_t n = c.points_.size();
    c.midpoints_.reserve(n - 1);
    c.edge_lengths_.reserve(n - 1);
    c.segment_lengths_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto& a = c.points_[k];
        const auto& b = c.points_[k + 1];
        const GeoPoint mid = geodesy::geodesic_midpoint(a, b);
        const double first_half = geodesy::geodesic_distance(a, mid);
        const double second_half = geodesy::geodesic_distance(mid, b);
        c.midpoints_.push_back(mid);
        c.edge_lengths_.push_back(first_half + second_half);
        c.segment_lengths_[k] += first_half;
        c.segment_lengths_[k + 1] += second_half;
    }
    for (double s : c.segment_lengths_) c.length_ += s;
    return c;
}

struct BandThreshold {
    double meters = 0.0;

    static BandThreshold km(double value) { return meters_of(value * 1000.0); }
    static BandThreshold meters_of(double value) {
        if (!(value > 0.0)) {
            throw Error(ErrorCategory::argument, "band threshold must be positive");
        }
        return {value};
    }
};

// ---------------------------------------------------------------------------
// Nearest distances from anchor points to a curve

namespace detail {

struct Ecef {
    double x, y, z;
};

inline Ecef to_ecef(const GeoPoint& p, const geodesy::Ellipsoid& e = geodesy::wgs84) {
    const double phi = p.lat * geodesy::detail::deg;
    const double lam = p.lon * geodesy::detail::deg;
    const double s = std::sin(phi);
    const double n = e.a / std::sqrt(1.0 - e.e2() * s * s);
    return {n * std::cos(phi) * std::cos(lam), n * std::cos(phi) * std::sin(lam), n * (1.0 - e.e2()) * s};
}

inline double chord(const Ecef& a, const Ecef& b) { return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z); }

}  // namespace detail

/// Minimum geodesic distance from each point of A to the segments of B [m].
///
/// The union of B's segments is the union of its edges, so edges are tested
/// directly. The straight-line chord bounds every geodesic from below, which
/// lets edges that cannot beat the current minimum be skipped without
/// changing the result.
inline std::vector<double> anchor_distances(const DiscreteCurve& a, const DiscreteCurve& b) {
    std::vector<detail::Ecef> b_ecef;
    b_ecef.reserve(b.size());
    for (const auto& p : b.points()) b_ecef.push_back(detail::to_ecef(p));
    const auto edges = b.edge_lengths();

    std::vector<double> out;
    out.reserve(a.size());
    std::vector<double> chords(b.size());
    std::vector<double> bounds(edges.size());
    for (const auto& p : a.points()) {
        const auto pe = detail::to_ecef(p);
        for (std::size_t k = 0; k < b.size(); ++k) chords[k] = detail::chord(pe, b_ecef[k]);
        std::size_t first = 0;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            bounds[k] = std::max(0.0, 0.5 * (chords[k] + chords[k + 1] - edges[k] * (1.0 + 1e-9) - 1e-6));
            if (bounds[k] < bounds[first]) first = k;
        }
        double best = geodesy::point_to_segment_distance(p, b.edge(first));
        for (std::size_t k = 0; k < edges.size() && best > 0.0; ++k) {
            if (k == first || bounds[k] >= best) continue;
            best = std::min(best, geodesy::point_to_segment_distance(p, b.edge(k)));
        }
        out.push_back(best);
    }
    return out;
}

/// Per-anchor distances of A to B together with A's segment lengths.
struct DirectedProfile {
    std::vector<double> distances;  // min over B's segments, per point of A [m]
    std::vector<double> weights;    // A's segment lengths [m]
    double length = 0.0;            // L_A [m]

    double mean() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < distances.size(); ++i) sum += weights[i] * distances[i];
        return sum / length;
    }

    double max() const { return *std::max_element(distances.begin(), distances.end()); }

    double matched_length(double threshold) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < distances.size(); ++i) {
            if (distances[i] < threshold) sum += weights[i];
        }
        return sum;
    }
};

inline DirectedProfile directed_profile(const DiscreteCurve& a, const DiscreteCurve& b) {
    DirectedProfile p;
    p.distances = anchor_distances(a, b);
    p.weights.assign(a.segment_lengths().begin(), a.segment_lengths().end());
    p.length = a.length();
    return p;
}

/// Length-weighted mean distance from A's anchors to B [m].
inline double directed_mean_hausdorff(const DiscreteCurve& a, const DiscreteCurve& b) {
    return directed_profile(a, b).mean();
}

/// Length-weighted symmetrisation of two directed means.
inline double combine_mean(double length_a, double directed_ab, double length_b, double directed_ba) {
    return (length_a * directed_ab + length_b * directed_ba) / (length_a + length_b);
}

inline double mean_hausdorff(const DiscreteCurve& a, const DiscreteCurve& b) {
    return combine_mean(a.length(), directed_mean_hausdorff(a, b), b.length(), directed_mean_hausdorff(b, a));
}

/// Largest anchor distance from A to B [m].
inline double directed_max_hausdorff(const DiscreteCurve& a, const DiscreteCurve& b) {
    return directed_profile(a, b).max();
}

inline double max_hausdorff(const DiscreteCurve& a, const DiscreteCurve& b) {
    return std::max(directed_max_hausdorff(a, b), directed_max_hausdorff(b, a));
}

struct MatchingLength {
    double meters = 0.0;
    double percent = 0.0;
};

/// Total length of A's segments whose anchor lies closer than the band to B.
inline MatchingLength matching_length(const DiscreteCurve& a, const DiscreteCurve& b, BandThreshold band) {
    const double m = directed_profile(a, b).matched_length(band.meters);
    return {m, 100.0 * m / a.length()};
}

/// The "Average" row of a matching table: mean of the two directions, percent of the joint length.
inline MatchingLength matching_average(double matched_ab, double length_a, double matched_ba, double length_b) {
    return {(matched_ab + matched_ba) / 2.0, 100.0 * (matched_ab + matched_ba) / (length_a + length_b)};
}

inline MatchingLength matching_average(const DiscreteCurve& a, const DiscreteCurve& b, BandThreshold band) {
    return matching_average(matching_length(a, b, band).meters, a.length(), matching_length(b, a, band).meters,
                            b.length());
}

/// Distance between the first points (sources) of two curves [km].
inline double source_distance(std::span<const GeoPoint> a, std::span<const GeoPoint> b) {
    if (a.empty() || b.empty()) {
        throw Error(ErrorCategory::degenerate, "source distance of an empty curve");
    }
    return geodesy::geodesic_distance(a.front(), b.front()) / 1000.0;
}

inline double source_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
    return source_distance(a.points(), b.points());
}

// ---------------------------------------------------------------------------
// Every measure for one ordered pair, computed from a single pair of profiles.

struct PairComparison {
    std::string a_name, b_name;
    std::size_t a_points = 0, b_points = 0;
    double a_length = 0.0, b_length = 0.0;  // [m]
    double directed_max_ab = 0.0, directed_max_ba = 0.0, max = 0.0;
    double directed_mean_ab = 0.0, directed_mean_ba = 0.0, mean = 0.0;
    struct Band {
        double threshold = 0.0;  // [m]
        MatchingLength ab, ba, average;
    };
    std::vector<Band> bands;
};

inline PairComparison compare(const DiscreteCurve& a, const DiscreteCurve& b, std::span<const BandThreshold> bands) {
    const auto ab = directed_profile(a, b);
    const auto ba = directed_profile(b, a);
    PairComparison r;
    r.a_name = a.name();
    r.b_name = b.name();
    r.a_points = a.size();
    r.b_points = b.size();
    r.a_length = a.length();
    r.b_length = b.length();
    r.directed_max_ab = ab.max();
    r.directed_max_ba = ba.max();
    r.max = std::max(r.directed_max_ab, r.directed_max_ba);
    r.directed_mean_ab = ab.mean();
    r.directed_mean_ba = ba.mean();
    r.mean = combine_mean(r.a_length, r.directed_mean_ab, r.b_length, r.directed_mean_ba);
    for (const auto& band : bands) {
        PairComparison::Band row;
        row.threshold = band.meters;
        const double mab = ab.matched_length(band.meters);
        const double mba = ba.matched_length(band.meters);
        row.ab = {mab, 100.0 * mab / r.a_length};
        row.ba = {mba, 100.0 * mba / r.b_length};
        row.average = matching_average(mab, r.a_length, mba, r.b_length);
        r.bands.push_back(row);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Splitting and joining river courses

/// Index of the vertex closest to `reference`; ties resolve to the lower index.
inline std::size_t nearest_vertex(std::span<const GeoPoint> points, const GeoPoint& reference) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double d = geodesy::geodesic_distance(points[k], reference);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

/// Upper and lower course split at the vertex nearest to `reference`; both parts keep that vertex.
inline std::pair<DiscreteCurve, DiscreteCurve> split_at(const DiscreteCurve& c, const GeoPoint& reference,
                                                        std::string upper_name, std::string lower_name) {
    const auto pts = c.points();
    const std::size_t k = nearest_vertex(pts, reference);
    std::vector<GeoPoint> upper(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    std::vector<GeoPoint> lower(pts.begin() + static_cast<std::ptrdiff_t>(k), pts.end());
    return {build_segments(std::move(upper), std::move(upper_name)),
            build_segments(std::move(lower), std::move(lower_name))};
}

/// Courses joined end to start, e.g. a tributary followed by the main river below the confluence.
inline DiscreteCurve concatenate(std::span<const DiscreteCurve> parts, std::string name) {
    std::vector<GeoPoint> pts;
    for (const auto& c : parts) pts.insert(pts.end(), c.points().begin(), c.points().end());
    return build_segments(std::move(pts), std::move(name));
}

}  // namespace lagl::curves
