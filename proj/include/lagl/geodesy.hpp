#pragma once

// Geodesics on the WGS84 ellipsoid.
//
// The inverse and direct problems are solved with Vincenty's nested-series
// iteration. Near-antipodal pairs where the inverse iteration does not settle
// within 100 steps fall back to the shorter of the two routes through a pole,
// which is exact for antipodal points and keeps the distance function total.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lagl/error.hpp"

namespace lagl::geodesy {

struct Ellipsoid {
    double a;  // semi-major axis [m]
    double f;  // flattening

    constexpr double b() const { return a * (1.0 - f); }
    constexpr double e2() const { return f * (2.0 - f); }
    constexpr double third_flattening() const { return f / (2.0 - f); }
};

inline constexpr Ellipsoid wgs84{6378137.0, 1.0 / 298.257223563};

/// Longitude wrapped into (-180, 180].
inline double normalize_longitude(double lon) {
    double x = std::remainder(lon, 360.0);
    return x == -180.0 ? 180.0 : x;
}

/// A position on the ellipsoid in degrees.
struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;

    /// Checked construction: latitude must lie in [-90, 90], longitude is wrapped.
    static GeoPoint from_degrees(double lon, double lat) {
        if (!std::isfinite(lon) || !std::isfinite(lat) || lat < -90.0 || lat > 90.0) {
            throw Error(ErrorCategory::range, "invalid geographic point (lon " + std::to_string(lon) +
                                                  ", lat " + std::to_string(lat) + ")");
        }
        return GeoPoint{normalize_longitude(lon), lat};
    }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct GeoSegment {
    GeoPoint start;
    GeoPoint end;

    bool degenerate() const { return start == end; }
};

struct InverseSolution {
    double distance = 0.0;  // [m]
    double azimuth1 = 0.0;  // forward azimuth at the first point [deg, clockwise from north]
    double azimuth2 = 0.0;  // forward azimuth at the second point [deg]
    bool converged = true;  // false when the antipodal fallback was used
};

struct DirectSolution {
    GeoPoint point;
    double azimuth = 0.0;  // forward azimuth at the destination [deg]
};

namespace detail {

inline constexpr double deg = std::numbers::pi / 180.0;
inline constexpr int max_iterations = 100;

struct ReducedLatitude {
    double sin_u;
    double cos_u;
};

inline ReducedLatitude reduced_latitude(double lat_deg, const Ellipsoid& e) {
    const double phi = lat_deg * deg;
    const double u = std::atan2((1.0 - e.f) * std::sin(phi), std::cos(phi));
    return {std::sin(u), std::cos(u)};
}

// Vincenty's A and B coefficients for a given u^2.
inline double series_a(double u2) {
    return 1.0 + u2 / 16384.0 * (4096.0 + u2 * (-768.0 + u2 * (320.0 - 175.0 * u2)));
}
inline double series_b(double u2) {
    return u2 / 1024.0 * (256.0 + u2 * (-128.0 + u2 * (74.0 - 47.0 * u2)));
}

inline double delta_sigma(double big_b, double sin_s, double cos_s, double cos_2sm) {
    const double c2 = cos_2sm * cos_2sm;
    return big_b * sin_s *
           (cos_2sm + big_b / 4.0 *
                          (cos_s * (-1.0 + 2.0 * c2) -
                           big_b / 6.0 * cos_2sm * (-3.0 + 4.0 * sin_s * sin_s) * (-3.0 + 4.0 * c2)));
}

}  // namespace detail

/// Meridian arc length from the equator to latitude `lat` (signed) [m].
inline double meridian_arc(double lat, const Ellipsoid& e = wgs84) {
    const double n = e.third_flattening();
    const double n2 = n * n;
    const double n3 = n2 * n;
    const double n4 = n2 * n2;
    const double phi = lat * detail::deg;
    return e.a / (1.0 + n) *
           ((1.0 + n2 / 4.0 + n4 / 64.0) * phi - 1.5 * (n - n3 / 8.0) * std::sin(2.0 * phi) +
            15.0 / 16.0 * (n2 - n4 / 4.0) * std::sin(4.0 * phi) - 35.0 / 48.0 * n3 * std::sin(6.0 * phi) +
            315.0 / 512.0 * n4 * std::sin(8.0 * phi));
}

inline double quarter_meridian(const Ellipsoid& e = wgs84) { return meridian_arc(90.0, e); }

/// Inverse problem: distance and azimuths between two points.
inline InverseSolution inverse(const GeoPoint& p, const GeoPoint& q, const Ellipsoid& e = wgs84) {
    using detail::deg;
    // the same pole under two longitudes is one point
    if (p == q || (p.lat == q.lat && std::abs(p.lat) == 90.0)) {
        return {};
    }
    const double b = e.b();
    const double f = e.f;
    const double lon_diff = normalize_longitude(q.lon - p.lon) * deg;
    const auto [sin_u1, cos_u1] = detail::reduced_latitude(p.lat, e);
    const auto [sin_u2, cos_u2] = detail::reduced_latitude(q.lat, e);

    double lambda = lon_diff;
    double sin_s = 0.0;
    double cos_s = 1.0;
    double sigma = 0.0;
    double cos2_alpha = 1.0;
    double cos_2sm = 0.0;
    double sin_l = 0.0;
    double cos_l = 1.0;
    bool converged = false;
    bool antipodal = false;

    for (int it = 0; it < detail::max_iterations; ++it) {
        sin_l = std::sin(lambda);
        cos_l = std::cos(lambda);
        const double t1 = cos_u2 * sin_l;
        const double t2 = cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_l;
        sin_s = std::hypot(t1, t2);
        cos_s = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_l;
        if (sin_s == 0.0) {
            if (cos_s > 0.0) {
                return {};  // coincident (e.g. the same pole at two longitudes)
            }
            antipodal = true;
            break;
        }
        sigma = std::atan2(sin_s, cos_s);
        const double sin_alpha = cos_u1 * cos_u2 * sin_l / sin_s;
        cos2_alpha = 1.0 - sin_alpha * sin_alpha;
        cos_2sm = cos2_alpha != 0.0 ? cos_s - 2.0 * sin_u1 * sin_u2 / cos2_alpha : 0.0;
        const double c = f / 16.0 * cos2_alpha * (4.0 + f * (4.0 - 3.0 * cos2_alpha));
        const double previous = lambda;
        lambda = lon_diff + (1.0 - c) * f * sin_alpha *
                                (sigma + c * sin_s * (cos_2sm + c * cos_s * (-1.0 + 2.0 * cos_2sm * cos_2sm)));
        if (std::abs(lambda) > std::numbers::pi) {
            break;
        }
        if (std::abs(lambda - previous) < 1e-13) {
            converged = true;
            break;
        }
    }

    if (!converged || antipodal) {
        const double quarter = quarter_meridian(e);
        const double m1 = meridian_arc(p.lat, e);
        const double m2 = meridian_arc(q.lat, e);
        const double north = (quarter - m1) + (quarter - m2);
        const double south = (quarter + m1) + (quarter + m2);
        InverseSolution s;
        s.converged = false;
        if (north <= south) {
            s.distance = north;
            s.azimuth1 = 0.0;
            s.azimuth2 = 180.0;
        } else {
            s.distance = south;
            s.azimuth1 = 180.0;
            s.azimuth2 = 0.0;
        }
        return s;
    }

    const double u2 = cos2_alpha * (e.a * e.a - b * b) / (b * b);
    const double big_a = detail::series_a(u2);
    const double big_b = detail::series_b(u2);
    InverseSolution s;
    s.distance = b * big_a * (sigma - detail::delta_sigma(big_b, sin_s, cos_s, cos_2sm));
    s.azimuth1 = std::atan2(cos_u2 * sin_l, cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_l) / deg;
    s.azimuth2 = std::atan2(cos_u1 * sin_l, -sin_u1 * cos_u2 + cos_u1 * sin_u2 * cos_l) / deg;
    return s;
}

/// Direct problem: destination after travelling `distance` metres from `p` along `azimuth` degrees.
inline DirectSolution direct(const GeoPoint& p, double azimuth, double distance, const Ellipsoid& e = wgs84) {
    using detail::deg;
    const double b = e.b();
    const double f = e.f;
    const double alpha1 = azimuth * deg;
    const double sin_a1 = std::sin(alpha1);
    const double cos_a1 = std::cos(alpha1);
    const auto [sin_u1, cos_u1] = detail::reduced_latitude(p.lat, e);

    const double sigma1 = std::atan2(sin_u1, cos_u1 * cos_a1);
    const double sin_alpha = cos_u1 * sin_a1;
    const double cos2_alpha = 1.0 - sin_alpha * sin_alpha;
    const double u2 = cos2_alpha * (e.a * e.a - b * b) / (b * b);
    const double big_a = detail::series_a(u2);
    const double big_b = detail::series_b(u2);

    const double sigma0 = distance / (b * big_a);
    double sigma = sigma0;
    double sin_s = 0.0;
    double cos_s = 1.0;
    double cos_2sm = 0.0;
    for (int it = 0; it < detail::max_iterations; ++it) {
        cos_2sm = std::cos(2.0 * sigma1 + sigma);
        sin_s = std::sin(sigma);
        cos_s = std::cos(sigma);
        const double next = sigma0 + detail::delta_sigma(big_b, sin_s, cos_s, cos_2sm);
        const bool done = std::abs(next - sigma) < 1e-13;
        sigma = next;
        if (done) {
            break;
        }
    }
    cos_2sm = std::cos(2.0 * sigma1 + sigma);
    sin_s = std::sin(sigma);
    cos_s = std::cos(sigma);

    const double tmp = sin_u1 * sin_s - cos_u1 * cos_s * cos_a1;
    const double lat2 = std::atan2(sin_u1 * cos_s + cos_u1 * sin_s * cos_a1, (1.0 - f) * std::hypot(sin_alpha, tmp));
    const double lambda = std::atan2(sin_s * sin_a1, cos_u1 * cos_s - sin_u1 * sin_s * cos_a1);
    const double c = f / 16.0 * cos2_alpha * (4.0 + f * (4.0 - 3.0 * cos2_alpha));
    const double lon_diff =
        lambda - (1.0 - c) * f * sin_alpha *
                     (sigma + c * sin_s * (cos_2sm + c * cos_s * (-1.0 + 2.0 * cos_2sm * cos_2sm)));

    DirectSolution out;
    out.point = GeoPoint{normalize_longitude(p.lon + lon_diff / deg), lat2 / deg};
    out.azimuth = std::atan2(sin_alpha, -tmp) / deg;
    return out;
}

/// Length of the shortest geodesic between p and q [m].
inline double geodesic_distance(const GeoPoint& p, const GeoPoint& q, const Ellipsoid& e = wgs84) {
    return inverse(p, q, e).distance;
}

/// Point halfway along the geodesic from p to q.
inline GeoPoint geodesic_midpoint(const GeoPoint& p, const GeoPoint& q, const Ellipsoid& e = wgs84) {
    const auto inv = inverse(p, q, e);
    if (inv.distance == 0.0) {
        return p;
    }
    return direct(p, inv.azimuth1, inv.distance / 2.0, e).point;
}

/// Points along the geodesic from `start` to `end`, spaced at most `step` metres, both ends included.
inline std::vector<GeoPoint> densify(const GeoPoint& start, const GeoPoint& end, double step,
                                     const Ellipsoid& e = wgs84) {
    if (!(step > 0.0)) {
        throw Error(ErrorCategory::argument, "densification step must be positive");
    }
    const auto inv = inverse(start, end, e);
    const auto count = static_cast<std::size_t>(std::ceil(inv.distance / step));
    std::vector<GeoPoint> out;
    out.reserve(count + 1);
    out.push_back(start);
    for (std::size_t k = 1; k < count; ++k) {
        const double t = inv.distance * static_cast<double>(k) / static_cast<double>(count);
        out.push_back(direct(start, inv.azimuth1, t, e).point);
    }
    if (count > 0) {
        out.push_back(end);
    }
    return out;
}

inline double polyline_length(std::span<const GeoPoint> points, const Ellipsoid& e = wgs84) {
    double total = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k) {
        total += geodesic_distance(points[k - 1], points[k], e);
    }
    return total;
}

/// Segments longer than this are scanned at 1 km steps before local refinement.
inline constexpr double long_segment_threshold = 100'000.0;

/// Minimum geodesic distance from p to any point of the geodesic segment s [m].
///
/// The foot point is first estimated in an azimuthal equidistant plane centred
/// at p, then refined by re-projecting around the current foot estimate, where
/// the segment maps to a straight line through the origin.
inline double point_to_segment_distance(const GeoPoint& p, const GeoSegment& s, const Ellipsoid& e = wgs84) {
    using detail::deg;
    const double to_start = geodesic_distance(p, s.start, e);
    if (s.degenerate()) {
        return to_start;
    }
    const auto along = inverse(s.start, s.end, e);
    const double length = along.distance;
    double best = std::min(to_start, geodesic_distance(p, s.end, e));
    if (length == 0.0 || best == 0.0) {
        return best;
    }

    double t = 0.0;
    if (length <= long_segment_threshold) {
        const auto ps = inverse(p, s.start, e);
        const auto pe = inverse(p, s.end, e);
        const double ax = ps.distance * std::sin(ps.azimuth1 * deg);
        const double ay = ps.distance * std::cos(ps.azimuth1 * deg);
        const double bx = pe.distance * std::sin(pe.azimuth1 * deg);
        const double by = pe.distance * std::cos(pe.azimuth1 * deg);
        const double dx = bx - ax;
        const double dy = by - ay;
        const double len2 = dx * dx + dy * dy;
        const double tau = len2 > 0.0 ? std::clamp(-(ax * dx + ay * dy) / len2, 0.0, 1.0) : 0.0;
        t = tau * length;
    } else {
        const auto steps = static_cast<int>(std::ceil(length / 1000.0));
        double closest = best;
        for (int k = 0; k <= steps; ++k) {
            const double tk = length * k / steps;
            const double d = geodesic_distance(p, direct(s.start, along.azimuth1, tk, e).point, e);
            if (d < closest) {
                closest = d;
                t = tk;
            }
        }
    }

    // Along-track offset of p from the foot estimate, spherical form with the
    // equatorial radius; the segment is a straight line in the plane centred there.
    const double radius = e.a;
    for (int it = 0; it < 30; ++it) {
        const auto foot = direct(s.start, along.azimuth1, t, e);
        const auto to_p = inverse(foot.point, p, e);
        best = std::min(best, to_p.distance);
        if (to_p.distance == 0.0) {
            break;
        }
        const double angle = (to_p.azimuth1 - foot.azimuth) * deg;
        const double delta = to_p.distance / radius;
        const double step = radius * std::atan2(std::sin(delta) * std::cos(angle), std::cos(delta));
        const double next = std::clamp(t + step, 0.0, length);
        if (std::abs(next - t) < 1e-7) {
            break;
        }
        t = next;
    }
    return best;
}

}  // namespace lagl::geodesy
