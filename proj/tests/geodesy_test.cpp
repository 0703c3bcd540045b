#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lagl/geodesy.hpp"
#include "oracles/densify.hpp"

using namespace lagl;
using namespace lagl::geodesy;

namespace {

struct ReferencePair {
    GeoPoint p, q;
    double distance, azimuth1, azimuth2;
};

std::vector<ReferencePair> load_reference() {
    std::ifstream in(std::string(LAGL_TEST_DATA) + "/geodesic_reference.csv");
    std::vector<ReferencePair> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        for (auto& c : line) {
            if (c == ',') c = ' ';
        }
        std::istringstream s(line);
        ReferencePair r;
        s >> r.p.lon >> r.p.lat >> r.q.lon >> r.q.lat >> r.distance >> r.azimuth1 >> r.azimuth2;
        out.push_back(r);
    }
    return out;
}

GeoPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lon(-180.0, 180.0), z(-1.0, 1.0);
    return GeoPoint::from_degrees(lon(rng), std::asin(z(rng)) * 180.0 / std::numbers::pi);
}

double angle_diff(double a, double b) { return std::abs(std::remainder(a - b, 360.0)); }

}  // namespace

TEST(GeoPoint, ValidatesAndNormalizes) {
    const auto p = GeoPoint::from_degrees(190.0, 10.0);
    EXPECT_DOUBLE_EQ(p.lon, -170.0);
    EXPECT_DOUBLE_EQ(GeoPoint::from_degrees(-180.0, 0.0).lon, 180.0);
    EXPECT_DOUBLE_EQ(GeoPoint::from_degrees(540.0, 0.0).lon, 180.0);
    EXPECT_THROW(GeoPoint::from_degrees(0.0, 90.5), Error);
    EXPECT_THROW(GeoPoint::from_degrees(std::nan(""), 0.0), Error);
}

TEST(GeodesicDistance, IdenticalPointsAreZero) {
    EXPECT_EQ(geodesic_distance({0, 0}, {0, 0}), 0.0);
    EXPECT_EQ(geodesic_distance({12.5, 45.1}, {12.5, 45.1}), 0.0);
    EXPECT_EQ(geodesic_distance({0, 90}, {120, 90}), 0.0);
}

TEST(GeodesicDistance, ReferenceArcs) {
    EXPECT_NEAR(geodesic_distance({0, 0}, {1, 0}), 111319.491, 0.001);
    EXPECT_NEAR(geodesic_distance({0, 0}, {0, 90}), 10001965.729, 0.01);
    EXPECT_NEAR(quarter_meridian(), 10001965.729, 0.01);
}

TEST(GeodesicDistance, MatchesIndependentReferenceWithinOneMillimetre) {
    const auto ref = load_reference();
    ASSERT_EQ(ref.size(), 1000u);
    double worst = 0.0;
    for (const auto& r : ref) {
        const auto s = inverse(r.p, r.q);
        EXPECT_TRUE(s.converged);
        worst = std::max(worst, std::abs(s.distance - r.distance));
        if (r.distance > 1000.0) {
            EXPECT_LT(angle_diff(s.azimuth1, r.azimuth1), 1e-6) << r.p.lon << ' ' << r.p.lat;
            EXPECT_LT(angle_diff(s.azimuth2, r.azimuth2), 1e-6);
        }
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(GeodesicDistance, AntipodalPairsStayFinite) {
    // half the meridian perimeter of WGS84
    const double half_meridian = 20003931.4586;
    for (double lat : {0.0, 10.0, 45.0, -60.0}) {
        const GeoPoint p{30.0, lat};
        const GeoPoint q{normalize_longitude(210.0), -lat};
        const double d = geodesic_distance(p, q);
        EXPECT_TRUE(std::isfinite(d));
        EXPECT_NEAR(d, half_meridian, 10.0) << lat;
    }
    // nearly antipodal, typically outside the iteration's convergence region
    const double d = geodesic_distance({0, 0.1}, {179.8, -0.1});
    EXPECT_TRUE(std::isfinite(d));
    EXPECT_GT(d, 19.9e6);
    EXPECT_LT(d, 20.01e6);
}

TEST(GeodesicDistance, SymmetricAndTriangle) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 500; ++k) {
        const auto p = random_point(rng), q = random_point(rng), r = random_point(rng);
        const double pq = geodesic_distance(p, q), qp = geodesic_distance(q, p);
        EXPECT_NEAR(pq, qp, 1e-9 * std::max(1.0, pq));
        EXPECT_LE(geodesic_distance(p, r), pq + geodesic_distance(q, r) + 1e-6);
    }
}

TEST(Direct, InvertsInverse) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 300; ++k) {
        const auto p = random_point(rng), q = random_point(rng);
        const auto inv = inverse(p, q);
        if (!inv.converged) continue;
        const auto d = direct(p, inv.azimuth1, inv.distance);
        EXPECT_LT(geodesic_distance(d.point, q), 1e-4);
        EXPECT_LT(angle_diff(d.azimuth, inv.azimuth2), 1e-7);
    }
}

TEST(Midpoint, HalvesTheGeodesic) {
    const GeoPoint p{13.5, 45.8}, q{16.2, 48.1};
    const auto m = geodesic_midpoint(p, q);
    const double total = geodesic_distance(p, q);
    EXPECT_NEAR(geodesic_distance(p, m), total / 2, 1e-6);
    EXPECT_NEAR(geodesic_distance(m, q), total / 2, 1e-6);
    EXPECT_EQ(geodesic_midpoint(p, p), p);
}

TEST(PolylineLength, Examples) {
    const std::vector<GeoPoint> one{{3, 4}};
    EXPECT_EQ(polyline_length(one), 0.0);
    const std::vector<GeoPoint> two{{3, 4}, {5, 6}};
    EXPECT_EQ(polyline_length(two), geodesic_distance(two[0], two[1]));
    const std::vector<GeoPoint> equator{{0, 0}, {1, 0}, {2, 0}};
    EXPECT_NEAR(polyline_length(equator), 222638.982, 0.002);
}

TEST(PointToSegment, EndpointAndDegenerate) {
    const GeoSegment s{{0, 0}, {1, 0}};
    EXPECT_EQ(point_to_segment_distance({0, 0}, s), 0.0);
    const GeoPoint p{2.0, 3.0};
    EXPECT_EQ(point_to_segment_distance(p, GeoSegment{{1, 1}, {1, 1}}), geodesic_distance(p, {1, 1}));
}

TEST(PointToSegment, AgreesWithFullDensification) {
    // every 0.1 m along a 111 km segment
    const GeoPoint p{0.5, 1.0};
    const GeoSegment s{{0, 0}, {1, 0}};
    const double brute = oracle::min_distance_densified(p, s, 0.1);
    const double d = point_to_segment_distance(p, s);
    EXPECT_NEAR(d, brute, 0.01);
    EXPECT_LE(d, brute + 1e-6);
}

TEST(PointToSegment, MidLatitudeProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lat(30.0, 60.0), lon(-20.0, 40.0), off(-0.6, 0.6);
    for (int k = 0; k < 40; ++k) {
        const GeoPoint a{lon(rng), lat(rng)};
        const GeoPoint b{a.lon + off(rng), a.lat + off(rng)};
        const GeoPoint p{a.lon + 2.0 * off(rng), a.lat + 2.0 * off(rng)};
        const GeoSegment s{a, b};
        const double d = point_to_segment_distance(p, s);
        EXPECT_LE(d, std::min(geodesic_distance(p, a), geodesic_distance(p, b)));
        EXPECT_NEAR(d, oracle::min_distance_two_stage(p, s), 0.01) << k;
    }
}

TEST(PointToSegment, LongSegmentsAreScannedThenRefined) {
    const GeoSegment s{{5.0, 40.0}, {9.0, 43.0}};  // about 470 km
    ASSERT_GT(geodesic_distance(s.start, s.end), long_segment_threshold);
    for (const GeoPoint p : {GeoPoint{7.5, 41.0}, GeoPoint{6.0, 42.5}, GeoPoint{10.0, 45.0}}) {
        EXPECT_NEAR(point_to_segment_distance(p, s), oracle::min_distance_two_stage(p, s), 0.01);
    }
}
