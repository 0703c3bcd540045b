#include <gtest/gtest.h>

#include <random>

#include "lagl/curves.hpp"
#include "oracles/densify.hpp"

using namespace lagl;
using namespace lagl::curves;
using geodesy::GeoPoint;

namespace {

GeoPoint north_of(const GeoPoint& p, double meters) { return geodesy::direct(p, 0.0, meters).point; }

DiscreteCurve wiggle(std::mt19937_64& rng, GeoPoint start, double heading, std::size_t n, double step,
                     std::string name) {
    std::normal_distribution<double> turn(0.0, 15.0);
    std::vector<GeoPoint> pts{start};
    for (std::size_t k = 1; k < n; ++k) {
        heading += turn(rng);
        pts.push_back(geodesy::direct(pts.back(), heading, step).point);
    }
    return build_segments(std::move(pts), std::move(name));
}

}  // namespace

TEST(BuildSegments, MidpointSplit) {
    const auto two = build_segments({{13, 47}, {14, 47.5}});
    const double L = geodesy::geodesic_distance({13, 47}, {14, 47.5});
    ASSERT_EQ(two.segment_lengths().size(), 2u);
    EXPECT_NEAR(two.segment_lengths()[0], L / 2, 1e-6);
    EXPECT_NEAR(two.segment_lengths()[1], L / 2, 1e-6);

    const auto three = build_segments({{0, 0}, {1, 0}, {2, 0}});
    const double L3 = geodesy::geodesic_distance({0, 0}, {2, 0});
    EXPECT_NEAR(three.segment_lengths()[0], L3 / 4, 1e-6);
    EXPECT_NEAR(three.segment_lengths()[1], L3 / 2, 1e-6);
    EXPECT_NEAR(three.segment_lengths()[2], L3 / 4, 1e-6);

    const auto eq = build_segments({{0, 0}, {1, 0}});
    EXPECT_NEAR(eq.segment_lengths()[0], 55659.7, 0.1);
    EXPECT_NEAR(eq.segment_lengths()[1], 55659.7, 0.1);
}

TEST(BuildSegments, LengthMatchesPolyline) {
    std::mt19937_64 rng(1);
    const auto c = wiggle(rng, {15, 46}, 80, 60, 7000, "w");
    EXPECT_NEAR(c.length(), geodesy::polyline_length(c.points()), 1e-9 * c.length());
}

TEST(BuildSegments, Degenerate) {
    EXPECT_THROW(build_segments({{1, 1}}), Error);
    EXPECT_THROW(build_segments({{1, 1}, {1, 1}, {1, 1}}), Error);
    EXPECT_EQ(build_segments({{1, 1}, {1, 1}, {2, 1}}).size(), 2u);
}

TEST(Hausdorff, IdenticalCurvesAreZero) {
    std::mt19937_64 rng(2);
    const auto a = wiggle(rng, {20, 45}, 30, 40, 3000, "a");
    EXPECT_EQ(directed_mean_hausdorff(a, a), 0.0);
    EXPECT_EQ(mean_hausdorff(a, a), 0.0);
    EXPECT_EQ(max_hausdorff(a, a), 0.0);
    EXPECT_EQ(matching_length(a, a, BandThreshold::meters_of(1.0)).meters, a.length());
    const auto avg = matching_average(a, a, BandThreshold::km(1));
    EXPECT_DOUBLE_EQ(avg.meters, a.length());
    EXPECT_DOUBLE_EQ(avg.percent, 100.0);
}

TEST(Hausdorff, ParallelEdgeTenKilometresNorth) {
    const GeoPoint b0{10.0, 0.0}, b1{10.1, 0.0};
    const auto b = build_segments({b0, b1}, "B");
    const auto a = build_segments({north_of(b0, 10000), north_of(b1, 10000)}, "A");
    EXPECT_NEAR(directed_mean_hausdorff(a, b), 10000.0, 1.0);
    EXPECT_NEAR(directed_max_hausdorff(a, b), 10000.0, 1.0);
}

TEST(Hausdorff, PointTwentyFiveKilometresAway) {
    // B follows a meridian; a geodesic leaving it due east is perpendicular, so its start is the foot point
    const auto b = build_segments({{21.0, 43.0}, {21.0, 44.0}, {21.0, 45.0}}, "B");
    const auto far = geodesy::direct({21.0, 44.0}, 90.0, 25000.0).point;
    const auto near = geodesy::direct({21.0, 44.0}, 90.0, 12000.0).point;
    const auto a = build_segments({far, near}, "A");
    EXPECT_NEAR(directed_max_hausdorff(a, b), 25000.0, 1e-3);
}

TEST(Hausdorff, MeanCombination) {
    EXPECT_NEAR(combine_mean(2021.995, 44.903, 1421.117, 39.621), 42.723, 5e-4);
    EXPECT_DOUBLE_EQ(combine_mean(5.0, 3.0, 5.0, 7.0), 5.0);
}

TEST(Matching, AverageRow) {
    const auto avg = matching_average(228127.0, 2021995.0, 185952.0, 2114009.0);
    EXPECT_DOUBLE_EQ(avg.meters, 207039.5);
    EXPECT_NEAR(avg.percent, 100.0 * 414079.0 / 4136004.0, 1e-12);
    const auto one_sided = matching_average(0.0, 10.0, 8.0, 8.0);
    EXPECT_DOUBLE_EQ(one_sided.meters, 4.0);
}

TEST(Matching, MonotoneInBandAndBounded) {
    std::mt19937_64 rng(4);
    const auto a = wiggle(rng, {16, 45}, 90, 80, 4000, "a");
    const auto b = wiggle(rng, {16.1, 45.2}, 90, 70, 4500, "b");
    double last = -1.0;
    for (double km : {1.0, 5.0, 10.0, 25.0, 50.0, 100.0, 1000.0}) {
        const auto m = matching_length(a, b, BandThreshold::km(km));
        EXPECT_GE(m.meters, last);
        EXPECT_GE(m.percent, 0.0);
        EXPECT_LE(m.percent, 100.0 + 1e-12);
        last = m.meters;
    }
    EXPECT_DOUBLE_EQ(last, a.length());
    const auto far = build_segments({{100, 10}, {100.1, 10}});
    EXPECT_EQ(matching_length(a, far, BandThreshold::km(50)).meters, 0.0);
    EXPECT_THROW(BandThreshold::km(0), Error);
}

TEST(Hausdorff, OrderingAndSymmetry) {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 5; ++k) {
        const auto a = wiggle(rng, {10, 50}, 120, 30, 5000, "a");
        const auto b = wiggle(rng, {10.05, 50.05}, 110, 25, 6000, "b");
        EXPECT_LE(directed_mean_hausdorff(a, b), directed_max_hausdorff(a, b));
        EXPECT_LE(mean_hausdorff(a, b), max_hausdorff(a, b));
        EXPECT_EQ(max_hausdorff(a, b), max_hausdorff(b, a));
        EXPECT_NEAR(mean_hausdorff(a, b), mean_hausdorff(b, a), 1e-9);
    }
}

TEST(Hausdorff, AgreesWithDensifiedOracle) {
    std::mt19937_64 rng(8);
    const auto a = wiggle(rng, {14, 46}, 45, 40, 60, "a");
    const auto b = wiggle(rng, {14.0003, 46.0002}, 50, 35, 70, "b");
    const auto dense = oracle::densified_hausdorff(a, b, 1.0);
    EXPECT_NEAR(mean_hausdorff(a, b), dense.mean, 2.0);
    EXPECT_NEAR(max_hausdorff(a, b), dense.max, 2.0);
}

TEST(Hausdorff, RefinementStability) {
    std::mt19937_64 rng(10);
    const auto a = wiggle(rng, {18, 48}, 0, 25, 8000, "a");
    const auto b = wiggle(rng, {18.2, 48}, 10, 25, 8000, "b");
    std::vector<GeoPoint> refined;
    for (std::size_t k = 0; k < a.size(); ++k) {
        refined.push_back(a.points()[k]);
        if (k + 1 < a.size()) refined.push_back(a.midpoints()[k]);
    }
    const auto r = build_segments(std::move(refined), "a2");
    double max_edge = 0.0;
    for (double e : a.edge_lengths()) max_edge = std::max(max_edge, e);
    EXPECT_LE(std::abs(directed_mean_hausdorff(r, b) - directed_mean_hausdorff(a, b)), max_edge);
}

TEST(Compare, MatchesIndividualMeasures) {
    std::mt19937_64 rng(12);
    const auto a = wiggle(rng, {22, 44}, 60, 30, 5000, "a");
    const auto b = wiggle(rng, {22.1, 44}, 70, 30, 5000, "b");
    const std::vector<BandThreshold> bands{BandThreshold::km(10), BandThreshold::km(50)};
    const auto c = compare(a, b, bands);
    EXPECT_EQ(c.max, max_hausdorff(a, b));
    EXPECT_DOUBLE_EQ(c.mean, mean_hausdorff(a, b));
    ASSERT_EQ(c.bands.size(), 2u);
    EXPECT_EQ(c.bands[1].ab.meters, matching_length(a, b, bands[1]).meters);
    EXPECT_EQ(c.bands[1].average.meters, matching_average(a, b, bands[1]).meters);
}

TEST(SourceDistance, Examples) {
    const auto a = build_segments({{0, 0}, {0.5, 0.5}});
    const auto b = build_segments({{1, 0}, {2, 0.5}});
    EXPECT_EQ(source_distance(a, a), 0.0);
    EXPECT_NEAR(source_distance(a, b), 111.319, 5e-4);
    EXPECT_THROW(source_distance(std::span<const GeoPoint>{}, a.points()), Error);
}

TEST(SplitJoin, SharedVertexAndOrder) {
    const auto d = build_segments({{10, 48}, {11, 48}, {12, 48}, {13, 47}}, "D");
    const auto [upper, lower] = split_at(d, {11.9, 48.05}, "D1", "D2");
    EXPECT_EQ(upper.size(), 3u);
    EXPECT_EQ(lower.size(), 2u);
    EXPECT_EQ(upper.points().back(), lower.points().front());
    const auto trib = build_segments({{12, 46}, {12, 48}}, "T");
    const std::vector<DiscreteCurve> parts{trib, lower};
    const auto joined = concatenate(parts, "TD");
    // the shared confluence vertex is stored once
    EXPECT_EQ(joined.size(), 3u);
    EXPECT_EQ(joined.name(), "TD");
    EXPECT_EQ(joined.points().front(), (GeoPoint{12, 46}));
}
