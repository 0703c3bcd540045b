#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lagl/affine.hpp"

using namespace lagl;
using namespace lagl::affine;
using geodesy::GeoPoint;

namespace {

CorrespondenceSet synthesize(const AffineParams& t, const std::vector<PixelPoint>& xs, std::string name = "synthetic") {
    CorrespondenceSet s{std::move(name), {}, {}};
    for (const auto& x : xs) {
        const auto [lon, lat] = evaluate(t, x);
        s.pairs.push_back({x, GeoPoint{lon, lat}, ""});
    }
    return s;
}

void expect_params_near(const AffineParams& got, const AffineParams& want, double rel) {
    for (std::size_t k = 0; k < AffineParams::size; ++k) {
        EXPECT_NEAR(got[k], want[k], rel * std::max(1.0, std::abs(want[k]))) << AffineParams::names[k];
    }
}

}  // namespace

TEST(ApplyAffine, Examples) {
    const auto id = apply_affine(AffineParams{}, {10, 20});
    EXPECT_EQ(id.lon, 10.0);
    EXPECT_EQ(id.lat, 20.0);

    AffineParams shift;
    shift.b1 = 5;
    shift.b2 = -3;
    const auto s = apply_affine(shift, {0, 0});
    EXPECT_EQ(s.lon, 5.0);
    EXPECT_EQ(s.lat, -3.0);

    const auto g = apply_affine(AffineParams{2, 1, 0, 1, 1, 1}, {1, 1});
    EXPECT_EQ(g.lon, 4.0);
    EXPECT_EQ(g.lat, 2.0);
}

TEST(ApplyAffine, LatitudeOutOfRange) {
    AffineParams t;
    t.b2 = 80.0;
    try {
        apply_affine(t, {0, 20});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::range);
    }
}

TEST(FitAffine, RecoversKnownAffine) {
    const AffineParams truth{0.013, -0.002, 0.0015, -0.011, 12.5, 47.25};
    const auto set = synthesize(truth, {{10, 20}, {300, 45}, {120, 400}, {510, 380}, {250, 250}});
    expect_params_near(fit_affine(set), truth, 1e-9);
    EXPECT_LE(mean_error(fit_affine(set), set), 1e-6);
}

TEST(FitAffine, ThreePointsInterpolateIdentity) {
    const auto set = synthesize(AffineParams{}, {{1, 2}, {5, 3}, {2, 7}});
    expect_params_near(fit_affine(set), AffineParams{}, 1e-12);
}

TEST(FitAffine, DegenerateSetsNameTheSet) {
    const auto collinear = synthesize(AffineParams{}, {{0, 0}, {1, 1}, {2, 2}, {5, 5}}, "line");
    try {
        fit_affine(collinear);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::degenerate);
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
    // three entries, two distinct sources
    const auto dup = synthesize(AffineParams{}, {{0, 0}, {0, 0}, {3, 1}}, "dup");
    EXPECT_THROW(fit_affine(dup), Error);
}

TEST(FitAffine, DuplicatesAreAveraged) {
    CorrespondenceSet s = synthesize(AffineParams{}, {{0, 0}, {4, 0}, {0, 4}});
    s.pairs.push_back({{0, 0}, GeoPoint{2.0, 0.0}, "again"});
    const auto d = deduplicated(s.pairs);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_DOUBLE_EQ(d[0].target.lon, 1.0);
    // three distinct sources: the fit interpolates the averaged targets
    const auto t = fit_affine(s);
    EXPECT_NEAR(evaluate(t, {0, 0}).first, 1.0, 1e-12);
}

TEST(FitAffine, OrderInvariant) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> px(0, 500), noise(-0.05, 0.05);
    CorrespondenceSet s{"noisy", {}, {}};
    for (int k = 0; k < 12; ++k) {
        const PixelPoint x{px(rng), px(rng)};
        s.pairs.push_back({x, GeoPoint{10 + 0.01 * x.x1 + noise(rng), 45 - 0.01 * x.x2 + noise(rng)}, ""});
    }
    const auto t = fit_affine(s);
    auto shuffled = s;
    std::shuffle(shuffled.pairs.begin(), shuffled.pairs.end(), rng);
    expect_params_near(fit_affine(shuffled), t, 1e-10);
}

TEST(FitAffine, MinimisesTheObjective) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> px(0, 800), noise(-0.1, 0.1), step(-1e-3, 1e-3);
    CorrespondenceSet s{"noisy", {}, {}};
    for (int k = 0; k < 15; ++k) {
        const PixelPoint x{px(rng), px(rng)};
        s.pairs.push_back({x, GeoPoint{20 + 0.005 * x.x1 + noise(rng), 40 - 0.004 * x.x2 + noise(rng)}, ""});
    }
    const auto t = fit_affine(s);
    const double best = objective(t, s);
    for (int k = 0; k < 100; ++k) {
        AffineParams q = t;
        for (std::size_t p = 0; p < AffineParams::size; ++p) q[p] += step(rng);
        EXPECT_GE(objective(q, s), best);
    }
}

TEST(FitAffine, SolvesThePrintedNormalSystem) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> px(0, 100), noise(-0.1, 0.1);
    CorrespondenceSet s{"noisy", {}, {}};
    for (int k = 0; k < 8; ++k) {
        const PixelPoint x{px(rng), px(rng)};
        s.pairs.push_back({x, GeoPoint{1 + 0.05 * x.x1 + noise(rng), 2 + 0.05 * x.x2 + noise(rng)}, ""});
    }
    const auto sys = normal_system(s);
    const auto t = fit_affine(s);
    Eigen::Matrix<double, 6, 1> u;
    u << t.a1, t.a2, t.b1, t.a3, t.a4, t.b2;
    const Eigen::Matrix<double, 6, 1> r = sys.matrix * u - sys.rhs;
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-9 * sys.rhs.cwiseAbs().maxCoeff());
    EXPECT_DOUBLE_EQ(sys.matrix(2, 2), 8.0);
    EXPECT_DOUBLE_EQ(sys.matrix(5, 5), 8.0);
    EXPECT_EQ(sys.matrix(0, 3), 0.0);
}

TEST(Errors, RmsAndMax) {
    const std::vector<double> res{3000.0, 4000.0};
    EXPECT_NEAR(rms_km(res), 3.5355, 1e-4);
    EXPECT_DOUBLE_EQ(max_km(res), 4.0);
    const auto perfect = synthesize(AffineParams{}, {{1, 2}, {5, 3}, {2, 7}});
    EXPECT_EQ(mean_error(AffineParams{}, perfect), 0.0);
    EXPECT_EQ(max_error(AffineParams{}, perfect), 0.0);
}

TEST(Errors, MeanNeverExceedsMax) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> px(0, 500), noise(-0.2, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
        CorrespondenceSet s{"s", {}, {}};
        for (int k = 0; k < 6; ++k) {
            const PixelPoint x{px(rng), px(rng)};
            s.pairs.push_back({x, GeoPoint{0.01 * x.x1 + noise(rng), 30 + 0.01 * x.x2 + noise(rng)}, ""});
        }
        const auto t = fit_affine(s);
        EXPECT_LE(mean_error(t, s), max_error(t, s) + 1e-15);
    }
}

TEST(Merged, ConcatenatesPairs) {
    const std::vector<CorrespondenceSet> sets{synthesize(AffineParams{}, {{1, 2}, {5, 3}}, "a"),
                                              synthesize(AffineParams{}, {{2, 7}}, "b")};
    const auto g = merged(sets, "global");
    EXPECT_EQ(g.name, "global");
    EXPECT_EQ(g.pairs.size(), 3u);
}
