// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "quadprop/geometry.hpp"

namespace quadprop {
namespace {

Quad unit_square() { return canonicalize(std::array<Point, 4>{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}); }

// Unit square rotated 45 degrees about (0.5, 0.5).
Quad rotated_unit_square() {
    const double r = std::sqrt(0.5);
    return canonicalize(std::array<Point, 4>{{{0.5, 0.5 - r}, {0.5 + r, 0.5}, {0.5, 0.5 + r}, {0.5 - r, 0.5}}});
}

void expect_vertices(const Quad& q, std::array<Point, 4> expected) {
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(q.v[i].x, expected[i].x) << "vertex " << i;
        EXPECT_DOUBLE_EQ(q.v[i].y, expected[i].y) << "vertex " << i;
    }
}

TEST(Canonicalize, AlreadyCanonical) {
    const Quad q = canonicalize(std::array<Point, 4>{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
    expect_vertices(q, {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
    EXPECT_FALSE(q.padded);
}

TEST(Canonicalize, RotatedAndReversed) {
    const Quad q = canonicalize(std::array<Point, 4>{{{1, 1}, {0, 1}, {0, 0}, {1, 0}}});
    expect_vertices(q, {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
}

TEST(Canonicalize, BowtieRepairedThroughHull) {
    const Quad q = canonicalize(std::array<Point, 4>{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}});
    expect_vertices(q, {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
    // Simple and area-positive: every turn has the same sign.
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_GT(orient(q.v[i], q.v[(i + 1) % 4], q.v[(i + 2) % 4]), 0.0);
    }
    EXPECT_GT(signed_area(q.v), 0.0);
}

TEST(Canonicalize, InteriorPointGivesPaddedTriangle) {
    const Quad q = canonicalize(std::array<Point, 4>{{{0, 0}, {4, 0}, {1, 1}, {0, 4}}});
    EXPECT_TRUE(q.padded);
    expect_vertices(q, {{{0, 0}, {4, 0}, {0, 4}, {0, 4}}});
    EXPECT_DOUBLE_EQ(area(q), 8.0);
    EXPECT_EQ(canonicalize(q), q);
}

TEST(Canonicalize, StartVertexTieGoesToMinimumX) {
    const Quad q = canonicalize(std::array<Point, 4>{{{5, 2}, {3, 2}, {3, 6}, {5, 6}}});
    EXPECT_DOUBLE_EQ(q.v[0].x, 3.0);
    EXPECT_DOUBLE_EQ(q.v[0].y, 2.0);
    EXPECT_DOUBLE_EQ(q.v[1].x, 5.0);
}

TEST(Canonicalize, DegenerateInputsThrow) {
    EXPECT_THROW(canonicalize(std::array<Point, 4>{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}}), DegenerateQuad);
    EXPECT_THROW(canonicalize(std::array<Point, 4>{{{0, 0}, {0, 0}, {1, 1}, {1, 1}}}), DegenerateQuad);
    EXPECT_THROW(canonicalize(std::array<Point, 4>{{{0, 0}, {1, 0}, {NAN, 1}, {0, 1}}}), DegenerateQuad);
    EXPECT_THROW(canonicalize(std::array<Point, 4>{{{0, 0}, {1, 1}, {2, 2}, {1, 1}}}), DegenerateQuad);
}

TEST(Canonicalize, IdempotentOnRandomPointSets) {
    Rng rng(11);
    for (int t = 0; t < 5000; ++t) {
        std::array<Point, 4> p{};
        for (Point& x : p) {
            x = {rng.uniform(0, 100), rng.uniform(0, 100)};
        }
        const Quad q = canonicalize(p);
        EXPECT_EQ(canonicalize(q), q);
        EXPECT_GE(signed_area(q.v), 0.0);
    }
}

TEST(Area, Examples) {
    EXPECT_DOUBLE_EQ(area(unit_square()), 1.0);
    EXPECT_DOUBLE_EQ(area(Quad{{Point{0, 0}, Point{1, 0}, Point{2, 0}, Point{3, 0}}}), 0.0);
    EXPECT_DOUBLE_EQ(area(canonicalize(std::array<Point, 4>{{{0, 0}, {2, 0}, {3, 2}, {1, 2}}})), 4.0);
}

TEST(IntersectionArea, Examples) {
    EXPECT_DOUBLE_EQ(intersection_area(unit_square(), unit_square()), 1.0);
    EXPECT_DOUBLE_EQ(intersection_area(unit_square(), translated(unit_square(), 2, 0)), 0.0);
    EXPECT_NEAR(intersection_area(unit_square(), rotated_unit_square()), 2.0 * (std::sqrt(2.0) - 1.0), 1e-12);
}

TEST(IntersectionArea, RotatedSquareAgreesWithRaster) {
    // Frozen from the raster oracle at n = 2048: 0.828427 to 4 decimals.
    const double raster = testing::raster_intersection(unit_square(), rotated_unit_square(), 2048);
    EXPECT_NEAR(raster, 0.828427, 1e-3);
    EXPECT_NEAR(intersection_area(unit_square(), rotated_unit_square()), raster, 1e-3);
}

TEST(Iou, Examples) {
    EXPECT_DOUBLE_EQ(iou(unit_square(), unit_square()), 1.0);
    EXPECT_NEAR(iou(unit_square(), translated(unit_square(), 0.5, 0)), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(iou(unit_square(), rotated_unit_square()), 0.707107, 1e-6);
}

TEST(Iou, ZeroAreaUnionIsZero) {
    const Quad flat{{Point{0, 0}, Point{1, 0}, Point{2, 0}, Point{3, 0}}};
    EXPECT_EQ(iou(flat, flat), 0.0);
}

TEST(Iou, PaddedTriangleAgainstSquare) {
    const Quad tri = canonicalize(std::array<Point, 4>{{{0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}}});
    ASSERT_TRUE(tri.padded);
    EXPECT_NEAR(intersection_area(tri, unit_square()), 0.5, 1e-12);
    EXPECT_NEAR(intersection_area(unit_square(), tri), 0.5, 1e-12);
    EXPECT_NEAR(iou(tri, unit_square()), 0.5, 1e-12);
}

TEST(Aabb, Examples) {
    EXPECT_EQ(aabb(unit_square()), (Box{0, 0, 1, 1}));
    const Quad diamond = canonicalize(std::array<Point, 4>{{{1, 0}, {2, 1}, {1, 2}, {0, 1}}});
    EXPECT_EQ(aabb(diamond), (Box{0, 0, 2, 2}));
}

TEST(Aabb, DisjointBoxesMeanZeroIou) {
    Rng rng(5);
    int disjoint_pairs = 0;
    for (int t = 0; t < 3000; ++t) {
        const Quad a = testing::random_convex_quad(rng);
        const Quad b = testing::random_convex_quad(rng);
        if (disjoint(aabb(a), aabb(b))) {
            ++disjoint_pairs;
            EXPECT_EQ(iou(a, b), 0.0);
        }
    }
    EXPECT_GT(disjoint_pairs, 100);
}

TEST(BoxIou, AxisAlignedBaseline) {
    EXPECT_NEAR(box_iou({0, 0, 1, 1}, {0.5, 0, 1.5, 1}), 1.0 / 3.0, 1e-12);
    EXPECT_EQ(box_iou({0, 0, 1, 1}, {1, 0, 2, 1}), 0.0);
    // Hull of the rotated square is a 2x2-area box containing the unit square.
    EXPECT_NEAR(box_iou(aabb(unit_square()), aabb(rotated_unit_square())), 0.5, 1e-12);
}

class IouProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(IouProperties, SymmetryIdentityBoundsEquivariance) {
    Rng rng(GetParam());
    for (int t = 0; t < 500; ++t) {
        const Quad a = testing::random_convex_quad(rng);
        const Quad b = testing::random_convex_quad(rng);
        const double ab = iou(a, b);
        EXPECT_NEAR(ab, iou(b, a), 1e-12);
        EXPECT_NEAR(iou(a, a), 1.0, 1e-12);

        const double inter = intersection_area(a, b);
        EXPECT_GE(inter, 0.0);
        EXPECT_LE(inter, std::min(area(a), area(b)) + 1e-12);

        // Common rotation + uniform scale + translation.
        const double theta = rng.uniform(0, 2 * std::numbers::pi);
        const double s = rng.uniform(0.1, 10.0);
        const double tx = rng.uniform(-500, 500);
        const double ty = rng.uniform(-500, 500);
        auto move = [&](const Quad& q) {
            std::array<Point, 4> p{};
            for (std::size_t i = 0; i < 4; ++i) {
                const Point v = q.v[i];
                p[i] = {s * (v.x * std::cos(theta) - v.y * std::sin(theta)) + tx,
                        s * (v.x * std::sin(theta) + v.y * std::cos(theta)) + ty};
            }
            return canonicalize(p);
        };
        EXPECT_NEAR(iou(move(a), move(b)), ab, 1e-9);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, IouProperties, ::testing::Values(1u, 2u, 3u));

TEST(IouOracle, RasterAgreementOnRandomPairs) {
    Rng rng(2024);
    double worst = 0.0;
    for (int t = 0; t < 300; ++t) {
        const Quad a = testing::random_convex_quad(rng);
        const Quad b = testing::random_convex_quad(rng);
        worst = std::max(worst, std::abs(iou(a, b) - testing::raster_iou(a, b, 2048)));
    }
    EXPECT_LE(worst, 2e-3);
}

} // namespace
} // namespace quadprop
