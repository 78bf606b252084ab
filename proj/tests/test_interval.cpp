// Copyright 2026 The ivdid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"

using namespace ivdid;

namespace {

void expect_interval(const Interval& got, double lo, double hi, double tol = 1e-9)
{
    EXPECT_NEAR(got.lower(), lo, tol) << got;
    EXPECT_NEAR(got.upper(), hi, tol) << got;
}

} // namespace

TEST(Interval, ConstructionValidates)
{
    EXPECT_NO_THROW(Interval(2.0, 2.0));
    EXPECT_THROW(Interval(2.0, 1.0), InvalidInterval);
    EXPECT_THROW(Interval(0.0, std::numeric_limits<double>::infinity()), InvalidInterval);
    EXPECT_THROW(Interval(std::nan(""), 1.0), InvalidInterval);
    const Interval a(1.0, 3.0);
    EXPECT_DOUBLE_EQ(a.width(), 2.0);
    EXPECT_DOUBLE_EQ(a.midpoint(), 2.0);
    EXPECT_DOUBLE_EQ(a.at(0.25), 1.5);
    EXPECT_TRUE(Interval::point(4.0).degenerate());
}

TEST(Interval, MinkowskiSum)
{
    expect_interval(minkowski_sum({1, 3}, {0, 2}), 1, 5);
    expect_interval(minkowski_sum({-7, 4}, {0, 0}), -7, 4);
    expect_interval(minkowski_sum({-3, -1}, {2, 2}), -1, 1);
}

TEST(Interval, MinkowskiDifference)
{
    expect_interval(minkowski_diff({1, 3}, {0, 2}), -1, 3);
    expect_interval(minkowski_diff({-7, 4}, {0, 0}), -7, 4);
    expect_interval(minkowski_diff({0, 0}, {-4, -3.5}), 3.5, 4);
}

TEST(Interval, Scale)
{
    expect_interval(scale({15, 15}, 0.5), 7.5, 7.5);
    expect_interval(scale({1, 3}, 0.0), 0, 0);
    expect_interval(scale({10, 20}, 0.5), 5, 10);
    EXPECT_THROW(scale({1, 3}, -1.0), PreconditionError);
}

TEST(Interval, ApplyMap)
{
    expect_interval(apply_map(LinearIntervalMap(0.25, 1, 0), {-3, -1}), -1, -0.5);
    expect_interval(apply_map(LinearIntervalMap::identity(), {2, 5}), 2, 5);
    expect_interval(apply_map(LinearIntervalMap(1, 1, -3), {0, 0.5}), -4, -3.5);
}

TEST(Interval, MapRejectsBadParameters)
{
    EXPECT_THROW(LinearIntervalMap(-0.5, 0, 0), PreconditionError);
    EXPECT_THROW(LinearIntervalMap(std::numeric_limits<double>::infinity(), 0, 0), PreconditionError);
    EXPECT_THROW(LinearIntervalMap::between({1, 1}, {0, 2}), TransportUndefined);
    const auto m = LinearIntervalMap::between({1, 3}, {0, 0.5});
    EXPECT_DOUBLE_EQ(m.slope(), 0.25);
    EXPECT_DOUBLE_EQ(m(1.0), 0.0);
    EXPECT_DOUBLE_EQ(m(3.0), 0.5);
}

TEST(Interval, RandomWidthIdentities)
{
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> slope(0.0, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const Interval a = fixtures::random_interval(rng);
        const Interval b = fixtures::random_interval(rng);
        EXPECT_NEAR(minkowski_diff(a, b).width(), a.width() + b.width(), 1e-12 * 100);
        EXPECT_NEAR(minkowski_sum(a, b).width(), a.width() + b.width(), 1e-12 * 100);
        const double s = slope(rng);
        const Interval image = apply_map(LinearIntervalMap(s, a.lower(), b.lower()), a);
        EXPECT_NEAR(image.width(), s * a.width(), 1e-9);
    }
}

TEST(Lemma, ParallelShiftImageOfFirstExample)
{
    const auto r = check_lemma_conditions({1, 3}, {0, 0.5}, {-3, -1}, Interval(-4, -3.5));
    EXPECT_TRUE(r.valid_interval);
    EXPECT_TRUE(r.proportional_width);
    EXPECT_TRUE(r.parallel_shift);
    ASSERT_TRUE(r.gamma.has_value());
    EXPECT_NEAR(*r.gamma, 1.0, 1e-12);
}

TEST(Lemma, IntervalTrendsImageFailsParallelShift)
{
    const auto r = check_lemma_conditions({1, 3}, {0, 0.5}, {-3, -1}, Interval(-1, -0.5));
    EXPECT_TRUE(r.valid_interval);
    EXPECT_TRUE(r.proportional_width);
    EXPECT_FALSE(r.parallel_shift);
}

TEST(Lemma, NoMovementPassesWithAnyGamma)
{
    const auto r = check_lemma_conditions({1, 3}, {1, 3}, {-3, -1}, Interval(-3, -1));
    EXPECT_TRUE(r.all());
    EXPECT_FALSE(r.gamma.has_value());
}

TEST(Lemma, OneSidedMovementMustMatch)
{
    // only the upper endpoint of A moves; B may move only there
    EXPECT_TRUE(check_lemma_conditions({0, 2}, {0, 4}, {0, 1}, Interval(0, 2)).all());
    EXPECT_FALSE(check_lemma_conditions({0, 2}, {0, 4}, {0, 1}, Interval(0.5, 2)).parallel_shift);
}

TEST(Lemma, ZeroWidthInputsAreRejected)
{
    EXPECT_THROW(check_lemma_conditions({1, 1}, {0, 1}, {0, 1}, Interval(0, 1)), PreconditionError);
    EXPECT_THROW(check_lemma_conditions({0, 1}, {0, 1}, {2, 2}, Interval(2, 2)), PreconditionError);
}

// Shifting each bound of B by the move of the matching bound of A, on these
// inputs, produces an inverted image.
TEST(Lemma, BoundByBoundTrendsProduceInvalidImage)
{
    const Interval a1(0, 3), a2(2, 3), b1(0, 1);
    const double b2_lower = b1.lower() + (a2.lower() - a1.lower());
    const double b2_upper = b1.upper() + (a2.upper() - a1.upper());
    EXPECT_DOUBLE_EQ(b2_lower, 2.0);
    EXPECT_DOUBLE_EQ(b2_upper, 1.0);
    EXPECT_THROW(Interval(b2_lower, b2_upper), InvalidInterval);
    const auto r = check_lemma_conditions(a1, a2, b1, b2_lower, b2_upper);
    EXPECT_FALSE(r.valid_interval);
    EXPECT_FALSE(r.all());
}

TEST(Lemma, ParallelShiftRoundTripOnRandomInputs)
{
    std::mt19937_64 rng(202);
    for (int k = 0; k < 1000; ++k) {
        const Interval a1 = fixtures::random_interval(rng, 0.01);
        const Interval a2 = fixtures::random_interval(rng);
        const Interval b1 = fixtures::random_interval(rng, 0.01);
        const Interval b2 = apply_map(LinearIntervalMap::between(a1, b1), a2);
        const auto r = check_lemma_conditions(a1, a2, b1, b2);
        ASSERT_TRUE(r.all()) << a1 << a2 << b1 << b2;
        if (r.gamma) {
            EXPECT_NEAR(*r.gamma, b1.width() / a1.width(), 1e-9 * std::max(1.0, *r.gamma));
        }
    }
}
