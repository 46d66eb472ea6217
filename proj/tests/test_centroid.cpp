#include <gtest/gtest.h>

#include "krc/centroid.hpp"
#include "krc/generators.hpp"
#include "krc/random.hpp"

using namespace krc;

TEST(ColumnMeans, CountWeighted) {
    auto ds = build_dataset({{1, 2, 3}, {1, 2, 3}, {3, 2, 1}});
    auto cm = column_means(ds);
    EXPECT_DOUBLE_EQ(cm.means[0], 5.0 / 3);
    EXPECT_DOUBLE_EQ(cm.means[1], 2.0);
    EXPECT_DOUBLE_EQ(cm.means[2], 7.0 / 3);
}

TEST(RankOfMeans, TiesToLowerIndex) {
    std::vector<double> m{2.0, 2.0, 1.0};
    EXPECT_EQ(rank_of_means(m), Ranking::validate({2, 3, 1}));
}

TEST(OptimalCentroid, SingleRankingIsItsOwnCentroid) {
    auto ds = build_dataset({{2, 4, 1, 3}});
    auto r = optimal_centroid(ds);
    EXPECT_EQ(r.centroid, Ranking::validate({2, 4, 1, 3}));
    EXPECT_EQ(r.objective, 0);
}

TEST(OptimalCentroid, TwoOppositeRankings) {
    // Means are all equal; ties resolve to the identity.
    auto ds = build_dataset({{1, 2, 3}, {3, 2, 1}});
    auto r = optimal_centroid(ds);
    EXPECT_EQ(r.centroid, Ranking::identity(3));
    EXPECT_EQ(r.objective, 8);
}

TEST(OptimalCentroid, MajorityClusterKeepsMajority) {
    auto ds = build_dataset({{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2, 4, 3}});
    auto r = optimal_centroid(ds);
    EXPECT_EQ(r.centroid, Ranking::validate({1, 2, 3, 4}));
    EXPECT_EQ(r.objective, 2);
}

TEST(OptimalCentroid, EmptyThrows) {
    auto ds = build_dataset({{1, 2}});
    auto empty = ds.select(Labels{0}, 1);
    EXPECT_THROW(optimal_centroid(empty), ValidationError);
}

TEST(OptimalCentroid, MatchesBruteForce) {
    Rng rng(11);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t m = 2 + rng.below(6);
        const std::size_t n = 1 + rng.below(20);
        RowMatrix rows{m, {}};
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = random_ranking(m, rng);
            for (auto c = rng.below(5); c < 5; ++c) rows.push_back(x.values());
        }
        auto ds = CountedDataset::build(rows.view());
        const auto fast = optimal_centroid(ds);
        const auto slow = brute_force_centroid(ds);
        EXPECT_EQ(fast.objective, slow.objective);
        std::int64_t direct = 0;
        for (std::size_t i = 0; i < ds.distinct(); ++i) direct += ds.count(i) * sq_dist(ds.entry(i), fast.centroid.values());
        EXPECT_EQ(direct, fast.objective);
    }
}

TEST(OptimalCentroid, BruteForceCap) {
    auto ds = gen_uniform(3, 9, 1);
    EXPECT_THROW(brute_force_centroid(ds), CapExceeded);
}

TEST(OptimalCentroids, PerLabelAndEmpty) {
    auto ds = build_dataset({{1, 2, 3}, {3, 2, 1}, {1, 3, 2}});
    auto c = optimal_centroids(ds, Labels{0, 2, 0}, 3);
    ASSERT_TRUE(c[0].has_value());
    EXPECT_FALSE(c[1].has_value());
    EXPECT_EQ(*c[2], Ranking::validate({3, 2, 1}));
}
