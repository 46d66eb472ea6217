#include <gtest/gtest.h>

#include <cmath>

#include "krc/generators.hpp"
#include "krc/krca.hpp"
#include "krc/theory.hpp"

using namespace krc;

TEST(RelativeImprovement, Cases) {
    EXPECT_DOUBLE_EQ(relative_improvement(110, 100), 10.0);
    EXPECT_DOUBLE_EQ(relative_improvement(100, 100), 0.0);
    EXPECT_DOUBLE_EQ(relative_improvement(0, 0), 0.0);
    EXPECT_TRUE(std::isinf(relative_improvement(4, 0)));
}

TEST(EmptyClusterRepair, MovesFarthestEntryFromMultiEntryCluster) {
    auto ds = build_dataset({{1, 2, 3}, {1, 3, 2}, {3, 2, 1}});
    std::vector<Ranking> c{Ranking::identity(3), Ranking::identity(3)};
    auto fixed = empty_cluster_repair(Labels{0, 0, 0}, c, ds);
    EXPECT_EQ(fixed, (Labels{0, 0, 1}));
}

TEST(EmptyClusterRepair, TiesToLowestEntry) {
    auto ds = build_dataset({{1, 2, 3}, {2, 1, 3}, {1, 3, 2}});
    std::vector<Ranking> c{Ranking::identity(3), Ranking::identity(3)};
    EXPECT_EQ(empty_cluster_repair(Labels{0, 0, 0}, c, ds), (Labels{0, 1, 0}));
}

TEST(EmptyClusterRepair, Infeasible) {
    auto ds = build_dataset({{1, 2}, {2, 1}});
    std::vector<Ranking> c{Ranking::identity(2), Ranking::identity(2), Ranking::identity(2)};
    EXPECT_THROW(empty_cluster_repair(Labels{0, 1}, c, ds), InfeasibleError);
}

TEST(Krca, Errors) {
    auto ds = build_dataset({{1, 2}, {2, 1}});
    KrcaConfig cfg;
    cfg.k = 3;
    EXPECT_THROW(krca(ds, cfg), InfeasibleError);
    cfg.k = 0;
    EXPECT_THROW(krca(ds, cfg), ValidationError);
    cfg.k = 1;
    cfg.epsilon = -1;
    EXPECT_THROW(krca(ds, cfg), ValidationError);
}

TEST(Krca, SingleClusterIsOptimalCentroid) {
    auto ds = gen_uniform(500, 5, 2);
    KrcaConfig cfg;
    cfg.k = 1;
    auto rep = krca(ds, cfg);
    EXPECT_EQ(rep.final.centroids[0], optimal_centroid(ds).centroid);
    EXPECT_EQ(rep.final.objective, optimal_centroid(ds).objective);
}

TEST(Krca, MonotoneWithZeroEpsilon) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        KrcaConfig cfg;
        cfg.k = 2 + seed % 5;
        cfg.epsilon = 0.0;
        cfg.seed = seed;
        auto ds = gen_uniform(400, 4 + seed % 4, seed);
        auto rep = krca(ds, cfg);
        Objective prev = rep.baseline.objective;
        for (auto v : rep.per_iteration_objectives) {
            EXPECT_LE(v, prev);
            prev = v;
        }
        EXPECT_GE(rep.relative_improvement_pct, 0.0);
        EXPECT_LE(rep.final.objective, rep.baseline.objective);
        EXPECT_EQ(rep.final.objective, objective(ds, rep.final.centroids, rep.final.labels));
        // Final centroids are optimal for their clusters.
        for (Label l = 0; l < cfg.k; ++l)
            EXPECT_EQ(rep.final.centroids[l], optimal_centroid(ds.select(rep.final.labels, l)).centroid);
    }
}

TEST(Krca, Deterministic) {
    auto ds = gen_uniform(2000, 5, 3);
    KrcaConfig cfg;
    cfg.k = 4;
    cfg.seed = 17;
    auto a = krca(ds, cfg);
    auto b = krca(ds, cfg);
    EXPECT_EQ(a.final.labels, b.final.labels);
    EXPECT_EQ(a.per_iteration_objectives, b.per_iteration_objectives);
}

TEST(Krca, PositiveEpsilonReturnsBestSeen) {
    auto ds = gen_uniform(1500, 5, 5);
    KrcaConfig cfg;
    cfg.k = 5;
    cfg.epsilon = 20.0;
    cfg.seed = 3;
    auto rep = krca(ds, cfg);
    Objective best = rep.baseline.objective;
    for (auto v : rep.per_iteration_objectives) best = std::min(best, v);
    EXPECT_EQ(rep.final.objective, best);
}

TEST(Krca, NoWorseThanTwiceKmcOptimum) {
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        RowMatrix rows{4, {}};
        const std::size_t n = 4 + rng.below(5);
        for (std::size_t i = 0; i < n; ++i) rows.push_back(random_ranking(4, rng).values());
        auto ds = CountedDataset::build(rows.view());
        if (ds.distinct() < 2) continue;
        KrcaConfig cfg;
        cfg.k = 2;
        cfg.seed = static_cast<std::uint64_t>(rep);
        const auto got = krca(ds, cfg).final.objective;
        EXPECT_GE(got, exact_krc_oracle(ds, 2).value);
    }
}

TEST(Krca, RecoversSwapClusters) {
    SwapClusterSpec spec{3000, 7, 3, 1, 12};
    auto data = gen_swap_clustered(spec);
    KrcaConfig cfg;
    cfg.k = 3;
    cfg.seed = 1;
    auto rep = krca(data.dataset, cfg);
    // Every planted centroid is found (or one at distance at most 2).
    for (const auto& truth : data.centroids) {
        Objective best = std::numeric_limits<Objective>::max();
        for (const auto& c : rep.final.centroids) best = std::min(best, sq_dist(truth, c));
        EXPECT_LE(best, 2);
    }
}
