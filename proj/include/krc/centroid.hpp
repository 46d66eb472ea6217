#ifndef KRC_CENTROID_HPP
#define KRC_CENTROID_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "krc/error.hpp"
#include "krc/ranking.hpp"

namespace krc {

/// Count-weighted average rank of each option over a cluster.
struct ColumnMeans {
    std::vector<double> means;
};

struct CentroidResult {
    Ranking centroid;
    Objective objective = 0;
};

namespace detail {

inline std::vector<std::int64_t> column_sums(const CountedDataset& cluster) {
    std::vector<std::int64_t> sums(cluster.dim(), 0);
    for (std::size_t i = 0; i < cluster.distinct(); ++i) {
        auto e = cluster.entry(i);
        const auto c = cluster.count(i);
        for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += c * e[j];
    }
    return sums;
}

/// Ascending 1-based ranks of `keys`; equal keys ranked by coordinate index.
template <class T>
Ranking ascending_ranks(std::span<const T> keys) {
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    std::vector<Rank> ranks(keys.size());
    for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<Rank>(r + 1);
    return trusted_ranking(std::move(ranks));
}

} // namespace detail

inline ColumnMeans column_means(const CountedDataset& cluster) {
    if (cluster.empty()) throw ValidationError("empty cluster");
    const auto sums = detail::column_sums(cluster);
    ColumnMeans out;
    out.means.reserve(sums.size());
    const auto n = static_cast<double>(cluster.total());
    for (auto s : sums) out.means.push_back(static_cast<double>(s) / n);
    return out;
}

/// Coordinate j receives the rank of means[j] in non-decreasing order. Ties
/// go to the lower coordinate first; any tie order is equally optimal.
inline Ranking rank_of_means(std::span<const double> means) { return detail::ascending_ranks(means); }
inline Ranking rank_of_means(const ColumnMeans& cm) { return rank_of_means(std::span<const double>(cm.means)); }

/// Closed-form optimal ranking centroid of one cluster, O(n m + m log m).
/// Ranks are taken from the integer column sums, which order exactly like
/// the means without rounding.
inline CentroidResult optimal_centroid(const CountedDataset& cluster) {
    if (cluster.empty()) throw ValidationError("empty cluster");
    const auto sums = detail::column_sums(cluster);
    CentroidResult r{detail::ascending_ranks(std::span<const std::int64_t>(sums)), 0};
    for (std::size_t i = 0; i < cluster.distinct(); ++i)
        r.objective += cluster.count(i) * sq_dist(cluster.entry(i), r.centroid.values());
    return r;
}

/// Optimal centroid of every cluster of a labeled dataset in one pass.
/// Empty clusters yield std::nullopt.
inline std::vector<std::optional<Ranking>> optimal_centroids(const CountedDataset& ds, std::span<const Label> labels,
                                                             std::size_t k) {
    const auto m = ds.dim();
    std::vector<std::int64_t> sums(k * m, 0);
    std::vector<std::int64_t> sizes(k, 0);
    for (std::size_t i = 0; i < ds.distinct(); ++i) {
        const auto l = labels[i];
        if (l >= k) throw ValidationError("label out of range at entry " + std::to_string(i));
        auto e = ds.entry(i);
        const auto c = ds.count(i);
        sizes[l] += c;
        for (std::size_t j = 0; j < m; ++j) sums[l * m + j] += c * e[j];
    }
    std::vector<std::optional<Ranking>> out(k);
    for (std::size_t l = 0; l < k; ++l) {
        if (sizes[l] == 0) continue;
        out[l] = detail::ascending_ranks(std::span<const std::int64_t>(sums).subspan(l * m, m));
    }
    return out;
}

inline constexpr std::size_t kBruteForceCentroidCap = 8;

/// Exhaustive minimum over all m! centroids. Ties resolve to the
/// lexicographically smallest centroid. Test oracle only.
inline CentroidResult brute_force_centroid(const CountedDataset& cluster,
                                           std::size_t max_dim = kBruteForceCentroidCap) {
    if (cluster.empty()) throw ValidationError("empty cluster");
    if (cluster.dim() > max_dim) throw CapExceeded("brute_force_centroid: m exceeds cap");
    std::vector<Rank> cand = Ranking::identity(cluster.dim()).vector();
    std::optional<CentroidResult> best;
    do {
        Objective v = 0;
        for (std::size_t i = 0; i < cluster.distinct(); ++i) v += cluster.count(i) * sq_dist(cluster.entry(i), cand);
        if (!best || v < best->objective) best = CentroidResult{trusted_ranking(cand), v};
    } while (std::next_permutation(cand.begin(), cand.end()));
    return *best;
}

} // namespace krc

#endif
