#ifndef KRC_KMC_HPP
#define KRC_KMC_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "krc/centroid.hpp"
#include "krc/error.hpp"
#include "krc/random.hpp"
#include "krc/ranking.hpp"

namespace krc {

struct RealPoint {
    std::vector<double> coords;
};

/// Classical k-means solution over rankings viewed as real points.
struct KmcSolution {
    std::vector<RealPoint> centroids;
    Labels labels;
    double objective = 0.0;
    std::size_t iterations = 0;
    /// Objective after every centroid update; non-increasing.
    std::vector<double> history;
};

inline constexpr std::size_t kLloydMaxIter = 5000;

namespace detail {

inline double real_sq_dist(std::span<const Rank> x, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = static_cast<double>(x[j]) - c[j];
        s += d * d;
    }
    return s;
}

inline RealPoint as_point(std::span<const Rank> x) {
    RealPoint p;
    p.coords.assign(x.begin(), x.end());
    return p;
}

inline void nearest_real(const CountedDataset& ds, std::span<const RealPoint> centroids, Labels& labels) {
    labels.resize(ds.distinct());
    for (std::size_t i = 0; i < ds.distinct(); ++i) {
        auto x = ds.entry(i);
        double best = std::numeric_limits<double>::infinity();
        Label arg = 0;
        for (std::size_t l = 0; l < centroids.size(); ++l) {
            const double d = real_sq_dist(x, centroids[l].coords);
            if (d < best) {
                best = d;
                arg = static_cast<Label>(l);
            }
        }
        labels[i] = arg;
    }
}

// Each empty cluster takes the entry with the largest count * distance^2 to its
// current centroid, drawn from clusters holding at least two entries; that
// entry becomes the cluster's centroid.
inline void repair_empty_real(const CountedDataset& ds, std::vector<RealPoint>& centroids, Labels& labels) {
    const auto k = centroids.size();
    std::vector<std::size_t> members(k, 0);
    for (auto l : labels) ++members[l];
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (members[empty] != 0) continue;
        double best = -1.0;
        std::size_t pick = ds.distinct();
        for (std::size_t i = 0; i < ds.distinct(); ++i) {
            if (members[labels[i]] < 2) continue;
            const double w = static_cast<double>(ds.count(i)) * real_sq_dist(ds.entry(i), centroids[labels[i]].coords);
            if (w > best) {
                best = w;
                pick = i;
            }
        }
        if (pick == ds.distinct()) throw InfeasibleError("cannot repair empty cluster: too few distinct entries");
        --members[labels[pick]];
        labels[pick] = static_cast<Label>(empty);
        members[empty] = 1;
        centroids[empty] = as_point(ds.entry(pick));
    }
}

inline std::vector<RealPoint> cluster_means(const CountedDataset& ds, std::span<const Label> labels,
                                            std::span<const RealPoint> previous) {
    const auto m = ds.dim();
    const auto k = previous.size();
    std::vector<std::vector<double>> sums(k, std::vector<double>(m, 0.0));
    std::vector<std::int64_t> sizes(k, 0);
    for (std::size_t i = 0; i < ds.distinct(); ++i) {
        auto e = ds.entry(i);
        const auto c = ds.count(i);
        sizes[labels[i]] += c;
        for (std::size_t j = 0; j < m; ++j) sums[labels[i]][j] += static_cast<double>(c * e[j]);
    }
    std::vector<RealPoint> out(k);
    for (std::size_t l = 0; l < k; ++l) {
        if (sizes[l] == 0) {
            out[l] = previous[l];
            continue;
        }
        out[l].coords.resize(m);
        for (std::size_t j = 0; j < m; ++j) out[l].coords[j] = sums[l][j] / static_cast<double>(sizes[l]);
    }
    return out;
}

} // namespace detail

/// Sum over entries of count * ||x - c_label||^2 for real centroids.
inline double kmc_objective(const CountedDataset& ds, std::span<const RealPoint> centroids, std::span<const Label> labels) {
    double v = 0.0;
    for (std::size_t i = 0; i < ds.distinct(); ++i)
        v += static_cast<double>(ds.count(i)) * detail::real_sq_dist(ds.entry(i), centroids[labels[i]].coords);
    return v;
}

/// Count-weighted means of the clusters given by `labels`. Empty clusters
/// throw.
inline std::vector<RealPoint> kmc_centroids(const CountedDataset& ds, std::span<const Label> labels, std::size_t k) {
    std::vector<std::int64_t> sizes(k, 0);
    for (std::size_t i = 0; i < ds.distinct(); ++i) sizes.at(labels[i]) += ds.count(i);
    for (auto s : sizes)
        if (s == 0) throw ValidationError("kmc_centroids: empty cluster");
    return detail::cluster_means(ds, labels, std::vector<RealPoint>(k));
}

/**
 * k-means++ (D^2) seeding over the distinct entries with count weights,
 * which draws from the same distribution as row-level seeding.
 */
inline std::vector<RealPoint> kmeanspp_seed(const CountedDataset& ds, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw ValidationError("k must be at least 1");
    if (ds.empty()) throw ValidationError("empty dataset");
    if (k > ds.distinct()) throw InfeasibleError("k exceeds the number of distinct rankings");
    Rng rng(seed);
    const auto d = ds.distinct();
    std::vector<double> weight(d);
    for (std::size_t i = 0; i < d; ++i) weight[i] = static_cast<double>(ds.count(i));

    auto draw = [&]() {
        double total = 0.0;
        for (double w : weight) total += w;
        double u = rng.unit() * total;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (weight[i] <= 0.0) continue;
            last_positive = i;
            if (u < weight[i]) return i;
            u -= weight[i];
        }
        return last_positive; // rounding at the upper end
    };

    std::vector<RealPoint> seeds;
    std::vector<double> nearest(d, std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < k; ++s) {
        const auto pick = draw();
        seeds.push_back(detail::as_point(ds.entry(pick)));
        for (std::size_t i = 0; i < d; ++i) {
            nearest[i] = std::min(nearest[i], detail::real_sq_dist(ds.entry(i), seeds.back().coords));
            weight[i] = static_cast<double>(ds.count(i)) * nearest[i];
        }
    }
    return seeds;
}

/**
 * Lloyd iterations from k-means++ seeds.
 *
 * Stops at a label fixed point, when a reassignment improves the objective by
 * less than 1e-12, or after max_iter centroid updates. Assignment ties go to
 * the lowest centroid index.
 */
inline KmcSolution lloyd(const CountedDataset& ds, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter = kLloydMaxIter) {
    constexpr double kMinImprovement = 1e-12;
    KmcSolution sol;
    sol.centroids = kmeanspp_seed(ds, k, seed);
    detail::nearest_real(ds, sol.centroids, sol.labels);
    detail::repair_empty_real(ds, sol.centroids, sol.labels);

    Labels next;
    for (std::size_t it = 0; it < max_iter; ++it) {
        sol.centroids = detail::cluster_means(ds, sol.labels, sol.centroids);
        sol.objective = kmc_objective(ds, sol.centroids, sol.labels);
        sol.history.push_back(sol.objective);
        sol.iterations = it + 1;

        auto trial = sol.centroids;
        detail::nearest_real(ds, trial, next);
        detail::repair_empty_real(ds, trial, next);
        if (next == sol.labels) break;
        const double reassigned = kmc_objective(ds, trial, next);
        if (sol.objective - reassigned < kMinImprovement) break;
        sol.labels.swap(next);
        sol.centroids = std::move(trial);
    }
    return sol;
}

/// Keeps the k-means clusters and replaces each centroid by the optimal
/// ranking centroid of its cluster. This is the baseline KRC solution.
inline KrcSolution snap_to_krc(const CountedDataset& ds, const KmcSolution& kmc) {
    const auto k = kmc.centroids.size();
    auto optimal = optimal_centroids(ds, kmc.labels, k);
    KrcSolution out;
    out.labels = kmc.labels;
    out.centroids.reserve(k);
    for (std::size_t l = 0; l < k; ++l) {
        // An empty k-means cluster keeps its real centroid, rounded to ranks.
        out.centroids.push_back(optimal[l] ? std::move(*optimal[l]) : rank_of_means(kmc.centroids[l].coords));
    }
    out.objective = objective(ds, out.centroids, out.labels);
    return out;
}

} // namespace krc

#endif
