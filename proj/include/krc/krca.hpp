#ifndef KRC_KRCA_HPP
#define KRC_KRCA_HPP

#include <chrono>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "krc/assignment.hpp"
#include "krc/centroid.hpp"
#include "krc/error.hpp"
#include "krc/kmc.hpp"
#include "krc/ranking.hpp"

namespace krc {

struct KrcaConfig {
    std::size_t k = 2;
    double epsilon = 1e-6;
    std::size_t bnb_threshold = kDefaultBnbThreshold;
    double tol = 1e-6;
    std::size_t max_outer_iter = 1000;
    std::uint64_t seed = 0;
    std::size_t lloyd_max_iter = kLloydMaxIter;
    /// With epsilon > 0 the objective may rise; stop after this many
    /// consecutive iterations without a new best.
    std::size_t max_stalled = 3;
};

struct KrcaReport {
    KrcSolution baseline;
    KrcSolution final;
    /// v_KMC of the k-means clustering the baseline was snapped from.
    double baseline_kmc_objective = 0.0;
    std::size_t iterations = 0;
    std::vector<Objective> per_iteration_objectives;
    double relative_improvement_pct = 0.0;
    double wall_time = 0.0; // seconds, baseline included
    std::string stop_reason;
};

/// (baseline - final) / final * 100. final == 0 < baseline gives +infinity;
/// both zero gives 0.
inline double relative_improvement(Objective v_baseline, Objective v_final) {
    if (v_final == 0) return v_baseline == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return static_cast<double>(v_baseline - v_final) / static_cast<double>(v_final) * 100.0;
}

/**
 * Gives every empty cluster one entry: the entry farthest from its current
 * centroid (ties to the lowest entry index) among clusters that hold at least
 * two distinct entries. The whole entry moves, with its count.
 */
inline Labels empty_cluster_repair(Labels labels, std::span<const Ranking> centroids, const CountedDataset& ds) {
    const auto k = centroids.size();
    std::vector<std::size_t> members(k, 0);
    for (auto l : labels) {
        if (l >= k) throw ValidationError("label out of range");
        ++members[l];
    }
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (members[empty] != 0) continue;
        Objective far = -1;
        std::size_t pick = ds.distinct();
        for (std::size_t i = 0; i < ds.distinct(); ++i) {
            if (members[labels[i]] < 2) continue;
            const auto d = sq_dist(ds.entry(i), centroids[labels[i]].values());
            if (d > far) {
                far = d;
                pick = i;
            }
        }
        if (pick == ds.distinct()) throw InfeasibleError("cannot repair empty cluster: too few distinct entries");
        --members[labels[pick]];
        labels[pick] = static_cast<Label>(empty);
        members[empty] = 1;
    }
    return labels;
}

namespace detail {

inline void check_config(const CountedDataset& ds, const KrcaConfig& cfg) {
    if (cfg.k == 0) throw ValidationError("k must be at least 1");
    if (!(cfg.epsilon >= 0.0)) throw ValidationError("epsilon must be non-negative");
    if (!(cfg.tol >= 0.0)) throw ValidationError("tol must be non-negative");
    if (ds.empty()) throw ValidationError("empty dataset");
    if (cfg.k > ds.distinct()) throw InfeasibleError("k exceeds the number of distinct rankings");
}

inline std::vector<Ranking> centroids_for(const CountedDataset& ds, std::span<const Label> labels,
                                          std::span<const Ranking> previous) {
    auto opt = optimal_centroids(ds, labels, previous.size());
    std::vector<Ranking> out;
    out.reserve(opt.size());
    for (std::size_t l = 0; l < opt.size(); ++l) out.push_back(opt[l] ? std::move(*opt[l]) : previous[l]);
    return out;
}

} // namespace detail

/**
 * Alternates cluster reconstruction and optimal-centroid updates starting
 * from `initial`, whose centroids must be optimal for its labels.
 *
 * Stops at a label fixed point, when an iteration improves the objective by
 * less than tol, after max_stalled non-improving iterations (epsilon > 0), or
 * at max_outer_iter. The best solution seen is returned.
 */
inline KrcaReport krca_refine(const CountedDataset& ds, KrcSolution initial, const KrcaConfig& cfg) {
    detail::check_config(ds, cfg);
    if (initial.centroids.size() != cfg.k) throw ValidationError("initial solution has wrong cluster count");
    KrcaReport rep;
    rep.baseline = initial;
    KrcSolution cur = std::move(initial);
    KrcSolution best = cur;
    std::size_t stalled = 0;
    rep.stop_reason = "iteration cap";

    for (std::size_t it = 1; it <= cfg.max_outer_iter; ++it) {
        rep.iterations = it;
        Labels labels = auto_assign(ds, cur.centroids, cfg.epsilon, cfg.bnb_threshold);
        labels = empty_cluster_repair(std::move(labels), cur.centroids, ds);
        if (labels == cur.labels) {
            rep.per_iteration_objectives.push_back(cur.objective);
            rep.stop_reason = "fixed point";
            break;
        }
        KrcSolution next;
        next.centroids = detail::centroids_for(ds, labels, cur.centroids);
        next.labels = std::move(labels);
        next.objective = objective(ds, next.centroids, next.labels);
        rep.per_iteration_objectives.push_back(next.objective);
        const Objective improvement = cur.objective - next.objective;
        cur = std::move(next);

        if (cur.objective < best.objective) {
            best = cur;
            stalled = 0;
        } else {
            if (cur.objective == best.objective) best = cur;
            ++stalled;
        }
        if (improvement >= 0 && static_cast<double>(improvement) < cfg.tol) {
            rep.stop_reason = "tolerance";
            break;
        }
        if (cfg.epsilon > 0.0 && stalled >= cfg.max_stalled) {
            rep.stop_reason = "stalled";
            break;
        }
    }
    rep.final = std::move(best);
    rep.relative_improvement_pct = relative_improvement(rep.baseline.objective, rep.final.objective);
    return rep;
}

/// Full pipeline: one seeded k-means run, snap to ranking centroids, refine.
inline KrcaReport krca(const CountedDataset& ds, const KrcaConfig& cfg) {
    detail::check_config(ds, cfg);
    const auto start = std::chrono::steady_clock::now();
    const KmcSolution kmc = lloyd(ds, cfg.k, cfg.seed, cfg.lloyd_max_iter);
    KrcaReport rep = krca_refine(ds, snap_to_krc(ds, kmc), cfg);
    rep.baseline_kmc_objective = kmc.objective;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace krc

#endif
