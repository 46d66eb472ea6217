#ifndef KRC_ASSIGNMENT_HPP
#define KRC_ASSIGNMENT_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "krc/error.hpp"
#include "krc/ranking.hpp"

namespace krc {

/// Lower/upper bound on ||x - y||^2 over every ranking x that starts with a
/// given prefix.
struct CentroidBounds {
    Objective lb = 0;
    Objective ub = 0;
};

/// Instrumentation of one branch-and-bound assignment call.
struct BnbStats {
    std::size_t nodes_created = 0;  // child nodes built (each non-empty prefix)
    std::size_t nodes_expanded = 0; // nodes taken off the active set and branched
    std::size_t max_depth = 0;      // deepest prefix length created
    std::size_t eliminations = 0;   // centroid removals across all nodes
    std::size_t leaf_fallbacks = 0; // full-length prefixes still holding >1 centroid
};

struct AssignStats {
    bool used_bnb = false;
    BnbStats bnb;
};

/// Snapshot of a freshly created child node, passed to an optional observer.
struct BnbNodeView {
    std::span<const Rank> prefix;
    std::span<const std::uint32_t> members; // row indices
    std::span<const Label> candidates;      // centroids tested at this node
    std::span<const CentroidBounds> bounds; // aligned with candidates
    std::span<const Label> survivors;       // after elimination
};
using BnbObserver = std::function<void(const BnbNodeView&)>;

inline constexpr std::size_t kDefaultBnbThreshold = 5;
inline constexpr std::size_t kMaxBnbDim = 64;

/**
 * Bounds for a node with fixed `prefix` against `centroid`.
 *
 * The prefix part is exact. For the free suffix, pairing the ascending
 * centroid suffix with the ascending (descending) unused values minimises
 * (maximises) the remaining squared distance.
 */
inline CentroidBounds node_bounds(std::span<const Rank> prefix, const Ranking& centroid) {
    const auto m = centroid.size();
    const auto d = prefix.size();
    if (d > m) throw ValidationError("node_bounds: prefix longer than centroid");
    CentroidBounds b;
    std::vector<bool> used(m + 1, false);
    for (std::size_t j = 0; j < d; ++j) {
        const Objective diff = centroid[j] - prefix[j];
        b.lb += diff * diff;
        used.at(static_cast<std::size_t>(prefix[j])) = true;
    }
    b.ub = b.lb;
    std::vector<Rank> suffix(centroid.values().begin() + static_cast<std::ptrdiff_t>(d), centroid.values().end());
    std::sort(suffix.begin(), suffix.end());
    std::vector<Rank> rest;
    for (std::size_t v = 1; v <= m; ++v)
        if (!used[v]) rest.push_back(static_cast<Rank>(v));
    const auto t = rest.size();
    for (std::size_t i = 0; i < t; ++i) {
        const Objective lo = suffix[i] - rest[i];
        const Objective hi = suffix[i] - rest[t - 1 - i];
        b.lb += lo * lo;
        b.ub += hi * hi;
    }
    return b;
}

namespace detail {

inline void check_centroids(std::size_t m, std::span<const Ranking> centroids) {
    if (centroids.empty()) throw ValidationError("at least one centroid required");
    for (const auto& c : centroids)
        if (c.size() != m) throw ValidationError("centroid dimension mismatch");
}

} // namespace detail

/// Exhaustive nearest-centroid assignment, O(rows * m * k). Ties go to the
/// lowest centroid index.
inline Labels assign_es(RowsView rows, std::span<const Ranking> centroids) {
    detail::check_centroids(rows.m, centroids);
    const auto m = rows.m;
    const auto k = centroids.size();
    std::vector<Rank> flat;
    flat.reserve(k * m);
    for (const auto& c : centroids) flat.insert(flat.end(), c.values().begin(), c.values().end());

    Labels labels(rows.size());
    const Rank* data = rows.data.data();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Rank* x = data + i * m;
        Objective best = std::numeric_limits<Objective>::max();
        Label arg = 0;
        for (std::size_t l = 0; l < k; ++l) {
            const Rank* y = flat.data() + l * m;
            Objective s = 0;
            for (std::size_t j = 0; j < m; ++j) {
                const Objective diff = x[j] - y[j];
                s += diff * diff;
            }
            if (s < best) {
                best = s;
                arg = static_cast<Label>(l);
            }
        }
        labels[i] = arg;
    }
    return labels;
}
inline Labels assign_es(const CountedDataset& ds, std::span<const Ranking> centroids) {
    return assign_es(ds.view(), centroids);
}

/**
 * Branch-and-bound cluster reconstruction.
 *
 * Nodes fix a prefix of the rankings; members are a contiguous range of a row
 * permutation that is bucketed by the next coordinate when the node is
 * branched. At each child, surviving centroids are scanned in descending
 * index and y is dropped when LB(y) >= min over other survivors of UB - eps.
 * A child left with one centroid assigns all its members to it. Active nodes
 * are processed last-in first-out.
 *
 * Guarantee: objective(result) - objective(ES) <= rows * (k - 1) * eps, and
 * equality of objectives for eps = 0.
 */
inline Labels assign_bnb(RowsView rows, std::span<const Ranking> centroids, double epsilon,
                         BnbStats* stats = nullptr, const BnbObserver* observer = nullptr) {
    detail::check_centroids(rows.m, centroids);
    if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be non-negative");
    const auto m = rows.m;
    const auto k = centroids.size();
    const auto n = rows.size();
    BnbStats local;
    BnbStats& st = stats ? *stats : local;
    st = BnbStats{};

    Labels labels(n, 0);
    if (k == 1 || n == 0) return labels;
    if (m > kMaxBnbDim) throw ValidationError("assign_bnb: dimension exceeds 64");

    // suffix[(l * (m + 1) + d) * m + i]: i-th smallest of centroid l's
    // coordinates d..m-1.
    std::vector<Rank> suffix(k * (m + 1) * m, 0);
    for (std::size_t l = 0; l < k; ++l) {
        for (std::size_t d = 0; d <= m; ++d) {
            Rank* out = suffix.data() + (l * (m + 1) + d) * m;
            std::copy(centroids[l].values().begin() + static_cast<std::ptrdiff_t>(d), centroids[l].values().end(), out);
            std::sort(out, out + (m - d));
        }
    }

    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    std::vector<std::uint32_t> scratch(n);

    struct Node {
        std::uint32_t lo, hi;
        std::uint32_t depth;
        std::uint64_t remaining; // bit v-1 set when value v is not yet fixed
        std::size_t offset;      // into the survivor arena
        std::uint32_t count;
    };
    // Arena holding (centroid index, exact prefix distance) per survivor. The
    // node on top of the stack always owns the tail of the arena.
    std::vector<Label> arena_id;
    std::vector<Objective> arena_pd;
    std::vector<Node> stack;

    const std::uint64_t all = m == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1);
    stack.push_back({0, static_cast<std::uint32_t>(n), 0, all, 0, static_cast<std::uint32_t>(k)});
    for (std::size_t l = 0; l < k; ++l) {
        arena_id.push_back(static_cast<Label>(l));
        arena_pd.push_back(0);
    }

    std::vector<Label> parent_id, cand;
    std::vector<Objective> parent_pd, child_pd;
    std::vector<CentroidBounds> bounds;
    std::vector<char> alive;
    std::vector<Label> kept;
    std::vector<Rank> rest(m);
    std::vector<std::uint32_t> bucket_start(m + 2), cursor(m + 2);
    std::vector<Rank> prefix_buf(m);
    const Rank* data = rows.data.data();

    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        ++st.nodes_expanded;
        parent_id.assign(arena_id.begin() + static_cast<std::ptrdiff_t>(node.offset),
                         arena_id.begin() + static_cast<std::ptrdiff_t>(node.offset + node.count));
        parent_pd.assign(arena_pd.begin() + static_cast<std::ptrdiff_t>(node.offset),
                         arena_pd.begin() + static_cast<std::ptrdiff_t>(node.offset + node.count));
        arena_id.resize(node.offset);
        arena_pd.resize(node.offset);

        // Bucket members by their value at coordinate `depth` (stable).
        const std::size_t d = node.depth;
        std::fill(bucket_start.begin(), bucket_start.end(), 0);
        for (std::uint32_t p = node.lo; p < node.hi; ++p) ++bucket_start[static_cast<std::size_t>(data[perm[p] * m + d])];
        std::uint32_t acc = node.lo;
        for (std::size_t v = 1; v <= m; ++v) {
            const auto c = bucket_start[v];
            bucket_start[v] = acc;
            acc += c;
        }
        bucket_start[m + 1] = node.hi;
        {
            std::copy(bucket_start.begin(), bucket_start.end(), cursor.begin());
            for (std::uint32_t p = node.lo; p < node.hi; ++p) {
                const auto v = static_cast<std::size_t>(data[perm[p] * m + d]);
                scratch[cursor[v]++] = perm[p];
            }
            std::copy(scratch.begin() + node.lo, scratch.begin() + node.hi, perm.begin() + node.lo);
        }
        if (observer) {
            auto first = rows.row(perm[node.lo]);
            std::copy(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(d), prefix_buf.begin());
        }

        const std::size_t t = m - d - 1; // free coordinates below each child
        // Descending values so that the smallest child is processed first.
        for (std::size_t v = m; v >= 1; --v) {
            const std::uint32_t lo = bucket_start[v];
            const std::uint32_t hi = bucket_start[v + 1];
            if (lo == hi) continue;
            ++st.nodes_created;
            st.max_depth = std::max(st.max_depth, d + 1);

            const std::uint64_t remaining = node.remaining & ~(std::uint64_t{1} << (v - 1));
            std::size_t r = 0;
            for (std::uint64_t bits = remaining; bits; bits &= bits - 1)
                rest[r++] = static_cast<Rank>(std::countr_zero(bits) + 1);

            cand = parent_id;
            child_pd.resize(cand.size());
            bounds.resize(cand.size());
            for (std::size_t s = 0; s < cand.size(); ++s) {
                const auto l = cand[s];
                const Objective diff = centroids[l][d] - static_cast<Rank>(v);
                const Objective pd = parent_pd[s] + diff * diff;
                const Rank* suf = suffix.data() + (l * (m + 1) + d + 1) * m;
                Objective lo_sum = 0, hi_sum = 0;
                for (std::size_t i = 0; i < t; ++i) {
                    const Objective a = suf[i] - rest[i];
                    const Objective b = suf[i] - rest[t - 1 - i];
                    lo_sum += a * a;
                    hi_sum += b * b;
                }
                child_pd[s] = pd;
                bounds[s] = {pd + lo_sum, pd + hi_sum};
            }

            alive.assign(cand.size(), 1);
            std::size_t n_alive = cand.size();
            for (std::size_t s = cand.size(); s-- > 0;) {
                Objective min_ub = std::numeric_limits<Objective>::max();
                for (std::size_t o = 0; o < cand.size(); ++o)
                    if (o != s && alive[o]) min_ub = std::min(min_ub, bounds[o].ub);
                if (min_ub == std::numeric_limits<Objective>::max()) continue;
                if (static_cast<double>(bounds[s].lb) >= static_cast<double>(min_ub) - epsilon) {
                    alive[s] = 0;
                    --n_alive;
                    ++st.eliminations;
                }
            }

            if (observer) {
                kept.clear();
                for (std::size_t s = 0; s < cand.size(); ++s)
                    if (alive[s]) kept.push_back(cand[s]);
                prefix_buf[d] = static_cast<Rank>(v);
                (*observer)(BnbNodeView{std::span<const Rank>(prefix_buf).first(d + 1),
                                        std::span<const std::uint32_t>(perm).subspan(lo, hi - lo), cand, bounds,
                                        kept});
            }

            if (n_alive == 1 || t == 0) {
                // Singleton survivor, or a full-length prefix whose members are
                // identical: pick the smallest exact distance, lowest index.
                std::size_t best = cand.size();
                for (std::size_t s = 0; s < cand.size(); ++s) {
                    if (!alive[s]) continue;
                    if (best == cand.size() || bounds[s].lb < bounds[best].lb) best = s;
                }
                if (n_alive > 1) ++st.leaf_fallbacks;
                for (std::uint32_t p = lo; p < hi; ++p) labels[perm[p]] = cand[best];
                continue;
            }

            Node child{lo, hi, static_cast<std::uint32_t>(d + 1), remaining, arena_id.size(), 0};
            for (std::size_t s = 0; s < cand.size(); ++s) {
                if (!alive[s]) continue;
                arena_id.push_back(cand[s]);
                arena_pd.push_back(child_pd[s]);
                ++child.count;
            }
            stack.push_back(child);
        }
    }
    return labels;
}
inline Labels assign_bnb(const CountedDataset& ds, std::span<const Ranking> centroids, double epsilon,
                         BnbStats* stats = nullptr, const BnbObserver* observer = nullptr) {
    return assign_bnb(ds.view(), centroids, epsilon, stats, observer);
}

/// Branch-and-bound when m <= bnb_threshold, exhaustive search otherwise.
inline Labels auto_assign(RowsView rows, std::span<const Ranking> centroids, double epsilon,
                          std::size_t bnb_threshold = kDefaultBnbThreshold, AssignStats* stats = nullptr) {
    if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be non-negative");
    const bool use_bnb = rows.m <= bnb_threshold && rows.m <= kMaxBnbDim;
    if (stats) *stats = AssignStats{use_bnb, {}};
    if (use_bnb) return assign_bnb(rows, centroids, epsilon, stats ? &stats->bnb : nullptr);
    return assign_es(rows, centroids);
}
inline Labels auto_assign(const CountedDataset& ds, std::span<const Ranking> centroids, double epsilon,
                          std::size_t bnb_threshold = kDefaultBnbThreshold, AssignStats* stats = nullptr) {
    return auto_assign(ds.view(), centroids, epsilon, bnb_threshold, stats);
}

} // namespace krc

#endif
