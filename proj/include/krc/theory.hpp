#ifndef KRC_THEORY_HPP
#define KRC_THEORY_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krc/assignment.hpp"
#include "krc/centroid.hpp"
#include "krc/error.hpp"
#include "krc/generators.hpp"
#include "krc/kmc.hpp"
#include "krc/random.hpp"
#include "krc/ranking.hpp"

namespace krc {

// ---------------------------------------------------------------------------
// Hypercube clustering reduction

struct BinaryVector {
    std::vector<std::uint8_t> bits;

    static BinaryVector from(std::initializer_list<int> v) {
        BinaryVector b;
        for (int x : v) {
            if (x != 0 && x != 1) throw ValidationError("binary vector entries must be 0 or 1");
            b.bits.push_back(static_cast<std::uint8_t>(x));
        }
        return b;
    }
    std::size_t size() const { return bits.size(); }
    friend bool operator==(const BinaryVector&, const BinaryVector&) = default;
};

/// All 2^eta binary vectors of length eta, in counting order (first bit
/// least significant).
inline std::vector<BinaryVector> all_binary_vectors(std::size_t eta) {
    std::vector<BinaryVector> out;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << eta); ++code) {
        BinaryVector b;
        for (std::size_t j = 0; j < eta; ++j) b.bits.push_back(static_cast<std::uint8_t>((code >> j) & 1u));
        out.push_back(std::move(b));
    }
    return out;
}

/// z of length eta -> ranking of length 2 eta whose j-th coordinate pair is
/// (2j-1, 2j) when z_j = 0 and (2j, 2j-1) when z_j = 1.
inline Ranking alt_pair_transform(const BinaryVector& z) {
    if (z.size() == 0) throw ValidationError("alt_pair_transform: empty binary vector");
    std::vector<Rank> x(2 * z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (z.bits[j] > 1) throw ValidationError("binary vector entries must be 0 or 1");
        const auto lo = static_cast<Rank>(2 * j + 1);
        x[2 * j] = lo + z.bits[j];
        x[2 * j + 1] = lo + 1 - z.bits[j];
    }
    return Ranking::validate(x);
}

inline BinaryVector alt_pair_inverse(const Ranking& x) {
    if (x.size() == 0 || x.size() % 2 != 0) throw ValidationError("alt_pair_inverse: dimension must be even");
    BinaryVector z;
    for (std::size_t j = 0; j < x.size() / 2; ++j) {
        const auto lo = static_cast<Rank>(2 * j + 1);
        if (x[2 * j] == lo && x[2 * j + 1] == lo + 1) z.bits.push_back(0);
        else if (x[2 * j] == lo + 1 && x[2 * j + 1] == lo) z.bits.push_back(1);
        else throw ValidationError("alt_pair_inverse: not an alternating pair ranking");
    }
    return z;
}

inline std::int64_t hamming(const BinaryVector& z, const BinaryVector& w) {
    if (z.size() != w.size()) throw ValidationError("hamming: length mismatch");
    std::int64_t d = 0;
    for (std::size_t j = 0; j < z.size(); ++j) d += z.bits[j] != w.bits[j];
    return d;
}

namespace detail {

/// Calls f(indices) for every strictly increasing k-tuple drawn from [0, n).
template <class F>
void for_each_combination(std::size_t n, std::size_t k, F&& f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (;;) {
        f(std::span<const std::size_t>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / (n - k + i)) return std::numeric_limits<std::uint64_t>::max();
        r = r * (n - k + i) / i;
    }
    return r;
}

/// Calls f(labels, groups) for every assignment of `count` items into at
/// most k non-empty groups, each partition once (restricted growth strings).
template <class F>
void for_each_partition(std::size_t count, std::size_t k, F&& f) {
    if (count == 0 || k == 0) return;
    std::vector<Label> a(count, 0);
    std::vector<std::size_t> maxp(count, 0); // 1 + max label among a[0..i]
    auto rec = [&](auto&& self, std::size_t i, std::size_t used) -> void {
        if (i == count) {
            f(std::span<const Label>(a), used);
            return;
        }
        const std::size_t limit = std::min(used + 1, k);
        for (std::size_t l = 0; l < limit; ++l) {
            a[i] = static_cast<Label>(l);
            self(self, i + 1, std::max(used, l + 1));
        }
    };
    a[0] = 0;
    rec(rec, 1, 1);
}

} // namespace detail

/// Brute-force hypercube clustering optimum: minimum over k-subsets of binary
/// centroids of the total Hamming distance to the nearest centroid.
inline std::int64_t hcp_optimum(std::span<const BinaryVector> points, std::size_t k) {
    if (points.empty()) throw ValidationError("hcp_optimum: no points");
    const auto eta = points.front().size();
    if (eta > 16) throw CapExceeded("hcp_optimum: dimension too large");
    const auto cube = all_binary_vectors(eta);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    detail::for_each_combination(cube.size(), std::min(k, cube.size()), [&](std::span<const std::size_t> idx) {
        std::int64_t total = 0;
        for (const auto& z : points) {
            std::int64_t near = std::numeric_limits<std::int64_t>::max();
            for (auto c : idx) near = std::min(near, hamming(z, cube[c]));
            total += near;
        }
        best = std::min(best, total);
    });
    return best;
}

// ---------------------------------------------------------------------------
// Exact oracles for tiny instances

struct KrcOracleResult {
    KrcSolution solution;
    Objective value = 0;
    std::string method; // "centroid-enumeration" or "partition-enumeration"
};

inline constexpr std::uint64_t kOracleBudget = 200'000'000; // subset x entry evaluations
inline constexpr std::size_t kOracleMaxDim = 8;
inline constexpr std::size_t kPartitionOracleMaxItems = 10;

/**
 * Global KRC optimum.
 *
 * Preferred route: enumerate every k-subset of the m! rankings as centroids
 * and assign each entry to its nearest one; usable while m <= 8 and
 * C(m!, k) * distinct fits the budget. Otherwise, when there are at most 10
 * distinct entries, enumerate partitions of the entries and give each block
 * its closed-form optimal centroid.
 */
inline KrcOracleResult exact_krc_oracle(const CountedDataset& ds, std::size_t k,
                                        std::uint64_t budget = kOracleBudget) {
    if (ds.empty()) throw ValidationError("empty dataset");
    if (k == 0) throw ValidationError("k must be at least 1");
    const auto m = ds.dim();
    const auto d = ds.distinct();

    std::uint64_t perms = 1;
    for (std::size_t i = 2; i <= m && perms <= 1'000'000; ++i) perms *= i;
    const bool enumerable = m <= kOracleMaxDim && k <= perms;
    const auto subsets = enumerable ? detail::binomial(perms, k) : std::numeric_limits<std::uint64_t>::max();

    KrcOracleResult out;
    if (enumerable && subsets <= budget / std::max<std::uint64_t>(d, 1)) {
        std::vector<Ranking> all;
        std::vector<Rank> cand = Ranking::identity(m).vector();
        do all.push_back(trusted_ranking(cand));
        while (std::next_permutation(cand.begin(), cand.end()));
        std::vector<Objective> dist(d * all.size());
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t p = 0; p < all.size(); ++p) dist[i * all.size() + p] = ds.count(i) * sq_dist(ds.entry(i), all[p].values());

        Objective best = std::numeric_limits<Objective>::max();
        std::vector<std::size_t> best_idx;
        detail::for_each_combination(all.size(), k, [&](std::span<const std::size_t> idx) {
            Objective total = 0;
            for (std::size_t i = 0; i < d && total < best; ++i) {
                Objective near = std::numeric_limits<Objective>::max();
                for (auto p : idx) near = std::min(near, dist[i * all.size() + p]);
                total += near;
            }
            if (total < best) {
                best = total;
                best_idx.assign(idx.begin(), idx.end());
            }
        });
        for (auto p : best_idx) out.solution.centroids.push_back(all[p]);
        out.solution.labels = assign_es(ds, out.solution.centroids);
        out.solution.objective = best;
        out.value = best;
        out.method = "centroid-enumeration";
        return out;
    }

    if (d > kPartitionOracleMaxItems) throw CapExceeded("exact_krc_oracle: instance exceeds enumeration budget");
    Objective best = std::numeric_limits<Objective>::max();
    detail::for_each_partition(d, k, [&](std::span<const Label> labels, std::size_t groups) {
        auto cents = optimal_centroids(ds, labels, groups);
        Objective total = 0;
        for (std::size_t i = 0; i < d; ++i) total += ds.count(i) * sq_dist(ds.entry(i), cents[labels[i]]->values());
        if (total < best) {
            best = total;
            out.solution.labels.assign(labels.begin(), labels.end());
            out.solution.centroids.clear();
            for (auto& c : cents) out.solution.centroids.push_back(*c);
        }
    });
    out.solution.objective = best;
    out.value = best;
    out.method = "partition-enumeration";
    return out;
}

/// Global k-means optimum by enumerating every partition of the (expanded)
/// rows into at most k groups with mean centroids.
inline double exact_kmc_oracle(const CountedDataset& ds, std::size_t k,
                               std::size_t max_rows = kPartitionOracleMaxItems) {
    if (ds.empty()) throw ValidationError("empty dataset");
    if (k == 0) throw ValidationError("k must be at least 1");
    if (ds.total() > static_cast<std::int64_t>(max_rows)) throw CapExceeded("exact_kmc_oracle: too many rows");
    const RowMatrix rows = ds.expand();
    const auto n = rows.size();
    const auto m = rows.m;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> sums;
    std::vector<std::size_t> sizes;
    detail::for_each_partition(n, k, [&](std::span<const Label> labels, std::size_t groups) {
        sums.assign(groups * m, 0.0);
        sizes.assign(groups, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++sizes[labels[i]];
            auto r = rows.row(i);
            for (std::size_t j = 0; j < m; ++j) sums[labels[i] * m + j] += r[j];
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto r = rows.row(i);
            const auto l = labels[i];
            for (std::size_t j = 0; j < m; ++j) {
                const double diff = r[j] - sums[l * m + j] / static_cast<double>(sizes[l]);
                total += diff * diff;
            }
        }
        best = std::min(best, total);
    });
    return best;
}

// ---------------------------------------------------------------------------
// Tree-depth bound for two opposite centroids

inline constexpr std::size_t kMuMaxDim = 9;

struct DepthBoundTerms {
    Objective uub = 0; // max full distance to the identity over feasible x
    Objective llb = 0; // min prefix distance to the reversal over feasible x
};

/**
 * Feasible x: rankings whose first `level` coordinates are within squared
 * distance delta^2 of the identity's. Enumerates feasible prefixes only; the
 * best completion for the maximum pairs the remaining values in descending
 * order against identity positions level+1..m.
 */
inline DepthBoundTerms depth_bound_terms(std::size_t m, std::size_t level, std::int64_t delta) {
    const Objective budget = delta * delta;
    DepthBoundTerms t{std::numeric_limits<Objective>::min(), std::numeric_limits<Objective>::max()};
    std::vector<Rank> prefix;
    std::vector<bool> used(m + 1, false);
    auto rec = [&](auto&& self, Objective to_identity, Objective to_reversal) -> void {
        const auto j = prefix.size(); // next position, 0-based
        if (j == level) {
            std::vector<Rank> rest;
            for (std::size_t v = m; v >= 1; --v)
                if (!used[v]) rest.push_back(static_cast<Rank>(v));
            Objective full = to_identity;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                const Objective diff = rest[i] - static_cast<Rank>(level + i + 1);
                full += diff * diff;
            }
            t.uub = std::max(t.uub, full);
            t.llb = std::min(t.llb, to_reversal);
            return;
        }
        for (std::size_t v = 1; v <= m; ++v) {
            if (used[v]) continue;
            const Objective di = static_cast<Objective>(v) - static_cast<Objective>(j + 1);
            if (to_identity + di * di > budget) continue;
            const Objective dr = static_cast<Objective>(v) - static_cast<Objective>(m - j);
            used[v] = true;
            prefix.push_back(static_cast<Rank>(v));
            self(self, to_identity + di * di, to_reversal + dr * dr);
            prefix.pop_back();
            used[v] = false;
        }
    };
    rec(rec, 0, 0);
    return t;
}

/// Depth bound for branch-and-bound with centroids identity and reversal
/// when every observation is within distance delta of one of them: the
/// smallest level whose worst-case upper bound toward the near centroid does
/// not exceed the best-case lower bound toward the far one, capped at m.
inline std::size_t mu_depth_bound(std::size_t m, std::int64_t delta, std::size_t max_dim = kMuMaxDim) {
    if (m == 0) throw ValidationError("mu_depth_bound: m must be positive");
    if (delta < 0) throw ValidationError("mu_depth_bound: delta must be non-negative");
    if (m > max_dim) throw CapExceeded("mu_depth_bound: m exceeds cap");
    for (std::size_t level = 1; level <= m; ++level) {
        const auto t = depth_bound_terms(m, level, delta);
        if (t.uub <= t.llb) return level;
    }
    return m;
}

/// Rows within squared distance delta^2 of the identity or the reversal
/// (chosen uniformly), produced by rejection-sampled swap walks of random
/// length.
inline RowMatrix delta_clustered_rows(std::size_t n, std::size_t m, std::int64_t delta, std::uint64_t seed) {
    if (n == 0 || m < 2) throw ValidationError("delta_clustered_rows: need n >= 1 and m >= 2");
    Rng rng(seed);
    const Ranking ends[2] = {Ranking::identity(m), Ranking::reversed(m)};
    const Objective budget = delta * delta;
    RowMatrix out{m, {}};
    while (out.size() < n) {
        const auto& c = ends[rng.below(2)];
        const auto steps = static_cast<std::size_t>(rng.below(m));
        Ranking x = swap_walk(c, steps, rng);
        if (sq_dist(x, c) <= budget) out.push_back(x.values());
    }
    return out;
}

} // namespace krc

#endif
