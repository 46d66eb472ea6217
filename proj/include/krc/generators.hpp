#ifndef KRC_GENERATORS_HPP
#define KRC_GENERATORS_HPP

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "krc/error.hpp"
#include "krc/random.hpp"
#include "krc/ranking.hpp"

namespace krc {

/// n i.i.d. uniformly random rankings of dimension m (Fisher-Yates), as rows.
inline RowMatrix uniform_rows(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (n == 0 || m == 0) throw ValidationError("uniform_rows: n and m must be positive");
    Rng rng(seed);
    RowMatrix out{m, std::vector<Rank>(n * m)};
    for (std::size_t i = 0; i < n; ++i) {
        std::span<Rank> row(out.data.data() + i * m, m);
        std::iota(row.begin(), row.end(), Rank{1});
        rng.shuffle(row);
    }
    return out;
}

inline CountedDataset gen_uniform(std::size_t n, std::size_t m, std::uint64_t seed) {
    return CountedDataset::build(uniform_rows(n, m, seed).view());
}

inline Ranking random_ranking(std::size_t m, Rng& rng) {
    std::vector<Rank> v(m);
    std::iota(v.begin(), v.end(), Rank{1});
    rng.shuffle(std::span<Rank>(v));
    return trusted_ranking(std::move(v));
}

/// One step of the swap walk: exchange the positions of values l and l+1.
inline void swap_adjacent_values(std::vector<Rank>& x, std::vector<std::size_t>& pos, Rank l) {
    const auto a = pos[static_cast<std::size_t>(l)];
    const auto b = pos[static_cast<std::size_t>(l) + 1];
    std::swap(x[a], x[b]);
    std::swap(pos[static_cast<std::size_t>(l)], pos[static_cast<std::size_t>(l) + 1]);
}

/// Applies the given sequence of value swaps (each l swaps values l, l+1).
inline Ranking apply_value_swaps(const Ranking& y, std::span<const Rank> swaps) {
    std::vector<Rank> x = y.vector();
    std::vector<std::size_t> pos(x.size() + 1);
    for (std::size_t j = 0; j < x.size(); ++j) pos[static_cast<std::size_t>(x[j])] = j;
    for (Rank l : swaps) {
        if (l < 1 || static_cast<std::size_t>(l) >= x.size()) throw ValidationError("swap value out of range");
        swap_adjacent_values(x, pos, l);
    }
    return trusted_ranking(std::move(x));
}

/// omega random swaps of consecutive values l, l+1 with l uniform in
/// 1..m-1. For omega < m the result lies within squared distance 2*omega^2.
inline Ranking swap_walk(const Ranking& y, std::size_t omega, Rng& rng) {
    const auto m = y.size();
    if (m < 2 || omega == 0) return y;
    std::vector<Rank> x = y.vector();
    std::vector<std::size_t> pos(m + 1);
    for (std::size_t j = 0; j < m; ++j) pos[static_cast<std::size_t>(x[j])] = j;
    for (std::size_t s = 0; s < omega; ++s) swap_adjacent_values(x, pos, static_cast<Rank>(rng.below(m - 1) + 1));
    return trusted_ranking(std::move(x));
}
inline Ranking swap_walk(const Ranking& y, std::size_t omega, std::uint64_t seed) {
    Rng rng(seed);
    return swap_walk(y, omega, rng);
}

struct SwapClusterSpec {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 1;
    std::size_t omega = 0;
    std::uint64_t seed = 0;
    std::size_t retry_cap = 100000;
};

struct SwapClusteredData {
    RowMatrix rows;                 // generation order
    CountedDataset dataset;         // deduplicated rows
    std::vector<Ranking> centroids; // ground truth
    Labels row_labels;              // ground-truth centroid per row
};

/**
 * k centroids drawn uniformly at random and accepted only when their squared
 * distance to every earlier centroid exceeds 2*omega^2; each of the n rows
 * picks a centroid uniformly and applies an omega-step swap walk.
 */
inline SwapClusteredData gen_swap_clustered(const SwapClusterSpec& spec) {
    if (spec.n == 0 || spec.m == 0 || spec.k == 0) throw ValidationError("gen_swap_clustered: n, m, k must be positive");
    Rng rng(spec.seed);
    const Objective separation = 2 * static_cast<Objective>(spec.omega * spec.omega);
    SwapClusteredData out;
    std::size_t attempts = 0;
    while (out.centroids.size() < spec.k) {
        if (attempts++ >= spec.retry_cap) throw CapExceeded("gen_swap_clustered: could not place separated centroids");
        Ranking cand = random_ranking(spec.m, rng);
        bool ok = true;
        for (const auto& c : out.centroids) {
            if (sq_dist(c, cand) <= separation) {
                ok = false;
                break;
            }
        }
        if (ok) out.centroids.push_back(std::move(cand));
    }
    out.rows.m = spec.m;
    out.rows.data.reserve(spec.n * spec.m);
    out.row_labels.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const auto l = static_cast<Label>(rng.below(spec.k));
        out.rows.push_back(swap_walk(out.centroids[l], spec.omega, rng).values());
        out.row_labels.push_back(l);
    }
    out.dataset = CountedDataset::build(out.rows.view());
    return out;
}

struct TightnessInstance {
    CountedDataset dataset;
    std::vector<Ranking> rows; // x_1..x_2k in construction order
    std::size_t m = 0;
    std::size_t block = 0;     // smallest eta with (eta-1) eta (eta+1) / 3 >= 4k
    Objective expected_v_krc = 0; // 2k
    double expected_v_kmc = 0.0;  // k
};

/**
 * 2k rankings where consecutive pairs (x_1,x_2), (x_3,x_4), ... sit at squared
 * distance 2 and every other pair is at least 4k apart, so the optimal KRC
 * objective is exactly twice the optimal k-means objective.
 */
inline TightnessInstance gen_tightness(std::size_t k) {
    if (k == 0) throw ValidationError("gen_tightness: k must be positive");
    std::int64_t eta = 1;
    while ((eta - 1) * eta * (eta + 1) / 3 < 4 * static_cast<std::int64_t>(k)) ++eta;
    const std::int64_t block = eta;
    const std::int64_t m = block * (static_cast<std::int64_t>(k) - 1) + 2 * static_cast<std::int64_t>(k);
    const std::int64_t n = 2 * static_cast<std::int64_t>(k);

    TightnessInstance inst;
    inst.m = static_cast<std::size_t>(m);
    inst.block = static_cast<std::size_t>(block);
    std::vector<Rank> prev(static_cast<std::size_t>(m));
    std::iota(prev.begin(), prev.end(), Rank{1});
    inst.rows.push_back(Ranking::validate(prev));
    for (std::int64_t i = 2; i <= n; ++i) {
        const bool odd = i % 2 == 1;
        // theta: number of leading coordinates copied from the previous row;
        // lambda: length of the reversed block that follows.
        const std::int64_t theta = odd ? (block + 2) * ((i - 1) / 2 - 1) + 2 : (block + 2) * (i / 2 - 1);
        const std::int64_t lambda = odd ? block : 2;
        std::vector<Rank> cur(static_cast<std::size_t>(m));
        for (std::int64_t j = 1; j <= m; ++j) {
            Rank v;
            if (j <= theta) v = prev[static_cast<std::size_t>(j - 1)];
            else if (j <= theta + lambda) v = static_cast<Rank>(lambda + 2 * theta - j + 1);
            else v = static_cast<Rank>(j);
            cur[static_cast<std::size_t>(j - 1)] = v;
        }
        inst.rows.push_back(Ranking::validate(cur));
        prev = std::move(cur);
    }
    std::vector<std::int64_t> ones(inst.rows.size(), 1);
    inst.dataset = CountedDataset::from_entries(inst.rows, ones);
    inst.expected_v_krc = 2 * static_cast<Objective>(k);
    inst.expected_v_kmc = static_cast<double>(k);
    return inst;
}

} // namespace krc

#endif
