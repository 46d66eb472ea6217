#ifndef KRC_RANKING_HPP
#define KRC_RANKING_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "krc/error.hpp"

namespace krc {

using Rank = std::int32_t;
/// Squared distances and KRC objectives are exact integers.
using Objective = std::int64_t;
using Label = std::uint32_t;
using Labels = std::vector<Label>;

enum class RankingDefect { empty, out_of_range, duplicate };

inline const char* to_string(RankingDefect d) {
    switch (d) {
        case RankingDefect::empty: return "empty input";
        case RankingDefect::out_of_range: return "entry out of range";
        case RankingDefect::duplicate: return "duplicate entry";
    }
    return "unknown";
}

struct RankingIssue {
    RankingDefect defect;
    std::size_t position; // offending coordinate, 0 for empty input
};

/// Returns the first defect that keeps `values` from being a permutation of 1..m.
inline std::optional<RankingIssue> check_ranking(std::span<const Rank> values) {
    const auto m = values.size();
    if (m == 0) return RankingIssue{RankingDefect::empty, 0};
    std::vector<bool> seen(m + 1, false);
    for (std::size_t j = 0; j < m; ++j) {
        const Rank v = values[j];
        if (v < 1 || static_cast<std::size_t>(v) > m) return RankingIssue{RankingDefect::out_of_range, j};
        if (seen[static_cast<std::size_t>(v)]) return RankingIssue{RankingDefect::duplicate, j};
        seen[static_cast<std::size_t>(v)] = true;
    }
    return std::nullopt;
}

/// A permutation of 1..m stored as 1-based rank values: values()[j] is the
/// rank given to option j.
class Ranking {
public:
    Ranking() = default;

    /// Throws ValidationError unless `values` is a permutation of 1..m.
    static Ranking validate(std::span<const Rank> values) {
        if (auto issue = check_ranking(values)) {
            std::ostringstream msg;
            msg << "invalid ranking: " << to_string(issue->defect);
            if (issue->defect != RankingDefect::empty) msg << " at position " << issue->position;
            throw ValidationError(msg.str());
        }
        return Ranking(std::vector<Rank>(values.begin(), values.end()));
    }
    static Ranking validate(std::initializer_list<Rank> values) {
        return validate(std::span<const Rank>(values.begin(), values.size()));
    }

    static Ranking identity(std::size_t m) {
        std::vector<Rank> v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = static_cast<Rank>(j + 1);
        return Ranking(std::move(v));
    }
    static Ranking reversed(std::size_t m) {
        std::vector<Rank> v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = static_cast<Rank>(m - j);
        return Ranking(std::move(v));
    }

    std::size_t size() const { return values_.size(); }
    Rank operator[](std::size_t j) const { return values_[j]; }
    std::span<const Rank> values() const { return values_; }
    const std::vector<Rank>& vector() const { return values_; }

    friend bool operator==(const Ranking&, const Ranking&) = default;
    friend auto operator<=>(const Ranking&, const Ranking&) = default;

private:
    explicit Ranking(std::vector<Rank> v) : values_(std::move(v)) {}

    friend Ranking trusted_ranking(std::vector<Rank> v);

    std::vector<Rank> values_;
};

/// For code paths that produce permutations by construction (sorting,
/// swapping); skips the O(m) check.
inline Ranking trusted_ranking(std::vector<Rank> v) { return Ranking(std::move(v)); }

inline Ranking validate_ranking(std::span<const Rank> values) { return Ranking::validate(values); }

inline std::ostream& operator<<(std::ostream& os, const Ranking& r) {
    os << '[';
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << r[j];
    return os << ']';
}

inline Objective sq_dist(std::span<const Rank> x, std::span<const Rank> y) {
    if (x.size() != y.size()) throw ValidationError("dimension mismatch in sq_dist");
    Objective s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const Objective d = x[j] - y[j];
        s += d * d;
    }
    return s;
}
inline Objective sq_dist(const Ranking& x, const Ranking& y) { return sq_dist(x.values(), y.values()); }

/// Non-owning view of row-major observations of dimension m.
struct RowsView {
    std::size_t m = 0;
    std::span<const Rank> data;

    std::size_t size() const { return m == 0 ? 0 : data.size() / m; }
    std::span<const Rank> row(std::size_t i) const { return data.subspan(i * m, m); }
};

/// Owning row-major matrix of rankings; duplicates allowed, no counts.
struct RowMatrix {
    std::size_t m = 0;
    std::vector<Rank> data;

    std::size_t size() const { return m == 0 ? 0 : data.size() / m; }
    std::span<const Rank> row(std::size_t i) const { return std::span<const Rank>(data).subspan(i * m, m); }
    void push_back(std::span<const Rank> r) { data.insert(data.end(), r.begin(), r.end()); }
    RowsView view() const { return {m, data}; }
};

namespace detail {

inline std::uint64_t hash_row(std::span<const Rank> r) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Rank v : r) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 0x100000001b3ULL;
    }
    return h ^ (h >> 29);
}

} // namespace detail

/**
 * Deduplicated multiset of rankings of a common dimension m.
 *
 * Entries keep first-appearance order; every downstream tie-break refers to
 * this order. counts[i] >= 1 and total() == sum of counts.
 */
class CountedDataset {
public:
    CountedDataset() = default;

    /// Validates and deduplicates `rows`. Throws ValidationError naming the
    /// first bad row, or on empty input.
    static CountedDataset build(RowsView rows) {
        if (rows.m == 0 || rows.size() == 0) throw ValidationError("empty dataset");
        CountedDataset ds;
        ds.m_ = rows.m;
        std::unordered_multimap<std::uint64_t, std::size_t> index;
        index.reserve(std::min<std::size_t>(rows.size(), 1u << 20));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto r = rows.row(i);
            if (auto issue = check_ranking(r)) {
                throw ValidationError("row " + std::to_string(i) + ": " + to_string(issue->defect));
            }
            const auto h = detail::hash_row(r);
            bool found = false;
            auto [lo, hi] = index.equal_range(h);
            for (auto it = lo; it != hi; ++it) {
                if (std::ranges::equal(ds.entry(it->second), r)) {
                    ++ds.counts_[it->second];
                    found = true;
                    break;
                }
            }
            if (!found) {
                index.emplace(h, ds.counts_.size());
                ds.data_.insert(ds.data_.end(), r.begin(), r.end());
                ds.counts_.push_back(1);
            }
        }
        ds.total_ = static_cast<std::int64_t>(rows.size());
        return ds;
    }

    /// Builds directly from (ranking, count) pairs; rankings must be distinct.
    static CountedDataset from_entries(std::span<const Ranking> rankings, std::span<const std::int64_t> counts) {
        if (rankings.empty()) throw ValidationError("empty dataset");
        if (rankings.size() != counts.size()) throw ValidationError("rankings/counts length mismatch");
        CountedDataset ds;
        ds.m_ = rankings.front().size();
        for (std::size_t i = 0; i < rankings.size(); ++i) {
            if (rankings[i].size() != ds.m_) throw ValidationError("dimension mismatch at entry " + std::to_string(i));
            if (counts[i] < 1) throw ValidationError("non-positive count at entry " + std::to_string(i));
            for (std::size_t p = 0; p < i; ++p) {
                if (rankings[p] == rankings[i]) throw ValidationError("duplicate entry " + std::to_string(i));
            }
            ds.data_.insert(ds.data_.end(), rankings[i].values().begin(), rankings[i].values().end());
            ds.counts_.push_back(counts[i]);
            ds.total_ += counts[i];
        }
        return ds;
    }

    std::size_t dim() const { return m_; }
    std::size_t distinct() const { return counts_.size(); }
    /// n: number of observations, counting multiplicity.
    std::int64_t total() const { return total_; }

    std::span<const Rank> entry(std::size_t i) const { return std::span<const Rank>(data_).subspan(i * m_, m_); }
    Ranking ranking(std::size_t i) const { auto e = entry(i); return trusted_ranking({e.begin(), e.end()}); }
    std::int64_t count(std::size_t i) const { return counts_[i]; }
    std::span<const std::int64_t> counts() const { return counts_; }

    /// The distinct entries as rows (one row per entry).
    RowsView view() const { return {m_, data_}; }

    /// Re-expands counts into rows, entries in order, each repeated count times.
    RowMatrix expand() const {
        RowMatrix out{m_, {}};
        out.data.reserve(static_cast<std::size_t>(total_) * m_);
        for (std::size_t i = 0; i < distinct(); ++i)
            for (std::int64_t c = 0; c < counts_[i]; ++c) out.push_back(entry(i));
        return out;
    }

    /// Sub-dataset of the entries whose label equals `cluster`, counts kept.
    CountedDataset select(std::span<const Label> labels, Label cluster) const {
        CountedDataset ds;
        ds.m_ = m_;
        for (std::size_t i = 0; i < distinct(); ++i) {
            if (labels[i] != cluster) continue;
            auto e = entry(i);
            ds.data_.insert(ds.data_.end(), e.begin(), e.end());
            ds.counts_.push_back(counts_[i]);
            ds.total_ += counts_[i];
        }
        return ds;
    }

    bool empty() const { return counts_.empty(); }

private:
    std::size_t m_ = 0;
    std::vector<Rank> data_;
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

inline CountedDataset build_dataset(const std::vector<std::vector<Rank>>& rows) {
    if (rows.empty()) throw ValidationError("empty dataset");
    RowMatrix mat{rows.front().size(), {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != mat.m) throw ValidationError("row " + std::to_string(i) + ": dimension mismatch");
        mat.push_back(rows[i]);
    }
    return CountedDataset::build(mat.view());
}

/// k ranking centroids, a label per dataset entry, and the resulting
/// count-weighted objective (always an even integer).
struct KrcSolution {
    std::vector<Ranking> centroids;
    Labels labels;
    Objective objective = 0;
};

/// Sum over entries of count * ||x - y_label||^2.
inline Objective objective(const CountedDataset& ds, std::span<const Ranking> centroids, std::span<const Label> labels) {
    if (labels.size() != ds.distinct()) throw ValidationError("label count does not match dataset entries");
    Objective v = 0;
    for (std::size_t i = 0; i < ds.distinct(); ++i) {
        if (labels[i] >= centroids.size()) throw ValidationError("label out of range at entry " + std::to_string(i));
        v += ds.count(i) * sq_dist(ds.entry(i), centroids[labels[i]].values());
    }
    return v;
}

// CSV: one ranking per line, comma-separated integers, no header. The
// dimension is taken from the first line.

inline RowMatrix read_rankings_csv(std::istream& in) {
    RowMatrix out;
    std::string line;
    std::size_t lineno = 0;
    std::vector<Rank> row;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        row.clear();
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const long v = std::stol(cell, &used);
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
                row.push_back(static_cast<Rank>(v));
            } catch (const std::logic_error&) {
                throw ValidationError("line " + std::to_string(lineno) + ": not an integer: '" + cell + "'");
            }
        }
        if (out.m == 0) out.m = row.size();
        if (row.size() != out.m) throw ValidationError("line " + std::to_string(lineno) + ": dimension mismatch");
        out.push_back(row);
    }
    return out;
}

inline void write_rankings_csv(std::ostream& out, RowsView rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto r = rows.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out << ',';
            out << r[j];
        }
        out << '\n';
    }
}

} // namespace krc

#endif
