#ifndef KRC_INGEST_HPP
#define KRC_INGEST_HPP

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "krc/assignment.hpp"
#include "krc/centroid.hpp"
#include "krc/error.hpp"
#include "krc/krca.hpp"
#include "krc/random.hpp"
#include "krc/ranking.hpp"

namespace krc {

struct RatingScale {
    double min = 0.5;
    double max = 5.0;
};

struct RatingsRecord {
    std::string user_id;
    std::string item_id;
    std::size_t genre = 0; // 1..m
    double rating = 0.0;
};

struct RatingsTable {
    std::size_t m = 0; // number of genres
    std::vector<RatingsRecord> records;
};

inline void validate_record(const RatingsRecord& r, std::size_t m, RatingScale scale) {
    if (r.genre < 1 || r.genre > m)
        throw ValidationError("genre " + std::to_string(r.genre) + " outside 1.." + std::to_string(m));
    if (!std::isfinite(r.rating) || r.rating < scale.min || r.rating > scale.max)
        throw ValidationError("rating outside the declared scale");
}

/// Parses `user_id,item_id,genre,rating` with that exact header line.
inline RatingsTable read_ratings_csv(std::istream& in, std::size_t m, RatingScale scale = {}) {
    if (m == 0) throw ValidationError("number of genres must be positive");
    RatingsTable table{m, {}};
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("ratings csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "user_id,item_id,genre,rating") throw ValidationError("ratings csv: expected header user_id,item_id,genre,rating");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        const auto where = "ratings csv line " + std::to_string(lineno) + ": ";
        if (f.size() != 4) throw ValidationError(where + "expected 4 fields");
        RatingsRecord r;
        r.user_id = f[0];
        r.item_id = f[1];
        try {
            std::size_t used = 0;
            const long long g = std::stoll(f[2], &used);
            if (used != f[2].size() || g < 1) throw ValidationError(where + "bad genre");
            r.genre = static_cast<std::size_t>(g);
            r.rating = std::stod(f[3], &used);
            if (used != f[3].size()) throw ValidationError(where + "bad rating");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ValidationError*>(&e)) throw;
            throw ValidationError(where + "non-numeric field");
        }
        try {
            validate_record(r, m, scale);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
        table.records.push_back(std::move(r));
    }
    return table;
}

struct GenreBaseline {
    std::vector<double> means; // index g-1 for genre g
};

/// Per-genre mean rating over all records.
inline GenreBaseline genre_baseline(std::span<const RatingsRecord> records, std::size_t m) {
    std::vector<double> sum(m, 0.0);
    std::vector<std::size_t> cnt(m, 0);
    for (const auto& r : records) {
        validate_record(r, m, {-std::numeric_limits<double>::max(), std::numeric_limits<double>::max()});
        sum[r.genre - 1] += r.rating;
        ++cnt[r.genre - 1];
    }
    GenreBaseline b;
    for (std::size_t g = 0; g < m; ++g) {
        if (cnt[g] == 0) throw ValidationError("genre " + std::to_string(g + 1) + " has no ratings");
        b.means.push_back(sum[g] / static_cast<double>(cnt[g]));
    }
    return b;
}
inline GenreBaseline genre_baseline(const RatingsTable& t) { return genre_baseline(t.records, t.m); }

struct UserRanking {
    std::string user_id;
    Ranking ranking;
};

/// Ranks deviations in descending order (rank 1 = largest), ties to the lower
/// genre index.
inline Ranking rank_deviations(std::span<const double> delta) {
    std::vector<double> neg(delta.size());
    for (std::size_t g = 0; g < delta.size(); ++g) neg[g] = -delta[g];
    return detail::ascending_ranks(std::span<const double>(neg));
}

/**
 * Keeps users with at least `lambda` ratings in every genre and turns the
 * deviations of their per-genre mean from the baseline into a ranking.
 * Users appear in order of first appearance.
 */
inline std::vector<UserRanking> lambda_filter(std::span<const RatingsRecord> records, std::size_t m, std::size_t lambda,
                                              const GenreBaseline& baseline) {
    if (lambda < 1) throw ValidationError("lambda must be at least 1");
    if (baseline.means.size() != m) throw ValidationError("baseline has wrong number of genres");
    struct Acc {
        std::vector<double> sum;
        std::vector<std::size_t> cnt;
    };
    std::vector<std::string> order;
    std::unordered_map<std::string, Acc> users;
    for (const auto& r : records) {
        validate_record(r, m, {-std::numeric_limits<double>::max(), std::numeric_limits<double>::max()});
        auto [it, fresh] = users.try_emplace(r.user_id);
        if (fresh) {
            order.push_back(r.user_id);
            it->second.sum.assign(m, 0.0);
            it->second.cnt.assign(m, 0);
        }
        it->second.sum[r.genre - 1] += r.rating;
        ++it->second.cnt[r.genre - 1];
    }
    std::vector<UserRanking> out;
    std::vector<double> delta(m);
    for (const auto& u : order) {
        const auto& a = users.at(u);
        bool keep = true;
        for (std::size_t g = 0; g < m && keep; ++g) keep = a.cnt[g] >= lambda;
        if (!keep) continue;
        for (std::size_t g = 0; g < m; ++g) delta[g] = a.sum[g] / static_cast<double>(a.cnt[g]) - baseline.means[g];
        out.push_back({u, rank_deviations(delta)});
    }
    return out;
}
inline std::vector<UserRanking> lambda_filter(const RatingsTable& t, std::size_t lambda) {
    return lambda_filter(t.records, t.m, lambda, genre_baseline(t));
}

inline RowMatrix rankings_matrix(std::span<const UserRanking> users, std::size_t m) {
    RowMatrix rows{m, {}};
    for (const auto& u : users) rows.push_back(u.ranking.values());
    return rows;
}

/// Rankings CSV, one user per line; with `with_user_ids` the user id leads.
inline void write_user_rankings_csv(std::ostream& out, std::span<const UserRanking> users, bool with_user_ids = false) {
    for (const auto& u : users) {
        if (with_user_ids) out << u.user_id << ',';
        for (std::size_t j = 0; j < u.ranking.size(); ++j) out << (j ? "," : "") << u.ranking[j];
        out << '\n';
    }
}

struct AccuracyReport {
    double accuracy_pct = 0.0;
    std::size_t retained_users = 0;
    std::size_t train_users = 0; // after the filter, before intersecting
    std::size_t test_users = 0;
    std::size_t train_records = 0;
    std::size_t test_records = 0;
    std::size_t equidistant_test_users = 0; // scored by the lowest-index rule
    KrcaReport train;
};

/**
 * Train/test protocol: each record goes to train or test with probability
 * 1/2; both halves are filtered against the genre baseline of the full record
 * set and only users present in both are kept. KRCA clusters the train
 * rankings; a test user counts as correct when its nearest train centroid
 * (lowest index on ties) is its train cluster.
 */
inline AccuracyReport prediction_accuracy(std::span<const RatingsRecord> records, std::size_t m, std::size_t lambda,
                                          const KrcaConfig& cfg) {
    if (lambda < 1) throw ValidationError("lambda must be at least 1");
    if (cfg.k == 0) throw ValidationError("k must be at least 1");
    Rng rng(cfg.seed);
    std::vector<RatingsRecord> train, test;
    for (const auto& r : records) (rng.below(2) == 0 ? train : test).push_back(r);

    AccuracyReport rep;
    rep.train_records = train.size();
    rep.test_records = test.size();
    const auto baseline = genre_baseline(records, m);
    auto filter_half = [&](const std::vector<RatingsRecord>& half) { return lambda_filter(half, m, lambda, baseline); };
    const auto train_f = filter_half(train);
    const auto test_f = filter_half(test);
    rep.train_users = train_f.size();
    rep.test_users = test_f.size();

    std::unordered_map<std::string, const Ranking*> test_by_user;
    for (const auto& u : test_f) test_by_user.emplace(u.user_id, &u.ranking);
    std::vector<UserRanking> kept_train;
    std::vector<const Ranking*> kept_test;
    for (const auto& u : train_f) {
        auto it = test_by_user.find(u.user_id);
        if (it == test_by_user.end()) continue;
        kept_train.push_back(u);
        kept_test.push_back(it->second);
    }
    rep.retained_users = kept_train.size();
    if (rep.retained_users < cfg.k) throw InfeasibleError("fewer retained users than clusters");

    const RowMatrix train_rows = rankings_matrix(kept_train, m);
    const auto ds = CountedDataset::build(train_rows.view());
    rep.train = krca(ds, cfg);

    std::map<std::vector<Rank>, Label> label_of;
    for (std::size_t i = 0; i < ds.distinct(); ++i) {
        auto e = ds.entry(i);
        label_of.emplace(std::vector<Rank>(e.begin(), e.end()), rep.train.final.labels[i]);
    }
    const auto& cents = rep.train.final.centroids;
    std::size_t correct = 0;
    for (std::size_t u = 0; u < kept_train.size(); ++u) {
        const Label truth = label_of.at(kept_train[u].ranking.vector());
        Objective best = std::numeric_limits<Objective>::max();
        Label arg = 0;
        bool tie = false;
        for (std::size_t l = 0; l < cents.size(); ++l) {
            const auto d = sq_dist(*kept_test[u], cents[l]);
            if (d < best) {
                best = d;
                arg = static_cast<Label>(l);
                tie = false;
            } else if (d == best) {
                tie = true;
            }
        }
        rep.equidistant_test_users += tie;
        correct += arg == truth;
    }
    rep.accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(rep.retained_users);
    return rep;
}
inline AccuracyReport prediction_accuracy(const RatingsTable& t, std::size_t lambda, const KrcaConfig& cfg) {
    return prediction_accuracy(t.records, t.m, lambda, cfg);
}

} // namespace krc

#endif
