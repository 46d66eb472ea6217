// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "krc/krc.hpp"

using namespace krc;

namespace {

constexpr double kCentroidMaxSeconds = 1e-3;     // per cluster, closed form
constexpr double kKmcRelTol = 1e-9;              // KMC side of the sandwich
constexpr double kGapSlack = 1e-9;               // epsilon gap bound
constexpr double kScaleMaxSeconds = 300.0;       // n = 1e6 KRCA run
constexpr std::size_t kCrossoverReps = 5;        // best-of timing repetitions

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

CountedDataset random_counted(Rng& rng, std::size_t n, std::size_t m, std::int64_t max_count) {
    // Repeated draws of the same ranking merge into one entry.
    RowMatrix rows{m, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = random_ranking(m, rng);
        const auto count = 1 + rng.below(static_cast<std::uint64_t>(max_count));
        for (std::uint64_t c = 0; c < count; ++c) rows.push_back(x.values());
    }
    return CountedDataset::build(rows.view());
}

std::vector<Ranking> random_centroids(std::size_t k, std::size_t m, Rng& rng) {
    std::vector<Ranking> c;
    for (std::size_t l = 0; l < k; ++l) c.push_back(random_ranking(m, rng));
    return c;
}

Outcome centroid_correctness() {
    Outcome o;
    Rng rng(1001);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t m = 3 + rng.below(5);
        const std::size_t n = 1 + rng.below(30);
        const auto ds = random_counted(rng, n, m, 10);
        const auto t0 = Clock::now();
        const auto fast = optimal_centroid(ds);
        worst = std::max(worst, seconds_since(t0));
        const auto slow = brute_force_centroid(ds);
        if (fast.objective != slow.objective) o.fail("objective mismatch at instance " + std::to_string(rep));
    }
    if (worst >= kCentroidMaxSeconds) o.fail("closed form took " + std::to_string(worst) + " s");
    if (o.pass) o.detail = "200/200 match, slowest closed form " + std::to_string(worst * 1e6) + " us";
    return o;
}

Outcome tightness_family() {
    Outcome o;
    std::string values;
    for (std::size_t k = 1; k <= 3; ++k) {
        const auto t = gen_tightness(k);
        const auto krc = exact_krc_oracle(t.dataset, k).value;
        const double kmc = exact_kmc_oracle(t.dataset, k);
        values += " k=" + std::to_string(k) + ":" + std::to_string(krc) + "/" + std::to_string(kmc);
        if (krc != 2 * static_cast<Objective>(k)) o.fail("KRC optimum " + std::to_string(krc) + " for k=" + std::to_string(k));
        if (std::abs(kmc - static_cast<double>(k)) > 1e-9) o.fail("KMC optimum " + std::to_string(kmc) + " for k=" + std::to_string(k));
        if (std::abs(static_cast<double>(krc) - 2 * kmc) > 1e-9) o.fail("ratio not 2 for k=" + std::to_string(k));
    }
    for (std::size_t k = 1; k <= 12; ++k) {
        const auto t = gen_tightness(k);
        for (std::size_t a = 0; a < t.rows.size(); ++a)
            for (std::size_t b = a + 1; b < t.rows.size(); ++b) {
                const auto d = sq_dist(t.rows[a], t.rows[b]);
                const bool pair = a % 2 == 0 && b == a + 1;
                if (pair ? d != 2 : d < 4 * static_cast<Objective>(k))
                    o.fail("distance pattern broken at k=" + std::to_string(k));
            }
    }
    if (o.pass) o.detail = "optima (KRC/KMC)" + values + "; pattern holds for k<=12";
    return o;
}

Outcome sandwich() {
    Outcome o;
    Rng rng(1003);
    int checked = 0;
    while (checked < 100) {
        const std::size_t m = 2 + rng.below(3);
        const std::size_t n = 1 + rng.below(8);
        RowMatrix rows{m, {}};
        for (std::size_t i = 0; i < n; ++i) rows.push_back(random_ranking(m, rng).values());
        const auto ds = CountedDataset::build(rows.view());
        const std::size_t k = 1 + rng.below(2);
        if (k > ds.distinct()) continue;
        ++checked;
        const double kmc = exact_kmc_oracle(ds, k);
        const Objective krc = exact_krc_oracle(ds, k).value;
        const double tol = kKmcRelTol * std::max(1.0, kmc);
        if (kmc > static_cast<double>(krc) + tol) o.fail("KMC above KRC");
        if (static_cast<double>(krc) > 2 * kmc + 2 * tol) o.fail("KRC above twice KMC");
    }
    if (o.pass) o.detail = "100/100 instances";
    return o;
}

bool distances_distinct(RowsView rows, const std::vector<Ranking>& c) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::set<Objective> seen;
        for (const auto& y : c)
            if (!seen.insert(sq_dist(rows.row(i), y.values())).second) return false;
    }
    return true;
}

Outcome bnb_exactness() {
    Outcome o;
    Rng rng(1004);
    int label_checks = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t m = 3 + rng.below(5);
        const std::size_t k = 2 + rng.below(7);
        const std::size_t n = 1 + rng.below(10000);
        const auto rows = uniform_rows(n, m, rng.next());
        const auto ds = CountedDataset::build(rows.view());
        const auto c = random_centroids(k, m, rng);
        const auto es = assign_es(ds, c);
        const auto bnb = assign_bnb(ds, c, 0.0);
        if (objective(ds, c, es) != objective(ds, c, bnb)) o.fail("objective mismatch at instance " + std::to_string(rep));
        if (distances_distinct(ds.view(), c)) {
            ++label_checks;
            if (es != bnb) o.fail("labels differ at instance " + std::to_string(rep));
        }
    }
    if (o.pass) o.detail = "200/200 objectives equal; labels equal on " + std::to_string(label_checks) + " tie-free instances";
    return o;
}

Outcome epsilon_gap() {
    Outcome o;
    Rng rng(1005);
    double worst_ratio = 0.0;
    for (double eps : {0.1, 1.0, 5.0}) {
        for (int rep = 0; rep < 50; ++rep) {
            const std::size_t m = 3 + rng.below(5);
            const std::size_t k = 2 + rng.below(7);
            const auto ds = gen_uniform(1 + rng.below(5000), m, rng.next());
            const auto c = random_centroids(k, m, rng);
            const auto gap = objective(ds, c, assign_bnb(ds, c, eps)) - objective(ds, c, assign_es(ds, c));
            const double bound = static_cast<double>(ds.total()) * static_cast<double>(k - 1) * eps;
            if (static_cast<double>(gap) > bound + kGapSlack) o.fail("gap " + std::to_string(gap) + " above bound");
            if (gap < 0) o.fail("BnB beat exhaustive search");
            worst_ratio = std::max(worst_ratio, static_cast<double>(gap) / bound);
        }
    }
    if (o.pass) o.detail = "150/150 within n(k-1)eps; largest gap/bound " + std::to_string(worst_ratio);
    return o;
}

Outcome krca_monotone() {
    Outcome o;
    Rng rng(1006);
    double min_impr = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 100; ++rep) {
        KrcaConfig cfg;
        cfg.k = 2 + rng.below(7);
        cfg.epsilon = 0.0;
        cfg.seed = rng.next();
        const std::size_t m = 3 + rng.below(6);
        const auto ds = gen_uniform(200 + rng.below(3000), m, rng.next());
        if (cfg.k > ds.distinct()) continue;
        const auto rep_ = krca(ds, cfg);
        Objective prev = rep_.baseline.objective;
        for (auto v : rep_.per_iteration_objectives) {
            if (v > prev) o.fail("objective rose at instance " + std::to_string(rep));
            prev = v;
        }
        if (!(rep_.relative_improvement_pct >= 0.0)) o.fail("negative improvement at instance " + std::to_string(rep));
        min_impr = std::min(min_impr, rep_.relative_improvement_pct);
    }
    if (o.pass) o.detail = "100/100 runs monotone; smallest improvement " + std::to_string(min_impr) + "%";
    return o;
}

Outcome swap_walk_bound() {
    Outcome o;
    const auto ex = apply_value_swaps(Ranking::validate({1, 2, 3, 4}), std::vector<Rank>{2, 1});
    if (ex != Ranking::validate({2, 3, 1, 4})) o.fail("worked example gives wrong ranking");
    if (sq_dist(ex, Ranking::identity(4)) != 6) o.fail("worked example distance not 6");
    Rng rng(1007);
    std::size_t samples = 0;
    std::vector<std::pair<std::size_t, std::size_t>> grid;
    for (std::size_t m = 2; m <= 12; ++m)
        for (std::size_t w = 1; w < m; ++w) grid.emplace_back(m, w);
    while (samples < 100000) {
        for (auto [m, w] : grid) {
            const auto y = random_ranking(m, rng);
            if (sq_dist(swap_walk(y, w, rng), y) > 2 * static_cast<Objective>(w * w)) o.fail("bound violated");
            if (++samples == 100000) break;
        }
    }
    if (o.pass) o.detail = std::to_string(samples) + " samples within 2*omega^2; example [2,3,1,4] at distance 6";
    return o;
}

Outcome reduction_identities() {
    Outcome o;
    for (std::size_t eta = 1; eta <= 4; ++eta) {
        const auto cube = all_binary_vectors(eta);
        for (const auto& z : cube) {
            if (alt_pair_inverse(alt_pair_transform(z)) != z) o.fail("round trip failed");
            for (const auto& w : cube)
                if (2 * hamming(z, w) != sq_dist(alt_pair_transform(z), alt_pair_transform(w))) o.fail("Hamming identity failed");
        }
    }
    Rng rng(1008);
    int instances = 0;
    for (std::size_t eta = 1; eta <= 3; ++eta) {
        const auto cube = all_binary_vectors(eta);
        for (std::size_t k = 1; k <= 2; ++k)
            for (int rep = 0; rep < 10; ++rep) {
                std::vector<BinaryVector> pts;
                const std::size_t n = 1 + rng.below(6);
                for (std::size_t i = 0; i < n; ++i) pts.push_back(cube[rng.below(cube.size())]);
                RowMatrix rows{2 * eta, {}};
                for (const auto& z : pts) rows.push_back(alt_pair_transform(z).values());
                const auto ds = CountedDataset::build(rows.view());
                if (k > ds.distinct()) continue;
                ++instances;
                if (2 * hcp_optimum(pts, k) != exact_krc_oracle(ds, k).value) o.fail("HCP optimum is not half the KRC optimum");
            }
    }
    if (o.pass) o.detail = "enumeration to eta=4 passes; HCP = KRC/2 on " + std::to_string(instances) + " instances";
    return o;
}

Outcome depth_bound() {
    Outcome o;
    Rng rng(1009);
    std::size_t worst_slack = 99;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = 3 + rng.below(6);
        const std::int64_t delta = 1 + static_cast<std::int64_t>(rng.below(6));
        const auto rows = delta_clustered_rows(100 + rng.below(900), m, delta, rng.next());
        const std::vector<Ranking> c{Ranking::identity(m), Ranking::reversed(m)};
        BnbStats st;
        assign_bnb(rows.view(), c, 0.0, &st);
        const auto mu = mu_depth_bound(m, delta);
        if (st.max_depth > mu) o.fail("depth " + std::to_string(st.max_depth) + " > mu " + std::to_string(mu));
        else worst_slack = std::min(worst_slack, mu - st.max_depth);
    }
    for (std::size_t m = 1; m <= 8; ++m)
        for (std::int64_t d = 1; d <= 8; ++d)
            if (mu_depth_bound(m, d - 1) > mu_depth_bound(m, d)) o.fail("mu increases as delta shrinks at m=" + std::to_string(m));
    if (o.pass) o.detail = "50/50 instances within mu (tightest slack " + std::to_string(worst_slack) + "); mu monotone in delta";
    return o;
}

Outcome scale_smoke() {
    Outcome o;
    KrcaConfig cfg;
    cfg.k = 5;
    cfg.seed = 10;
    const auto t0 = Clock::now();
    const auto rows = uniform_rows(1000000, 6, 10);
    const auto ds = CountedDataset::build(rows.view());
    const auto rep = krca(ds, cfg);
    const double secs = seconds_since(t0);
    if (secs >= kScaleMaxSeconds) o.fail("took " + std::to_string(secs) + " s");
    if (!(rep.relative_improvement_pct >= 0.0)) o.fail("negative improvement");

    // Tree size is unchanged when every row is repeated ten times.
    const auto base = uniform_rows(100000, 6, 11);
    RowMatrix tenfold{6, {}};
    tenfold.data.reserve(base.data.size() * 10);
    for (int r = 0; r < 10; ++r) tenfold.data.insert(tenfold.data.end(), base.data.begin(), base.data.end());
    BnbStats a, b;
    assign_bnb(base.view(), rep.final.centroids, 0.0, &a);
    assign_bnb(tenfold.view(), rep.final.centroids, 0.0, &b);
    if (a.nodes_expanded != b.nodes_expanded) o.fail("expanded nodes changed under duplication");
    if (o.pass)
        o.detail = "n=1e6 run in " + std::to_string(secs) + " s, improvement " + std::to_string(rep.relative_improvement_pct) +
                   "%; expanded nodes " + std::to_string(a.nodes_expanded) + " both ways";
    return o;
}

double best_time(std::size_t reps, const std::function<void()>& f) {
    double best = 1e300;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

Outcome crossover() {
    Outcome o;
    const std::size_t n = 100000, k = 10;
    std::string detail;
    for (std::size_t m : {4u, 8u}) {
        const auto rows = uniform_rows(n, m, 2000 + m);
        Rng rng(3000 + m);
        const auto c = random_centroids(k, m, rng);
        const double es = best_time(kCrossoverReps, [&] { assign_es(rows.view(), c); });
        const double bnb = best_time(kCrossoverReps, [&] { assign_bnb(rows.view(), c, 0.0); });
        detail += " m=" + std::to_string(m) + ": ES " + std::to_string(es * 1e3) + " ms, BnB " + std::to_string(bnb * 1e3) + " ms;";
        if (m == 4 && !(bnb < es)) o.fail("BnB not faster at m=4");
        if (m == 8 && !(bnb > es)) o.fail("BnB not slower at m=8");
    }
    o.detail = (o.pass ? "" : o.detail + ";") + detail;
    return o;
}

Outcome ingestion_determinism() {
    Outcome o;
    std::ifstream in(std::string(KRC_TEST_DATA) + "/ratings_fixture.csv");
    const auto table = read_ratings_csv(in, 4);
    if (table.records.size() != 50) o.fail("fixture does not have 50 records");
    std::set<std::string> prev;
    for (std::size_t lambda = 1; lambda <= 5; ++lambda) {
        std::ostringstream a, b;
        write_user_rankings_csv(a, lambda_filter(table, lambda), true);
        write_user_rankings_csv(b, lambda_filter(table, lambda), true);
        std::ifstream golden(std::string(KRC_TEST_DATA) + "/ratings_fixture_lambda" + std::to_string(lambda) + ".csv");
        std::stringstream g;
        g << golden.rdbuf();
        if (a.str() != b.str()) o.fail("repeat run differs at lambda=" + std::to_string(lambda));
        if (a.str() != g.str()) o.fail("output differs from golden at lambda=" + std::to_string(lambda));
        std::set<std::string> cur;
        for (const auto& u : lambda_filter(table, lambda)) cur.insert(u.user_id);
        if (lambda > 1 && !std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()))
            o.fail("retained set grew at lambda=" + std::to_string(lambda));
        prev = std::move(cur);
    }
    if (o.pass) o.detail = "byte-identical to golden for lambda=1..5; retained sets nested";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"centroid correctness", centroid_correctness},
        {"tightness family", tightness_family},
        {"KMC/KRC sandwich", sandwich},
        {"BnB exactness at epsilon 0", bnb_exactness},
        {"BnB epsilon gap", epsilon_gap},
        {"KRCA monotonicity", krca_monotone},
        {"swap-walk distance bound", swap_walk_bound},
        {"hypercube reduction identities", reduction_identities},
        {"BnB depth bound", depth_bound},
        {"scale smoke test", scale_smoke},
        {"BnB/ES crossover", crossover},
        {"ingestion determinism", ingestion_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        const auto t0 = Clock::now();
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.fail(std::string("exception: ") + e.what());
        }
        failures += !out.pass;
        std::printf("%s %2zu %-32s (%.1f s) %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    seconds_since(t0), out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
