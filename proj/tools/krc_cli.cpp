#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "krc/json_io.hpp"
#include "krc/krc.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw krc::ValidationError("cannot open " + path);
    return in;
}

// Writes to `path`, or stdout when path is "-" or empty.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw krc::ValidationError("cannot write " + path);
    body(out);
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw krc::ValidationError("cannot write " + path);
    out << j.dump(2) << '\n';
}

krc::CountedDataset load_rankings(const std::string& path) {
    auto in = open_in(path);
    return krc::CountedDataset::build(krc::read_rankings_csv(in).view());
}

json centroids_json(std::span<const krc::Ranking> cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back(krc::to_json(c));
    return a;
}

struct GenerateOpts {
    std::size_t n = 1000, m = 5, k = 3, omega = 1;
    std::uint64_t seed = 0;
    std::string out = "-", meta;
};

struct ClusterOpts {
    std::string input, out = "-";
    krc::KrcaConfig cfg;
    bool labels = false;
};

struct IngestOpts {
    std::string ratings, out = "-";
    std::size_t lambda = 1, genres = 4;
    bool user_ids = false;
    double rmin = 0.5, rmax = 5.0;
};

struct AccuracyOpts {
    IngestOpts in;
    krc::KrcaConfig cfg;
};

struct OracleOpts {
    std::string input;
    std::size_t k = 2, m = 6, max_m = 9;
    std::int64_t delta = 4;
};

struct BenchOpts {
    std::size_t n = 100000, k = 10, reps = 3;
    std::vector<std::size_t> dims{3, 4, 5, 6, 7, 8};
    std::uint64_t seed = 0;
    bool counted = false;
};

void add_cluster_config(CLI::App* c, krc::KrcaConfig& cfg) {
    c->add_option("--k", cfg.k, "number of clusters")->check(CLI::PositiveNumber);
    c->add_option("--epsilon", cfg.epsilon, "branch-and-bound pruning slack")->check(CLI::NonNegativeNumber);
    c->add_option("--bnb-threshold", cfg.bnb_threshold, "largest m that uses branch-and-bound");
    c->add_option("--tol", cfg.tol, "stop when an iteration improves by less than this");
    c->add_option("--max-iter", cfg.max_outer_iter, "outer iteration cap");
    c->add_option("--seed", cfg.seed, "seed for k-means++");
}

double time_it(const std::function<void()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-centroids ranking clustering"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic rankings CSV");
    gen->require_subcommand(1);
    GenerateOpts g;
    auto* g_uni = gen->add_subcommand("uniform", "i.i.d. uniform rankings");
    auto* g_swap = gen->add_subcommand("swap", "swap-walk clusters around separated centroids");
    auto* g_tight = gen->add_subcommand("tightness", "instance where optimal KRC costs twice optimal KMC");
    for (auto* s : {g_uni, g_swap, g_tight}) {
        s->add_option("--out,-o", g.out, "rankings CSV (default stdout)");
        s->add_option("--meta", g.meta, "JSON sidecar with generation parameters");
    }
    for (auto* s : {g_uni, g_swap}) {
        s->add_option("--n", g.n, "number of rankings")->check(CLI::PositiveNumber);
        s->add_option("--m", g.m, "number of options")->check(CLI::PositiveNumber);
        s->add_option("--seed", g.seed, "random seed");
    }
    g_swap->add_option("--k", g.k, "number of centroids")->check(CLI::PositiveNumber);
    g_swap->add_option("--omega", g.omega, "swap-walk length");
    g_tight->add_option("--k", g.k, "number of clusters")->check(CLI::PositiveNumber);

    // cluster
    auto* cl = app.add_subcommand("cluster", "run KRCA and print a JSON report");
    ClusterOpts c;
    cl->add_option("--input,-i", c.input, "rankings CSV")->required();
    cl->add_option("--out,-o", c.out, "JSON report (default stdout)");
    cl->add_flag("--labels", c.labels, "include per-entry labels");
    add_cluster_config(cl, c.cfg);

    // ingest
    auto* ing = app.add_subcommand("ingest", "ratings CSV to rankings CSV via lambda-filtering");
    IngestOpts in;
    ing->add_option("--ratings", in.ratings, "ratings CSV: user_id,item_id,genre,rating")->required();
    ing->add_option("--lambda", in.lambda, "minimum ratings per genre")->check(CLI::PositiveNumber);
    ing->add_option("--genres", in.genres, "number of genres")->check(CLI::PositiveNumber);
    ing->add_option("--out,-o", in.out, "rankings CSV (default stdout)");
    ing->add_flag("--user-ids", in.user_ids, "prefix each line with the user id");
    ing->add_option("--rating-min", in.rmin, "lowest valid rating");
    ing->add_option("--rating-max", in.rmax, "highest valid rating");

    // experiment accuracy
    auto* exp = app.add_subcommand("experiment", "evaluation protocols");
    exp->require_subcommand(1);
    auto* acc = exp->add_subcommand("accuracy", "train/test prediction accuracy on ratings");
    AccuracyOpts a;
    acc->add_option("--ratings", a.in.ratings, "ratings CSV")->required();
    acc->add_option("--lambda", a.in.lambda, "minimum ratings per genre")->check(CLI::PositiveNumber);
    acc->add_option("--genres", a.in.genres, "number of genres")->check(CLI::PositiveNumber);
    acc->add_option("--out,-o", a.in.out, "JSON report (default stdout)");
    add_cluster_config(acc, a.cfg);

    // oracle
    auto* orc = app.add_subcommand("oracle", "exact solvers for tiny instances");
    orc->require_subcommand(1);
    OracleOpts o;
    auto* o_krc = orc->add_subcommand("krc", "global KRC optimum");
    auto* o_kmc = orc->add_subcommand("kmc", "global k-means optimum");
    for (auto* s : {o_krc, o_kmc}) {
        s->add_option("--input,-i", o.input, "rankings CSV")->required();
        s->add_option("--k", o.k, "number of clusters")->check(CLI::PositiveNumber);
    }
    auto* o_mu = orc->add_subcommand("mu", "tree-depth bound table as CSV (m,delta,mu)");
    o_mu->add_option("--max-m", o.max_m, "largest m")->check(CLI::Range(1, 9));
    o_mu->add_option("--delta", o.delta, "largest delta")->check(CLI::NonNegativeNumber);

    // bench
    auto* bench = app.add_subcommand("bench", "timing harnesses");
    bench->require_subcommand(1);
    auto* b_assign = bench->add_subcommand("assign", "exhaustive search vs branch-and-bound on uniform data");
    BenchOpts b;
    b_assign->add_option("--n", b.n, "rows")->check(CLI::PositiveNumber);
    b_assign->add_option("--k", b.k, "centroids")->check(CLI::PositiveNumber);
    b_assign->add_option("--m", b.dims, "dimensions to sweep");
    b_assign->add_option("--reps", b.reps, "repetitions (best time kept)")->check(CLI::PositiveNumber);
    b_assign->add_option("--seed", b.seed, "random seed");
    b_assign->add_flag("--counted", b.counted, "deduplicate rows before assigning");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (*gen) {
            json meta;
            krc::RowMatrix rows;
            if (*g_uni) {
                rows = krc::uniform_rows(g.n, g.m, g.seed);
                meta = {{"kind", "uniform"}, {"n", g.n}, {"m", g.m}, {"seed", g.seed}};
            } else if (*g_swap) {
                auto d = krc::gen_swap_clustered({g.n, g.m, g.k, g.omega, g.seed});
                rows = std::move(d.rows);
                meta = {{"kind", "swap"}, {"n", g.n}, {"m", g.m}, {"k", g.k}, {"omega", g.omega}, {"seed", g.seed},
                        {"centroids", centroids_json(d.centroids)}, {"row_labels", d.row_labels}};
            } else {
                auto t = krc::gen_tightness(g.k);
                rows.m = t.m;
                for (const auto& r : t.rows) rows.push_back(r.values());
                meta = {{"kind", "tightness"}, {"k", g.k}, {"m", t.m}, {"block", t.block},
                        {"expected_v_krc", t.expected_v_krc}, {"expected_v_kmc", t.expected_v_kmc}};
            }
            with_output(g.out, [&](std::ostream& os) { krc::write_rankings_csv(os, rows.view()); });
            if (!g.meta.empty()) write_json_file(g.meta, meta);
        } else if (*cl) {
            const auto ds = load_rankings(c.input);
            auto rep = krc::krca(ds, c.cfg);
            json j = krc::to_json(rep, c.labels);
            j["input"] = {{"rows", ds.total()}, {"distinct", ds.distinct()}, {"m", ds.dim()}};
            j["config"] = {{"k", c.cfg.k}, {"epsilon", c.cfg.epsilon}, {"bnb_threshold", c.cfg.bnb_threshold},
                           {"tol", c.cfg.tol}, {"max_iter", c.cfg.max_outer_iter}, {"seed", c.cfg.seed}};
            with_output(c.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
        } else if (*ing) {
            auto f = open_in(in.ratings);
            const auto table = krc::read_ratings_csv(f, in.genres, {in.rmin, in.rmax});
            const auto users = krc::lambda_filter(table, in.lambda);
            with_output(in.out, [&](std::ostream& os) { krc::write_user_rankings_csv(os, users, in.user_ids); });
            std::cerr << users.size() << " users retained\n";
        } else if (*acc) {
            auto f = open_in(a.in.ratings);
            const auto table = krc::read_ratings_csv(f, a.in.genres);
            const auto rep = krc::prediction_accuracy(table, a.in.lambda, a.cfg);
            json j = {{"accuracy_pct", rep.accuracy_pct},
                      {"retained_users", rep.retained_users},
                      {"train_users", rep.train_users},
                      {"test_users", rep.test_users},
                      {"train_records", rep.train_records},
                      {"test_records", rep.test_records},
                      {"equidistant_test_users", rep.equidistant_test_users},
                      {"tie_rule", "lowest centroid index"},
                      {"lambda", a.in.lambda},
                      {"k", a.cfg.k},
                      {"seed", a.cfg.seed},
                      {"train", krc::to_json(rep.train, false)}};
            with_output(a.in.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
        } else if (*orc) {
            if (*o_mu) {
                std::cout << "m,delta,mu\n";
                for (std::size_t m = 1; m <= o.max_m; ++m)
                    for (std::int64_t d = 0; d <= o.delta; ++d) std::cout << m << ',' << d << ',' << krc::mu_depth_bound(m, d) << '\n';
            } else if (*o_krc) {
                const auto ds = load_rankings(o.input);
                const auto r = krc::exact_krc_oracle(ds, o.k);
                json j = krc::to_json(r.solution);
                j["method"] = r.method;
                std::cout << j.dump(2) << '\n';
            } else {
                const auto ds = load_rankings(o.input);
                std::cout << json{{"objective", krc::exact_kmc_oracle(ds, o.k)}}.dump(2) << '\n';
            }
        } else if (*b_assign) {
            std::cout << "m,n,k,es_seconds,bnb_seconds,bnb_nodes_expanded\n";
            for (auto m : b.dims) {
                const auto rows = krc::uniform_rows(b.n, m, b.seed + m);
                krc::Rng rng(b.seed ^ 0x9e3779b97f4a7c15ULL);
                std::vector<krc::Ranking> cs;
                for (std::size_t l = 0; l < b.k; ++l) cs.push_back(krc::random_ranking(m, rng));
                std::unique_ptr<krc::CountedDataset> ds;
                if (b.counted) ds = std::make_unique<krc::CountedDataset>(krc::CountedDataset::build(rows.view()));
                const krc::RowsView view = ds ? ds->view() : rows.view();
                double es = 1e300, bnb = 1e300;
                krc::BnbStats st;
                for (std::size_t r = 0; r < b.reps; ++r) {
                    es = std::min(es, time_it([&] { krc::assign_es(view, cs); }));
                    bnb = std::min(bnb, time_it([&] { krc::assign_bnb(view, cs, 0.0, &st); }));
                }
                std::cout << m << ',' << b.n << ',' << b.k << ',' << es << ',' << bnb << ',' << st.nodes_expanded << '\n';
            }
        }
    } catch (const krc::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const krc::CapExceeded& e) {
        std::cerr << "too large: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const krc::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
