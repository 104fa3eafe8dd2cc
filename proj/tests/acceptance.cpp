// Acceptance gate: one PASS/FAIL line per criterion. Tolerances are fixed below.

#include "oracle.hpp"

#include "sensei/autotune.hpp"
#include "sensei/cli.hpp"
#include "sensei/graph.hpp"
#include "sensei/profiler.hpp"
#include "sensei/selector.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

using namespace sensei;
using oracle::Mat;
using nlohmann::json;

namespace {

constexpr double kKernelTol = 1e-10;
constexpr double kKernelBudgetS = 60.0;
constexpr double kCompositionTol = 1e-6;
constexpr double kRowSumTol = 1e-9;
constexpr double kAttentionOracleTol = 1e-8;
constexpr double kTrendRatio = 1.1;
constexpr int kTrendReps = 10;
constexpr double kSelectorSlack = 1.05;
constexpr double kOverheadIterations = 1.0;
constexpr double kTunerSlack = 1.05;
constexpr int kTunerBudget = 20;
constexpr int kTunerPairedRounds = 41;

struct Outcome {
    bool pass = false;
    bool blocked = false; // the machine cannot hold the required workload
    std::string detail;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// max|got - want| / max|want|
double rel(const Mat& got, const Mat& want)
{
    const double scale = std::max(want.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double geomean(const std::vector<double>& xs)
{
    double s = 0;
    for (double x : xs)
        s += std::log(x);
    return std::exp(s / static_cast<double>(xs.size()));
}

/// Bundled graphs plus a few random ones of different density.
std::vector<Graph> test_graphs()
{
    std::vector<Graph> gs;
    for (const auto& s : bundled_graph_specs())
        gs.push_back(load_graph(s));
    for (const auto& s : {"gen:uniform:500:20:1", "gen:uniform:300:120:2", "gen:powerlaw:1500:12:2.1:3"})
        gs.push_back(load_graph(s));
    return gs;
}

GcnLayerSpec<double> gcn_spec(const Mat& w, GcnComposition c)
{
    GcnLayerSpec<double> s;
    s.weights = w;
    s.composition = c;
    return s;
}

Outcome kernel_correctness()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::int64_t> n_of(2, 200);
    std::uniform_int_distribution<Eigen::Index> k_of(1, 16);
    std::uniform_real_distribution<double> density_of(0.01, 0.5);
    const int graphs = 120;
    double worst[4] = {0, 0, 0, 0};
    for (int t = 0; t < graphs; ++t) {
        const std::int64_t n = n_of(rng);
        const double density = density_of(rng);
        const Eigen::Index k = k_of(rng);
        const auto a = oracle::random_sparse(n, n, density, rng);
        const Mat b = oracle::random_dense(n, k, rng), c = oracle::random_dense(n, k, rng);
        const Mat ad = a.to_dense();
        const Mat want = ad * b;

        worst[0] = std::max(worst[0], rel(spmm(a, b), want));
        worst[1] = std::max(worst[1], rel(sddmm(a, b, c).to_dense(), oracle::dense_sddmm(a, b, c)));
        const TilingConfig cfg{Offset(1) << (rng() % 8), Offset(1) << (rng() % 9), false};
        worst[2] = std::max(worst[2], rel(tiled_spmm(tile(a, cfg), b), want));

        const auto r = reorder_degree(a);
        worst[3] = std::max(worst[3], rel(unpermute_rows(spmm(r.matrix, permute_rows(b, r.perm)), r.perm), want));
        const auto adj = oracle::random_graph(n, density, rng);
        const Mat w = oracle::random_dense(k, k_of(rng), rng);
        const auto og = prepare_optimized(adj, true, TilingConfig{cfg.col_segment_width, cfg.row_tile_height, true}, true);
        worst[3] = std::max(worst[3], rel(opt_gcn_layer(og, b, gcn_spec(w, GcnComposition::Precompute)), oracle::gcn(adj, b, w)));
    }
    const double secs = since(t0);
    const double max_err = *std::max_element(worst, worst + 4);
    Outcome o;
    o.pass = max_err <= kKernelTol && secs < kKernelBudgetS;
    o.detail = std::to_string(graphs) + " graphs; max rel err spmm " + fmt(worst[0]) + ", sddmm " + fmt(worst[1]) + ", tiled " +
               fmt(worst[2]) + ", reordered " + fmt(worst[3]) + " (tol " + fmt(kKernelTol) + "); " + fmt(secs) + " s (budget " +
               fmt(kKernelBudgetS) + " s)";
    return o;
}

Outcome composition_equivalence(const std::vector<Graph>& graphs)
{
    double worst_gcn = 0, worst_gat = 0;
    int cases = 0;
    for (const auto& g : graphs) {
        const auto ng = normalize_graph(g.adjacency, g.unweighted, true);
        for (auto [k1, k2] : evaluation_sizes(GnnModel::Gcn)) {
            const auto in = make_layer_inputs(g.adjacency.rows(), k1, k2, 11);
            const Mat pre = gcn_layer(ng, in.h, gcn_spec(in.weights, GcnComposition::Precompute));
            const Mat dyn = gcn_layer(ng, in.h, gcn_spec(in.weights, GcnComposition::Dynamic));
            worst_gcn = std::max(worst_gcn, rel(dyn, pre));
            ++cases;
        }
        for (auto [k1, k2] : evaluation_sizes(GnnModel::Gat)) {
            const auto in = make_layer_inputs(g.adjacency.rows(), k1, k2, 12);
            GatLayerSpec<double> s;
            s.weights = in.weights;
            s.attn_src = in.attn_src;
            s.attn_dst = in.attn_dst;
            const Mat reuse = gat_layer(ng.a_tilde, in.h, s);
            s.composition = GatComposition::Recompute;
            const Mat recompute = gat_layer(ng.a_tilde, in.h, s);
            worst_gat = std::max(worst_gat, rel(recompute, reuse));
            ++cases;
        }
    }
    Outcome o;
    o.pass = worst_gcn <= kCompositionTol && worst_gat <= kCompositionTol;
    o.detail = std::to_string(graphs.size()) + " graphs, " + std::to_string(cases) + " cases; max rel diff GCN " + fmt(worst_gcn) +
               ", GAT " + fmt(worst_gat) + " (tol " + fmt(kCompositionTol) + ")";
    return o;
}

Outcome unweighted_shortcut(const std::vector<Graph>& graphs)
{
    bool values_untouched = true, bit_identical = true, path_ok = true;
    std::mt19937_64 rng(303);
    for (const auto& g : graphs) {
        const Mat h = oracle::random_dense(g.adjacency.rows(), 24, rng), w = oracle::random_dense(24, 16, rng);
        auto ng = normalize_graph(g.adjacency, true, false);
        const Mat clean = gcn_layer(ng, h, gcn_spec(w, GcnComposition::Dynamic));
        ng.a_tilde = ng.a_tilde.filled(std::numeric_limits<double>::quiet_NaN());
        KernelTrace trace;
        const Mat poisoned = gcn_layer(ng, h, gcn_spec(w, GcnComposition::Dynamic), &trace);
        values_untouched = values_untouched && poisoned.allFinite() && poisoned == clean;
        path_ok = path_ok && trace.count(KernelKind::Spmm) == 0 && trace.count(KernelKind::SpmmUnweighted) == 1;

        const auto a_tilde = add_self_loops(g.adjacency);
        bit_identical = bit_identical && spmm_unweighted(a_tilde, h) == spmm(a_tilde.filled(1.0), h);
        // full layer against a weighted-kernel evaluation of the same algebra
        const auto d = inv_sqrt_degrees(a_tilde);
        Mat weighted = scale_rows(d, spmm(a_tilde.filled(1.0), gemm(scale_rows(d, h), w))); // k2 < k1: update first
        apply_activation(weighted, Activation::Relu);
        bit_identical = bit_identical && weighted == clean;
    }
    Outcome o;
    o.pass = values_untouched && bit_identical && path_ok;
    o.detail = std::to_string(graphs.size()) + " graphs; NaN-poisoned values leave output unchanged: " +
               (values_untouched ? "yes" : "no") + ", weighted kernel never invoked: " + (path_ok ? "yes" : "no") +
               ", bit-identical to unit-valued weighted kernel: " + (bit_identical ? "yes" : "no");
    return o;
}

Outcome attention_validity(const std::vector<Graph>& graphs)
{
    std::mt19937_64 rng(404);
    double worst_sum = 0, worst_oracle = 0;
    for (const auto& g : graphs) {
        const auto a = add_self_loops(g.adjacency);
        const auto spec = oracle::random_gat_spec(8, 16, rng);
        const Mat hw = oracle::random_dense(a.rows(), 16, rng, -2, 2);
        const auto att = atten_calc(a, hw, spec);
        const auto rp = att.alpha.row_ptr();
        const auto v = att.alpha.values();
        for (Offset i = 0; i < att.alpha.rows(); ++i) {
            double s = 0;
            for (Offset k = rp[i]; k < rp[i + 1]; ++k)
                s += v[k];
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
        }
    }
    const int small = 40;
    for (int t = 0; t < small; ++t) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng() % 60);
        const auto a = add_self_loops(oracle::random_graph(n, 0.05 + 0.4 * (t % 5) / 4.0, rng));
        const auto spec = oracle::random_gat_spec(4, 6, rng);
        const Mat hw = oracle::random_dense(n, 6, rng, -3, 3);
        const Mat want = oracle::attention(oracle::mask(a), hw, spec.attn_src, spec.attn_dst);
        worst_oracle = std::max(worst_oracle, (atten_calc(a, hw, spec).alpha.to_dense() - want).cwiseAbs().maxCoeff());
    }
    Outcome o;
    o.pass = worst_sum <= kRowSumTol && worst_oracle <= kAttentionOracleTol;
    o.detail = std::to_string(graphs.size()) + " graphs max |row sum - 1| " + fmt(worst_sum) + " (tol " + fmt(kRowSumTol) + "); " +
               std::to_string(small) + " small graphs max |alpha - oracle| " + fmt(worst_oracle) + " (tol " +
               fmt(kAttentionOracleTol) + ")";
    return o;
}

/// Median reuse and recompute times for one GAT layer.
struct TrendResult {
    double reuse_s = 0;
    double recompute_s = 0;
};

TrendResult time_gat(const Graph& g, std::int64_t k1, std::int64_t k2)
{
    const auto in = make_layer_inputs(g.adjacency.rows(), k1, k2, 55);
    TrendResult r;
    for (Composition c : {Composition::Reuse, Composition::Recompute}) {
        const Executor ex = Executor::prepare(g, c);
        DenseMatrix<double> out;
        const double t = time_repeated([&] { out = ex.forward(in); }, kTrendReps, 1).median_s;
        (c == Composition::Reuse ? r.reuse_s : r.recompute_s) = t;
    }
    return r;
}

Outcome trend_reproduction()
{
    Outcome o;
    const Graph dense{"gen:uniform:5000:560:5", gen::uniform(5000, 560, 5), true};
    const auto fd = extract_features(dense.adjacency);
    const auto d = time_gat(dense, 32, 2048);
    const double dense_ratio = d.reuse_s / d.recompute_s;
    const bool dense_ok = fd.nnz_mean >= 500 && dense_ratio >= kTrendRatio;
    o.detail = "dense n=5000 avg deg " + fmt(fd.nnz_mean) + " k=32/2048: reuse " + fmt(d.reuse_s) + " s, recompute " +
               fmt(d.recompute_s) + " s, reuse/recompute " + fmt(dense_ratio) + " (need >= " + fmt(kTrendRatio) + ")";

    const std::int64_t n = 1000000, k1 = 1024, k2 = 2048;
    const std::uint64_t need = estimate_layer_bytes(n, 2 * n, k1, k2);
    const std::uint64_t have = available_memory_bytes();
    if (have > 0 && need > have) {
        o.blocked = dense_ok; // a failing dense case is a genuine failure

        o.pass = false;
        o.detail += "; sparse n=10^6 k=1024/2048 not run: needs ~" + fmt(static_cast<double>(need) / (1 << 30)) + " GiB, " +
                    fmt(static_cast<double>(have) / (1 << 30)) + " GiB available";
        // same average degree at a size that fits, reported for information only
        const Graph small{"gen:uniform:20000:2:6", gen::uniform(20000, 2, 6), true};
        const auto s = time_gat(small, k1, k2);
        o.detail += "; scaled-down sparse n=2*10^4 (informational): recompute/reuse " + fmt(s.recompute_s / s.reuse_s);
        return o;
    }
    const Graph sparse{"gen:uniform:1000000:2:6", gen::uniform(n, 2, 6), true};
    const auto s = time_gat(sparse, k1, k2);
    const double sparse_ratio = s.recompute_s / s.reuse_s;
    o.pass = dense_ok && sparse_ratio >= kTrendRatio;
    o.detail += "; sparse n=10^6 k=1024/2048: recompute/reuse " + fmt(sparse_ratio) + " (need >= " + fmt(kTrendRatio) + ")";
    return o;
}

/// GAT profiles on generated graphs whose average degree spans both sides of the reuse/recompute crossover.
std::vector<ProfileRecord> selector_profiles(int n_graphs)
{
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> log_deg(std::log(2.0), std::log(300.0));
    std::vector<Graph> graphs;
    for (int i = 0; i < n_graphs; ++i) {
        const double deg = std::exp(log_deg(rng));
        const std::int64_t n = 1000 + static_cast<std::int64_t>(rng() % 1500);
        std::ostringstream spec;
        if (i % 2 == 0)
            spec << "gen:uniform:" << n << ':' << deg << ':' << i;
        else
            spec << "gen:powerlaw:" << n << ':' << deg << ":2.3:" << i;
        graphs.push_back(load_graph(spec.str()));
    }
    ProfileOptions opts;
    opts.reps = 5;
    opts.warmup = 1;
    opts.seed = 7;
    opts.hw_tag = "local";
    return profile(graphs, {{16, 128}, {16, 512}, {64, 256}}, GnnModel::Gat, opts);
}

Outcome selector_quality(const std::vector<ProfileRecord>& records, SelectorModel& trained)
{
    std::map<std::string, std::vector<const ProfileRecord*>> groups;
    std::set<std::string> graph_ids;
    for (const auto& r : records)
        if (r.ok()) {
            groups[group_key(r)].push_back(&r);
            graph_ids.insert(r.graph_id);
        }
    std::vector<std::string> keys;
    for (const auto& [k, v] : groups)
        keys.push_back(k);
    std::mt19937_64 rng(2024);
    std::shuffle(keys.begin(), keys.end(), rng);
    const std::size_t n_train = keys.size() * 4 / 5;
    const std::set<std::string> train_keys(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_train));

    std::vector<ProfileRecord> train_set;
    for (const auto& r : records)
        if (train_keys.count(group_key(r)))
            train_set.push_back(r);
    trained = train(train_set, GnnModel::Gat, plain_system_params()).model;

    std::vector<double> sel, best, reuse, recompute;
    for (std::size_t i = n_train; i < keys.size(); ++i) {
        const auto& members = groups[keys[i]];
        std::map<Composition, double> t;
        for (const auto* r : members)
            t[r->composition] = r->median_time_s;
        const Composition choice = select(trained, input_of(*members.front()));
        sel.push_back(t.at(choice));
        best.push_back(std::min(t.at(Composition::Reuse), t.at(Composition::Recompute)));
        reuse.push_back(t.at(Composition::Reuse));
        recompute.push_back(t.at(Composition::Recompute));
    }
    const double g_sel = geomean(sel), g_best = geomean(best), g_reuse = geomean(reuse), g_rec = geomean(recompute);
    Outcome o;
    o.pass = graph_ids.size() >= 30 && g_sel <= kSelectorSlack * g_best && g_sel < g_reuse && g_sel < g_rec;
    o.detail = std::to_string(graph_ids.size()) + " graphs x 3 sizes, " + std::to_string(keys.size() - n_train) +
               " held-out groups; geomean s: selected " + fmt(g_sel) + ", oracle " + fmt(g_best) + " (ratio " + fmt(g_sel / g_best) +
               ", need <= " + fmt(kSelectorSlack) + "), always-reuse " + fmt(g_reuse) + ", always-recompute " + fmt(g_rec);
    return o;
}

Outcome overhead(const std::string& scratch_dir)
{
    // a GCN selector trained on small generated graphs; the criterion concerns its query cost
    std::vector<Graph> graphs;
    for (int i = 0; i < 24; ++i)
        graphs.push_back(load_graph("gen:uniform:" + std::to_string(200 + 40 * i) + ":" + std::to_string(2 + i) + ":" + std::to_string(i)));
    ProfileOptions opts;
    opts.reps = 3;
    opts.warmup = 1;
    const auto recs = profile(graphs, {{8, 8}, {32, 8}}, GnnModel::Gcn, opts);
    const auto model_path = (std::filesystem::path(scratch_dir) / "gcn_overhead.model").string();
    save_model(train(recs, GnnModel::Gcn, plain_system_params()).model, model_path);

    bool ok = true;
    std::string detail;
    for (const auto& spec : bundled_graph_specs()) {
        std::ostringstream out, err;
        const int code = cli::run({"run", "--graph", spec, "--k1", "128", "--k2", "128", "--composition", "auto", "--model-file",
                                   model_path, "--reps", "10"},
                                  out, err);
        if (code != 0) {
            ok = false;
            detail += spec + ": exit " + std::to_string(code) + " " + err.str() + "; ";
            continue;
        }
        const auto j = json::parse(out.str());
        const double iters = j.at("selection_overhead_iterations").get<double>();
        ok = ok && iters <= kOverheadIterations;
        detail += spec + " " + fmt(iters) + " it; ";
    }
    Outcome o;
    o.pass = ok;
    o.detail = "overhead in layer iterations at k1=k2=128 (need <= " + fmt(kOverheadIterations) + "): " + detail;
    return o;
}

Outcome autotuner()
{
    const std::vector<std::pair<std::string, CsrMatrix<double>>> graphs{
        {"uniform 150k deg 8", gen::uniform(150000, 8, 1)},
        {"powerlaw 150k deg 8", gen::power_law(150000, 8, 2.3, 2)},
        {"uniform 200k deg 4", gen::uniform(200000, 4, 3)},
        {"powerlaw 100k deg 16", gen::power_law(100000, 16, 2.1, 4)},
        {"grid 400x400", gen::grid(400, 400)},
    };
    const std::int64_t k = 32;
    const auto grid = default_tiling_grid();
    AutotuneOptions opts;
    opts.reps = 5;
    opts.warmup = 1;
    bool ok = true;
    std::string detail;
    for (const auto& [name, a] : graphs) {
        // exhaustive: the same procedure with a budget covering every candidate
        const auto exhaustive = autotune(a, k, grid, static_cast<int>(grid.size()), nullptr, opts);
        const auto tuned = autotune(a, k, grid, kTunerBudget, nullptr, opts);
        double ratio = 1.0;
        if (!(tuned.best == exhaustive.best)) {
            // paired head-to-head: median over rounds of (tuned run / exhaustive-pick run), back to back
            const auto rel = paired_relative_times(a, k, {tuned.best, exhaustive.best}, kTunerPairedRounds, opts);
            ratio = rel[0] / rel[1];
        }
        ok = ok && tuned.timed.size() == static_cast<std::size_t>(kTunerBudget) && exhaustive.timed.size() == grid.size() &&
             ratio <= kTunerSlack;
        detail += name + ": " + to_string(tuned.best) + " vs exhaustive " + to_string(exhaustive.best) + " ratio " + fmt(ratio) + "; ";
    }
    Outcome o;
    o.pass = ok;
    o.detail = "budget " + std::to_string(kTunerBudget) + " of " + std::to_string(grid.size()) + " configs, k=" + std::to_string(k) +
               " (need ratio <= " + fmt(kTunerSlack) + "): " + detail;
    return o;
}

/// Every non-timing output of one end-to-end pass, serialized.
std::string deterministic_outputs(const std::vector<ProfileRecord>& fixed_records)
{
    json j;
    const Graph g = load_graph("gen:powerlaw:3000:10:2.2:9");
    j["features"] = extract_features(g.adjacency);
    const auto in = make_layer_inputs(g.adjacency.rows(), 24, 40, 3);
    for (Composition c : {Composition::Precompute, Composition::Dynamic, Composition::Reuse, Composition::Recompute})
        for (const auto& opt : {std::optional<TilingConfig>{}, std::optional<TilingConfig>{TilingConfig{256, 64, true}}}) {
            const Mat out = Executor::prepare(g, c, opt).forward(in);
            j["layers"].push_back(std::vector<double>(out.data(), out.data() + out.size()));
        }
    ProfileOptions po;
    po.reps = 3;
    po.warmup = 0;
    for (auto r : profile({g}, {{8, 16}}, GnnModel::Gat, po)) {
        r.median_time_s = r.cv = r.one_time_s = 0;
        r.unreliable = false;
        j["profile"].push_back(r);
    }
    const auto model = train(fixed_records, GnnModel::Gat, plain_system_params()).model;
    j["model"] = to_json(model);
    for (const auto& r : fixed_records)
        j["selections"].push_back(to_string(select(model, input_of(r))));
    std::ostringstream out, err;
    cli::run({"run", "--graph", "gen:grid:30x30", "--model", "gat", "--k1", "8", "--k2", "32", "--composition", "recompute", "--reps", "2"},
             out, err);
    auto run = json::parse(out.str());
    run.erase("times");
    run.erase("selection_overhead_iterations");
    j["cli_run"] = run;
    return j.dump();
}

Outcome determinism(const std::vector<ProfileRecord>& fixed_records)
{
    const std::string a = deterministic_outputs(fixed_records);
    const std::string b = deterministic_outputs(fixed_records);
    Outcome o;
    o.pass = a == b;
    o.detail = "two passes with seed and " + std::to_string(current_threads()) + " thread(s): features, 8 layer outputs, profile records, " +
               "trained model, selections and CLI report " + (o.pass ? "bit-identical" : "differ") + " (" + std::to_string(a.size()) +
               " bytes)";
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    set_threads(std::getenv("SENSEI_THREADS") ? std::atoi(std::getenv("SENSEI_THREADS")) : 1);
    const auto scratch = std::filesystem::temp_directory_path() / "sensei_acceptance";
    std::filesystem::create_directories(scratch);

    const auto graphs = test_graphs();
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
    std::vector<ProfileRecord> selector_records;
    SelectorModel selector;
    criteria.emplace_back("kernel correctness", kernel_correctness);
    criteria.emplace_back("composition equivalence", [&] { return composition_equivalence(graphs); });
    criteria.emplace_back("unweighted shortcut", [&] { return unweighted_shortcut(graphs); });
    criteria.emplace_back("attention validity", [&] { return attention_validity(graphs); });
    criteria.emplace_back("reuse/recompute trend", trend_reproduction);
    criteria.emplace_back("selector quality", [&] {
        selector_records = selector_profiles(36);
        return selector_quality(selector_records, selector);
    });
    criteria.emplace_back("selection overhead", [&] { return overhead(scratch.string()); });
    criteria.emplace_back("auto-tuner", autotuner);
    criteria.emplace_back("determinism", [&] {
        if (selector_records.empty())
            selector_records = selector_profiles(36);
        return determinism(selector_records);
    });

    // optional arguments select criteria by number
    std::vector<bool> enabled(criteria.size(), argc <= 1);
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id >= 1 && id <= static_cast<int>(criteria.size()))
            enabled[static_cast<std::size_t>(id - 1)] = true;
    }

    int failed = 0, blocked = 0, run = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!enabled[i])
            continue;
        ++run;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
                  << (o.blocked ? " [blocked by machine resources]" : "") << " {" << fmt(since(t0)) << " s}" << std::endl;
        if (!o.pass)
            ++(o.blocked ? blocked : failed);
    }
    std::cout << run - failed - blocked << "/" << run << " criteria pass";
    if (blocked > 0)
        std::cout << "; " << blocked << " cannot run on this machine";
    std::cout << std::endl;
    std::filesystem::remove_all(scratch);
    return failed == 0 ? 0 : 1;
}
