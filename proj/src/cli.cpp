#include "sensei/cli.hpp"

#include "sensei/autotune.hpp"
#include "sensei/profiler.hpp"
#include "sensei/selector.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sensei::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty())
            out.push_back(cur);
    return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> parse_sizes(const std::string& s)
{
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& item : split(s, ',')) {
        const auto kk = split(item, ':');
        if (kk.size() != 2)
            throw ParseError("size pair '" + item + "' must look like K1:K2");
        const std::int64_t k1 = std::stoll(kk[0]), k2 = std::stoll(kk[1]);
        if (k1 < 1 || k2 < 1)
            throw ParseError("size pair '" + item + "' must be positive");
        out.emplace_back(k1, k2);
    }
    if (out.empty())
        throw ParseError("no size pairs given");
    return out;
}

std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> out;
    for (const auto& item : split(s, ','))
        out.push_back(std::stod(item));
    return out;
}

/// `W:H:R` with R in {0,1}.
TilingConfig parse_tiling(const std::string& s)
{
    const auto parts = split(s, ':');
    if (parts.size() != 3)
        throw ParseError("tiling config '" + s + "' must look like WIDTH:HEIGHT:REORDER");
    TilingConfig c{std::stoll(parts[0]), std::stoll(parts[1]), parts[2] == "1" || parts[2] == "true"};
    c.validate();
    return c;
}

/// A directory (every *.mtx inside, sorted) or a comma-separated list of sources.
std::vector<std::string> expand_graph_sources(const std::string& s)
{
    namespace fs = std::filesystem;
    if (!s.empty() && fs::is_directory(s)) {
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(s))
            if (e.is_regular_file() && e.path().extension() == ".mtx")
                files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw ParseError("directory '" + s + "' holds no .mtx files");
        return files;
    }
    return split(s, ',');
}

Activation parse_activation(const std::string& s)
{
    if (s == "relu")
        return Activation::Relu;
    if (s == "none")
        return Activation::None;
    throw ParseError("unknown activation '" + s + "'");
}

void apply_threads(int threads)
{
    if (threads <= 0) {
        if (const char* env = std::getenv("SENSEI_THREADS"))
            threads = std::atoi(env);
    }
    set_threads(threads);
}

struct Common {
    std::uint64_t seed = 42;
    int threads = 0;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--seed", c.seed, "Random seed for generated operands")->capture_default_str();
    app->add_option("--threads", c.threads, "Kernel threads (falls back to SENSEI_THREADS)");
}

json features_json(const Graph& g)
{
    json j = extract_features(g.adjacency);
    return j;
}

int cmd_featurize(const std::string& graph, std::ostream& out)
{
    const Graph g = load_graph(graph);
    out << features_json(g).dump() << '\n';
    return Ok;
}

int cmd_generate(const std::string& graph, const std::string& path, std::ostream& out)
{
    const Graph g = load_graph(graph);
    std::ofstream f(path);
    if (!f)
        throw ParseError("cannot write '" + path + "'");
    write_matrix_market(f, g.adjacency);
    out << json{{"graph", g.id}, {"out", path}, {"n_rows", g.adjacency.rows()}, {"n_nnzs", g.adjacency.nnz()}}.dump() << '\n';
    return Ok;
}

struct ProfileArgs {
    std::string graphs;
    std::string model = "gcn";
    std::string sizes;
    int reps = 10;
    int warmup = 3;
    std::string out;
    std::string amortize = "yes";
    bool opt = false;
    std::string hw_tag;
    std::string hw;
};

int cmd_profile(const ProfileArgs& a, const Common& c, std::ostream& out, std::ostream& err)
{
    apply_threads(c.threads);
    const GnnModel model = parse_model(a.model);
    ProfileOptions opts;
    opts.reps = a.reps;
    opts.warmup = a.warmup;
    opts.seed = c.seed;
    opts.threads = current_threads();
    opts.hw_tag = a.hw_tag;
    opts.hw_descriptor = parse_doubles(a.hw);
    if (a.amortize != "yes" && a.amortize != "no")
        throw ParseError("--amortize-precompute must be yes or no");
    opts.amortize_precompute = a.amortize == "yes";
    if (a.opt) {
        opts.opt_configs.clear();
        for (const auto& cfg : default_tiling_grid())
            opts.opt_configs.emplace_back(cfg);
    }
    const auto sizes = a.sizes.empty() ? evaluation_sizes(model) : parse_sizes(a.sizes);
    std::vector<Graph> graphs;
    for (const auto& s : expand_graph_sources(a.graphs))
        graphs.push_back(load_graph(s));
    const auto records = profile(graphs, sizes, model, opts);

    std::size_t oom = 0, unreliable = 0;
    for (const auto& r : records) {
        oom += r.ok() ? 0 : 1;
        unreliable += r.unreliable ? 1 : 0;
    }
    if (oom > 0)
        err << "profile: " << oom << " configuration(s) skipped for memory\n";
    if (a.out.empty() || a.out == "-") {
        write_ndjson(out, records);
    } else {
        std::ofstream f(a.out);
        if (!f)
            throw ParseError("cannot write '" + a.out + "'");
        write_ndjson(f, records);
        out << json{{"records", records.size()}, {"oom", oom}, {"unreliable", unreliable}, {"out", a.out}}.dump() << '\n';
    }
    return Ok;
}

struct TrainArgs {
    std::string profiles;
    std::string model = "gcn";
    std::string out;
    std::string system = "plain";
    int n_estimators = 0;
    double learning_rate = 0;
    int max_depth = 6;
    std::size_t min_groups = 20;
};

int cmd_train(const TrainArgs& a, const Common& c, std::ostream& out, std::ostream& err)
{
    std::ifstream in(a.profiles);
    if (!in)
        throw ParseError("cannot open '" + a.profiles + "'");
    const auto records = read_ndjson(in);
    RankerParams params = a.system == "opt" ? optimized_system_params() : plain_system_params();
    if (a.system != "opt" && a.system != "plain")
        throw ParseError("--system must be plain or opt");
    if (a.n_estimators > 0)
        params.n_estimators = a.n_estimators;
    if (a.learning_rate > 0)
        params.learning_rate = a.learning_rate;
    params.max_depth = a.max_depth;
    params.seed = c.seed;
    const auto result = train(records, parse_model(a.model), params, a.min_groups);
    for (const auto& w : result.warnings)
        err << "train: " << w << '\n';
    save_model(result.model, a.out);
    json imp = json::array();
    for (const auto& [name, gain] : feature_importance(result.model))
        imp.push_back({{"feature", name}, {"gain", gain}});
    out << json{{"model", to_string(result.model.model_tag)},
                {"groups", result.groups_used},
                {"excluded_groups", result.warnings.size()},
                {"n_estimators", params.n_estimators},
                {"learning_rate", params.learning_rate},
                {"out", a.out},
                {"feature_importance", imp}}
               .dump()
        << '\n';
    return Ok;
}

struct SelectArgs {
    std::string model_file;
    std::string graph;
    std::int64_t k1 = 0;
    std::int64_t k2 = 0;
    std::string hw;
    std::string opt_config;
};

int cmd_select(const SelectArgs& a, std::ostream& out)
{
    const SelectorModel model = load_model(a.model_file);
    const Graph g = load_graph(a.graph);
    SelectorInput input;
    const auto t0 = Clock::now();
    input.features = extract_features(g.adjacency);
    const double features_s = since(t0);
    input.k1 = a.k1;
    input.k2 = a.k2;
    input.hw_descriptor = parse_doubles(a.hw);
    if (!a.opt_config.empty())
        input.opt_config = parse_tiling(a.opt_config);
    const auto t1 = Clock::now();
    const Composition choice = select(model, input);
    const double decision_s = since(t1);
    const auto scores = candidate_scores(model, input);
    const auto cands = candidates(model.model_tag);
    out << json{{"model", to_string(model.model_tag)},
                {"composition", to_string(choice)},
                {"scores", {{to_string(cands[0]), scores[0]}, {to_string(cands[1]), scores[1]}}},
                {"features", input.features},
                {"feature_extraction_s", features_s},
                {"decision_s", decision_s}}
               .dump()
        << '\n';
    return Ok;
}

struct RunArgs {
    std::string graph;
    std::string model = "gcn";
    std::int64_t k1 = 32;
    std::int64_t k2 = 32;
    std::string composition = "auto";
    std::string model_file;
    bool opt = false;
    int budget = 20;
    int reps = 10;
    int warmup = 3;
    std::string activation = "relu";
    std::string hw;
    std::string amortize = "yes";
};

int cmd_run(const RunArgs& a, const Common& c, std::ostream& out)
{
    apply_threads(c.threads);
    const GnnModel model = parse_model(a.model);
    if (a.composition == "auto" && a.model_file.empty())
        throw PreconditionError("--composition auto requires --model-file");
    if (a.reps < 1)
        throw PreconditionError("--reps must be >= 1");
    std::optional<SelectorModel> selector;
    double model_load_s = 0;
    if (a.composition == "auto") {
        const auto t = Clock::now();
        selector = load_model(a.model_file);
        model_load_s = since(t);
        if (selector->model_tag != model)
            throw SchemaError("model file was trained for " + std::string(to_string(selector->model_tag)));
    }

    auto t = Clock::now();
    const Graph g = load_graph(a.graph);
    const double ingest_s = since(t);

    json report{{"graph", g.id}, {"model", to_string(model)}, {"k1", a.k1}, {"k2", a.k2}, {"threads", current_threads()}, {"seed", c.seed}};

    std::optional<TilingConfig> opt_cfg;
    if (a.opt) {
        AutotuneOptions to;
        to.seed = c.seed;
        t = Clock::now();
        const auto tuned = autotune(g.adjacency, std::min(a.k1, a.k2), default_tiling_grid(), a.budget, nullptr, to);
        report["tuning"] = to_json(tuned);
        report["tuning_s"] = since(t);
        opt_cfg = tuned.best;
    }

    Composition comp = default_composition(model);
    double features_s = 0, decision_s = 0;
    if (selector) {
        t = Clock::now();
        SelectorInput input;
        input.features = extract_features(g.adjacency);
        features_s = since(t);
        input.k1 = a.k1;
        input.k2 = a.k2;
        input.opt_config = opt_cfg;
        input.hw_descriptor = parse_doubles(a.hw);
        t = Clock::now();
        comp = select(*selector, input);
        decision_s = since(t);
        report["selected_by"] = "model";
    } else {
        comp = parse_composition(a.composition);
        if (model_of(comp) != model)
            throw PreconditionError("composition '" + a.composition + "' does not apply to " + to_string(model));
        report["selected_by"] = "fixed";
    }

    const LayerInputs in = make_layer_inputs(g.adjacency.rows(), a.k1, a.k2, c.seed);
    Executor ex = Executor::prepare(g, comp, opt_cfg);
    const Activation act = parse_activation(a.activation);
    const bool refresh = comp == Composition::Precompute && a.amortize == "no";
    DenseMatrix<double> result;
    const auto timing = time_repeated(
        [&] {
            if (refresh)
                ex.renormalize();
            result = ex.forward(in, act);
        },
        a.reps, a.warmup);

    const double overhead = features_s + decision_s;
    report["composition"] = to_string(comp);
    report["opt_config"] = opt_cfg ? json(*opt_cfg) : json(nullptr);
    report["times"] = {{"ingest_s", ingest_s},
                       {"model_load_s", model_load_s},
                       {"feature_extraction_s", features_s},
                       {"decision_s", decision_s},
                       {"prepare_s", ex.prepare_seconds()},
                       {"iteration_median_s", timing.median_s},
                       {"iteration_cv", timing.cv}};
    report["reps"] = a.reps;
    report["selection_overhead_s"] = overhead;
    report["selection_overhead_iterations"] = overhead / timing.median_s;
    report["checksum"] = checksum(result);
    out << report.dump() << '\n';
    return Ok;
}

struct BenchArgs {
    std::string graphs;
    std::string model = "both";
    std::string sizes;
    int reps = 5;
    int warmup = 1;
    bool opt = false;
    int budget = 20;
};

int cmd_bench(const BenchArgs& a, const Common& c, std::ostream& out)
{
    apply_threads(c.threads);
    const auto t_all = Clock::now();
    std::vector<std::string> sources = a.graphs.empty() ? bundled_graph_specs() : expand_graph_sources(a.graphs);
    std::vector<GnnModel> models;
    if (a.model == "both")
        models = {GnnModel::Gcn, GnnModel::Gat};
    else
        models = {parse_model(a.model)};

    json rows = json::array();
    for (const auto& src : sources) {
        const Graph g = load_graph(src);
        std::optional<TilingConfig> cfg;
        json tuning = nullptr;
        for (GnnModel m : models) {
            const auto sizes = !a.sizes.empty() ? parse_sizes(a.sizes)
                                                : (m == GnnModel::Gcn ? std::vector<std::pair<std::int64_t, std::int64_t>>{{32, 32}, {32, 256}}
                                                                      : std::vector<std::pair<std::int64_t, std::int64_t>>{{32, 256}});
            for (const auto& [k1, k2] : sizes) {
                if (a.opt) {
                    AutotuneOptions to;
                    to.seed = c.seed;
                    const auto tuned = autotune(g.adjacency, std::min(k1, k2), default_tiling_grid(), a.budget, nullptr, to);
                    tuning = to_json(tuned);
                    cfg = tuned.best;
                }
                const LayerInputs in = make_layer_inputs(g.adjacency.rows(), k1, k2, c.seed);
                json entry{{"graph", g.id}, {"model", to_string(m)}, {"k1", k1}, {"k2", k2}};
                if (a.opt)
                    entry["tuning"] = tuning;
                Composition best = default_composition(m);
                double best_t = std::numeric_limits<double>::infinity();
                json comps = json::object();
                for (Composition comp : candidates(m)) {
                    Executor ex = Executor::prepare(g, comp, cfg);
                    DenseMatrix<double> result;
                    const auto tm = time_repeated([&] { result = ex.forward(in); }, a.reps, a.warmup);
                    comps[to_string(comp)] = {{"median_s", tm.median_s}, {"cv", tm.cv}, {"prepare_s", ex.prepare_seconds()},
                                              {"checksum", checksum(result)}};
                    if (tm.median_s < best_t) {
                        best_t = tm.median_s;
                        best = comp;
                    }
                }
                entry["compositions"] = comps;
                entry["fastest"] = to_string(best);
                rows.push_back(std::move(entry));
            }
        }
    }
    out << json{{"results", rows}, {"threads", current_threads()}, {"total_s", since(t_all)}}.dump() << '\n';
    return Ok;
}

struct TuneArgs {
    std::string graph;
    std::int64_t k = 128;
    int budget = 20;
    int reps = 5;
};

int cmd_tune(const TuneArgs& a, const Common& c, std::ostream& out)
{
    apply_threads(c.threads);
    const Graph g = load_graph(a.graph);
    AutotuneOptions to;
    to.seed = c.seed;
    to.reps = a.reps;
    const auto tuned = autotune(g.adjacency, a.k, default_tiling_grid(), a.budget, nullptr, to);
    json j = to_json(tuned);
    j["graph"] = g.id;
    j["k"] = a.k;
    out << j.dump() << '\n';
    return Ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Input-sensitive dense-sparse composition selection for GNN layers"};
    app.require_subcommand(1);
    Common common;

    std::string feat_graph;
    auto* featurize = app.add_subcommand("featurize", "Print graph features as JSON");
    featurize->add_option("--graph", feat_graph, "Matrix Market file or gen: spec")->required();

    std::string gen_graph, gen_out;
    auto* generate = app.add_subcommand("generate", "Write a generated graph as Matrix Market");
    generate->add_option("--graph", gen_graph, "gen: spec")->required();
    generate->add_option("--out", gen_out, "Output .mtx path")->required();

    ProfileArgs pa;
    auto* prof = app.add_subcommand("profile", "Time both compositions and emit NDJSON records");
    prof->add_option("--graphs", pa.graphs, "Directory of .mtx files or comma-separated sources")->required();
    prof->add_option("--model", pa.model, "gcn or gat")->capture_default_str();
    prof->add_option("--sizes", pa.sizes, "Comma-separated K1:K2 pairs (default: evaluation sizes)");
    prof->add_option("--reps", pa.reps, "Timed iterations")->capture_default_str();
    prof->add_option("--warmup", pa.warmup, "Untimed iterations")->capture_default_str();
    prof->add_option("--out", pa.out, "Output NDJSON path (stdout when omitted)");
    prof->add_option("--amortize-precompute", pa.amortize, "yes or no")->capture_default_str();
    prof->add_flag("--opt", pa.opt, "Profile the tiled path over the default tiling grid");
    prof->add_option("--hw-tag", pa.hw_tag, "Free-form machine tag");
    prof->add_option("--hw", pa.hw, "Comma-separated numeric hardware descriptor");
    add_common(prof, common);

    TrainArgs ta;
    auto* trainc = app.add_subcommand("train", "Train a composition selector from profiles");
    trainc->add_option("--profiles", ta.profiles, "NDJSON profile records")->required();
    trainc->add_option("--model", ta.model, "gcn or gat")->capture_default_str();
    trainc->add_option("--out", ta.out, "Model file")->required();
    trainc->add_option("--system", ta.system, "plain or opt (selects default hyperparameters)")->capture_default_str();
    trainc->add_option("--n-estimators", ta.n_estimators, "Override tree count");
    trainc->add_option("--learning-rate", ta.learning_rate, "Override learning rate");
    trainc->add_option("--max-depth", ta.max_depth, "Tree depth")->capture_default_str();
    trainc->add_option("--min-groups", ta.min_groups, "Minimum usable groups")->capture_default_str();
    add_common(trainc, common);

    SelectArgs sa;
    auto* selectc = app.add_subcommand("select", "Pick a composition for a graph and sizes");
    selectc->add_option("--model-file", sa.model_file, "Trained selector")->required();
    selectc->add_option("--graph", sa.graph, "Matrix Market file or gen: spec")->required();
    selectc->add_option("--k1", sa.k1, "Input embedding size")->required()->check(CLI::PositiveNumber);
    selectc->add_option("--k2", sa.k2, "Output embedding size")->required()->check(CLI::PositiveNumber);
    selectc->add_option("--hw", sa.hw, "Comma-separated numeric hardware descriptor");
    selectc->add_option("--opt-config", sa.opt_config, "WIDTH:HEIGHT:REORDER");
    add_common(selectc, common);

    RunArgs ra;
    auto* runc = app.add_subcommand("run", "Execute one layer with a fixed or selected composition");
    runc->add_option("--graph", ra.graph, "Matrix Market file or gen: spec")->required();
    runc->add_option("--model", ra.model, "gcn or gat")->capture_default_str();
    runc->add_option("--k1", ra.k1, "Input embedding size")->capture_default_str()->check(CLI::PositiveNumber);
    runc->add_option("--k2", ra.k2, "Output embedding size")->capture_default_str()->check(CLI::PositiveNumber);
    runc->add_option("--composition", ra.composition, "precompute|dynamic|reuse|recompute|auto")->capture_default_str();
    runc->add_option("--model-file", ra.model_file, "Selector used by --composition auto");
    runc->add_flag("--opt", ra.opt, "Auto-tune tiling/reordering and run the optimized path");
    runc->add_option("--budget", ra.budget, "Auto-tuning budget")->capture_default_str();
    runc->add_option("--reps", ra.reps, "Timed iterations")->capture_default_str();
    runc->add_option("--warmup", ra.warmup, "Untimed iterations")->capture_default_str();
    runc->add_option("--activation", ra.activation, "relu or none")->capture_default_str();
    runc->add_option("--hw", ra.hw, "Comma-separated numeric hardware descriptor");
    runc->add_option("--amortize-precompute", ra.amortize, "yes or no")->capture_default_str();
    add_common(runc, common);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Time both compositions on graphs (bundled by default)");
    bench->add_option("--graphs", ba.graphs, "Directory or comma-separated sources");
    bench->add_option("--model", ba.model, "gcn, gat or both")->capture_default_str();
    bench->add_option("--sizes", ba.sizes, "Comma-separated K1:K2 pairs");
    bench->add_option("--reps", ba.reps, "Timed iterations")->capture_default_str();
    bench->add_option("--warmup", ba.warmup, "Untimed iterations")->capture_default_str();
    bench->add_flag("--opt", ba.opt, "Auto-tune and run the optimized path");
    bench->add_option("--budget", ba.budget, "Auto-tuning budget")->capture_default_str();
    add_common(bench, common);

    TuneArgs tu;
    auto* tune = app.add_subcommand("tune", "Auto-tune the tiling configuration for one graph");
    tune->add_option("--graph", tu.graph, "Matrix Market file or gen: spec")->required();
    tune->add_option("--k", tu.k, "Dense operand width")->capture_default_str();
    tune->add_option("--budget", tu.budget, "Configurations to time")->capture_default_str();
    tune->add_option("--reps", tu.reps, "Timed iterations per configuration")->capture_default_str();
    add_common(tune, common);

    std::vector<std::string> argv_store{"sensei"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store)
        argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (*featurize)
            return cmd_featurize(feat_graph, out);
        if (*generate)
            return cmd_generate(gen_graph, gen_out, out);
        if (*prof)
            return cmd_profile(pa, common, out, err);
        if (*trainc)
            return cmd_train(ta, common, out, err);
        if (*selectc)
            return cmd_select(sa, out);
        if (*runc)
            return cmd_run(ra, common, out);
        if (*bench)
            return cmd_bench(ba, common, out);
        if (*tune)
            return cmd_tune(tu, common, out);
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return InsufficientData;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return Schema;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return Input;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << '\n';
        return Shape;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Failure;
    }
    return Usage;
}

} // namespace sensei::cli
