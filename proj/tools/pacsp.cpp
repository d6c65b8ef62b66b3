// Command-line front end: instance generation, propagation, counting,
// estimation, search, and the two study drivers. All tabular output is
// CSV with a '#' metadata block; exit codes are 0 (ok), 2 (bad input),
// 3 (numeric failure).

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pacsp/ac3.hpp"
#include "pacsp/harness.hpp"
#include "pacsp/pac.hpp"
#include "pacsp/search.hpp"
#include "pacsp/text_io.hpp"

using nlohmann::json;
using namespace pacsp;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open output file: " + path);
    return out;
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
    } else {
        auto out = open_out(path);
        writer(out);
    }
}

std::string instance_label(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

PropagationMode parse_mode(const std::string& name) {
    if (name == "standard")
        return PropagationMode::Standard;
    if (name == "boolean")
        return PropagationMode::Boolean;
    if (name == "peleg")
        return PropagationMode::Peleg;
    throw Error("unknown propagation mode: " + name);
}

VariableRule parse_var_rule(const std::string& name) {
    if (name == "lex") return VariableRule::Lex;
    if (name == "first-fail") return VariableRule::FirstFail;
    if (name == "brelaz") return VariableRule::Brelaz;
    if (name == "max-belief") return VariableRule::MaxBelief;
    if (name == "random") return VariableRule::Random;
    throw Error("unknown variable rule: " + name);
}

ValueRule parse_val_rule(const std::string& name) {
    if (name == "lex") return ValueRule::Lex;
    if (name == "max-belief") return ValueRule::MaxBelief;
    if (name == "random") return ValueRule::Random;
    throw Error("unknown value rule: " + name);
}

PropagationConfig propagation_from_json(const json& j, PropagationConfig base = {}) {
    PropagationConfig cfg = base;
    if (j.contains("epsilon"))
        cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("max_iter"))
        cfg.max_iter = j.at("max_iter").get<int>();
    if (j.contains("mode"))
        cfg.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("oscillation_window"))
        cfg.oscillation_window = j.at("oscillation_window").get<int>();
    return cfg;
}

CorpusSpec corpus_from_json(const json& j) {
    CorpusSpec spec;
    for (const auto& ij : j.at("items")) {
        CorpusItem item;
        item.gen.n = ij.at("n").get<int>();
        item.gen.m = ij.at("m").get<int>();
        item.gen.p1 = ij.value("p1", 0.0);
        item.gen.p2 = ij.value("p2", 0.0);
        item.gen.seed = ij.value("seed", 0ULL);
        item.replicates = ij.value("replicates", 1);
        item.tree = ij.value("tree", false);
        spec.items.push_back(item);
    }
    if (j.contains("oracle_cap"))
        spec.oracle_cap = BigCount(j.at("oracle_cap").get<long long>());
    spec.use_oracle_filter = j.value("use_oracle_filter", false);
    if (j.contains("min_solutions"))
        spec.min_solutions = BigCount(j.at("min_solutions").get<long long>());
    if (j.contains("max_solutions"))
        spec.max_solutions = BigCount(j.at("max_solutions").get<long long>());
    spec.require_loopy = j.value("require_loopy", false);
    spec.require_satisfiable_by_search = j.value("require_satisfiable_by_search", false);
    spec.sat_filter_backtrack_limit = j.value("sat_filter_backtrack_limit", 1000000L);
    if (j.contains("max_instances"))
        spec.max_instances = j.at("max_instances").get<int>();
    return spec;
}

HeuristicSpec heuristic_from_json(const json& j) {
    HeuristicSpec h;
    h.id = j.value("id", "");
    h.variable_rule = parse_var_rule(j.value("var_rule", "lex"));
    h.value_rule = parse_val_rule(j.value("val_rule", "lex"));
    h.seed = j.value("seed", 0ULL);
    h.peleg_decode = j.value("peleg_decode", false);
    if (h.peleg_decode)
        h.propagation = propagation_from_json(j, PropagationConfig{});
    if (j.contains("belief")) {
        const auto kind = estimator_from_string(j.at("belief").get<std::string>());
        if (!kind)
            throw Error("unknown belief estimator in heuristic spec");
        h.estimator = *kind;
        h.belief_source =
            j.value("source", "static") == "dynamic" ? BeliefSource::Dynamic : BeliefSource::Static;
        PropagationConfig base = h.belief_source == BeliefSource::Dynamic
                                     ? HeuristicSpec::dynamic_propagation_defaults()
                                     : PropagationConfig{};
        h.propagation = propagation_from_json(j, base);
    }
    h.validate();
    return h;
}

json load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open spec file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(std::string("bad spec file: ") + e.what());
    }
    return j;
}

// ---- subcommands ----

struct GenArgs {
    int n = 10;
    int m = 5;
    double p1 = 0.5;
    double p2 = 0.3;
    uint64_t seed = 0;
    bool tree = false;
    std::string out;
};

int run_gen(const GenArgs& a) {
    GenSpec spec{a.n, a.m, a.p1, a.p2, a.seed};
    const CspInstance inst = a.tree ? generate_tree(a.n, a.m, a.p2, a.seed) : generate(spec);
    std::ostringstream desc;
    if (a.tree)
        desc << "tree n=" << a.n << " m=" << a.m << " p2=" << a.p2 << " seed=" << a.seed;
    else
        desc << "random " << spec.describe();
    std::vector<std::string> header{std::string("tool: pacsp ") + kToolVersion, desc.str(),
                                    "connectivity: unfiltered"};
    emit(a.out, [&](std::ostream& os) { write_instance(os, inst, header); });
    return 0;
}

int run_ac3_cmd(const std::string& path) {
    const CspInstance inst = load_instance(path);
    const Ac3Result res = ac3(inst);
    if (res.status == Ac3Status::Wipeout) {
        std::cout << "status: wipeout at variable " << res.wiped_var << "\n";
    } else {
        std::cout << "status: consistent\n";
    }
    for (int x = 0; x < inst.var_count(); ++x) {
        std::cout << "var " << x << ":";
        for (int v : res.domains.live_values(x))
            std::cout << ' ' << v;
        std::cout << "\n";
    }
    return 0;
}

struct PacArgs {
    std::string instance;
    double epsilon = 1e-5;
    int max_iter = 1000;
    std::string mode = "standard";
    bool history = false;
    std::string out;
};

int run_pac(const PacArgs& a) {
    const CspInstance inst = load_instance(a.instance);
    PropagationConfig cfg;
    cfg.epsilon = a.epsilon;
    cfg.max_iter = a.max_iter;
    cfg.mode = parse_mode(a.mode);
    cfg.record_history = a.history;
    const PropagationResult res = propagate(inst, cfg);
    std::vector<std::string> meta{"instance: " + instance_label(a.instance),
                                  "epsilon: " + format_double(a.epsilon),
                                  "max_iter: " + std::to_string(a.max_iter), "mode: " + a.mode,
                                  "iterations: " + std::to_string(res.iterations),
                                  "min_mass: " + format_double(res.min_mass)};
    if (a.history) {
        std::ostringstream hist;
        hist << "residuals:";
        for (double r : res.residual_history)
            hist << ' ' << format_double(r);
        meta.push_back(hist.str());
    }
    emit(a.out, [&](std::ostream& os) {
        write_beliefs_csv(os, res.beliefs, meta, to_string(res.status));
    });
    return 0;
}

struct CountArgs {
    std::string instance;
    long long cap = -1;
    bool freqs = false;
};

int run_count(const CountArgs& a) {
    const CspInstance inst = load_instance(a.instance);
    std::optional<BigCount> cap;
    if (a.cap >= 0)
        cap = BigCount(a.cap);
    const SolutionCensus census = enumerate(inst, cap);
    std::cout << "total: " << census.total << (census.truncated ? " (truncated)" : "") << "\n";
    if (a.freqs && !census.truncated) {
        const auto f = frequencies(census);
        std::cout << "var,value,prob\n";
        for (size_t x = 0; x < f.size(); ++x)
            for (size_t v = 0; v < f[x].size(); ++v)
                std::cout << x << ',' << v << ',' << format_double(f[x][v]) << "\n";
    }
    return 0;
}

struct EstimateArgs {
    std::string instance;
    std::string method = "pac";
    int root = -1;
    int sink = -1;
    std::string ordering;
    std::string forest_strategy = "edgepartition";
    uint64_t seed = 0;
    double epsilon = 1e-5;
    int max_iter = 1000;
    std::string out;
};

int run_estimate(const EstimateArgs& a) {
    const CspInstance inst = load_instance(a.instance);
    const auto kind = estimator_from_string(a.method);
    if (!kind)
        throw Error("unknown estimator: " + a.method);
    PropagationConfig cfg;
    cfg.epsilon = a.epsilon;
    cfg.max_iter = a.max_iter;

    std::vector<std::string> meta{"instance: " + instance_label(a.instance),
                                  "method: " + a.method};
    std::vector<std::vector<double>> beliefs;
    std::string status = "-";

    if (*kind == EstimatorKind::Up && a.sink >= 0) {
        std::vector<int> ordering;
        if (!a.ordering.empty()) {
            std::istringstream in(a.ordering);
            std::string tok;
            while (std::getline(in, tok, ','))
                ordering.push_back(std::stoi(tok));
        } else {
            ordering = up_default_ordering(inst, a.sink);
        }
        beliefs.assign(inst.var_count(), {});
        beliefs[a.sink] = up_estimate(inst, ordering, a.sink);
        meta.push_back("sink: " + std::to_string(a.sink));
    } else if (*kind == EstimatorKind::Sst && a.root >= 0) {
        const auto forest = build_spanning_forest(inst, ForestStrategy::MaxTightness, a.seed);
        const auto counts = sst_counts(inst, reroot(inst, forest.front(), a.root));
        beliefs.assign(inst.var_count(), {});
        beliefs[a.root].assign(inst.domain_size(a.root), 0.0);
        double mass = 0.0;
        for (int v = 0; v < inst.domain_size(a.root); ++v) {
            beliefs[a.root][v] = counts[a.root][v].convert_to<double>();
            mass += beliefs[a.root][v];
        }
        if (mass > 0)
            for (double& p : beliefs[a.root])
                p /= mass;
        meta.push_back("root: " + std::to_string(a.root));
    } else if (*kind == EstimatorKind::Mst && a.forest_strategy == "maxtightness") {
        const auto forest = build_spanning_forest(inst, ForestStrategy::MaxTightness, a.seed);
        beliefs = mst_estimate(inst, forest);
        meta.push_back("forest: maxtightness");
    } else {
        const EstimateReport rep = estimate_beliefs(inst, *kind, cfg);
        beliefs = rep.beliefs;
        if (rep.status)
            status = to_string(*rep.status);
        meta.push_back(rep.metadata);
    }
    emit(a.out, [&](std::ostream& os) { write_beliefs_csv(os, beliefs, meta, status); });
    return 0;
}

struct SolveArgs {
    std::string instance;
    std::string var_rule = "lex";
    std::string val_rule = "lex";
    std::string belief = "none";
    bool dynamic = false;
    bool peleg_decode = false;
    double epsilon = -1.0;
    int max_iter = -1;
    long max_backtracks = -1;
    long max_nodes = -1;
    uint64_t seed = 0;
    std::string id;
};

int run_solve(const SolveArgs& a) {
    const CspInstance inst = load_instance(a.instance);
    HeuristicSpec h;
    h.variable_rule = parse_var_rule(a.var_rule);
    h.value_rule = parse_val_rule(a.val_rule);
    h.seed = a.seed;
    h.id = a.id;
    if (a.belief != "none") {
        const auto kind = estimator_from_string(a.belief);
        if (!kind)
            throw Error("unknown belief estimator: " + a.belief);
        h.estimator = *kind;
        h.belief_source = a.dynamic ? BeliefSource::Dynamic : BeliefSource::Static;
        h.propagation = a.dynamic ? HeuristicSpec::dynamic_propagation_defaults()
                                  : PropagationConfig{};
        if (a.epsilon > 0)
            h.propagation.epsilon = a.epsilon;
        if (a.max_iter > 0)
            h.propagation.max_iter = a.max_iter;
    }
    h.validate();
    SearchLimits limits;
    limits.max_backtracks = a.max_backtracks;
    limits.max_nodes = a.max_nodes;
    SearchResult res;
    std::string label = h.label();
    if (a.peleg_decode) {
        PropagationConfig cfg;
        if (a.epsilon > 0)
            cfg.epsilon = a.epsilon;
        if (a.max_iter > 0)
            cfg.max_iter = a.max_iter;
        res = peleg_solve(inst, cfg, limits);
        label = a.id.empty() ? "peleg-decode" : a.id;
    } else {
        res = solve(inst, h, limits);
    }
    std::cout << "instance,heuristic,outcome,backtracks,nodes,propagation_rounds\n";
    std::cout << instance_label(a.instance) << ',' << label << ',' << to_string(res.outcome)
              << ',' << res.backtracks << ',' << res.nodes << ',' << res.propagation_rounds
              << "\n";
    return 0;
}

struct StudyAccuracyArgs {
    std::string spec;
    std::string rows_out;
    std::string summary_out;
};

int run_study_accuracy(const StudyAccuracyArgs& a) {
    const json j = load_spec_file(a.spec);
    CorpusSpec corpus_spec = corpus_from_json(j.at("corpus"));
    if (!corpus_spec.use_oracle_filter)
        corpus_spec.use_oracle_filter = true; // accuracy needs exact frequencies
    const PropagationConfig cfg = propagation_from_json(j.value("propagation", json::object()));
    std::vector<EstimatorKind> methods;
    for (const auto& mj : j.value("methods", json::array({"pac", "sst", "up", "mst"}))) {
        const auto kind = estimator_from_string(mj.get<std::string>());
        if (!kind)
            throw Error("unknown estimator in methods list");
        methods.push_back(*kind);
    }
    const auto corpus = build_corpus(corpus_spec);
    const AccuracyStudy study = run_accuracy_study(corpus, methods, cfg);
    std::vector<std::string> meta{"study: accuracy", "corpus: " + corpus_spec.describe(),
                                  "instances: " + std::to_string(corpus.size()),
                                  "epsilon: " + format_double(cfg.epsilon),
                                  "max_iter: " + std::to_string(cfg.max_iter)};
    emit(a.rows_out, [&](std::ostream& os) { write_accuracy_rows_csv(os, study, meta); });
    emit(a.summary_out, [&](std::ostream& os) { write_accuracy_summary_csv(os, study, meta); });
    return 0;
}

struct StudySearchArgs {
    std::string spec;
    std::string results_out;
    std::string curve_out;
};

int run_study_search(const StudySearchArgs& a) {
    const json j = load_spec_file(a.spec);
    const CorpusSpec corpus_spec = corpus_from_json(j.at("corpus"));
    std::vector<HeuristicSpec> heuristics;
    for (const auto& hj : j.at("heuristics"))
        heuristics.push_back(heuristic_from_json(hj));
    SearchLimits limits;
    if (j.contains("limits")) {
        limits.max_backtracks = j.at("limits").value("max_backtracks", -1L);
        limits.max_nodes = j.at("limits").value("max_nodes", -1L);
    }
    const auto corpus = build_corpus(corpus_spec);
    const SearchStudy study = run_search_study(corpus, heuristics, limits);
    std::vector<std::string> meta{"study: search", "corpus: " + corpus_spec.describe(),
                                  "instances: " + std::to_string(corpus.size()),
                                  "max_backtracks: " + std::to_string(limits.max_backtracks)};
    emit(a.results_out, [&](std::ostream& os) { write_search_rows_csv(os, study, meta); });
    emit(a.curve_out, [&](std::ostream& os) { write_curve_csv(os, study, meta); });
    return 0;
}

struct OscArgs {
    int max_seeds = 10000;
    uint64_t seed = 1;
    std::string out;
    std::string trace_out;
};

int run_find_oscillator(const OscArgs& a) {
    OscillatorScanSpec spec;
    spec.max_seeds = a.max_seeds;
    spec.seed = a.seed;
    const OscillatorFind find = find_oscillator(spec);
    if (!find.found) {
        std::cout << "not-found after " << find.seeds_tried << " instances\n";
        return 0;
    }
    std::cout << "found: " << find.description << "\n";
    std::cout << "status: " << to_string(find.trace.status) << " after " << find.trace.iterations
              << " iterations\n";
    if (!a.out.empty())
        save_instance(a.out, find.inst, {std::string("tool: pacsp ") + kToolVersion,
                                         "oscillator " + find.description});
    if (!a.trace_out.empty()) {
        auto os = open_out(a.trace_out);
        write_comment_block(os, {"oscillator trace", find.description});
        os << "round,residual,alternation\n";
        for (size_t k = 0; k < find.trace.residual_history.size(); ++k)
            os << (k + 1) << ',' << format_double(find.trace.residual_history[k]) << ','
               << format_double(find.trace.alternation_history[k]) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary CSP solution-probability toolkit"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "generate a random instance");
    gen_cmd->add_option("--n", gen_args.n, "variable count");
    gen_cmd->add_option("--m", gen_args.m, "domain size");
    gen_cmd->add_option("--p1", gen_args.p1, "constraint density");
    gen_cmd->add_option("--p2", gen_args.p2, "constraint tightness");
    gen_cmd->add_option("--seed", gen_args.seed, "generator seed");
    gen_cmd->add_flag("--tree", gen_args.tree, "generate a random tree instead");
    gen_cmd->add_option("--out", gen_args.out, "output file (stdout when omitted)");

    std::string ac3_instance;
    auto* ac3_cmd = app.add_subcommand("ac3", "arc consistency domain reduction");
    ac3_cmd->add_option("instance", ac3_instance, "instance file")->required();

    PacArgs pac_args;
    auto* pac_cmd = app.add_subcommand("pac", "propagate solution probabilities");
    pac_cmd->add_option("instance", pac_args.instance, "instance file")->required();
    pac_cmd->add_option("--epsilon", pac_args.epsilon, "convergence threshold");
    pac_cmd->add_option("--max-iter", pac_args.max_iter, "iteration cap");
    pac_cmd->add_option("--mode", pac_args.mode, "standard|boolean|peleg");
    pac_cmd->add_flag("--history", pac_args.history, "include residual history");
    pac_cmd->add_option("--out", pac_args.out, "output CSV (stdout when omitted)");

    CountArgs count_args;
    auto* count_cmd = app.add_subcommand("count", "exhaustive solution count");
    count_cmd->add_option("instance", count_args.instance, "instance file")->required();
    count_cmd->add_option("--cap", count_args.cap, "stop once the count exceeds this");
    count_cmd->add_flag("--freqs", count_args.freqs, "also print per-variable frequencies");

    EstimateArgs est_args;
    auto* est_cmd = app.add_subcommand("estimate", "per-variable probability estimates");
    est_cmd->add_option("instance", est_args.instance, "instance file")->required();
    est_cmd->add_option("--method", est_args.method, "sst|up|mst|pac|peleg");
    est_cmd->add_option("--root", est_args.root, "sst: emit only this root's distribution");
    est_cmd->add_option("--sink", est_args.sink, "up: emit only this sink's distribution");
    est_cmd->add_option("--ordering", est_args.ordering, "up: comma-separated variable order");
    est_cmd->add_option("--forest-strategy", est_args.forest_strategy,
                        "mst: edgepartition|maxtightness");
    est_cmd->add_option("--seed", est_args.seed, "strategy seed");
    est_cmd->add_option("--epsilon", est_args.epsilon, "propagation threshold");
    est_cmd->add_option("--max-iter", est_args.max_iter, "propagation cap");
    est_cmd->add_option("--out", est_args.out, "output CSV (stdout when omitted)");

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "backtracking search");
    solve_cmd->add_option("instance", solve_args.instance, "instance file")->required();
    solve_cmd->add_option("--var-rule", solve_args.var_rule,
                          "lex|first-fail|brelaz|max-belief|random");
    solve_cmd->add_option("--val-rule", solve_args.val_rule, "lex|max-belief|random");
    solve_cmd->add_option("--belief", solve_args.belief, "none|pac|peleg|sst|up|mst");
    solve_cmd->add_flag("--dynamic,!--static", solve_args.dynamic,
                        "recompute beliefs during search");
    solve_cmd->add_flag("--peleg-decode", solve_args.peleg_decode,
                        "run relaxation and decode the indicator state directly");
    solve_cmd->add_option("--epsilon", solve_args.epsilon, "propagation threshold");
    solve_cmd->add_option("--max-iter", solve_args.max_iter, "propagation cap");
    solve_cmd->add_option("--max-backtracks", solve_args.max_backtracks, "backtrack limit");
    solve_cmd->add_option("--max-nodes", solve_args.max_nodes, "node limit");
    solve_cmd->add_option("--seed", solve_args.seed, "seed for random rules");
    solve_cmd->add_option("--id", solve_args.id, "heuristic label for the CSV row");

    StudyAccuracyArgs acc_args;
    auto* acc_cmd = app.add_subcommand("study-accuracy", "estimator accuracy vs exact counts");
    acc_cmd->add_option("--spec", acc_args.spec, "JSON study spec")->required();
    acc_cmd->add_option("--rows-out", acc_args.rows_out, "per-instance CSV");
    acc_cmd->add_option("--summary-out", acc_args.summary_out, "per-method summary CSV");

    StudySearchArgs search_args;
    auto* search_cmd = app.add_subcommand("study-search", "search-cost comparison");
    search_cmd->add_option("--spec", search_args.spec, "JSON study spec")->required();
    search_cmd->add_option("--results-out", search_args.results_out, "per-run CSV");
    search_cmd->add_option("--curve-out", search_args.curve_out, "cumulative curve CSV");

    OscArgs osc_args;
    auto* osc_cmd = app.add_subcommand("find-oscillator", "scan for period-2 propagation");
    osc_cmd->add_option("--max-seeds", osc_args.max_seeds, "instances to try");
    osc_cmd->add_option("--seed", osc_args.seed, "scan seed");
    osc_cmd->add_option("--out", osc_args.out, "write the found instance here");
    osc_cmd->add_option("--trace-out", osc_args.trace_out, "write the residual trace here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen_cmd->parsed())
            return run_gen(gen_args);
        if (ac3_cmd->parsed())
            return run_ac3_cmd(ac3_instance);
        if (pac_cmd->parsed())
            return run_pac(pac_args);
        if (count_cmd->parsed())
            return run_count(count_args);
        if (est_cmd->parsed())
            return run_estimate(est_args);
        if (solve_cmd->parsed())
            return run_solve(solve_args);
        if (acc_cmd->parsed())
            return run_study_accuracy(acc_args);
        if (search_cmd->parsed())
            return run_study_search(search_args);
        if (osc_cmd->parsed())
            return run_find_oscillator(osc_args);
    } catch (const NonFiniteError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
