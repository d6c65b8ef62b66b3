// Acceptance suite: one pass/fail line per criterion. Returns the number
// of failed criteria. `--cli <path>` points at the command-line binary
// (used by the reproducibility criterion); `--only <k>` runs one
// criterion.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pacsp/ac3.hpp"
#include "pacsp/harness.hpp"
#include "pacsp/pac.hpp"
#include "pacsp/search.hpp"
#include "pacsp/text_io.hpp"

using namespace pacsp;

namespace {

std::string g_cli_path;

// ---- criterion 1: exactness and wipeout on random trees ----

bool criterion_tree_exactness(std::ostream& log) {
    PropagationConfig cfg;
    cfg.epsilon = 1e-20;
    cfg.max_iter = 100;

    int total = 0, satisfiable = 0, unsatisfiable = 0;
    double worst_error = 0.0;
    int worst_rounds_slack = 100;
    uint64_t seed = 510000;
    for (int n = 2; n <= 12; ++n) {
        for (int m : {2, 3, 4}) {
            for (double p2 : {0.1, 0.3, 0.5}) {
                const int reps = (n == 12 && m == 4) ? 3 : 2;
                for (int r = 0; r < reps && total < 200; ++r) {
                    ++total;
                    const CspInstance tree = generate_tree(n, m, p2, seed++);
                    const SolutionCensus census = enumerate(tree);
                    const PropagationResult res = propagate(tree, cfg);
                    if (census.total == 0) {
                        ++unsatisfiable;
                        if (res.status != PropagationStatus::Wipeout) {
                            log << "unsatisfiable tree n=" << n << " m=" << m << " p2=" << p2
                                << " got status " << to_string(res.status);
                            return false;
                        }
                        continue;
                    }
                    ++satisfiable;
                    if (res.status != PropagationStatus::Converged) {
                        log << "satisfiable tree n=" << n << " m=" << m << " p2=" << p2
                            << " did not converge: " << to_string(res.status);
                        return false;
                    }
                    const int diameter = graph_info(tree).diameter;
                    worst_rounds_slack = std::min(worst_rounds_slack,
                                                  diameter + 1 - res.iterations);
                    if (res.iterations > diameter + 1) {
                        log << "tree n=" << n << " took " << res.iterations
                            << " rounds for diameter " << diameter;
                        return false;
                    }
                    const auto exact = frequencies(census);
                    for (int x = 0; x < tree.var_count(); ++x)
                        for (int v = 0; v < tree.domain_size(x); ++v)
                            worst_error = std::max(
                                worst_error, std::abs(res.beliefs[x][v] - exact[x][v]));
                    if (worst_error > 1e-9) {
                        log << "belief error " << worst_error << " on tree n=" << n;
                        return false;
                    }
                }
            }
        }
    }
    log << total << " trees (" << satisfiable << " satisfiable, " << unsatisfiable
        << " unsatisfiable), max |error| " << worst_error << ", rounds within diameter+1";
    return total == 200;
}

// ---- criterion 2: boolean propagation equals AC-3, queue-order independent ----

bool criterion_ac3_equivalence(std::ostream& log) {
    PropagationConfig cfg;
    cfg.mode = PropagationMode::Boolean;
    cfg.epsilon = 0.5;
    cfg.max_iter = 1000;

    const double p1s[] = {0.2, 0.5, 1.0};
    const double p2s[] = {0.1, 0.3, 0.6};
    int total = 0, wipeouts = 0;
    uint64_t seed = 520000;
    while (total < 200) {
        const double p1 = p1s[total % 3];
        const double p2 = p2s[(total / 3) % 3];
        const int n = 9 + total % 7;  // up to 15
        const int m = 3 + total % 3;  // up to 5
        const CspInstance inst = generate(GenSpec{n, m, p1, p2, seed++});
        ++total;

        const Ac3Result fifo = ac3(inst, DomainSet::from_instance(inst), QueueOrder::Fifo);
        const Ac3Result lifo = ac3(inst, DomainSet::from_instance(inst), QueueOrder::Lifo);
        const Ac3Result rand =
            ac3(inst, DomainSet::from_instance(inst), QueueOrder::Random, seed);
        if (fifo.status != lifo.status || fifo.status != rand.status) {
            log << "queue disciplines disagree on status at instance " << total;
            return false;
        }
        if (fifo.status == Ac3Status::Consistent &&
            (fifo.domains != lifo.domains || fifo.domains != rand.domains)) {
            log << "queue disciplines disagree on domains at instance " << total;
            return false;
        }

        const PropagationResult bres = propagate(inst, cfg);
        if (fifo.status == Ac3Status::Wipeout) {
            ++wipeouts;
            if (bres.status != PropagationStatus::Wipeout) {
                log << "boolean mode missed a wipeout at instance " << total;
                return false;
            }
            continue;
        }
        if (bres.status != PropagationStatus::Converged) {
            log << "boolean mode failed to reach a fixpoint at instance " << total;
            return false;
        }
        if (boolean_support_sets(bres) != fifo.domains) {
            log << "boolean support sets differ from AC-3 domains at instance " << total;
            return false;
        }
    }
    log << total << " instances (" << wipeouts << " wipeouts), support sets identical, "
        << "fixpoints queue-order independent";
    return true;
}

// ---- criterion 3: SST/UP/MST agreement on trees ----

bool criterion_baseline_agreement(std::ostream& log) {
    int trees = 0;
    double worst_up = 0.0, worst_mst = 0.0;
    for (uint64_t seed = 530000; trees < 60; ++seed) {
        const int n = 3 + static_cast<int>(seed % 8);
        const CspInstance tree = generate_tree(n, 3, 0.3, seed);
        const SolutionCensus census = enumerate(tree);
        if (census.total == 0)
            continue;
        ++trees;
        const auto exact = frequencies(census);
        const auto forest = build_spanning_forest(tree, ForestStrategy::MaxTightness);

        for (int root = 0; root < n; ++root) {
            const auto counts = sst_counts(tree, reroot(tree, forest.front(), root));
            if (counts[root] != census.usage[root]) {
                log << "sst counts differ from census at root " << root << " (seed " << seed
                    << ")";
                return false;
            }
        }
        for (int sink = 0; sink < n; ++sink) {
            const auto up = up_estimate(tree, up_default_ordering(tree, sink), sink);
            for (int v = 0; v < tree.domain_size(sink); ++v)
                worst_up = std::max(worst_up, std::abs(up[v] - exact[sink][v]));
        }
        const auto mst = mst_estimate(tree, forest);
        for (int x = 0; x < n; ++x)
            for (int v = 0; v < tree.domain_size(x); ++v)
                worst_mst = std::max(worst_mst, std::abs(mst[x][v] - exact[x][v]));
        if (worst_up > 1e-12 || worst_mst > 1e-12) {
            log << "tree agreement broken: up err " << worst_up << ", mst err " << worst_mst;
            return false;
        }
    }
    log << trees << " satisfiable trees; sst counts exact, max |up error| " << worst_up
        << ", max |mst error| " << worst_mst;
    return true;
}

// ---- criterion 4: correlation study on a loopy corpus ----

CorpusSpec accuracy_corpus(double p1, const std::vector<double>& p2s, uint64_t base_seed,
                           int cap_instances) {
    CorpusSpec spec;
    for (int r = 0; r < 40; ++r)
        for (size_t k = 0; k < p2s.size(); ++k) {
            CorpusItem item;
            item.gen = GenSpec{12, 5, p1, p2s[k], base_seed + r * 100 + k};
            item.replicates = 1;
            spec.items.push_back(item);
        }
    spec.use_oracle_filter = true;
    spec.oracle_cap = 1000000;
    spec.require_loopy = true;
    spec.max_instances = cap_instances;
    return spec;
}

bool criterion_correlation(std::ostream& log) {
    auto corpus = build_corpus(accuracy_corpus(0.2, {0.45, 0.5, 0.55}, 540000, 50));
    const auto dense = build_corpus(accuracy_corpus(1.0, {0.12, 0.16, 0.2}, 550000, 50));
    corpus.insert(corpus.end(), dense.begin(), dense.end());
    if (corpus.size() != 100) {
        log << "corpus has " << corpus.size() << " instances, wanted 100";
        return false;
    }

    PropagationConfig cfg;
    cfg.epsilon = 1e-5;
    cfg.max_iter = 1000;
    const AccuracyStudy study = run_accuracy_study(
        corpus, {EstimatorKind::Pac, EstimatorKind::Sst, EstimatorKind::Up, EstimatorKind::Mst},
        cfg);
    std::map<std::string, AccuracySummary> by_method;
    for (const auto& s : study.summary)
        by_method[s.method] = s;

    const AccuracySummary& pac = by_method["pac"];
    const double rate = static_cast<double>(pac.nonconverged_count) / corpus.size();
    log << "pac mean r " << pac.mean_r << " (" << pac.defined_count << " converged runs), "
        << "sst " << by_method["sst"].mean_r << ", up " << by_method["up"].mean_r << ", mst "
        << by_method["mst"].mean_r << ", pac non-convergence rate " << rate;

    return pac.mean_r >= 0.6 && pac.mean_r > by_method["sst"].mean_r &&
           pac.mean_r > by_method["up"].mean_r && pac.mean_r > by_method["mst"].mean_r &&
           pac.nonconverged_count > 0;
}

// ---- criterion 5: search-cost ordering ----

bool criterion_search_cost(std::ostream& log) {
    CorpusSpec spec;
    for (int r = 0; r < 12; ++r)
        for (double p2 : {0.10, 0.12, 0.14, 0.16, 0.18, 0.20, 0.22}) {
            CorpusItem item;
            item.gen = GenSpec{14, 6, 1.0, p2, 560000 + static_cast<uint64_t>(r * 1000 + p2 * 100)};
            item.replicates = 1;
            spec.items.push_back(item);
        }
    spec.require_satisfiable_by_search = true;
    spec.sat_filter_backtrack_limit = 300000;
    spec.max_instances = 60;
    const auto corpus = build_corpus(spec);
    if (corpus.size() != 60) {
        log << "corpus has " << corpus.size() << " satisfiable instances, wanted 60";
        return false;
    }

    HeuristicSpec random;
    random.value_rule = ValueRule::Random;
    random.seed = 4242;
    random.id = "random";

    HeuristicSpec pac_static;
    pac_static.value_rule = ValueRule::MaxBelief;
    pac_static.belief_source = BeliefSource::Static;
    pac_static.estimator = EstimatorKind::Pac;
    pac_static.propagation = PropagationConfig{}; // high-effort preprocessing budget
    pac_static.id = "pac-static";

    HeuristicSpec pac_dynamic;
    pac_dynamic.variable_rule = VariableRule::MaxBelief;
    pac_dynamic.value_rule = ValueRule::MaxBelief;
    pac_dynamic.belief_source = BeliefSource::Dynamic;
    pac_dynamic.estimator = EstimatorKind::Pac;
    pac_dynamic.id = "pac-dynamic";

    SearchLimits limits;
    limits.max_backtracks = 300000;
    const SearchStudy study = run_search_study(corpus, {random, pac_static, pac_dynamic}, limits);

    std::map<std::string, long> medians;
    for (const auto& [h, m] : study.median_backtracks)
        medians[h] = m;
    log << "median backtracks: random " << medians["random"] << ", pac-static "
        << medians["pac-static"] << ", pac-dynamic " << medians["pac-dynamic"];

    return medians["pac-dynamic"] <= medians["pac-static"] &&
           medians["pac-static"] <= medians["random"] &&
           2 * medians["pac-dynamic"] <= medians["random"];
}

// ---- criterion 6: oscillation existence ----

bool criterion_oscillation(std::ostream& log) {
    OscillatorScanSpec spec;
    spec.max_seeds = 10000;
    spec.pole_floor = 1e-3;
    spec.alternation_ceiling = 1e-10;
    spec.window = 10;
    const OscillatorFind find = find_oscillator(spec);
    if (!find.found) {
        log << "no oscillator found in " << spec.max_seeds << " instances";
        return false;
    }
    if (!verified_period2(find.trace, 10, 1e-3, 1e-10)) {
        log << "found instance fails the period-2 verification";
        return false;
    }
    const OscillatorFind again = find_oscillator(spec);
    if (!again.found || again.description != find.description ||
        again.seeds_tried != find.seeds_tried) {
        log << "rerun did not reproduce the same oscillator";
        return false;
    }
    log << "found after " << find.seeds_tried << " instances (" << find.description
        << "), rerun identical";
    return true;
}

// ---- criterion 7: property suites ----

SolutionCensus enumerate_within(const CspInstance& inst, const DomainSet& doms) {
    SolutionCensus c;
    c.usage.resize(inst.var_count());
    for (int x = 0; x < inst.var_count(); ++x)
        c.usage[x].assign(inst.domain_size(x), BigCount(0));
    std::vector<int> assign(inst.var_count(), -1);
    std::function<void(int)> rec = [&](int x) {
        if (x == inst.var_count()) {
            c.total += 1;
            return;
        }
        for (int v = 0; v < inst.domain_size(x); ++v) {
            if (!doms.is_live(x, v))
                continue;
            bool ok = true;
            for (const auto& nb : inst.neighbors(x))
                if (nb.var < x && !inst.constraint(x, nb.var).allows(v, assign[nb.var]))
                    ok = false;
            if (!ok)
                continue;
            assign[x] = v;
            rec(x + 1);
        }
        assign[x] = -1;
    };
    rec(0);
    return c;
}

bool criterion_properties(std::ostream& log) {
    // Solution preservation under AC-3.
    for (uint64_t seed = 0; seed < 60; ++seed) {
        const double p1 = seed % 2 ? 0.5 : 0.9;
        const CspInstance inst = generate(GenSpec{7, 3, p1, 0.4, 570000 + seed});
        const BigCount before = enumerate(inst).total;
        const Ac3Result res = ac3(inst);
        if (res.status == Ac3Status::Wipeout) {
            if (before != 0) {
                log << "AC-3 wiped out a satisfiable instance";
                return false;
            }
            continue;
        }
        if (enumerate_within(inst, res.domains).total != before) {
            log << "AC-3 changed the solution count";
            return false;
        }
    }

    // Search soundness and completeness against the census.
    for (uint64_t seed = 0; seed < 40; ++seed) {
        const CspInstance inst = generate(GenSpec{8, 3, 0.6, 0.4, 580000 + seed});
        const bool satisfiable = enumerate(inst).total > 0;
        HeuristicSpec specs[5];
        specs[1].variable_rule = VariableRule::FirstFail;
        specs[2].variable_rule = VariableRule::Brelaz;
        specs[3].variable_rule = VariableRule::Random;
        specs[3].seed = seed;
        specs[4].variable_rule = VariableRule::MaxBelief;
        specs[4].value_rule = ValueRule::MaxBelief;
        specs[4].belief_source = BeliefSource::Dynamic;
        specs[4].estimator = EstimatorKind::Pac;
        for (const auto& h : specs) {
            const SearchResult res = solve(inst, h);
            if ((res.outcome == SearchOutcome::Solution) != satisfiable) {
                log << "search verdict disagrees with the census (seed " << seed << ")";
                return false;
            }
            if (res.outcome == SearchOutcome::Solution &&
                !verify_assignment(inst, res.assignment)) {
                log << "search returned an invalid assignment";
                return false;
            }
        }
    }

    // Scale invariance of beliefs under positive message scaling.
    {
        const CspInstance inst = generate(GenSpec{8, 3, 0.7, 0.3, 590001});
        PropagationConfig cfg;
        cfg.epsilon = 1e-30;
        cfg.max_iter = 25;
        Propagator base(inst, cfg);
        Propagator scaled(inst, cfg);
        for (int x = 0; x < inst.var_count(); ++x)
            for (const auto& nb : inst.neighbors(x))
                for (double& v : scaled.mutable_message(x, nb.var))
                    v *= 2.5;
        for (int round = 0; round < 20; ++round) {
            base.step();
            scaled.step();
            for (int x = 0; x < inst.var_count(); ++x)
                for (int v = 0; v < inst.domain_size(x); ++v)
                    if (std::abs(base.state().beliefs[x][v] - scaled.state().beliefs[x][v]) >
                        1e-12) {
                        log << "message scaling changed the belief trajectory";
                        return false;
                    }
        }
    }

    // Conditioning consistency on trees.
    int conditioned_checked = 0;
    for (uint64_t seed = 0; conditioned_checked < 20 && seed < 200; ++seed) {
        const CspInstance tree = generate_tree(8, 3, 0.3, 600000 + seed);
        const SolutionCensus census = enumerate(tree);
        if (census.total == 0)
            continue;
        const int x = static_cast<int>(seed % 8);
        int v = -1;
        for (int cand = 0; cand < 3; ++cand)
            if (census.usage[x][cand] > 0)
                v = cand;
        if (v < 0)
            continue;
        const CspInstance cond = condition(tree, {{x, v}});
        PropagationConfig cfg;
        cfg.epsilon = 1e-20;
        const PropagationResult res = propagate(cond, cfg);
        if (res.status != PropagationStatus::Converged) {
            log << "conditioned tree did not converge";
            return false;
        }
        const auto exact = frequencies(enumerate(cond));
        for (int y = 0; y < cond.var_count(); ++y)
            for (int w = 0; w < cond.domain_size(y); ++w)
                if (std::abs(res.beliefs[y][w] - exact[y][w]) > 1e-9) {
                    log << "conditioned beliefs differ from conditioned frequencies";
                    return false;
                }
        ++conditioned_checked;
    }
    if (conditioned_checked < 20) {
        log << "not enough satisfiable trees for the conditioning property";
        return false;
    }

    // Solution indicator states are Peleg fixed points.
    int peleg_checked = 0;
    for (uint64_t seed = 0; peleg_checked < 20 && seed < 100; ++seed) {
        const CspInstance inst = generate(GenSpec{6, 3, 0.7, 0.35, 610000 + seed});
        HeuristicSpec h;
        const SearchResult sr = solve(inst, h);
        if (sr.outcome != SearchOutcome::Solution)
            continue;
        ++peleg_checked;
        const auto indicator = [&](int x) {
            std::vector<double> e(inst.domain_size(x), 0.0);
            e[sr.assignment[x]] = 1.0;
            return e;
        };
        for (int x = 0; x < inst.var_count(); ++x) {
            std::vector<std::vector<double>> supports;
            for (const auto& nb : inst.neighbors(x))
                supports.push_back(support_sum(inst, x, nb.var, indicator(nb.var)));
            const std::vector<double> prev = indicator(x);
            const BeliefUpdate up =
                belief_update(inst, x, supports, PropagationMode::Peleg, &prev);
            if (up.wiped) {
                log << "Peleg update wiped an indicator solution state";
                return false;
            }
            for (int v = 0; v < inst.domain_size(x); ++v)
                if (std::abs(up.belief[v] - indicator(x)[v]) > 1e-15) {
                    log << "indicator state is not a Peleg fixed point";
                    return false;
                }
        }
    }
    if (peleg_checked < 20) {
        log << "not enough satisfiable instances for the Peleg property";
        return false;
    }

    log << "AC-3 preservation (60), search vs census (40 x 5 heuristics), scale invariance, "
        << "conditioning on trees (20), Peleg fixed points (20)";
    return true;
}

// ---- criterion 8: reproducibility of the study commands ----

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool run_cli(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
}

bool criterion_reproducibility(std::ostream& log) {
    if (g_cli_path.empty()) {
        log << "no --cli path given";
        return false;
    }
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "pacsp-acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    {
        std::ofstream spec(dir / "accuracy.json");
        spec << R"({
  "corpus": {
    "items": [{"n": 9, "m": 4, "p1": 1.0, "p2": 0.18, "seed": 620000, "replicates": 12}],
    "oracle_cap": 200000, "use_oracle_filter": true, "require_loopy": true
  },
  "propagation": {"epsilon": 1e-5, "max_iter": 500},
  "methods": ["pac", "sst", "up", "mst"]
})";
    }
    {
        std::ofstream spec(dir / "search.json");
        spec << R"({
  "corpus": {
    "items": [{"n": 10, "m": 4, "p1": 1.0, "p2": 0.15, "seed": 630000, "replicates": 10}],
    "require_satisfiable_by_search": true
  },
  "heuristics": [
    {"id": "random", "var_rule": "lex", "val_rule": "random", "seed": 7},
    {"id": "pac-static", "var_rule": "lex", "val_rule": "max-belief", "belief": "pac",
     "source": "static", "epsilon": 1e-5, "max_iter": 500},
    {"id": "pac-dynamic", "var_rule": "max-belief", "val_rule": "max-belief", "belief": "pac",
     "source": "dynamic"}
  ],
  "limits": {"max_backtracks": 50000}
})";
    }

    const std::string acc = (dir / "accuracy.json").string();
    const std::string sea = (dir / "search.json").string();
    for (int run = 1; run <= 2; ++run) {
        const std::string tag = std::to_string(run);
        if (!run_cli("study-accuracy --spec " + acc + " --rows-out " + (dir / ("ar" + tag + ".csv")).string() +
                     " --summary-out " + (dir / ("as" + tag + ".csv")).string())) {
            log << "study-accuracy run " << run << " failed";
            return false;
        }
        if (!run_cli("study-search --spec " + sea + " --results-out " + (dir / ("sr" + tag + ".csv")).string() +
                     " --curve-out " + (dir / ("sc" + tag + ".csv")).string())) {
            log << "study-search run " << run << " failed";
            return false;
        }
    }
    for (const char* base : {"ar", "as", "sr", "sc"}) {
        const std::string a = slurp(dir / (std::string(base) + "1.csv"));
        const std::string b = slurp(dir / (std::string(base) + "2.csv"));
        if (a.empty() || a != b) {
            log << "output " << base << " differs between runs";
            return false;
        }
    }
    log << "study-accuracy and study-search outputs byte-identical across reruns";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc)
            g_cli_path = argv[++i];
        else if (arg == "--only" && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }

    struct Criterion {
        const char* name;
        bool (*run)(std::ostream&);
    };
    const Criterion criteria[] = {
        {"tree exactness", criterion_tree_exactness},
        {"AC-3 equivalence", criterion_ac3_equivalence},
        {"baseline agreement on trees", criterion_baseline_agreement},
        {"correlation study", criterion_correlation},
        {"search-cost ordering", criterion_search_cost},
        {"oscillation existence", criterion_oscillation},
        {"property suites", criterion_properties},
        {"reproducibility", criterion_reproducibility},
    };

    int failures = 0;
    for (int k = 0; k < 8; ++k) {
        if (only != 0 && only != k + 1)
            continue;
        std::ostringstream log;
        bool ok = false;
        try {
            ok = criteria[k].run(log);
        } catch (const std::exception& e) {
            log << "exception: " << e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << (k + 1) << " ("
                  << criteria[k].name << "): " << log.str() << "\n";
        std::cout.flush();
        if (!ok)
            ++failures;
    }
    return failures;
}
