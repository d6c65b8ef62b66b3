#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pacsp/harness.hpp"
#include "pacsp/pac.hpp"
#include "pacsp/text_io.hpp"

using namespace pacsp;

TEST_CASE("pearson basics") {
    CHECK(pearson({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK(pearson({1, 2, 3}, {-1, -2, -3}) == doctest::Approx(-1.0));
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), DegenerateVarianceError);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), LengthMismatchError);
    CHECK_THROWS_AS(pearson({1}, {1}), LengthMismatchError);
}

namespace {

CorpusSpec small_tree_corpus() {
    CorpusSpec spec;
    CorpusItem item;
    item.gen = GenSpec{7, 3, 0.0, 0.3, 23000};
    item.tree = true;
    item.replicates = 30;
    spec.items.push_back(item);
    spec.use_oracle_filter = true;
    spec.oracle_cap = 100000;
    return spec;
}

CorpusSpec small_loopy_corpus() {
    CorpusSpec spec;
    CorpusItem item;
    item.gen = GenSpec{8, 3, 1.0, 0.15, 24000};
    item.replicates = 16;
    spec.items.push_back(item);
    spec.use_oracle_filter = true;
    spec.oracle_cap = 100000;
    spec.require_loopy = true;
    return spec;
}

} // namespace

TEST_CASE("corpus filters enforce the solution-count window") {
    const auto corpus = build_corpus(small_tree_corpus());
    CHECK(corpus.size() > 10);
    for (const auto& item : corpus) {
        REQUIRE(item.census.has_value());
        CHECK(item.census->total >= 1);
        CHECK(item.census->total <= 100000);
        CHECK_FALSE(item.census->truncated);
    }
}

TEST_CASE("corpus building is deterministic") {
    const auto a = build_corpus(small_loopy_corpus());
    const auto b = build_corpus(small_loopy_corpus());
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        std::ostringstream wa, wb;
        write_instance(wa, a[i].inst);
        write_instance(wb, b[i].inst);
        CHECK(wa.str() == wb.str());
    }
}

TEST_CASE("max_instances caps the corpus") {
    CorpusSpec spec = small_tree_corpus();
    spec.max_instances = 5;
    CHECK(build_corpus(spec).size() == 5);
}

TEST_CASE("accuracy study: pac is exact on a tree corpus") {
    const auto corpus = build_corpus(small_tree_corpus());
    PropagationConfig cfg;
    const AccuracyStudy study = run_accuracy_study(corpus, {EstimatorKind::Pac}, cfg);
    REQUIRE(study.summary.size() == 1);
    const AccuracySummary& s = study.summary.front();
    CHECK(s.nonconverged_count == 0);
    CHECK(s.mean_r == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& row : study.rows)
        if (row.r)
            CHECK(*row.r == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("accuracy study ranks pac above the tree-backed baselines on loops") {
    const auto corpus = build_corpus(small_loopy_corpus());
    REQUIRE(corpus.size() >= 8);
    PropagationConfig cfg;
    const AccuracyStudy study = run_accuracy_study(
        corpus, {EstimatorKind::Pac, EstimatorKind::Sst, EstimatorKind::Up, EstimatorKind::Mst},
        cfg);
    REQUIRE(study.summary.size() == 4);
    const auto mean = [&](const std::string& m) {
        for (const auto& s : study.summary)
            if (s.method == m)
                return s.mean_r;
        FAIL("missing method");
        return 0.0;
    };
    CHECK(mean("pac") > mean("sst"));
    CHECK(mean("pac") > mean("up"));
    CHECK(mean("pac") > mean("mst"));
}

TEST_CASE("accuracy study requires censuses") {
    CorpusSpec spec = small_tree_corpus();
    spec.use_oracle_filter = false;
    const auto corpus = build_corpus(spec);
    PropagationConfig cfg;
    CHECK_THROWS_AS(run_accuracy_study(corpus, {EstimatorKind::Pac}, cfg), Error);
}

TEST_CASE("search study produces monotone curves and a peleg budget-0 column") {
    CorpusSpec spec;
    CorpusItem item;
    item.gen = GenSpec{8, 4, 1.0, 0.2, 25000};
    item.replicates = 10;
    spec.items.push_back(item);
    spec.require_satisfiable_by_search = true;
    const auto corpus = build_corpus(spec);
    REQUIRE(corpus.size() >= 5);

    HeuristicSpec random;
    random.value_rule = ValueRule::Random;
    random.seed = 99;
    random.id = "random";
    HeuristicSpec pac_static;
    pac_static.value_rule = ValueRule::MaxBelief;
    pac_static.belief_source = BeliefSource::Static;
    pac_static.estimator = EstimatorKind::Pac;
    pac_static.propagation = PropagationConfig{};
    pac_static.id = "pac-static";
    HeuristicSpec peleg;
    peleg.peleg_decode = true;
    peleg.id = "peleg";

    SearchLimits limits;
    limits.max_backtracks = 100000;
    const SearchStudy study = run_search_study(corpus, {random, pac_static, peleg}, limits);

    CHECK(study.rows.size() == corpus.size() * 3);
    for (const auto& [h, m] : study.median_backtracks)
        CHECK(m >= 0);

    double last = -1.0;
    std::string current;
    long budget0_peleg = -1;
    for (const auto& p : study.curve) {
        if (p.heuristic != current) {
            current = p.heuristic;
            last = -1.0;
        }
        CHECK(p.fraction >= last);
        CHECK(p.fraction <= 1.0);
        last = p.fraction;
        if (p.heuristic == "peleg" && p.budget == 0)
            budget0_peleg = static_cast<long>(p.fraction * static_cast<double>(corpus.size()) + 0.5);
    }
    CHECK(budget0_peleg >= 0); // the zero-backtrack column exists
}

TEST_CASE("empty corpus yields empty tables") {
    const SearchStudy study = run_search_study({}, {HeuristicSpec{}}, {});
    CHECK(study.rows.empty());
    for (const auto& p : study.curve)
        CHECK(p.fraction == 0.0);

    const AccuracyStudy acc = run_accuracy_study({}, {EstimatorKind::Pac}, {});
    CHECK(acc.rows.empty());
}

TEST_CASE("study CSV output is byte-identical across runs") {
    const auto corpus = build_corpus(small_loopy_corpus());
    PropagationConfig cfg;
    const std::vector<EstimatorKind> methods{EstimatorKind::Pac, EstimatorKind::Sst};

    std::ostringstream a, b;
    write_accuracy_rows_csv(a, run_accuracy_study(corpus, methods, cfg), {"meta"});
    write_accuracy_rows_csv(b, run_accuracy_study(corpus, methods, cfg), {"meta"});
    CHECK(a.str() == b.str());

    HeuristicSpec h;
    h.value_rule = ValueRule::Random;
    h.seed = 5;
    std::ostringstream c, d;
    write_search_rows_csv(c, run_search_study(corpus, {h}, {}), {"meta"});
    write_search_rows_csv(d, run_search_study(corpus, {h}, {}), {"meta"});
    CHECK(c.str() == d.str());
}

TEST_CASE("trees never verify as period-2 oscillators") {
    PropagationConfig cfg;
    cfg.epsilon = 1e-11;
    cfg.record_history = true;
    cfg.max_iter = 400;
    for (uint64_t seed = 0; seed < 15; ++seed) {
        const CspInstance tree = generate_tree(7, 3, 0.35, 26000 + seed);
        const PropagationResult res = propagate(tree, cfg);
        CHECK((res.status == PropagationStatus::Converged ||
               res.status == PropagationStatus::Wipeout));
        CHECK_FALSE(verified_period2(res, 10, 1e-3, 1e-10));
    }
}

TEST_CASE("find_oscillator locates a verified period-2 instance") {
    OscillatorScanSpec spec;
    spec.max_seeds = 10000;
    const OscillatorFind find = find_oscillator(spec);
    REQUIRE(find.found);
    CHECK(find.trace.status == PropagationStatus::Oscillating);
    CHECK(find.trace.oscillation_period == 2);
    CHECK(verified_period2(find.trace, spec.window, spec.pole_floor, spec.alternation_ceiling));

    // Deterministic rerun reaches the same instance.
    const OscillatorFind again = find_oscillator(spec);
    REQUIRE(again.found);
    CHECK(again.seeds_tried == find.seeds_tried);
    CHECK(again.description == find.description);
    std::ostringstream wa, wb;
    write_instance(wa, find.inst);
    write_instance(wb, again.inst);
    CHECK(wa.str() == wb.str());
}

TEST_CASE("csv escapes nothing but stays well-formed") {
    std::ostringstream out;
    write_beliefs_csv(out, {{0.25, 0.75}}, {"instance: demo"}, "converged");
    const std::string text = out.str();
    CHECK(text.find("# tool: pacsp") == 0);
    CHECK(text.find("# status: converged") != std::string::npos);
    CHECK(text.find("var,value,prob\n") != std::string::npos);
    CHECK(text.find("0,1,0.75\n") != std::string::npos);
}
