#include "pacsp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace pacsp {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string CorpusSpec::describe() const {
    std::ostringstream os;
    os << "cap=" << oracle_cap
       << " oracle_filter=" << (use_oracle_filter ? 1 : 0)
       << " min_solutions=" << min_solutions;
    if (max_solutions)
        os << " max_solutions=" << *max_solutions;
    os << " loopy=" << (require_loopy ? 1 : 0)
       << " sat_filter=" << (require_satisfiable_by_search ? 1 : 0);
    for (const auto& item : items)
        os << " | " << (item.tree ? "tree " : "") << item.gen.describe()
           << " reps=" << item.replicates;
    return os.str();
}

namespace {

std::string instance_id(const CorpusItem& item, uint64_t seed) {
    std::ostringstream os;
    if (item.tree)
        os << "tree-n" << item.gen.n << "m" << item.gen.m << "p2" << format_double(item.gen.p2)
           << "-s" << seed;
    else
        os << "n" << item.gen.n << "m" << item.gen.m << "p1" << format_double(item.gen.p1) << "p2"
           << format_double(item.gen.p2) << "-s" << seed;
    return os.str();
}

bool has_cycle(const CspInstance& inst) {
    const GraphInfo info = graph_info(inst);
    return inst.edge_count() > inst.var_count() - info.component_count;
}

} // namespace

std::vector<CorpusInstance> build_corpus(const CorpusSpec& spec) {
    std::vector<CorpusInstance> corpus;
    for (const auto& item : spec.items) {
        if (item.replicates < 1)
            throw Error("corpus items need a replicate count >= 1");
        for (int r = 0; r < item.replicates; ++r) {
            if (spec.max_instances && static_cast<int>(corpus.size()) >= *spec.max_instances)
                return corpus;
            const uint64_t seed = item.gen.seed + static_cast<uint64_t>(r);
            GenSpec gen = item.gen;
            gen.seed = seed;
            CspInstance inst =
                item.tree ? generate_tree(gen.n, gen.m, gen.p2, seed) : generate(gen);
            if (spec.require_loopy && !has_cycle(inst))
                continue;
            std::optional<SolutionCensus> census;
            if (spec.use_oracle_filter) {
                SolutionCensus c = enumerate(inst, spec.oracle_cap);
                if (c.truncated || c.total < spec.min_solutions)
                    continue;
                if (spec.max_solutions && c.total > *spec.max_solutions)
                    continue;
                census = std::move(c);
            }
            if (spec.require_satisfiable_by_search) {
                HeuristicSpec h;
                h.variable_rule = VariableRule::FirstFail;
                SearchLimits lim;
                lim.max_backtracks = spec.sat_filter_backtrack_limit;
                if (solve(inst, h, lim).outcome != SearchOutcome::Solution)
                    continue;
            }
            corpus.push_back({instance_id(item, seed), std::move(inst), std::move(census)});
        }
    }
    return corpus;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw LengthMismatchError("pearson requires two equally sized vectors of length >= 2");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateVarianceError("pearson undefined for a constant vector");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& vectors) {
    std::vector<double> flat;
    for (const auto& v : vectors)
        flat.insert(flat.end(), v.begin(), v.end());
    return flat;
}

} // namespace

AccuracyStudy run_accuracy_study(const std::vector<CorpusInstance>& corpus,
                                 const std::vector<EstimatorKind>& methods,
                                 const PropagationConfig& cfg) {
    AccuracyStudy study;
    struct Tally {
        double sum_r = 0.0;
        int defined = 0;
        int undefined = 0;
        int nonconverged = 0;
        std::vector<double> pooled_exact;
        std::vector<double> pooled_est;
    };
    std::vector<Tally> tallies(methods.size());

    for (const auto& item : corpus) {
        if (!item.census)
            throw Error("accuracy study requires an oracle-filtered corpus");
        const auto exact = flatten(frequencies(*item.census));
        for (size_t mi = 0; mi < methods.size(); ++mi) {
            const EstimatorKind kind = methods[mi];
            const EstimateReport rep = estimate_beliefs(item.inst, kind, cfg);
            const auto est = flatten(rep.beliefs);

            AccuracyRow row;
            row.instance_id = item.id;
            row.method = rep.method;
            row.status = rep.status ? to_string(*rep.status) : "-";
            row.iterations = rep.iterations;
            try {
                row.r = pearson(exact, est);
            } catch (const DegenerateVarianceError&) {
                row.r = std::nullopt;
            }

            Tally& t = tallies[mi];
            const bool converged_enough =
                !rep.status || *rep.status == PropagationStatus::Converged;
            if (!converged_enough)
                ++t.nonconverged;
            if (!row.r) {
                ++t.undefined;
            } else if (converged_enough) {
                t.sum_r += *row.r;
                ++t.defined;
                t.pooled_exact.insert(t.pooled_exact.end(), exact.begin(), exact.end());
                t.pooled_est.insert(t.pooled_est.end(), est.begin(), est.end());
            }
            study.rows.push_back(std::move(row));
        }
    }

    for (size_t mi = 0; mi < methods.size(); ++mi) {
        const Tally& t = tallies[mi];
        AccuracySummary s;
        s.method = to_string(methods[mi]);
        s.defined_count = t.defined;
        s.undefined_count = t.undefined;
        s.nonconverged_count = t.nonconverged;
        s.mean_r = t.defined > 0 ? t.sum_r / t.defined : 0.0;
        if (t.pooled_exact.size() >= 2) {
            try {
                s.pooled_r = pearson(t.pooled_exact, t.pooled_est);
            } catch (const DegenerateVarianceError&) {
                s.pooled_r = 0.0;
            }
        }
        study.summary.push_back(std::move(s));
    }
    return study;
}

namespace {

std::vector<long> budget_grid(long max_needed) {
    std::vector<long> grid{0};
    const long steps[] = {1, 2, 5};
    for (long scale = 1;; scale *= 10) {
        for (long s : steps) {
            const long b = s * scale;
            grid.push_back(b);
            if (b >= max_needed)
                return grid;
        }
        if (scale > (1L << 60) / 10)
            return grid;
    }
}

} // namespace

SearchStudy run_search_study(const std::vector<CorpusInstance>& corpus,
                             const std::vector<HeuristicSpec>& heuristics,
                             const SearchLimits& limits) {
    SearchStudy study;
    long max_backtracks_seen = 1;
    for (const auto& h : heuristics) {
        for (const auto& item : corpus) {
            const SearchResult res = h.peleg_decode ? peleg_solve(item.inst, h.propagation, limits)
                                                    : solve(item.inst, h, limits);
            SearchRow row;
            row.instance_id = item.id;
            row.heuristic = h.label();
            row.outcome = res.outcome;
            row.backtracks = res.backtracks;
            row.nodes = res.nodes;
            row.propagation_rounds = res.propagation_rounds;
            if (res.outcome == SearchOutcome::Solution)
                max_backtracks_seen = std::max(max_backtracks_seen, res.backtracks);
            study.rows.push_back(row);
        }
    }

    const auto grid = budget_grid(max_backtracks_seen);
    for (const auto& h : heuristics) {
        const std::string label = h.label();
        std::vector<long> solved_at;
        long top_code = limits.max_backtracks >= 0 ? limits.max_backtracks + 1
                                                   : max_backtracks_seen + 1;
        std::vector<long> all_costs;
        for (const auto& row : study.rows) {
            if (row.heuristic != label)
                continue;
            if (row.outcome == SearchOutcome::Solution) {
                solved_at.push_back(row.backtracks);
                all_costs.push_back(row.backtracks);
            } else {
                all_costs.push_back(top_code);
            }
        }
        const double total = static_cast<double>(all_costs.size());
        for (long b : grid) {
            CurvePoint p;
            p.heuristic = label;
            p.budget = b;
            long solved = 0;
            for (long c : solved_at)
                if (c <= b)
                    ++solved;
            p.fraction = total > 0 ? static_cast<double>(solved) / total : 0.0;
            study.curve.push_back(p);
        }
        // Lower median over all instances, unsolved runs top-coded.
        std::sort(all_costs.begin(), all_costs.end());
        const long median =
            all_costs.empty() ? 0 : all_costs[(all_costs.size() - 1) / 2];
        study.median_backtracks.emplace_back(label, median);
    }
    return study;
}

bool verified_period2(const PropagationResult& trace, int window, double pole_floor,
                      double alternation_ceiling) {
    const auto& r1 = trace.residual_history;
    const auto& r2 = trace.alternation_history;
    if (static_cast<int>(r1.size()) < window + 2 || r1.size() != r2.size())
        return false;
    for (size_t k = r1.size() - static_cast<size_t>(window); k < r1.size(); ++k)
        if (!(r2[k] <= alternation_ceiling && r1[k] > pole_floor))
            return false;
    return true;
}

namespace {

struct Topology {
    const char* name;
    std::vector<std::pair<int, int>> edges;
};

const std::vector<Topology>& two_loop_topologies() {
    // Five variables, two overlapping loops of equal or different lengths.
    static const std::vector<Topology> topologies = {
        {"triangle+square-shared-edge", {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {0, 4}}},
        {"two-triangles-shared-vertex", {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}}},
        {"pentagon+chord", {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {0, 2}}},
    };
    return topologies;
}

} // namespace

OscillatorFind find_oscillator(const OscillatorScanSpec& spec) {
    OscillatorFind result;
    const auto& topologies = two_loop_topologies();
    PropagationConfig cfg;
    cfg.epsilon = 1e-11;
    cfg.max_iter = spec.max_iter;
    cfg.oscillation_window = spec.window;
    cfg.record_history = true;

    for (int scan = 0; scan < spec.max_seeds; ++scan) {
        result.seeds_tried = scan + 1;
        const auto& topo = topologies[scan % topologies.size()];
        const int m = spec.domain_sizes[(scan / topologies.size()) % spec.domain_sizes.size()];
        const double p2 =
            spec.tightnesses[(scan / (topologies.size() * spec.domain_sizes.size())) %
                             spec.tightnesses.size()];
        const uint64_t inst_seed = substream_key(spec.seed, 0x05c111a7eULL,
                                                 static_cast<uint64_t>(scan));
        InstanceBuilder b(5, m);
        for (auto [x, y] : topo.edges) {
            SplitMix64 stream(substream_key(inst_seed, static_cast<uint64_t>(x),
                                            static_cast<uint64_t>(y)));
            AllowMatrix mat(m, m, true);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    if (stream.next_unit() < p2)
                        mat.set(i, j, false);
            b.add_constraint(x, y, std::move(mat));
        }
        CspInstance inst = b.build();
        const PropagationResult trace = propagate(inst, cfg);
        if (trace.status == PropagationStatus::Converged ||
            trace.status == PropagationStatus::Wipeout)
            continue;
        if (verified_period2(trace, spec.window, spec.pole_floor, spec.alternation_ceiling)) {
            result.found = true;
            std::ostringstream os;
            os << "topology=" << topo.name << " m=" << m << " p2=" << format_double(p2)
               << " scan=" << scan << " seed=" << spec.seed;
            result.description = os.str();
            result.inst = std::move(inst);
            result.trace = trace;
            return result;
        }
    }
    return result;
}

void write_comment_block(std::ostream& out, const std::vector<std::string>& meta) {
    out << "# tool: pacsp " << kToolVersion << "\n";
    for (const auto& line : meta)
        out << "# " << line << "\n";
}

void write_beliefs_csv(std::ostream& out, const std::vector<std::vector<double>>& beliefs,
                       const std::vector<std::string>& meta, const std::string& status) {
    write_comment_block(out, meta);
    out << "# status: " << status << "\n";
    out << "var,value,prob\n";
    for (size_t x = 0; x < beliefs.size(); ++x)
        for (size_t v = 0; v < beliefs[x].size(); ++v)
            out << x << ',' << v << ',' << format_double(beliefs[x][v]) << "\n";
}

void write_accuracy_rows_csv(std::ostream& out, const AccuracyStudy& study,
                             const std::vector<std::string>& meta) {
    write_comment_block(out, meta);
    out << "instance,method,r,status,iterations\n";
    for (const auto& row : study.rows)
        out << row.instance_id << ',' << row.method << ','
            << (row.r ? format_double(*row.r) : "undefined") << ',' << row.status << ','
            << row.iterations << "\n";
}

void write_accuracy_summary_csv(std::ostream& out, const AccuracyStudy& study,
                                const std::vector<std::string>& meta) {
    write_comment_block(out, meta);
    out << "method,mean_r,pooled_r,defined,undefined,nonconverged\n";
    for (const auto& s : study.summary)
        out << s.method << ',' << format_double(s.mean_r) << ',' << format_double(s.pooled_r)
            << ',' << s.defined_count << ',' << s.undefined_count << ',' << s.nonconverged_count
            << "\n";
}

void write_search_rows_csv(std::ostream& out, const SearchStudy& study,
                           const std::vector<std::string>& meta) {
    write_comment_block(out, meta);
    for (const auto& [heuristic, median] : study.median_backtracks)
        out << "# median_backtracks " << heuristic << ": " << median << "\n";
    out << "instance,heuristic,outcome,backtracks,nodes,propagation_rounds\n";
    for (const auto& row : study.rows)
        out << row.instance_id << ',' << row.heuristic << ',' << to_string(row.outcome) << ','
            << row.backtracks << ',' << row.nodes << ',' << row.propagation_rounds << "\n";
}

void write_curve_csv(std::ostream& out, const SearchStudy& study,
                     const std::vector<std::string>& meta) {
    write_comment_block(out, meta);
    out << "heuristic,budget,fraction\n";
    for (const auto& p : study.curve)
        out << p.heuristic << ',' << p.budget << ',' << format_double(p.fraction) << "\n";
}

} // namespace pacsp
