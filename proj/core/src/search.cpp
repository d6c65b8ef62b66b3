#include "pacsp/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pacsp/generator.hpp"

namespace pacsp {

const char* to_string(VariableRule r) {
    switch (r) {
    case VariableRule::Lex: return "lex";
    case VariableRule::FirstFail: return "first-fail";
    case VariableRule::Brelaz: return "brelaz";
    case VariableRule::MaxBelief: return "max-belief";
    case VariableRule::Random: return "random";
    }
    return "unknown";
}

const char* to_string(ValueRule r) {
    switch (r) {
    case ValueRule::Lex: return "lex";
    case ValueRule::MaxBelief: return "max-belief";
    case ValueRule::Random: return "random";
    }
    return "unknown";
}

const char* to_string(SearchOutcome o) {
    switch (o) {
    case SearchOutcome::Solution: return "solution";
    case SearchOutcome::Unsatisfiable: return "unsatisfiable";
    case SearchOutcome::LimitReached: return "limit-reached";
    }
    return "unknown";
}

void HeuristicSpec::validate() const {
    const bool needs_beliefs =
        variable_rule == VariableRule::MaxBelief || value_rule == ValueRule::MaxBelief;
    if (needs_beliefs && belief_source == BeliefSource::None)
        throw Error("MaxBelief rules require a belief source");
}

std::string HeuristicSpec::label() const {
    if (!id.empty())
        return id;
    std::string s = std::string(to_string(variable_rule)) + "/" + to_string(value_rule);
    if (belief_source != BeliefSource::None) {
        s += belief_source == BeliefSource::Dynamic ? "/dynamic-" : "/static-";
        s += to_string(estimator);
    }
    return s;
}

bool verify_assignment(const CspInstance& inst, const std::vector<int>& assignment) {
    if (static_cast<int>(assignment.size()) != inst.var_count())
        return false;
    for (int x = 0; x < inst.var_count(); ++x) {
        const int v = assignment[x];
        if (v < 0 || v >= inst.domain_size(x) || !inst.value_allowed(x, v))
            return false;
    }
    for (const Edge& e : inst.edges())
        if (!e.allow.at(assignment[e.a], assignment[e.b]))
            return false;
    return true;
}

namespace {

bool consistent_with_assigned(const CspInstance& inst, const std::vector<int>& assignment, int x,
                              int v) {
    if (!inst.value_allowed(x, v))
        return false;
    for (const auto& nb : inst.neighbors(x)) {
        if (assignment[nb.var] < 0)
            continue;
        if (!inst.constraint(x, nb.var).allows(v, assignment[nb.var]))
            return false;
    }
    return true;
}

int count_consistent(const CspInstance& inst, const std::vector<int>& assignment, int x,
                     const DomainSet* domains) {
    int count = 0;
    for (int v = 0; v < inst.domain_size(x); ++v) {
        if (domains && !domains->is_live(x, v))
            continue;
        if (consistent_with_assigned(inst, assignment, x, v))
            ++count;
    }
    return count;
}

} // namespace

int first_fail_order(const CspInstance& inst, const std::vector<int>& assignment,
                     const DomainSet* domains) {
    int best = -1;
    int best_count = 0;
    for (int x = 0; x < inst.var_count(); ++x) {
        if (assignment[x] >= 0)
            continue;
        const int c = count_consistent(inst, assignment, x, domains);
        if (best < 0 || c < best_count) {
            best = x;
            best_count = c;
        }
    }
    if (best < 0)
        throw Error("first_fail_order: no unassigned variable");
    return best;
}

int brelaz_order(const CspInstance& inst, const std::vector<int>& assignment) {
    int best = -1;
    int best_sat = -1;
    int best_deg = -1;
    for (int x = 0; x < inst.var_count(); ++x) {
        if (assignment[x] >= 0)
            continue;
        int sat = 0;
        int deg = 0;
        for (const auto& nb : inst.neighbors(x)) {
            if (assignment[nb.var] >= 0)
                ++sat;
            else
                ++deg;
        }
        if (sat > best_sat || (sat == best_sat && deg > best_deg)) {
            best = x;
            best_sat = sat;
            best_deg = deg;
        }
    }
    if (best < 0)
        throw Error("brelaz_order: no unassigned variable");
    return best;
}

namespace {

struct Frame {
    int var;
    std::vector<int> candidates;
    size_t next = 0;
};

class Searcher {
public:
    Searcher(const CspInstance& inst, const HeuristicSpec& h, const SearchLimits& limits,
             const DomainSet* initial)
        : inst_(inst), h_(h), limits_(limits), rng_(h.seed),
          assignment_(inst.var_count(), -1) {
        h_.validate();
        domains_ = initial ? *initial : DomainSet::from_instance(inst);
        if (h_.belief_source == BeliefSource::Static) {
            if (h_.static_report) {
                beliefs_ = h_.static_report->beliefs;
            } else {
                const EstimateReport rep = estimate_beliefs(inst, h_.estimator, h_.propagation);
                beliefs_ = rep.beliefs;
                result_.propagation_rounds += rep.iterations;
            }
        }
    }

    SearchResult run() {
        std::vector<Frame> stack;
        int assigned = 0;
        const int n = inst_.var_count();
        while (true) {
            if (assigned == n) {
                if (!verify_assignment(inst_, assignment_))
                    throw Error("internal: search produced an inconsistent assignment");
                result_.outcome = SearchOutcome::Solution;
                result_.assignment = assignment_;
                return result_;
            }
            stack.push_back(open_frame());
            // Advance the top frame to its next consistent candidate,
            // unwinding exhausted frames as needed.
            while (true) {
                Frame& top = stack.back();
                if (top.next >= top.candidates.size()) {
                    stack.pop_back();
                    if (!stack.empty()) {
                        assignment_[stack.back().var] = -1;
                        --assigned;
                        ++result_.backtracks;
                        if (limits_.max_backtracks >= 0 &&
                            result_.backtracks > limits_.max_backtracks) {
                            result_.outcome = SearchOutcome::LimitReached;
                            return result_;
                        }
                    } else {
                        result_.outcome = SearchOutcome::Unsatisfiable;
                        return result_;
                    }
                    continue;
                }
                const int v = top.candidates[top.next++];
                ++result_.nodes;
                if (limits_.max_nodes >= 0 && result_.nodes > limits_.max_nodes) {
                    result_.outcome = SearchOutcome::LimitReached;
                    return result_;
                }
                if (consistent_with_assigned(inst_, assignment_, top.var, v)) {
                    assignment_[top.var] = v;
                    ++assigned;
                    break;
                }
            }
        }
    }

private:
    Frame open_frame() {
        if (h_.belief_source == BeliefSource::Dynamic)
            refresh_beliefs();
        const int var = choose_variable();
        Frame f;
        f.var = var;
        f.candidates = order_values(var);
        return f;
    }

    void refresh_beliefs() {
        std::map<int, int> fixed;
        for (int x = 0; x < inst_.var_count(); ++x)
            if (assignment_[x] >= 0)
                fixed[x] = assignment_[x];
        const CspInstance cond = condition(inst_, fixed);
        const EstimateReport rep = estimate_beliefs(cond, h_.estimator, h_.propagation);
        beliefs_ = rep.beliefs;
        result_.propagation_rounds += rep.iterations;
    }

    int choose_variable() {
        switch (h_.variable_rule) {
        case VariableRule::Lex:
            for (int x = 0; x < inst_.var_count(); ++x)
                if (assignment_[x] < 0)
                    return x;
            break;
        case VariableRule::FirstFail:
            return first_fail_order(inst_, assignment_, &domains_);
        case VariableRule::Brelaz:
            return brelaz_order(inst_, assignment_);
        case VariableRule::MaxBelief: {
            int best = -1;
            double best_p = -1.0;
            for (int x = 0; x < inst_.var_count(); ++x) {
                if (assignment_[x] >= 0)
                    continue;
                double top = 0.0;
                for (double p : beliefs_[x])
                    top = std::max(top, p);
                if (best < 0 || top > best_p) {
                    best = x;
                    best_p = top;
                }
            }
            return best;
        }
        case VariableRule::Random: {
            int unassigned = 0;
            for (int x = 0; x < inst_.var_count(); ++x)
                unassigned += assignment_[x] < 0;
            uint64_t pick = rng_.next_below(static_cast<uint64_t>(unassigned));
            for (int x = 0; x < inst_.var_count(); ++x)
                if (assignment_[x] < 0 && pick-- == 0)
                    return x;
            break;
        }
        }
        throw Error("choose_variable: no unassigned variable");
    }

    std::vector<int> order_values(int var) {
        std::vector<int> vals = domains_.live_values(var);
        switch (h_.value_rule) {
        case ValueRule::Lex:
            break;
        case ValueRule::MaxBelief:
            std::stable_sort(vals.begin(), vals.end(), [&](int a, int b) {
                return beliefs_[var][a] > beliefs_[var][b];
            });
            break;
        case ValueRule::Random:
            for (size_t i = vals.size(); i > 1; --i)
                std::swap(vals[i - 1], vals[rng_.next_below(i)]);
            break;
        }
        return vals;
    }

    const CspInstance& inst_;
    HeuristicSpec h_;
    SearchLimits limits_;
    SplitMix64 rng_;
    std::vector<int> assignment_;
    DomainSet domains_{};
    std::vector<std::vector<double>> beliefs_;
    SearchResult result_;
};

} // namespace

SearchResult solve(const CspInstance& inst, const HeuristicSpec& h, const SearchLimits& limits,
                   const DomainSet* initial_domains) {
    Searcher s(inst, h, limits, initial_domains);
    return s.run();
}

SearchResult peleg_solve(const CspInstance& inst, const PropagationConfig& cfg,
                         const SearchLimits& limits) {
    PropagationConfig pc = cfg;
    pc.mode = PropagationMode::Peleg;
    const PropagationResult pr = propagate(inst, pc);

    SearchResult result;
    result.propagation_rounds = pr.iterations;
    if (pr.status == PropagationStatus::Wipeout) {
        result.outcome = SearchOutcome::Unsatisfiable;
        result.wall_notes = "peleg wipeout";
        return result;
    }

    // Decode the most likely value per variable from any converged state.
    // Indicator states (one value within 1e-6 of probability one) decode
    // this way by construction; near-indicator states with a few tied
    // variables often still decode to a verified solution.
    if (pr.status == PropagationStatus::Converged) {
        constexpr double kIndicatorTol = 1e-6;
        bool indicator = true;
        std::vector<int> decoded(inst.var_count(), -1);
        for (int x = 0; x < inst.var_count(); ++x) {
            int arg = 0;
            for (int v = 1; v < inst.domain_size(x); ++v)
                if (pr.beliefs[x][v] > pr.beliefs[x][arg])
                    arg = v;
            decoded[x] = arg;
            if (std::abs(pr.beliefs[x][arg] - 1.0) > kIndicatorTol)
                indicator = false;
        }
        if (verify_assignment(inst, decoded)) {
            result.outcome = SearchOutcome::Solution;
            result.assignment = decoded;
            result.nodes = inst.var_count();
            result.wall_notes =
                indicator ? "peleg direct decode" : "peleg direct decode (argmax)";
            return result;
        }
    }

    HeuristicSpec h;
    h.variable_rule = VariableRule::Lex;
    h.value_rule = ValueRule::MaxBelief;
    h.belief_source = BeliefSource::Static;
    h.estimator = EstimatorKind::Peleg;
    EstimateReport rep;
    rep.method = "peleg";
    rep.beliefs = pr.beliefs;
    rep.status = pr.status;
    rep.iterations = pr.iterations;
    h.static_report = std::move(rep);
    h.id = "peleg-fallback";
    SearchResult fallback = solve(inst, h, limits);
    fallback.propagation_rounds += pr.iterations;
    fallback.wall_notes = "peleg fallback search";
    return fallback;
}

} // namespace pacsp
