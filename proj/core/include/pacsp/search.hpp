#ifndef PACSP_SEARCH_HPP
#define PACSP_SEARCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pacsp/ac3.hpp"
#include "pacsp/baselines.hpp"
#include "pacsp/csp.hpp"

namespace pacsp {

enum class VariableRule { Lex, FirstFail, Brelaz, MaxBelief, Random };
enum class ValueRule { Lex, MaxBelief, Random };
enum class BeliefSource { None, Static, Dynamic };

const char* to_string(VariableRule r);
const char* to_string(ValueRule r);

/// How the searcher picks variables and values. MaxBelief rules need a
/// belief source; a Static source is computed once before the search (or
/// supplied via static_report), a Dynamic one is recomputed on the
/// conditioned instance at every variable selection.
struct HeuristicSpec {
    VariableRule variable_rule = VariableRule::Lex;
    ValueRule value_rule = ValueRule::Lex;
    BeliefSource belief_source = BeliefSource::None;
    EstimatorKind estimator = EstimatorKind::Pac;
    PropagationConfig propagation = dynamic_propagation_defaults();
    uint64_t seed = 0; // for the Random rules
    std::optional<EstimateReport> static_report;
    std::string id;
    bool peleg_decode = false; // study hook: run peleg_solve instead of plain search

    void validate() const;
    std::string label() const; // id, or a name derived from the rules

    /// Relaxed budget used for in-search recomputation.
    static PropagationConfig dynamic_propagation_defaults() {
        PropagationConfig cfg;
        cfg.epsilon = 0.1;
        cfg.max_iter = 50;
        return cfg;
    }
};

enum class SearchOutcome { Solution, Unsatisfiable, LimitReached };

const char* to_string(SearchOutcome o);

struct SearchLimits {
    long max_backtracks = -1; // -1 = unlimited
    long max_nodes = -1;
};

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::Unsatisfiable;
    std::vector<int> assignment; // filled for Solution
    long backtracks = 0;         // retractions forced by successor-level exhaustion
    long nodes = 0;              // attempted value assignments
    long propagation_rounds = 0; // total belief iterations spent on heuristics
    std::string wall_notes;
};

/// Chronological depth-first search. A candidate value is consistent when
/// it is live and compatible with every assigned neighbor; values with
/// zero belief are ordered last but never pruned. One backtrack is one
/// retraction of an assigned variable after its successor level runs out
/// of candidates.
SearchResult solve(const CspInstance& inst, const HeuristicSpec& h, const SearchLimits& limits = {},
                   const DomainSet* initial_domains = nullptr);

/// Unassigned variable with the fewest values consistent with the current
/// assignment; ties by ascending index.
int first_fail_order(const CspInstance& inst, const std::vector<int>& assignment,
                     const DomainSet* domains = nullptr);

/// Unassigned variable with the most distinct assigned constrained
/// neighbors; ties by unassigned-neighbor degree, then ascending index.
int brelaz_order(const CspInstance& inst, const std::vector<int>& assignment);

/// True when the complete assignment satisfies every constraint.
bool verify_assignment(const CspInstance& inst, const std::vector<int>& assignment);

/// Runs Peleg-mode propagation; when the beliefs settle onto indicator
/// vectors, decodes and verifies the assignment directly, otherwise falls
/// back to search using the beliefs as a static value order.
SearchResult peleg_solve(const CspInstance& inst, const PropagationConfig& cfg = {},
                         const SearchLimits& limits = {});

} // namespace pacsp

#endif
