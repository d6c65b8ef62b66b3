#ifndef PACSP_HARNESS_HPP
#define PACSP_HARNESS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pacsp/baselines.hpp"
#include "pacsp/generator.hpp"
#include "pacsp/oracle.hpp"
#include "pacsp/search.hpp"

namespace pacsp {

inline constexpr const char* kToolVersion = "0.1.0";

/// One generator setting and how many consecutive seeds to draw from it.
struct CorpusItem {
    GenSpec gen;
    int replicates = 1;
    bool tree = false; // generate_tree (p1 ignored)
};

/// Corpus recipe: which instances to generate and which to keep.
struct CorpusSpec {
    std::vector<CorpusItem> items;
    BigCount oracle_cap = 1000000;
    bool use_oracle_filter = false; // enumerate and keep min_solutions <= total <= cap
    BigCount min_solutions = 1;
    std::optional<BigCount> max_solutions; // tighter ceiling than the cap, when set
    bool require_loopy = false;              // drop acyclic constraint graphs
    bool require_satisfiable_by_search = false; // drop instances not solved by a bounded search
    long sat_filter_backtrack_limit = 1000000;
    std::optional<int> max_instances;

    std::string describe() const;
};

struct CorpusInstance {
    std::string id;
    CspInstance inst;
    std::optional<SolutionCensus> census; // present when the oracle filter ran
};

std::vector<CorpusInstance> build_corpus(const CorpusSpec& spec);

/// Sample Pearson correlation. Lengths must match and be >= 2; a constant
/// vector raises DegenerateVarianceError.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct AccuracyRow {
    std::string instance_id;
    std::string method;
    std::optional<double> r; // absent when either side has no variance
    std::string status;      // propagation status, or "-" for single-pass methods
    int iterations = 0;
};

struct AccuracySummary {
    std::string method;
    double mean_r = 0.0;   // per-problem r averaged; pac counts converged runs only
    double pooled_r = 0.0; // secondary: one r over all pooled (variable, value) pairs
    int defined_count = 0;
    int undefined_count = 0;
    int nonconverged_count = 0;
};

struct AccuracyStudy {
    std::vector<AccuracyRow> rows;
    std::vector<AccuracySummary> summary;
};

/// Correlates each estimator against exact frequencies over the pooled
/// (variable, value) pairs of each problem. Requires an oracle-filtered
/// corpus (every instance carries a census).
AccuracyStudy run_accuracy_study(const std::vector<CorpusInstance>& corpus,
                                 const std::vector<EstimatorKind>& methods,
                                 const PropagationConfig& cfg);

struct SearchRow {
    std::string instance_id;
    std::string heuristic;
    SearchOutcome outcome = SearchOutcome::Unsatisfiable;
    long backtracks = 0;
    long nodes = 0;
    long propagation_rounds = 0;
};

struct CurvePoint {
    std::string heuristic;
    long budget = 0;
    double fraction = 0.0; // of the corpus solved within `budget` backtracks
};

struct SearchStudy {
    std::vector<SearchRow> rows;
    std::vector<CurvePoint> curve; // sampled on a logarithmic budget grid
    std::vector<std::pair<std::string, long>> median_backtracks;
};

SearchStudy run_search_study(const std::vector<CorpusInstance>& corpus,
                             const std::vector<HeuristicSpec>& heuristics,
                             const SearchLimits& limits);

/// Scan setup for small two-loop instances that make the propagation
/// alternate between two belief poles.
struct OscillatorScanSpec {
    int max_seeds = 10000; // total instances tried
    std::vector<int> domain_sizes{2, 3};
    std::vector<double> tightnesses{0.2, 0.3, 0.4, 0.5};
    uint64_t seed = 1;
    int max_iter = 400;
    int window = 10;             // consecutive rounds the checks below must hold
    double pole_floor = 1e-3;    // one-round residual stays above
    double alternation_ceiling = 1e-10; // two-round residual stays below
};

struct OscillatorFind {
    bool found = false;
    int seeds_tried = 0;
    std::string description;
    CspInstance inst;
    PropagationResult trace;
};

/// Returns the first scanned instance with a verified period-2
/// trajectory; deterministic in the scan spec.
OscillatorFind find_oscillator(const OscillatorScanSpec& spec);

/// True when the trailing `window` rounds of a recorded trace satisfy the
/// period-2 verification thresholds.
bool verified_period2(const PropagationResult& trace, int window, double pole_floor,
                      double alternation_ceiling);

// ---- CSV output ----
// All tables are RFC-4180-style with a leading '#' metadata block (tool
// version, spec echo, seeds). Nothing time-dependent is written, so
// rerunning a study reproduces the bytes exactly.

std::string format_double(double v);
void write_comment_block(std::ostream& out, const std::vector<std::string>& meta);
void write_beliefs_csv(std::ostream& out, const std::vector<std::vector<double>>& beliefs,
                       const std::vector<std::string>& meta, const std::string& status);
void write_accuracy_rows_csv(std::ostream& out, const AccuracyStudy& study,
                             const std::vector<std::string>& meta);
void write_accuracy_summary_csv(std::ostream& out, const AccuracyStudy& study,
                                const std::vector<std::string>& meta);
void write_search_rows_csv(std::ostream& out, const SearchStudy& study,
                           const std::vector<std::string>& meta);
void write_curve_csv(std::ostream& out, const SearchStudy& study,
                     const std::vector<std::string>& meta);

} // namespace pacsp

#endif
