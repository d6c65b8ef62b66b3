#ifndef PACSP_BASELINES_HPP
#define PACSP_BASELINES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pacsp/csp.hpp"
#include "pacsp/oracle.hpp"
#include "pacsp/pac.hpp"

namespace pacsp {

/// Rooted spanning forest over the instance's vertices. parent[x] is -1
/// at each component root; edges index into the instance's edge list.
struct SpanningTree {
    int root = 0;
    std::vector<int> parent;
    std::vector<int> edges;
};

/// Per-variable probability vectors from one estimator, with enough
/// metadata to tell how they were produced.
struct EstimateReport {
    std::string method;
    std::vector<std::vector<double>> beliefs;
    std::string metadata;
    std::optional<PropagationStatus> status; // present for propagation-backed methods
    int iterations = 0;
};

/// Bottom-up solution counts over the tree's edges only: leaves count 1
/// per value, and each variable multiplies the compatible sums of its
/// children. The root's vector is the per-component solution count; the
/// others are subtree counts. Exact on singly-connected instances.
std::vector<std::vector<BigCount>> sst_counts(const CspInstance& inst, const SpanningTree& tree);

/// Directed single-pass propagation toward a designated sink: constraints
/// are oriented by the ordering, sources get uniform distributions, and
/// each variable combines its earlier neighbors' distributions. Returns
/// the sink's distribution (all-zero on dead support).
std::vector<double> up_estimate(const CspInstance& inst, const std::vector<int>& ordering,
                                int sink);

/// Reverse-BFS ordering from the sink (farthest first, sink last); on
/// trees this makes the sink distribution exact.
std::vector<int> up_default_ordering(const CspInstance& inst, int sink);

/// Per-tree distributions (re-rooted tree counts, normalized) combined by
/// componentwise product and renormalization. Every constraint edge must
/// appear in at least one tree.
std::vector<std::vector<double>> mst_estimate(const CspInstance& inst,
                                              const std::vector<SpanningTree>& forest);

/// MaxTightness: one maximum-weight spanning forest, weighted by the
/// disallowed-pair fraction, ties broken by (lower a, lower b).
/// EdgePartition: packs every edge into a short sequence of forests
/// (greedy first-fit with a single-exchange repair step).
enum class ForestStrategy { MaxTightness, EdgePartition };

/// `seed` is reserved for randomized strategies; both current strategies
/// are deterministic and ignore it.
std::vector<SpanningTree> build_spanning_forest(const CspInstance& inst, ForestStrategy strategy,
                                                uint64_t seed = 0);

/// Rebuilds the parent structure of `tree` from a new root.
SpanningTree reroot(const CspInstance& inst, const SpanningTree& tree, int new_root);

/// The pluggable estimators compared by the harness.
enum class EstimatorKind { Pac, Peleg, Sst, Up, Mst };

const char* to_string(EstimatorKind k);
std::optional<EstimatorKind> estimator_from_string(const std::string& name);

/// Uniform entry point: per-variable probability vectors for any method.
/// `cfg` applies to the propagation-backed methods (Pac, Peleg).
EstimateReport estimate_beliefs(const CspInstance& inst, EstimatorKind kind,
                                const PropagationConfig& cfg = {});

} // namespace pacsp

#endif
