#ifndef PACSP_CSP_HPP
#define PACSP_CSP_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pacsp/errors.hpp"

namespace pacsp {

/// Dense 0/1 matrix of allowed value pairs for one binary constraint.
/// Entry (i, j) is 1 iff the pair (value i, value j) is allowed.
class AllowMatrix {
public:
    AllowMatrix() = default;
    AllowMatrix(int rows, int cols, bool fill = true)
        : rows_(rows), cols_(cols),
          bits_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill ? 1 : 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool at(int i, int j) const {
        return bits_[static_cast<size_t>(i) * cols_ + j] != 0;
    }
    void set(int i, int j, bool allowed) {
        bits_[static_cast<size_t>(i) * cols_ + j] = allowed ? 1 : 0;
    }

    /// Fraction of disallowed entries (the constraint's tightness).
    double tightness() const;

    bool all_ones() const;
    bool operator==(const AllowMatrix&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<uint8_t> bits_;
};

/// One undirected constraint edge. The matrix is stored once, oriented
/// with rows over the lower-indexed endpoint; the opposite direction is
/// always read through a transpose view, never copied.
struct Edge {
    int a = 0; // a < b
    int b = 0;
    AllowMatrix allow; // rows over D_a, cols over D_b
};

/// Read-only directed view of a constraint: rows range over `from`'s
/// domain, columns over `to`'s.
class DirectedConstraint {
public:
    DirectedConstraint(const Edge& e, bool forward)
        : edge_(&e), forward_(forward) {}

    int from() const { return forward_ ? edge_->a : edge_->b; }
    int to() const { return forward_ ? edge_->b : edge_->a; }
    int rows() const { return forward_ ? edge_->allow.rows() : edge_->allow.cols(); }
    int cols() const { return forward_ ? edge_->allow.cols() : edge_->allow.rows(); }

    bool allows(int i, int j) const {
        return forward_ ? edge_->allow.at(i, j) : edge_->allow.at(j, i);
    }

private:
    const Edge* edge_;
    bool forward_;
};

/// Structural summary of the constraint graph.
struct GraphInfo {
    bool connected = false;
    bool singly_connected = false; // connected and acyclic
    int diameter = 0;              // longest shortest path, in edges
    int component_count = 0;
};

/// A binary CSP over index domains 0..m-1. Immutable once built; safe to
/// share read-only across threads.
///
/// Values removed by conditioning are tracked in a per-variable unary
/// mask as well as by zeroed matrix rows, so variables without any
/// constraint still honour their assignment.
class CspInstance {
public:
    struct Neighbor {
        int var;
        int edge; // index into edges()
    };

    int var_count() const { return static_cast<int>(domain_sizes_.size()); }
    int domain_size(int x) const { return domain_sizes_[x]; }
    const std::vector<int>& domain_sizes() const { return domain_sizes_; }
    bool uniform_domains() const;

    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Edge& edge(int e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Neighbors of x in ascending variable order.
    const std::vector<Neighbor>& neighbors(int x) const;

    bool has_edge(int x, int y) const;
    /// Directed view with rows over x's domain. Throws NoSuchEdgeError.
    DirectedConstraint constraint(int x, int y) const;

    /// Unary mask from conditioning; all values allowed on a fresh instance.
    bool value_allowed(int x, int v) const { return mask_[x][v] != 0; }
    const std::vector<uint8_t>& value_mask(int x) const { return mask_[x]; }
    bool conditioned() const { return conditioned_; }

    const std::string& name(int x) const { return names_[x]; }

    /// Count of complete assignments, as a double (may overflow to inf).
    double assignment_space() const;

private:
    friend class InstanceBuilder;
    friend CspInstance condition(const CspInstance&, const std::map<int, int>&);

    std::vector<int> domain_sizes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::vector<std::vector<uint8_t>> mask_;
    std::vector<std::string> names_;
    bool conditioned_ = false;
};

/// Single-use builder; validates indices, rejects self-loops and
/// duplicate unordered pairs.
class InstanceBuilder {
public:
    InstanceBuilder(int n, int uniform_domain_size);
    InstanceBuilder(int n, std::vector<int> domain_sizes);

    InstanceBuilder& set_name(int x, std::string name);

    /// Adds {x, y} allowing exactly the listed (value-of-x, value-of-y) pairs.
    InstanceBuilder& add_constraint(int x, int y,
                                    const std::vector<std::pair<int, int>>& allowed);
    /// Adds {x, y} with an explicit matrix (rows over x's domain).
    InstanceBuilder& add_constraint(int x, int y, AllowMatrix allowed);

    CspInstance build();

private:
    void check_pair(int x, int y);

    CspInstance inst_;
    bool built_ = false;
};

/// Convenience wrapper over InstanceBuilder.
CspInstance build_instance(int n, const std::vector<int>& domain_sizes,
                           const std::vector<std::tuple<int, int, std::vector<std::pair<int, int>>>>& constraints);

GraphInfo graph_info(const CspInstance& inst);

/// Restricts each assigned variable to its single value. Domain lengths
/// are unchanged: disallowed matrix rows/columns are zeroed and the
/// unary mask updated, so belief/message shapes stay stable.
CspInstance condition(const CspInstance& inst, const std::map<int, int>& assignments);

/// Relabels variables: new index i holds old variable perm[i].
CspInstance permute_variables(const CspInstance& inst, const std::vector<int>& perm);

} // namespace pacsp

#endif
