#include "pacsp/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace pacsp {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        parent[b] = a;
        return true;
    }
};

// Tree adjacency restricted to the tree's own edges.
std::vector<std::vector<std::pair<int, int>>> tree_adjacency(const CspInstance& inst,
                                                             const SpanningTree& tree) {
    std::vector<std::vector<std::pair<int, int>>> adj(inst.var_count());
    for (int e : tree.edges) {
        if (e < 0 || e >= inst.edge_count())
            throw InvalidTreeError("tree references a nonexistent edge");
        const Edge& edge = inst.edge(e);
        adj[edge.a].emplace_back(edge.b, e);
        adj[edge.b].emplace_back(edge.a, e);
    }
    for (auto& a : adj)
        std::sort(a.begin(), a.end());
    return adj;
}

void validate_tree(const CspInstance& inst, const SpanningTree& tree) {
    const int n = inst.var_count();
    if (static_cast<int>(tree.parent.size()) != n)
        throw InvalidTreeError("parent array length does not match variable count");
    if (tree.root < 0 || tree.root >= n)
        throw InvalidTreeError("tree root out of range");
    UnionFind uf(n);
    for (int e : tree.edges) {
        if (e < 0 || e >= inst.edge_count())
            throw InvalidTreeError("tree references a nonexistent edge");
        const Edge& edge = inst.edge(e);
        if (!uf.unite(edge.a, edge.b))
            throw InvalidTreeError("tree edges contain a cycle");
    }
    for (int x = 0; x < n; ++x) {
        const int p = tree.parent[x];
        if (p == -1)
            continue;
        if (p < 0 || p >= n || !inst.has_edge(x, p))
            throw InvalidTreeError("parent pointer does not follow an instance edge");
    }
}

} // namespace

std::vector<std::vector<BigCount>> sst_counts(const CspInstance& inst, const SpanningTree& tree) {
    validate_tree(inst, tree);
    const int n = inst.var_count();
    std::vector<std::vector<int>> children(n);
    for (int x = 0; x < n; ++x)
        if (tree.parent[x] >= 0)
            children[tree.parent[x]].push_back(x);

    std::vector<std::vector<BigCount>> counts(n);
    // Children before parents: process in reverse topological order.
    std::vector<int> order;
    order.reserve(n);
    std::vector<int> stack;
    for (int x = 0; x < n; ++x)
        if (tree.parent[x] == -1)
            stack.push_back(x);
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        order.push_back(u);
        for (int c : children[u])
            stack.push_back(c);
    }
    if (static_cast<int>(order.size()) != n)
        throw InvalidTreeError("parent pointers do not reach every variable");

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int x = *it;
        const int m = inst.domain_size(x);
        counts[x].assign(m, BigCount(0));
        for (int v = 0; v < m; ++v) {
            if (!inst.value_allowed(x, v))
                continue;
            BigCount prod = 1;
            for (int c : children[x]) {
                const DirectedConstraint con = inst.constraint(x, c);
                BigCount sum = 0;
                for (int y = 0; y < con.cols(); ++y)
                    if (con.allows(v, y))
                        sum += counts[c][y];
                prod *= sum;
                if (prod == 0)
                    break;
            }
            counts[x][v] = prod;
        }
    }
    return counts;
}

std::vector<int> up_default_ordering(const CspInstance& inst, int sink) {
    const int n = inst.var_count();
    if (sink < 0 || sink >= n)
        throw IndexOutOfRangeError("sink out of range");
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    q.push(sink);
    dist[sink] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const auto& nb : inst.neighbors(u))
            if (dist[nb.var] < 0) {
                dist[nb.var] = dist[u] + 1;
                q.push(nb.var);
            }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Unreachable variables first, then decreasing distance; the sink ends up last.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const long da = dist[a] < 0 ? std::numeric_limits<long>::max() : dist[a];
        const long db = dist[b] < 0 ? std::numeric_limits<long>::max() : dist[b];
        if (da != db)
            return da > db;
        return a < b;
    });
    return order;
}

std::vector<double> up_estimate(const CspInstance& inst, const std::vector<int>& ordering,
                                int sink) {
    const int n = inst.var_count();
    if (static_cast<int>(ordering.size()) != n)
        throw InvalidOrderingError("ordering length does not match variable count");
    std::vector<int> position(n, -1);
    for (int t = 0; t < n; ++t) {
        const int x = ordering[t];
        if (x < 0 || x >= n || position[x] >= 0)
            throw InvalidOrderingError("ordering is not a permutation");
        position[x] = t;
    }
    if (ordering.back() != sink)
        throw InvalidOrderingError("sink must be the last variable in the ordering");

    std::vector<std::vector<double>> dist(n);
    for (int t = 0; t < n; ++t) {
        const int x = ordering[t];
        const int m = inst.domain_size(x);
        std::vector<double> d(m, 0.0);
        double mass = 0.0;
        for (int v = 0; v < m; ++v) {
            double p = inst.value_allowed(x, v) ? 1.0 : 0.0;
            for (const auto& nb : inst.neighbors(x)) {
                if (position[nb.var] >= t)
                    continue; // constraint directed away; not a parent
                const DirectedConstraint con = inst.constraint(x, nb.var);
                double sum = 0.0;
                for (int y = 0; y < con.cols(); ++y)
                    if (con.allows(v, y))
                        sum += dist[nb.var][y];
                p *= sum;
            }
            d[v] = p;
            mass += p;
        }
        if (mass > 0.0)
            for (double& v : d)
                v /= mass;
        else
            std::fill(d.begin(), d.end(), 0.0);
        dist[x] = std::move(d);
    }
    return dist[sink];
}

std::vector<std::vector<double>> mst_estimate(const CspInstance& inst,
                                              const std::vector<SpanningTree>& forest) {
    const int n = inst.var_count();
    std::vector<uint8_t> covered(inst.edge_count(), 0);
    for (const auto& tree : forest)
        for (int e : tree.edges) {
            if (e < 0 || e >= inst.edge_count())
                throw InvalidTreeError("tree references a nonexistent edge");
            covered[e] = 1;
        }
    for (int e = 0; e < inst.edge_count(); ++e)
        if (!covered[e])
            throw EdgeNotCoveredError("constraint edge " + std::to_string(e) +
                                      " is not covered by any tree");

    std::vector<std::vector<double>> combined(n);
    for (int x = 0; x < n; ++x)
        combined[x].assign(inst.domain_size(x), 1.0);

    for (const auto& tree : forest) {
        for (int x = 0; x < n; ++x) {
            const SpanningTree rooted = reroot(inst, tree, x);
            const auto counts = sst_counts(inst, rooted);
            double mass = 0.0;
            std::vector<double> p(inst.domain_size(x), 0.0);
            for (int v = 0; v < inst.domain_size(x); ++v) {
                p[v] = counts[x][v].convert_to<double>();
                mass += p[v];
            }
            for (int v = 0; v < inst.domain_size(x); ++v)
                combined[x][v] *= mass > 0.0 ? p[v] / mass : 0.0;
        }
    }
    for (int x = 0; x < n; ++x) {
        double mass = std::accumulate(combined[x].begin(), combined[x].end(), 0.0);
        if (mass > 0.0)
            for (double& v : combined[x])
                v /= mass;
        else
            std::fill(combined[x].begin(), combined[x].end(), 0.0);
    }
    return combined;
}

SpanningTree reroot(const CspInstance& inst, const SpanningTree& tree, int new_root) {
    const auto adj = tree_adjacency(inst, tree);
    SpanningTree out;
    out.root = new_root;
    out.edges = tree.edges;
    out.parent.assign(inst.var_count(), -2); // -2 marks unvisited
    std::vector<int> starts{new_root};
    for (int x = 0; x < inst.var_count(); ++x)
        starts.push_back(x); // remaining components rooted at their lowest unvisited vertex
    for (int s : starts) {
        if (out.parent[s] != -2)
            continue;
        out.parent[s] = -1;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (auto [v, e] : adj[u]) {
                if (out.parent[v] == -2) {
                    out.parent[v] = u;
                    q.push(v);
                }
            }
        }
    }
    return out;
}

std::vector<SpanningTree> build_spanning_forest(const CspInstance& inst, ForestStrategy strategy,
                                                uint64_t /*seed*/) {
    const int n = inst.var_count();
    std::vector<int> edge_order(inst.edge_count());
    std::iota(edge_order.begin(), edge_order.end(), 0);

    if (strategy == ForestStrategy::MaxTightness) {
        std::sort(edge_order.begin(), edge_order.end(), [&](int l, int r) {
            const double tl = inst.edge(l).allow.tightness();
            const double tr = inst.edge(r).allow.tightness();
            if (tl != tr)
                return tl > tr;
            if (inst.edge(l).a != inst.edge(r).a)
                return inst.edge(l).a < inst.edge(r).a;
            return inst.edge(l).b < inst.edge(r).b;
        });
        UnionFind uf(n);
        SpanningTree tree;
        for (int e : edge_order)
            if (uf.unite(inst.edge(e).a, inst.edge(e).b))
                tree.edges.push_back(e);
        std::sort(tree.edges.begin(), tree.edges.end());
        tree = reroot(inst, tree, 0);
        return {tree};
    }

    // EdgePartition: first-fit into acyclic bins; when an edge fits
    // nowhere, try moving one edge off its cycle into another bin before
    // opening a new one.
    std::vector<std::vector<int>> bins;
    auto acyclic_with = [&](const std::vector<int>& bin, int extra) {
        UnionFind uf(n);
        for (int e : bin)
            uf.unite(inst.edge(e).a, inst.edge(e).b);
        return uf.unite(inst.edge(extra).a, inst.edge(extra).b);
    };
    auto cycle_edges = [&](const std::vector<int>& bin, int extra) {
        // Path between extra's endpoints inside the bin.
        std::vector<std::vector<std::pair<int, int>>> adj(n);
        for (int e : bin) {
            adj[inst.edge(e).a].emplace_back(inst.edge(e).b, e);
            adj[inst.edge(e).b].emplace_back(inst.edge(e).a, e);
        }
        const int src = inst.edge(extra).a;
        const int dst = inst.edge(extra).b;
        std::vector<int> via_edge(n, -1), via_node(n, -1);
        std::queue<int> q;
        q.push(src);
        via_node[src] = src;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (auto [v, e] : adj[u])
                if (via_node[v] < 0) {
                    via_node[v] = u;
                    via_edge[v] = e;
                    q.push(v);
                }
        }
        std::vector<int> path;
        for (int u = dst; u != src && u >= 0; u = via_node[u])
            path.push_back(via_edge[u]);
        return path;
    };

    for (int e : edge_order) {
        bool placed = false;
        for (auto& bin : bins) {
            if (acyclic_with(bin, e)) {
                bin.push_back(e);
                placed = true;
                break;
            }
        }
        if (placed)
            continue;
        for (size_t f = 0; f < bins.size() && !placed; ++f) {
            for (int moved : cycle_edges(bins[f], e)) {
                for (size_t g = 0; g < bins.size() && !placed; ++g) {
                    if (g == f)
                        continue;
                    if (acyclic_with(bins[g], moved)) {
                        auto& bin = bins[f];
                        bin.erase(std::find(bin.begin(), bin.end(), moved));
                        bins[g].push_back(moved);
                        bin.push_back(e);
                        placed = true;
                    }
                }
                if (placed)
                    break;
            }
        }
        if (!placed)
            bins.push_back({e});
    }

    std::vector<SpanningTree> forest;
    forest.reserve(bins.size());
    for (auto& bin : bins) {
        std::sort(bin.begin(), bin.end());
        SpanningTree t;
        t.edges = std::move(bin);
        forest.push_back(reroot(inst, t, 0));
    }
    return forest;
}

const char* to_string(EstimatorKind k) {
    switch (k) {
    case EstimatorKind::Pac: return "pac";
    case EstimatorKind::Peleg: return "peleg";
    case EstimatorKind::Sst: return "sst";
    case EstimatorKind::Up: return "up";
    case EstimatorKind::Mst: return "mst";
    }
    return "unknown";
}

std::optional<EstimatorKind> estimator_from_string(const std::string& name) {
    if (name == "pac") return EstimatorKind::Pac;
    if (name == "peleg") return EstimatorKind::Peleg;
    if (name == "sst") return EstimatorKind::Sst;
    if (name == "up") return EstimatorKind::Up;
    if (name == "mst") return EstimatorKind::Mst;
    return std::nullopt;
}

EstimateReport estimate_beliefs(const CspInstance& inst, EstimatorKind kind,
                                const PropagationConfig& cfg) {
    const int n = inst.var_count();
    EstimateReport report;
    report.method = to_string(kind);
    switch (kind) {
    case EstimatorKind::Pac:
    case EstimatorKind::Peleg: {
        PropagationConfig c = cfg;
        c.mode = kind == EstimatorKind::Peleg ? PropagationMode::Peleg : PropagationMode::Standard;
        const PropagationResult r = propagate(inst, c);
        report.beliefs = r.beliefs;
        report.status = r.status;
        report.iterations = r.iterations;
        report.metadata = std::string("status=") + to_string(r.status);
        return report;
    }
    case EstimatorKind::Sst: {
        const auto forest = build_spanning_forest(inst, ForestStrategy::MaxTightness);
        const SpanningTree& tree = forest.front();
        report.beliefs.resize(n);
        for (int x = 0; x < n; ++x) {
            const auto counts = sst_counts(inst, reroot(inst, tree, x));
            report.beliefs[x].assign(inst.domain_size(x), 0.0);
            double mass = 0.0;
            for (int v = 0; v < inst.domain_size(x); ++v) {
                report.beliefs[x][v] = counts[x][v].convert_to<double>();
                mass += report.beliefs[x][v];
            }
            if (mass > 0.0)
                for (double& p : report.beliefs[x])
                    p /= mass;
            else
                std::fill(report.beliefs[x].begin(), report.beliefs[x].end(), 0.0);
        }
        report.metadata = "strategy=maxtightness tree_edges=" + std::to_string(tree.edges.size());
        return report;
    }
    case EstimatorKind::Up: {
        report.beliefs.resize(n);
        for (int x = 0; x < n; ++x)
            report.beliefs[x] = up_estimate(inst, up_default_ordering(inst, x), x);
        report.metadata = "ordering=reverse-bfs-per-sink";
        return report;
    }
    case EstimatorKind::Mst: {
        const auto forest = build_spanning_forest(inst, ForestStrategy::EdgePartition);
        report.beliefs = mst_estimate(inst, forest);
        report.metadata = "strategy=edgepartition trees=" + std::to_string(forest.size());
        return report;
    }
    }
    throw Error("unreachable estimator kind");
}

} // namespace pacsp
