#include "pacsp/csp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

namespace pacsp {

double AllowMatrix::tightness() const {
    if (bits_.empty())
        return 0.0;
    size_t zeros = 0;
    for (uint8_t b : bits_)
        zeros += b == 0;
    return static_cast<double>(zeros) / static_cast<double>(bits_.size());
}

bool AllowMatrix::all_ones() const {
    return std::all_of(bits_.begin(), bits_.end(), [](uint8_t b) { return b != 0; });
}

bool CspInstance::uniform_domains() const {
    return std::adjacent_find(domain_sizes_.begin(), domain_sizes_.end(),
                              std::not_equal_to<>()) == domain_sizes_.end();
}

const std::vector<CspInstance::Neighbor>& CspInstance::neighbors(int x) const {
    if (x < 0 || x >= var_count())
        throw IndexOutOfRangeError("variable index " + std::to_string(x) + " out of range");
    return adjacency_[x];
}

bool CspInstance::has_edge(int x, int y) const {
    if (x < 0 || x >= var_count() || y < 0 || y >= var_count())
        return false;
    const auto& adj = adjacency_[x];
    return std::any_of(adj.begin(), adj.end(),
                       [y](const Neighbor& nb) { return nb.var == y; });
}

DirectedConstraint CspInstance::constraint(int x, int y) const {
    if (x < 0 || x >= var_count() || y < 0 || y >= var_count())
        throw IndexOutOfRangeError("variable index out of range");
    for (const Neighbor& nb : adjacency_[x]) {
        if (nb.var == y) {
            const Edge& e = edges_[nb.edge];
            return DirectedConstraint(e, /*forward=*/e.a == x);
        }
    }
    throw NoSuchEdgeError("no constraint between " + std::to_string(x) + " and " + std::to_string(y));
}

double CspInstance::assignment_space() const {
    double total = 1.0;
    for (int m : domain_sizes_)
        total *= static_cast<double>(m);
    return total;
}

InstanceBuilder::InstanceBuilder(int n, int uniform_domain_size)
    : InstanceBuilder(n, std::vector<int>(static_cast<size_t>(std::max(n, 0)), uniform_domain_size)) {}

InstanceBuilder::InstanceBuilder(int n, std::vector<int> domain_sizes) {
    if (n < 1)
        throw IndexOutOfRangeError("variable count must be >= 1");
    if (static_cast<int>(domain_sizes.size()) != n)
        throw LengthMismatchError("domain size list does not match variable count");
    for (int m : domain_sizes)
        if (m < 1)
            throw IndexOutOfRangeError("domain sizes must be >= 1");
    inst_.domain_sizes_ = std::move(domain_sizes);
    inst_.adjacency_.resize(n);
    inst_.names_.resize(n);
    inst_.mask_.resize(n);
    for (int x = 0; x < n; ++x) {
        inst_.mask_[x].assign(inst_.domain_sizes_[x], 1);
        inst_.names_[x] = "x" + std::to_string(x);
    }
}

InstanceBuilder& InstanceBuilder::set_name(int x, std::string name) {
    if (x < 0 || x >= inst_.var_count())
        throw IndexOutOfRangeError("variable index out of range");
    inst_.names_[x] = std::move(name);
    return *this;
}

void InstanceBuilder::check_pair(int x, int y) {
    const int n = inst_.var_count();
    if (x < 0 || x >= n || y < 0 || y >= n)
        throw IndexOutOfRangeError("constraint endpoint out of range");
    if (x == y)
        throw SelfLoopError("self constraint on variable " + std::to_string(x));
    if (inst_.has_edge(x, y))
        throw DuplicateEdgeError("duplicate constraint between " + std::to_string(x) +
                                 " and " + std::to_string(y));
}

InstanceBuilder& InstanceBuilder::add_constraint(int x, int y,
                                                 const std::vector<std::pair<int, int>>& allowed) {
    check_pair(x, y);
    const int lo = std::min(x, y);
    const int hi = std::max(x, y);
    AllowMatrix m(inst_.domain_size(lo), inst_.domain_size(hi), false);
    for (auto [vx, vy] : allowed) {
        if (vx < 0 || vx >= inst_.domain_size(x) || vy < 0 || vy >= inst_.domain_size(y))
            throw IndexOutOfRangeError("allowed pair value out of domain bounds");
        if (x == lo)
            m.set(vx, vy, true);
        else
            m.set(vy, vx, true);
    }
    return add_constraint(lo, hi, std::move(m));
}

InstanceBuilder& InstanceBuilder::add_constraint(int x, int y, AllowMatrix allowed) {
    check_pair(x, y);
    const int lo = std::min(x, y);
    const int hi = std::max(x, y);
    // Matrix arrives oriented with rows over x; store rows over the lower index.
    if (allowed.rows() != inst_.domain_size(x) || allowed.cols() != inst_.domain_size(y))
        throw LengthMismatchError("allow matrix shape does not match domain sizes");
    AllowMatrix stored;
    if (x == lo) {
        stored = std::move(allowed);
    } else {
        stored = AllowMatrix(inst_.domain_size(lo), inst_.domain_size(hi), false);
        for (int i = 0; i < stored.rows(); ++i)
            for (int j = 0; j < stored.cols(); ++j)
                stored.set(i, j, allowed.at(j, i));
    }
    const int e = inst_.edge_count();
    inst_.edges_.push_back(Edge{lo, hi, std::move(stored)});
    inst_.adjacency_[lo].push_back({hi, e});
    inst_.adjacency_[hi].push_back({lo, e});
    return *this;
}

CspInstance InstanceBuilder::build() {
    if (built_)
        throw Error("InstanceBuilder is single-use");
    built_ = true;
    for (auto& adj : inst_.adjacency_)
        std::sort(adj.begin(), adj.end(),
                  [](const CspInstance::Neighbor& l, const CspInstance::Neighbor& r) {
                      return l.var < r.var;
                  });
    return std::move(inst_);
}

CspInstance build_instance(int n, const std::vector<int>& domain_sizes,
                           const std::vector<std::tuple<int, int, std::vector<std::pair<int, int>>>>& constraints) {
    InstanceBuilder b(n, domain_sizes);
    for (const auto& [x, y, pairs] : constraints)
        b.add_constraint(x, y, pairs);
    return b.build();
}

namespace {

// BFS eccentricity of start within its component.
int eccentricity(const CspInstance& inst, int start, std::vector<int>& dist) {
    dist.assign(inst.var_count(), -1);
    std::queue<int> q;
    q.push(start);
    dist[start] = 0;
    int ecc = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        ecc = std::max(ecc, dist[u]);
        for (const auto& nb : inst.neighbors(u)) {
            if (dist[nb.var] < 0) {
                dist[nb.var] = dist[u] + 1;
                q.push(nb.var);
            }
        }
    }
    return ecc;
}

} // namespace

GraphInfo graph_info(const CspInstance& inst) {
    const int n = inst.var_count();
    GraphInfo info;
    std::vector<int> comp(n, -1);
    int components = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0)
            continue;
        std::queue<int> q;
        q.push(s);
        comp[s] = components;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (const auto& nb : inst.neighbors(u)) {
                if (comp[nb.var] < 0) {
                    comp[nb.var] = components;
                    q.push(nb.var);
                }
            }
        }
        ++components;
    }
    info.component_count = components;
    info.connected = components == 1;
    const bool acyclic = inst.edge_count() == n - components;
    info.singly_connected = info.connected && acyclic;

    int diameter = 0;
    std::vector<int> dist;
    for (int s = 0; s < n; ++s)
        diameter = std::max(diameter, eccentricity(inst, s, dist));
    info.diameter = diameter;
    return info;
}

CspInstance condition(const CspInstance& inst, const std::map<int, int>& assignments) {
    for (auto [x, v] : assignments) {
        if (x < 0 || x >= inst.var_count())
            throw IndexOutOfRangeError("conditioned variable out of range");
        if (v < 0 || v >= inst.domain_size(x))
            throw IndexOutOfRangeError("conditioned value out of domain bounds");
    }
    CspInstance out = inst;
    if (!assignments.empty())
        out.conditioned_ = true;
    for (auto [x, v] : assignments) {
        auto& mask = out.mask_[x];
        for (int i = 0; i < static_cast<int>(mask.size()); ++i)
            if (i != v)
                mask[i] = 0;
    }
    for (Edge& e : out.edges_) {
        auto ita = assignments.find(e.a);
        auto itb = assignments.find(e.b);
        for (int i = 0; i < e.allow.rows(); ++i)
            for (int j = 0; j < e.allow.cols(); ++j) {
                const bool hit = (ita != assignments.end() && i != ita->second) ||
                                 (itb != assignments.end() && j != itb->second);
                if (hit)
                    e.allow.set(i, j, false);
            }
    }
    return out;
}

CspInstance permute_variables(const CspInstance& inst, const std::vector<int>& perm) {
    const int n = inst.var_count();
    if (static_cast<int>(perm.size()) != n)
        throw LengthMismatchError("permutation length does not match variable count");
    std::vector<int> inverse(n, -1);
    for (int i = 0; i < n; ++i) {
        if (perm[i] < 0 || perm[i] >= n || inverse[perm[i]] >= 0)
            throw IndexOutOfRangeError("not a permutation");
        inverse[perm[i]] = i;
    }
    std::vector<int> sizes(n);
    for (int i = 0; i < n; ++i)
        sizes[i] = inst.domain_size(perm[i]);
    InstanceBuilder b(n, sizes);
    for (const Edge& e : inst.edges()) {
        const int x = inverse[e.a];
        const int y = inverse[e.b];
        AllowMatrix m = e.allow; // rows over e.a
        if (x < y) {
            b.add_constraint(x, y, std::move(m));
        } else {
            AllowMatrix t(m.cols(), m.rows(), false);
            for (int i = 0; i < m.rows(); ++i)
                for (int j = 0; j < m.cols(); ++j)
                    t.set(j, i, m.at(i, j));
            b.add_constraint(y, x, std::move(t));
        }
    }
    return b.build();
}

} // namespace pacsp
