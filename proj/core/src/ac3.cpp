#include "pacsp/ac3.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "pacsp/generator.hpp"

namespace pacsp {

DomainSet DomainSet::all_live(const CspInstance& inst) {
    DomainSet d;
    d.live.resize(inst.var_count());
    for (int x = 0; x < inst.var_count(); ++x)
        d.live[x].assign(inst.domain_size(x), 1);
    return d;
}

DomainSet DomainSet::from_instance(const CspInstance& inst) {
    DomainSet d;
    d.live.resize(inst.var_count());
    for (int x = 0; x < inst.var_count(); ++x)
        d.live[x] = inst.value_mask(x);
    return d;
}

int DomainSet::live_count(int x) const {
    const auto& row = live[x];
    return static_cast<int>(std::count(row.begin(), row.end(), uint8_t{1}));
}

std::vector<int> DomainSet::live_values(int x) const {
    std::vector<int> vals;
    for (int v = 0; v < static_cast<int>(live[x].size()); ++v)
        if (live[x][v])
            vals.push_back(v);
    return vals;
}

bool revise(const CspInstance& inst, DomainSet& doms, int i, int j) {
    const DirectedConstraint c = inst.constraint(i, j); // throws NoSuchEdgeError
    bool changed = false;
    for (int x = 0; x < c.rows(); ++x) {
        if (!doms.is_live(i, x))
            continue;
        bool supported = false;
        for (int y = 0; y < c.cols(); ++y) {
            if (doms.is_live(j, y) && c.allows(x, y)) {
                supported = true;
                break;
            }
        }
        if (!supported) {
            doms.kill(i, x);
            changed = true;
        }
    }
    return changed;
}

Ac3Result ac3(const CspInstance& inst, DomainSet start, QueueOrder order, uint64_t seed) {
    Ac3Result result;
    result.domains = std::move(start);
    DomainSet& doms = result.domains;

    for (int x = 0; x < inst.var_count(); ++x) {
        if (doms.empty_domain(x)) {
            result.status = Ac3Status::Wipeout;
            result.wiped_var = x;
            return result;
        }
    }

    // Directed arcs are identified as i * n + j for the in-queue flags.
    const int n = inst.var_count();
    std::deque<std::pair<int, int>> queue;
    std::vector<uint8_t> queued(static_cast<size_t>(n) * static_cast<size_t>(n), 0);
    auto enqueue = [&](int i, int j) {
        if (!queued[static_cast<size_t>(i) * n + j]) {
            queued[static_cast<size_t>(i) * n + j] = 1;
            queue.emplace_back(i, j);
        }
    };
    for (const Edge& e : inst.edges()) {
        enqueue(e.a, e.b);
        enqueue(e.b, e.a);
    }

    SplitMix64 rng(seed);
    while (!queue.empty()) {
        std::pair<int, int> arc;
        switch (order) {
        case QueueOrder::Fifo:
            arc = queue.front();
            queue.pop_front();
            break;
        case QueueOrder::Lifo:
            arc = queue.back();
            queue.pop_back();
            break;
        case QueueOrder::Random: {
            const size_t pick = static_cast<size_t>(rng.next_below(queue.size()));
            arc = queue[pick];
            queue[pick] = queue.back();
            queue.pop_back();
            break;
        }
        }
        const auto [k, m] = arc;
        queued[static_cast<size_t>(k) * n + m] = 0;
        const int before = doms.live_count(k);
        ++result.revise_calls;
        if (revise(inst, doms, k, m)) {
            result.removals += before - doms.live_count(k);
            if (doms.empty_domain(k)) {
                result.status = Ac3Status::Wipeout;
                result.wiped_var = k;
                return result;
            }
            for (const auto& nb : inst.neighbors(k))
                if (nb.var != m)
                    enqueue(nb.var, k);
        }
    }
    result.status = Ac3Status::Consistent;
    return result;
}

Ac3Result ac3(const CspInstance& inst) {
    return ac3(inst, DomainSet::from_instance(inst));
}

} // namespace pacsp
