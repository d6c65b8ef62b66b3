#include "pacsp/oracle.hpp"

namespace pacsp {

namespace {

struct Enumerator {
    const CspInstance& inst;
    const std::optional<BigCount>& cap;
    SolutionCensus& census;
    std::vector<int> assigned;
    // Neighbors with lower index, the only ones assigned when a variable
    // is reached under the static ascending order.
    std::vector<std::vector<std::pair<int, DirectedConstraint>>> back_edges;

    Enumerator(const CspInstance& i, const std::optional<BigCount>& c, SolutionCensus& out)
        : inst(i), cap(c), census(out), assigned(i.var_count(), -1) {
        back_edges.resize(inst.var_count());
        for (int x = 0; x < inst.var_count(); ++x)
            for (const auto& nb : inst.neighbors(x))
                if (nb.var < x)
                    back_edges[x].emplace_back(nb.var, inst.constraint(x, nb.var));
    }

    // Returns false once the cap is exceeded.
    bool walk(int x) {
        if (x == inst.var_count()) {
            census.total += 1;
            for (int v = 0; v < inst.var_count(); ++v)
                census.usage[v][assigned[v]] += 1;
            if (cap && census.total > *cap) {
                census.truncated = true;
                return false;
            }
            return true;
        }
        for (int v = 0; v < inst.domain_size(x); ++v) {
            if (!inst.value_allowed(x, v))
                continue;
            bool ok = true;
            for (const auto& [y, c] : back_edges[x]) {
                if (!c.allows(v, assigned[y])) {
                    ok = false;
                    break;
                }
            }
            if (!ok)
                continue;
            assigned[x] = v;
            if (!walk(x + 1))
                return false;
        }
        assigned[x] = -1;
        return true;
    }
};

} // namespace

SolutionCensus enumerate(const CspInstance& inst, std::optional<BigCount> cap) {
    SolutionCensus census;
    census.usage.resize(inst.var_count());
    for (int x = 0; x < inst.var_count(); ++x)
        census.usage[x].assign(inst.domain_size(x), BigCount(0));
    Enumerator e(inst, cap, census);
    e.walk(0);
    return census;
}

std::vector<std::vector<double>> frequencies(const SolutionCensus& census) {
    if (census.truncated)
        throw TruncatedCensusError("cannot derive frequencies from a truncated census");
    std::vector<std::vector<double>> freqs(census.usage.size());
    const double total = census.total.convert_to<double>();
    for (size_t x = 0; x < census.usage.size(); ++x) {
        freqs[x].assign(census.usage[x].size(), 0.0);
        if (census.total == 0)
            continue;
        for (size_t v = 0; v < census.usage[x].size(); ++v)
            freqs[x][v] = census.usage[x][v].convert_to<double>() / total;
    }
    return freqs;
}

} // namespace pacsp
