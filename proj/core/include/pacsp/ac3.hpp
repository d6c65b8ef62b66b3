#ifndef PACSP_AC3_HPP
#define PACSP_AC3_HPP

#include <cstdint>
#include <vector>

#include "pacsp/csp.hpp"

namespace pacsp {

/// Live-value overlay; the instance itself is never mutated. Membership
/// only shrinks under arc consistency.
struct DomainSet {
    std::vector<std::vector<uint8_t>> live;

    static DomainSet all_live(const CspInstance& inst);
    /// Seeded from the instance's unary mask (equals all_live when unconditioned).
    static DomainSet from_instance(const CspInstance& inst);

    bool is_live(int x, int v) const { return live[x][v] != 0; }
    void kill(int x, int v) { live[x][v] = 0; }
    int live_count(int x) const;
    bool empty_domain(int x) const { return live_count(x) == 0; }
    std::vector<int> live_values(int x) const;

    bool operator==(const DomainSet&) const = default;
};

/// Order in which queued arcs are processed. The fixpoint is the same
/// for every discipline; Fifo is the deterministic default.
enum class QueueOrder { Fifo, Lifo, Random };

enum class Ac3Status { Consistent, Wipeout };

struct Ac3Result {
    Ac3Status status = Ac3Status::Consistent;
    int wiped_var = -1;
    DomainSet domains;
    long revise_calls = 0;
    long removals = 0;
};

/// Removes values of i lacking any live supporter in j. Returns true if
/// anything was removed. Throws NoSuchEdgeError when {i, j} is not
/// constrained.
bool revise(const CspInstance& inst, DomainSet& doms, int i, int j);

/// Work-queue arc consistency. The queue is seeded with both directions
/// of every edge; after revise(k, m) removes values, all arcs (i, k) with
/// i != m are re-enqueued. Stops at the first emptied domain.
Ac3Result ac3(const CspInstance& inst, DomainSet start, QueueOrder order = QueueOrder::Fifo,
              uint64_t seed = 0);
Ac3Result ac3(const CspInstance& inst);

} // namespace pacsp

#endif
