#ifndef PACSP_ORACLE_HPP
#define PACSP_ORACLE_HPP

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pacsp/csp.hpp"

namespace pacsp {

using BigCount = boost::multiprecision::cpp_int;

/// Ground truth from exhaustive enumeration: exact solution count plus
/// per-(variable, value) usage counts.
struct SolutionCensus {
    BigCount total = 0;
    std::vector<std::vector<BigCount>> usage; // usage[x][v]
    bool truncated = false;                   // cap exceeded; counts are partial

    bool satisfiable() const { return total > 0; }
};

/// Depth-first enumeration in ascending variable order, checking each new
/// value against already-assigned neighbors. Visits every solution once.
/// With a cap, stops as soon as the solution count exceeds it.
SolutionCensus enumerate(const CspInstance& inst,
                         std::optional<BigCount> cap = std::nullopt);

/// usage / total per variable; all-zero vectors when unsatisfiable.
/// Throws TruncatedCensusError on a truncated census (partial frequencies
/// would be biased).
std::vector<std::vector<double>> frequencies(const SolutionCensus& census);

} // namespace pacsp

#endif
