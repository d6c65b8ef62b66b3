#ifndef PACSP_GENERATOR_HPP
#define PACSP_GENERATOR_HPP

#include <cstdint>

#include "pacsp/csp.hpp"

namespace pacsp {

/// SplitMix64 stream; fixed algorithm so corpora are identical across
/// platforms and releases.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, bound).
    uint64_t next_below(uint64_t bound) { return next() % bound; }

private:
    uint64_t state_;
};

/// Derives an independent substream for a keyed entity, so that the
/// random bits of one edge never depend on which other edges exist.
uint64_t substream_key(uint64_t seed, uint64_t a, uint64_t b);

/// Four-parameter random binary CSP model: each unordered pair becomes a
/// constraint with probability p1 (density); within a constraint each
/// value pair is independently disallowed with probability p2 (tightness).
struct GenSpec {
    int n = 1;
    int m = 1;
    double p1 = 0.0;
    double p2 = 0.0;
    uint64_t seed = 0;

    void validate() const;
    std::string describe() const;
};

/// Deterministic in GenSpec. Vacuous all-ones constraints are kept.
CspInstance generate(const GenSpec& spec);

/// Uniformly random labeled tree (random Prüfer sequence) with each edge
/// matrix filled by the p2 rule. Always singly connected.
CspInstance generate_tree(int n, int m, double p2, uint64_t seed);

} // namespace pacsp

#endif
