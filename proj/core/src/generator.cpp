#include "pacsp/generator.hpp"

#include <algorithm>
#include <sstream>

namespace pacsp {

uint64_t substream_key(uint64_t seed, uint64_t a, uint64_t b) {
    // Mix the three words through one SplitMix64 step each.
    SplitMix64 s(seed);
    uint64_t k = s.next() ^ (a * 0xd6e8feb86659fd93ULL);
    SplitMix64 t(k);
    return t.next() ^ (b * 0xa0761d6478bd642fULL);
}

void GenSpec::validate() const {
    if (n < 1 || m < 1)
        throw Error("generator requires n >= 1 and m >= 1");
    if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0)
        throw Error("p1 and p2 must lie in [0, 1]");
}

std::string GenSpec::describe() const {
    std::ostringstream os;
    os << "n=" << n << " m=" << m << " p1=" << p1 << " p2=" << p2 << " seed=" << seed;
    return os.str();
}

namespace {

AllowMatrix fill_matrix(int rows, int cols, double p2, SplitMix64& stream) {
    AllowMatrix mat(rows, cols, true);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (stream.next_unit() < p2)
                mat.set(i, j, false);
    return mat;
}

std::vector<std::pair<int, int>> decode_pruefer(const std::vector<int>& code, int n) {
    std::vector<int> degree(n, 1);
    for (int v : code)
        ++degree[v];
    int ptr = 0;
    while (degree[ptr] != 1)
        ++ptr;
    int leaf = ptr;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<size_t>(n - 1));
    for (int v : code) {
        edges.emplace_back(leaf, v);
        if (--degree[v] == 1 && v < ptr) {
            leaf = v;
        } else {
            ++ptr;
            while (degree[ptr] != 1)
                ++ptr;
            leaf = ptr;
        }
    }
    edges.emplace_back(leaf, n - 1);
    return edges;
}

} // namespace

CspInstance generate(const GenSpec& spec) {
    spec.validate();
    InstanceBuilder b(spec.n, spec.m);
    for (int x = 0; x < spec.n; ++x) {
        for (int y = x + 1; y < spec.n; ++y) {
            SplitMix64 stream(substream_key(spec.seed, static_cast<uint64_t>(x),
                                            static_cast<uint64_t>(y)));
            if (stream.next_unit() < spec.p1)
                b.add_constraint(x, y, fill_matrix(spec.m, spec.m, spec.p2, stream));
        }
    }
    return b.build();
}

CspInstance generate_tree(int n, int m, double p2, uint64_t seed) {
    GenSpec check{n, m, 0.0, p2, seed};
    check.validate();
    InstanceBuilder b(n, m);
    if (n >= 2) {
        SplitMix64 topo(substream_key(seed, 0x7472ee65ULL, 0));
        std::vector<int> pruefer(static_cast<size_t>(n - 2));
        for (auto& p : pruefer)
            p = static_cast<int>(topo.next_below(static_cast<uint64_t>(n)));
        for (auto [x, y] : decode_pruefer(pruefer, n)) {
            const int lo = std::min(x, y);
            const int hi = std::max(x, y);
            SplitMix64 stream(substream_key(seed, static_cast<uint64_t>(lo),
                                            static_cast<uint64_t>(hi)));
            stream.next_unit(); // presence draw, kept so matrices match generate()
            b.add_constraint(lo, hi, fill_matrix(m, m, p2, stream));
        }
    }
    return b.build();
}

} // namespace pacsp
