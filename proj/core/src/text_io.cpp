#include "pacsp/text_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pacsp {

namespace {

struct TokenReader {
    std::istream& in;
    int line_no = 0;
    std::istringstream tokens{};

    // Advances to the next non-empty line, with comments stripped.
    bool next_line() {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto pos = line.find('#'); pos != std::string::npos)
                line.erase(pos);
            std::istringstream probe(line);
            std::string tok;
            if (probe >> tok) {
                tokens = std::istringstream(line);
                return true;
            }
        }
        return false;
    }

    std::string expect_token(const char* what) {
        std::string tok;
        if (!(tokens >> tok))
            throw ParseError(std::string("expected ") + what, line_no);
        return tok;
    }

    long expect_int(const char* what) {
        const std::string tok = expect_token(what);
        try {
            size_t used = 0;
            long v = std::stol(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'", line_no);
        }
    }

    void expect_end() {
        std::string tok;
        if (tokens >> tok)
            throw ParseError("trailing token '" + tok + "'", line_no);
    }
};

} // namespace

CspInstance parse_instance(std::istream& in) {
    TokenReader r{in};
    if (!r.next_line())
        throw ParseError("empty input, expected 'csp' header", r.line_no + 1);

    if (r.expect_token("'csp' directive") != "csp")
        throw ParseError("first directive must be 'csp'", r.line_no);
    const long n = r.expect_int("variable count");
    if (n < 1)
        throw ParseError("variable count must be >= 1", r.line_no);

    std::vector<int> sizes;
    const std::string first = r.expect_token("domain size");
    if (first == "*") {
        const long m = r.expect_int("uniform domain size");
        if (m < 1)
            throw ParseError("domain size must be >= 1", r.line_no);
        sizes.assign(static_cast<size_t>(n), static_cast<int>(m));
    } else {
        long m0 = 0;
        try {
            m0 = std::stol(first);
        } catch (const std::exception&) {
            throw ParseError("expected domain size or '*', got '" + first + "'", r.line_no);
        }
        sizes.push_back(static_cast<int>(m0));
        for (long i = 1; i < n; ++i)
            sizes.push_back(static_cast<int>(r.expect_int("domain size")));
        for (int m : sizes)
            if (m < 1)
                throw ParseError("domain sizes must be >= 1", r.line_no);
    }
    r.expect_end();

    InstanceBuilder b(static_cast<int>(n), sizes);
    while (r.next_line()) {
        const std::string directive = r.expect_token("directive");
        if (directive != "con")
            throw ParseError("unknown directive '" + directive + "'", r.line_no);
        const long x = r.expect_int("constraint endpoint X");
        const long y = r.expect_int("constraint endpoint Y");
        const long k = r.expect_int("allowed pair count");
        r.expect_end();
        if (x < 0 || x >= n || y < 0 || y >= n)
            throw ParseError("constraint endpoint out of range", r.line_no);
        if (k < 0)
            throw ParseError("allowed pair count must be >= 0", r.line_no);
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(static_cast<size_t>(k));
        for (long p = 0; p < k; ++p) {
            if (!r.next_line())
                throw ParseError("unexpected end of input inside 'con' block", r.line_no + 1);
            const long i = r.expect_int("allowed pair value i");
            const long j = r.expect_int("allowed pair value j");
            r.expect_end();
            pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
        try {
            b.add_constraint(static_cast<int>(x), static_cast<int>(y), pairs);
        } catch (const Error& e) {
            throw ParseError(e.what(), r.line_no);
        }
    }
    return b.build();
}

CspInstance parse_instance_string(const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
}

CspInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open instance file: " + path);
    return parse_instance(in);
}

void write_instance(std::ostream& out, const CspInstance& inst,
                    const std::vector<std::string>& header_comments) {
    for (const auto& c : header_comments)
        out << "# " << c << "\n";
    const int n = inst.var_count();
    out << "csp " << n;
    if (inst.uniform_domains()) {
        out << " * " << inst.domain_size(0) << "\n";
    } else {
        for (int x = 0; x < n; ++x)
            out << ' ' << inst.domain_size(x);
        out << "\n";
    }
    for (const Edge& e : inst.edges()) {
        std::ostringstream pairs;
        int k = 0;
        for (int i = 0; i < e.allow.rows(); ++i)
            for (int j = 0; j < e.allow.cols(); ++j)
                if (e.allow.at(i, j)) {
                    pairs << i << ' ' << j << "\n";
                    ++k;
                }
        out << "con " << e.a << ' ' << e.b << ' ' << k << "\n" << pairs.str();
    }
}

void save_instance(const std::string& path, const CspInstance& inst,
                   const std::vector<std::string>& header_comments) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open output file: " + path);
    write_instance(out, inst, header_comments);
}

} // namespace pacsp
