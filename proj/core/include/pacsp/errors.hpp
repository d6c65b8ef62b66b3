#ifndef PACSP_ERRORS_HPP
#define PACSP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pacsp {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SelfLoopError : public Error {
public:
    using Error::Error;
};

class DuplicateEdgeError : public Error {
public:
    using Error::Error;
};

class IndexOutOfRangeError : public Error {
public:
    using Error::Error;
};

class NoSuchEdgeError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidTreeError : public Error {
public:
    using Error::Error;
};

class InvalidOrderingError : public Error {
public:
    using Error::Error;
};

class EdgeNotCoveredError : public Error {
public:
    using Error::Error;
};

class TruncatedCensusError : public Error {
public:
    using Error::Error;
};

class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

/// Non-finite value (NaN/overflow) observed during numeric propagation.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& what, int iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    int iteration() const { return iteration_; }

private:
    int iteration_;
};

/// Malformed instance or spec file; carries the 1-based source line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const { return line_; }

private:
    int line_ = 0;
};

} // namespace pacsp

#endif
