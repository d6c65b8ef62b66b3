#ifndef PACSP_TEXT_IO_HPP
#define PACSP_TEXT_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pacsp/csp.hpp"

namespace pacsp {

/// Parses the line-based instance format:
///
///   csp <n> <m0> <m1> ... <m_{n-1}>     (or: csp <n> * <m>)
///   con <X> <Y> <k>
///   <i> <j>                             (k lines of allowed pairs)
///
/// '#' starts a comment; parsing is strict and unknown directives fail.
CspInstance parse_instance(std::istream& in);
CspInstance parse_instance_string(const std::string& text);
CspInstance load_instance(const std::string& path);

/// Writes the same format. Header comments are emitted verbatim after '# '.
void write_instance(std::ostream& out, const CspInstance& inst,
                    const std::vector<std::string>& header_comments = {});
void save_instance(const std::string& path, const CspInstance& inst,
                   const std::vector<std::string>& header_comments = {});

} // namespace pacsp

#endif
