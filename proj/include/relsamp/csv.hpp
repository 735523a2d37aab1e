#ifndef RELSAMP_CSV_HPP
#define RELSAMP_CSV_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relsamp {

/// Malformed input file; `line` is 1-based (0 when unknown).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, int line, const std::string& what);
    const std::string& source() const { return source_; }
    int line() const { return line_; }

private:
    std::string source_;
    int line_;
};

// Shortest round-trip text for a double ("%.17g").
std::string fmt_double(double v);

std::vector<std::string> split_csv(std::string_view line);

std::string_view trim(std::string_view s);

// Parses "#tag,key=value,key=value" into a map; throws ParseError if the
// tag differs or an item lacks '='.
std::map<std::string, std::string> parse_tagged_header(std::string_view line, std::string_view tag,
                                                       const std::string& source, int line_no);

double parse_double(std::string_view s, const std::string& source, int line_no);
long long parse_int(std::string_view s, const std::string& source, int line_no);
unsigned long long parse_u64(std::string_view s, const std::string& source, int line_no);

} // namespace relsamp

#endif
