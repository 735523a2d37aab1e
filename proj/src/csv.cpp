#include "relsamp/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace relsamp {

ParseError::ParseError(std::string source, int line, const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_tagged_header(std::string_view line, std::string_view tag,
                                                       const std::string& source, int line_no) {
    const auto items = split_csv(line);
    if (items.empty() || items[0] != "#" + std::string(tag))
        throw ParseError(source, line_no, "expected header starting with '#" + std::string(tag) + "'");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < items.size(); ++i) {
        const auto eq = items[i].find('=');
        if (eq == std::string::npos) throw ParseError(source, line_no, "header item '" + items[i] + "' lacks '='");
        kv[std::string(trim(std::string_view(items[i]).substr(0, eq)))] =
            std::string(trim(std::string_view(items[i]).substr(eq + 1)));
    }
    return kv;
}

double parse_double(std::string_view s, const std::string& source, int line_no) {
    const std::string str(trim(s));
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size() || errno == ERANGE)
        throw ParseError(source, line_no, "invalid number '" + str + "'");
    return v;
}

long long parse_int(std::string_view s, const std::string& source, int line_no) {
    const std::string str(trim(s));
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(str.c_str(), &end, 10);
    if (str.empty() || end != str.c_str() + str.size() || errno == ERANGE)
        throw ParseError(source, line_no, "invalid integer '" + str + "'");
    return v;
}

unsigned long long parse_u64(std::string_view s, const std::string& source, int line_no) {
    const std::string str(trim(s));
    char* end = nullptr;
    errno = 0;
    if (!str.empty() && str[0] == '-') throw ParseError(source, line_no, "invalid unsigned integer '" + str + "'");
    const unsigned long long v = std::strtoull(str.c_str(), &end, 10);
    if (str.empty() || end != str.c_str() + str.size() || errno == ERANGE)
        throw ParseError(source, line_no, "invalid unsigned integer '" + str + "'");
    return v;
}

} // namespace relsamp
