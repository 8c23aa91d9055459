#include "mrm/format.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mrm/error.hpp"

namespace mrm {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
    return buf;
}

double round_sig(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
    return std::strtod(buf, nullptr);
}

double parse_double(std::string_view s) {
    const std::string str(s);
    if (str.empty()) throw ArgumentError("expected a number, got an empty string");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(str.c_str(), &end);
    if (end != str.c_str() + str.size() || errno == ERANGE || !std::isfinite(v))
        throw ArgumentError("not a finite number: '" + str + "'");
    return v;
}

std::vector<double> parse_double_list(std::string_view s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        out.push_back(parse_double(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace mrm
