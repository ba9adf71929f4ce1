#include "tsms/series_name.hpp"

#include <charconv>

namespace tsms {

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string commutative_pair_name(const std::string& op, const std::string& a,
                                  const std::string& b) {
    const std::string& first = (b < a) ? b : a;
    const std::string& second = (b < a) ? a : b;
    return op + "(" + first + "," + second + ")";
}

} // namespace tsms
