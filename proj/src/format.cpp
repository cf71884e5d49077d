#include "hawkes_impact/format.hpp"

#include <charconv>

namespace hawkes_impact {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace hawkes_impact
