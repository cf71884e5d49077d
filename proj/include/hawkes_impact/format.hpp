#pragma once

#include <string>

namespace hawkes_impact {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace hawkes_impact
