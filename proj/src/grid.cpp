#include "hawkes_impact/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hawkes_impact/errors.hpp"

namespace hawkes_impact {

UniformGrid::UniformGrid(double step, std::size_t size) : step_(step), size_(size) {
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("grid step must be positive");
    if (size < 1) throw DomainError("grid needs at least one point");
}

UniformGrid UniformGrid::over(double t_max, std::size_t intervals) {
    if (intervals < 1) throw DomainError("grid needs at least one interval");
    return UniformGrid(t_max / static_cast<double>(intervals), intervals + 1);
}

std::vector<double> UniformGrid::points() const {
    std::vector<double> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = (*this)[i];
    return out;
}

double SampledFunction::interpolate(double t) const {
    const double h = grid.step();
    if (t <= 0.0) return values.front();
    const double pos = t / h;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

double SampledFunction::integral() const {
    if (values.size() < 2) return 0.0;
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * grid.step();
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log_spaced: need 0 < lo < hi, n >= 2");
    std::vector<double> out(n);
    const double r = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(r * static_cast<double>(i));
    out.back() = hi;
    return out;
}

std::vector<double> lin_spaced(double lo, double hi, std::size_t n) {
    if (n < 2) throw DomainError("lin_spaced: n >= 2");
    std::vector<double> out(n);
    const double d = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + d * static_cast<double>(i);
    out.back() = hi;
    return out;
}

}  // namespace hawkes_impact
