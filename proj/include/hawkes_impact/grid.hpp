#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hawkes_impact {

/// Uniform grid 0, h, 2h, ..., (size-1)h.
class UniformGrid {
public:
    UniformGrid() = default;
    UniformGrid(double step, std::size_t size);

    /// Grid on [0, t_max] with `intervals` cells.
    static UniformGrid over(double t_max, std::size_t intervals);

    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return size_; }
    double operator[](std::size_t i) const noexcept { return step_ * static_cast<double>(i); }
    double back() const noexcept { return (*this)[size_ - 1]; }
    std::vector<double> points() const;

private:
    double step_ = 1.0;
    std::size_t size_ = 1;
};

/// A real function tabulated on a uniform grid. Immutable after construction.
struct SampledFunction {
    UniformGrid grid;
    std::vector<double> values;

    /// Piecewise-linear interpolation; clamps to the end values outside the grid.
    double interpolate(double t) const;
    /// Trapezoidal integral over the whole grid.
    double integral() const;
};

/// `n` points from lo to hi with constant ratio; lo, hi > 0.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);
/// `n` points from lo to hi inclusive.
std::vector<double> lin_spaced(double lo, double hi, std::size_t n);

}  // namespace hawkes_impact
