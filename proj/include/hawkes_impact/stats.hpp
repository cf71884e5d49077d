#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace hawkes_impact {

struct MeanCI {
    double mean;
    double half_width;
};

/// Sample mean and normal-approximation half width at confidence `level`.
MeanCI mc_mean_ci(const std::vector<double>& samples, double level);

/// Welford accumulator; add() order determines the bits of the result.
class RunningStats {
public:
    void add(double x);
    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance (0 for fewer than two samples).
    double variance() const noexcept;
    /// Standard error of the mean.
    double stderr_mean() const noexcept;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Mean of complex samples; the standard error is that of the complex mean,
/// sqrt((var re + var im)/n).
struct ComplexEstimate {
    std::complex<double> mean;
    double stderr_mean;
};
ComplexEstimate complex_mean(const std::vector<std::complex<double>>& samples);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct LinearFit {
    double slope;
    double intercept;
    double slope_stderr;
    std::size_t points;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hawkes_impact
