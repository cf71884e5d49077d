#include "hawkes_impact/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "hawkes_impact/errors.hpp"

namespace hawkes_impact {

MeanCI mc_mean_ci(const std::vector<double>& samples, double level) {
    if (samples.size() < 2) throw DomainError("mc_mean_ci: need at least two samples");
    if (!(level > 0.0) || !(level < 1.0)) throw DomainError("mc_mean_ci: level must lie in (0,1)");
    RunningStats s;
    for (double x : samples) s.add(x);
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
    return {s.mean(), z * s.stderr_mean()};
}

void RunningStats::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

double RunningStats::variance() const noexcept {
    return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::stderr_mean() const noexcept {
    return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

ComplexEstimate complex_mean(const std::vector<std::complex<double>>& samples) {
    if (samples.empty()) throw DomainError("complex_mean: no samples");
    RunningStats re, im;
    for (const auto& z : samples) {
        re.add(z.real());
        im.add(z.imag());
    }
    const double n = static_cast<double>(samples.size());
    return {{re.mean(), im.mean()}, std::sqrt((re.variance() + im.variance()) / n)};
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("linear_fit: size mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw FitError("linear_fit: need at least three points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("linear_fit: degenerate abscissae");
    const double slope = sxy / sxx;
    const double icpt = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - icpt - slope * x[i];
        rss += r * r;
    }
    const double se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return {slope, icpt, se, n};
}

}  // namespace hawkes_impact
