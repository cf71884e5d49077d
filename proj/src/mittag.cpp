#include "hawkes_impact/mittag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "hawkes_impact/errors.hpp"

namespace hawkes_impact::mittag {

namespace {

// |z|^(1/alpha) above which the alternating series loses too many digits.
constexpr double kSeriesRadius = 12.0;
constexpr double kQuadTol = 1e-13;

long double log_gamma(long double x) {
    int sign = 0;
    return ::lgammal_r(x, &sign);
}

void check_alpha_beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw DomainError("Mittag-Leffler: alpha must lie in (0,1]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("Mittag-Leffler: beta must be positive");
}

}  // namespace

MittagLefflerParams::MittagLefflerParams(double alpha, double lambda) : alpha_(alpha), lambda_(lambda) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw DomainError("MittagLefflerParams: alpha must lie in (0,1]");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("MittagLefflerParams: lambda must be positive");
}

double ml_e_series(double alpha, double beta, double z) {
    check_alpha_beta(alpha, beta);
    if (!std::isfinite(z)) throw DomainError("Mittag-Leffler: z must be finite");
    if (z == 0.0) return static_cast<double>(1.0L / std::tgamma(static_cast<long double>(beta)));

    const long double lz = std::log(std::fabs(static_cast<long double>(z)));
    const bool alternating = z < 0.0;
    // Terms grow until alpha*n + beta ~ |z|^(1/alpha).
    const double peak = std::pow(std::fabs(z), 1.0 / alpha);
    long double sum = 0.0L;
    for (long n = 0; n < 2'000'000; ++n) {
        const long double arg = static_cast<long double>(alpha) * n + beta;
        const long double log_mag = n * lz - log_gamma(arg);
        if (log_mag > 11000.0L) return std::numeric_limits<double>::infinity();
        const long double mag = std::exp(log_mag);
        sum += (alternating && (n % 2 == 1)) ? -mag : mag;
        if (arg > peak + 2.0 && mag <= 1e-22L * std::max(std::fabs(sum), 1e-30L)) break;
    }
    return static_cast<double>(sum);
}

double ml_e_integral(double alpha, double beta, double z) {
    check_alpha_beta(alpha, beta);
    if (!(z < 0.0) || !std::isfinite(z)) throw DomainError("ml_e_integral: needs finite z < 0");
    if (!(alpha < 1.0)) throw DomainError("ml_e_integral: needs alpha < 1");
    if (!(beta < 1.0 + alpha)) throw DomainError("ml_e_integral: needs beta < 1 + alpha");

    using std::numbers::pi;
    const double x = -z;
    const double s1 = std::sin(pi * (1.0 - beta));
    const double s2 = std::sin(pi * (1.0 - beta + alpha));
    const double c = std::cos(pi * alpha);
    // chi = s^alpha maps the kernel to s^(alpha-beta) e^(-s) times a rational factor.
    auto integrand = [=](double s) {
        if (s <= 0.0) return 0.0;
        const double sa = std::pow(s, alpha);
        const double num = sa * s1 + x * s2;
        const double den = sa * sa + 2.0 * sa * x * c + x * x;
        return std::pow(s, alpha - beta) * std::exp(-s) * num / den / pi;
    };

    thread_local boost::math::quadrature::tanh_sinh<double> finite;
    thread_local boost::math::quadrature::exp_sinh<double> infinite;

    // Split at the peak of the rational factor when it has one (alpha > 1/2).
    double split = 1.0;
    if (c < 0.0) split = std::max(std::pow(x * (-c), 1.0 / alpha), 1e-3);
    double total = finite.integrate(integrand, 0.0, split, kQuadTol);
    if (c < 0.0) {
        total += finite.integrate(integrand, split, 2.0 * split, kQuadTol);
        split *= 2.0;
    }
    total += infinite.integrate(integrand, split, std::numeric_limits<double>::infinity(), kQuadTol);
    return total;
}

double ml_e(double alpha, double beta, double z) {
    check_alpha_beta(alpha, beta);
    if (!std::isfinite(z)) throw DomainError("Mittag-Leffler: z must be finite");

    if (alpha == 1.0) {
        if (beta == 1.0) return std::exp(z);
        if (std::fabs(z) <= kSeriesRadius) return ml_e_series(alpha, beta, z);
        return boost::math::hypergeometric_1F1(1.0, beta, z) / std::tgamma(beta);
    }
    if (z >= 0.0 || std::pow(-z, 1.0 / alpha) <= kSeriesRadius) return ml_e_series(alpha, beta, z);
    if (beta >= 1.0 + alpha) return (ml_e(alpha, beta - alpha, z) - 1.0 / std::tgamma(beta - alpha)) / z;
    return ml_e_integral(alpha, beta, z);
}

double ml_density(const MittagLefflerParams& p, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("ml_density: t must be positive");
    const double a = p.alpha();
    const double lam = p.lambda();
    if (a == 1.0) return lam * std::exp(-lam * t);
    const double ta = std::pow(t, a);
    return lam * (ta / t) * ml_e(a, a, -lam * ta);
}

double ml_cdf(const MittagLefflerParams& p, double t) {
    if (!(t >= 0.0) || std::isnan(t)) throw DomainError("ml_cdf: t must be non-negative");
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return 1.0;
    const double a = p.alpha();
    const double lam = p.lambda();
    if (a == 1.0) return -std::expm1(-lam * t);
    // F(t) = (lambda/alpha) int_0^{t^alpha} E_{alpha,alpha}(-lambda u) du.
    auto integrand = [a, lam](double u) { return ml_e(a, a, -lam * u); };
    const double upper = std::pow(t, a);
    thread_local boost::math::quadrature::tanh_sinh<double> quad;
    const double val = quad.integrate(integrand, 0.0, upper, 1e-12);
    return std::min(1.0, (lam / a) * val);
}

double ml_cdf_integral(const MittagLefflerParams& p, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("ml_cdf_integral: t must be finite and non-negative");
    if (t == 0.0) return 0.0;
    const double a = p.alpha();
    const double lam = p.lambda();
    if (a == 1.0) return t + std::expm1(-lam * t) / lam;
    const double ta = std::pow(t, a);
    return lam * ta * t * ml_e(a, a + 2.0, -lam * ta);
}

std::vector<double> ml_cdf_table(const MittagLefflerParams& p, const UniformGrid& grid) {
    std::vector<double> out(grid.size());
    const double a = p.alpha();
    const double lam = p.lambda();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (t == 0.0) {
            out[i] = 0.0;
        } else if (a == 1.0) {
            out[i] = -std::expm1(-lam * t);
        } else {
            const double ta = std::pow(t, a);
            out[i] = std::min(1.0, lam * ta * ml_e(a, a + 1.0, -lam * ta));
        }
    }
    return out;
}

std::vector<double> ml_cdf_integral_table(const MittagLefflerParams& p, const UniformGrid& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = ml_cdf_integral(p, grid[i]);
    return out;
}

}  // namespace hawkes_impact::mittag
