#pragma once

#include <vector>

#include "hawkes_impact/grid.hpp"

namespace hawkes_impact::mittag {

/// Shape alpha in (0,1] and rate lambda > 0 of the Mittag-Leffler law.
class MittagLefflerParams {
public:
    MittagLefflerParams(double alpha, double lambda);

    double alpha() const noexcept { return alpha_; }
    double lambda() const noexcept { return lambda_; }

private:
    double alpha_;
    double lambda_;
};

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z and
/// alpha in (0,1].
///
/// Small |z|^(1/alpha) and all positive z use the power series in extended
/// precision. Large negative z uses the real-axis integral representation
/// (beta < 1 + alpha) after lowering beta with
/// E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z. alpha = 1 goes through
/// exp / 1F1. Overflows to +inf for large positive z.
double ml_e(double alpha, double beta, double z);

/// Power series only; valid wherever cancellation is tolerable. Exposed for
/// the overlap checks.
double ml_e_series(double alpha, double beta, double z);
/// Integral representation only (z < 0, alpha < 1, beta < 1 + alpha).
double ml_e_integral(double alpha, double beta, double z);

/// Mittag-Leffler density lambda t^(alpha-1) E_{alpha,alpha}(-lambda t^alpha), t > 0.
double ml_density(const MittagLefflerParams& p, double t);

/// CDF of the Mittag-Leffler law by adaptive quadrature of the density in the
/// variable u = t^alpha, which removes the singularity at the origin.
double ml_cdf(const MittagLefflerParams& p, double t);

/// int_0^t F(s) ds = lambda t^(alpha+1) E_{alpha,alpha+2}(-lambda t^alpha).
double ml_cdf_integral(const MittagLefflerParams& p, double t);

/// CDF on every node of a grid, through the closed form
/// F(t) = lambda t^alpha E_{alpha,alpha+1}(-lambda t^alpha).
std::vector<double> ml_cdf_table(const MittagLefflerParams& p, const UniformGrid& grid);
/// ml_cdf_integral on every node of a grid.
std::vector<double> ml_cdf_integral_table(const MittagLefflerParams& p, const UniformGrid& grid);

}  // namespace hawkes_impact::mittag
