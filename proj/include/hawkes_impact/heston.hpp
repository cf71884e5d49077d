#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hawkes_impact/grid.hpp"

namespace hawkes_impact {

/// Integrated variances on a uniform grid over [0, t_max]. The spot
/// variances are filled only in the rough regime (alpha > 1/2).
/// dWa, dWb hold the time-changed increments B^a(Xa(t_{k+1})) - B^a(Xa(t_k)).
struct VariancePath {
    UniformGrid grid;
    std::vector<double> Xa, Xb, X;
    std::vector<double> Ya, Yb, Y;
    std::vector<double> dWa, dWb;
    /// Steps where a negative variance increment was clamped to zero.
    std::size_t clamped = 0;

    bool has_spot() const noexcept { return !Y.empty(); }
    /// W(X_t) = (B^a(Xa_t) + B^b(Xb_t)) / sqrt(delta) on every node.
    std::vector<double> time_changed_w(double delta) const;
};

struct MacroPricePath {
    UniformGrid grid;
    std::vector<double> price;
    /// (Ya - Yb)/(Ya + Yb), zero where both vanish; empty when alpha <= 1/2.
    std::vector<double> rho;
};

struct HestonPath {
    VariancePath variance;
    MacroPricePath price;
};

struct HestonParams {
    double alpha = 0.6;
    double lambda = 1.0;
    double delta = 1.0;
};

/// Per side Y = lambda/Gamma(alpha) [ int (t-s)^(alpha-1) (1 - Y) ds
///   + (delta lambda)^(-1/2) int (t-s)^(alpha-1) sqrt(Y) dB ], Y(0) = 0,
/// by explicit product-integration Euler with full truncation. alpha in (1/2, 1].
HestonPath simulate_rough_heston(const HestonParams& p, const UniformGrid& grid, std::uint64_t seed,
                                 std::uint64_t replication = 0);

/// Per side X(t) = FF(t) + (delta lambda)^(-1/2) int F(t-s) dB(X_s), F the
/// Mittag-Leffler CDF and FF its integral. Explicit time-change scheme: the
/// increment of step j uses Gaussian increments up to step j-1 only, then
/// dB_j ~ N(0, dX_j). alpha in (0, 1/2].
HestonPath simulate_hyper_rough(const HestonParams& p, const UniformGrid& grid, std::uint64_t seed,
                                std::uint64_t replication = 0);

/// Dispatches on alpha.
HestonPath simulate_heston(const HestonParams& p, const UniformGrid& grid, std::uint64_t seed,
                           std::uint64_t replication = 0);

/// E[X_t] = (2/delta) int_0^t F.
double expected_variance(const HestonParams& p, double t);

/// D^alpha x(t) = Gamma(1-alpha)^(-1) int_0^t (t-s)^(-alpha) x'(s) ds with x
/// piecewise linear between nodes. alpha in [0, 1); x(0) must be 0.
std::vector<double> fractional_derivative(const std::vector<double>& path, double alpha, const UniformGrid& grid);

struct RoughnessEstimate {
    std::vector<double> q;
    /// zeta(q): slope of log mean |x(t+d) - x(t)|^q against log d
    std::vector<double> zeta;
    std::vector<double> zeta_stderr;
    /// zeta(q)/q
    std::vector<double> slope_over_q;
    /// d zeta / d q from a straight-line fit over the q list. For a
    /// monofractal path this equals every slope_over_q; for intermittent
    /// paths it isolates the Holder exponent.
    double regularity = 0.0;
    double regularity_stderr = 0.0;
};

/// Lags are given in time units, rounded to whole grid steps; all paths share
/// `grid`. Throws DomainError for lags below one step or beyond the grid.
RoughnessEstimate roughness_estimate(const std::vector<std::vector<double>>& paths, const UniformGrid& grid,
                                     const std::vector<double>& q_list, const std::vector<double>& lags);

/// Standard Brownian path on the grid, for calibrating the estimator.
std::vector<double> brownian_path(const UniformGrid& grid, std::uint64_t seed, std::uint64_t replication = 0);

void write_variance_csv(std::ostream& os, const VariancePath& v);
void write_macro_price_csv(std::ostream& os, const MacroPricePath& p);

}  // namespace hawkes_impact
