#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hawkes_impact/grid.hpp"

namespace hawkes_impact {

enum class KernelFamily { power_law_shifted, exponential_test };

std::string to_string(KernelFamily f);
KernelFamily parse_family(const std::string& name);

/// Unit-mass excitation kernel.
///   power_law_shifted: phi(t) = alpha (1+t)^(-alpha-1), tail (1+t)^(-alpha)
///   exponential_test:  phi(t) = exp(-t), alpha only labels the run
class KernelSpec {
public:
    KernelSpec(KernelFamily family, double alpha);

    KernelFamily family() const noexcept { return family_; }
    double alpha() const noexcept { return alpha_; }

    double phi(double t) const;
    /// int_t^inf phi
    double tail(double t) const;
    /// R(t) = int_0^t tail(u) du
    double tail_integral(double t) const;
    /// int_0^t u tail(u) du
    double tail_moment(double t) const;
    /// int_a^b phi(u) du and int_a^b u phi(u) du, computed without cancellation
    /// for narrow cells far from the origin.
    double mass(double a, double b) const;
    double first_moment(double a, double b) const;

private:
    KernelFamily family_;
    double alpha_;
};

/// Near-instability parameters for a horizon T. lambda is always derived.
struct MarketParams {
    double T = 1.0;
    double aT = 0.0;
    double muT = 1.0;
    double K = 1.0;
    double delta = 1.0;
    double gamma = 0.0;
    double alpha = 0.5;

    double betaT() const { return muT / (1.0 - aT); }
    double IT() const { return gamma * betaT(); }
    /// (K Gamma(2-alpha))^(-1)
    double lambda() const;
};

double phi_eval(const KernelSpec& spec, double t);
double phi_tail(const KernelSpec& spec, double t);

/// Product-trapezoid weights of phi on the cells [jh, (j+1)h]:
/// left[j] = int_cell phi(u) (u - jh)/h du and right[j] = mass - left[j], so
/// that int_0^{t_n} phi(t_n - s) x(s) ds = sum_k left[n-1-k] x_k + right[n-1-k] x_{k+1}
/// for piecewise-linear x.
struct CellWeights {
    std::vector<double> left, right;
};
CellWeights cell_weights(const KernelSpec& spec, const UniformGrid& grid);

/// Resolvent psi = sum_{i>=1} (aT phi)^{*i} on the grid, from the Volterra
/// equation psi = aT phi + aT phi * psi. Product trapezoid: psi piecewise
/// linear, phi integrated exactly on each cell.
SampledFunction resolvent_psi(const KernelSpec& spec, double aT, const UniformGrid& grid);

/// int_0^inf psi estimated from a grid solution: trapezoid over the grid plus
/// the remainder aT/(1-aT) * [tail(t) + (tail * psi)(t)] at the last node.
double resolvent_mass(const KernelSpec& spec, double aT, const SampledFunction& psi);

/// xi(t) = 1 + aT/(1-aT) tail(t)
double xi_value(const KernelSpec& spec, double aT, double t);
SampledFunction xi_grid(const KernelSpec& spec, double aT, const UniformGrid& grid);

/// aT = 1 - R(T)/(T K), muT = delta/((1-aT) T).
MarketParams schedule(double T, const KernelSpec& spec, double K, double delta, double gamma);

void write_sampled_csv(std::ostream& os, const SampledFunction& f, const KernelSpec& spec, double aT);

}  // namespace hawkes_impact
