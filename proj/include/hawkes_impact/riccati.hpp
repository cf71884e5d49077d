#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hawkes_impact/grid.hpp"
#include "hawkes_impact/kernels.hpp"
#include "hawkes_impact/stats.hpp"

namespace hawkes_impact {

using cplx = std::complex<double>;

/// Real test function h for characteristic functionals.
///   linear:u=..            h(t) = u t
///   plateau:u=..,w=..      h(t) = u m(t), m the C1 smoothing of min(t,1) over
///                          [1-w, 1+w]
class TestFunction {
public:
    TestFunction(std::function<double(double)> fn, std::string id);

    static TestFunction zero();
    static TestFunction linear(double u);
    static TestFunction plateau(double u, double w = 0.1);
    static TestFunction constant(double u);
    /// Parses the textual forms above plus "zero" and "const:u=..".
    static TestFunction parse(const std::string& text);

    double operator()(double t) const { return fn_(t); }
    const std::string& id() const noexcept { return id_; }
    TestFunction scaled(double c) const;

private:
    std::function<double(double)> fn_;
    std::string id_;
};

struct RiccatiSolution {
    UniformGrid grid;
    std::vector<cplx> g;
    /// K(h, t_n) = exp(int_0^{t_n} g)
    std::vector<cplx> K_of_t;
    std::string h_id;
    /// sup |g^(m+1) - g^(m)| for each Picard sweep
    std::vector<double> residuals;
};

struct PicardOptions {
    double tolerance = 1e-10;
    int max_iterations = 200;
};

/// Solves y = f * (q y^2 + forcing) where f is the Mittag-Leffler density
/// with parameters (alpha, lambda), by Picard iteration. The convolution uses
/// exact cell moments of f against the piecewise-linear interpolant of the
/// integrand. Damping drops from 1 to 1/2 if the residual starts growing.
/// Throws IterationError if the tolerance is not reached.
std::vector<cplx> solve_quadratic_volterra(double alpha, double lambda, cplx q, const std::vector<cplx>& forcing,
                                           const UniformGrid& grid, const PicardOptions& opts = {},
                                           std::vector<double>* residuals = nullptr);

/// g = f * (g^2/(4 delta) + 2i h/delta), K = exp(int g).
RiccatiSolution solve_volterra_riccati(const TestFunction& h, double alpha, double lambda, double delta,
                                       const UniformGrid& grid, const PicardOptions& opts = {});

/// One side of the limit: theta = f * (theta^2/2 + i h/delta). For the
/// combined variance X = (Xa + Xb)/delta one has
/// E exp(i int h(t-s) dX_s) = exp(2 delta int theta) with theta solved for h/delta.
std::vector<cplx> solve_single_side(const TestFunction& h, double alpha, double lambda, double delta,
                                    const UniformGrid& grid, const PicardOptions& opts = {});

/// Cumulative trapezoid of y, exponentiated.
std::vector<cplx> exp_cumulative_integral(const std::vector<cplx>& y, double step);

struct HawkesCharSolution {
    UniformGrid grid;
    std::vector<cplx> C;
    /// E exp(i sum_{t_j <= t} h(t - t_j)) for the Hawkes process on [0, t]
    std::vector<cplx> L_of_t;
};

/// C = exp(ih + (C - 1) * aT phi), L(t) = exp(int_0^t (C(s) - 1) nu(t - s) ds).
/// C is obtained node by node: the convolution up to the previous node is
/// fixed and the implicit last-cell term is resolved by Picard iteration.
HawkesCharSolution hawkes_char_fixed_point(const TestFunction& h, const KernelSpec& spec, double aT,
                                           const std::function<double(double)>& nu, const UniformGrid& grid,
                                           const PicardOptions& opts = {});

/// Paths given as cumulative values on a uniform grid (each of length
/// grid.size(), starting at 0). Estimates E exp(i sum_j h(t - s_j) dX_j) at
/// t = grid[t_index], s_j the midpoint of cell j.
ComplexEstimate char_functional_mc(const std::vector<std::vector<double>>& paths, const UniformGrid& grid,
                                   const TestFunction& h, std::size_t t_index);

/// Point-process version: every event time tau <= t of a replication carries
/// mass `weight`, so the exponent is i weight sum h(t - tau).
ComplexEstimate char_functional_mc_events(const std::vector<std::vector<double>>& event_times, double weight,
                                          const TestFunction& h, double t);

void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol);

}  // namespace hawkes_impact
