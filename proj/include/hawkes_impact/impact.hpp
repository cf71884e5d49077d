#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hawkes_impact/hawkes_sim.hpp"
#include "hawkes_impact/kernels.hpp"
#include "hawkes_impact/profile.hpp"

namespace hawkes_impact {

/// Market impact on a rescaled time grid (t = 1 is the end of the metaorder).
struct ImpactCurve {
    std::vector<double> t;
    std::vector<double> mi, pmi, tmi;
    /// Standard error of mi; empty outside Monte Carlo mode.
    std::vector<double> stderr_mi;

    std::string mode;  // analytic, mc, limit
    double T = 0.0;    // 0 for the limit curve
    double alpha = 0.0;
    double K = 0.0;
    double gamma = 0.0;
    std::string profile_id;
};

/// Finite-T rescaled impact from E[dn] = nu(s) ds:
///   pmi(t) = gamma int_0^t f
///   tmi(t) = gamma aT/(1-aT) int_0^t f(t-y) tail(T y) dy
/// with exact antiderivatives on each linear piece of f.
ImpactCurve analytic_mi(const MarketParams& params, const KernelSpec& spec, const Profile& f,
                        const std::vector<double>& grid);

enum class McMode {
    /// full order flow: buy and sell Hawkes streams plus the metaorder
    plain,
    /// metaorder only; the Hawkes contribution has zero mean given the
    /// metaorder and is integrated out
    conditional,
};

/// Monte Carlo mean of the rescaled price with the metaorder injected.
/// pmi is analytic and tmi = mi - pmi.
ImpactCurve mc_mi(const MarketParams& params, const KernelSpec& spec, const Profile& f,
                  const std::vector<double>& grid, std::size_t reps, std::uint64_t seed,
                  McMode mode = McMode::plain, const SoeKernel* soe = nullptr);

/// Limit curve: tmi(t) = gamma K (1-alpha) int_0^t f(t-u) u^(-alpha) du for
/// alpha < 1, gamma K f(t) for alpha = 1; pmi(t) = gamma int_0^t f.
ImpactCurve macroscopic_mi(double alpha, double K, double gamma, const Profile& f, const std::vector<double>& grid);

enum class FitWindow {
    /// log tmi against log t on [0.1 s, s]
    execution,
    /// log tmi against log(t - s) on [5, 50]
    decay,
};

struct PowerLawFit {
    double exponent;
    double stderr_exponent;
    std::size_t points;
};

/// Least-squares power-law exponent of tmi on the window; `s` is the end of
/// execution (1 for the flat profile).
PowerLawFit fit_power_law(const ImpactCurve& curve, FitWindow window, double s = 1.0);

void write_impact_csv(std::ostream& os, const ImpactCurve& c);

}  // namespace hawkes_impact
