#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hawkes_impact/kernels.hpp"
#include "hawkes_impact/profile.hpp"
#include "hawkes_impact/random.hpp"

namespace hawkes_impact {

enum class Side : std::uint8_t { buy, sell, meta };

std::string to_string(Side s);

struct Event {
    double time;
    Side side;
};

/// Time-ordered events on [0, horizon].
struct EventStream {
    std::vector<Event> events;
    double horizon = 0.0;

    std::vector<double> times(Side s) const;
    std::size_t count(Side s) const;
    /// Same stream with buy and sell exchanged.
    EventStream swapped() const;
    /// Throws DomainError unless times are ordered, within [0, horizon], and
    /// strictly increasing within each side.
    void validate() const;
};

EventStream merge(const EventStream& a, const EventStream& b);

/// phi(t) ~ sum_k weights[k] exp(-rates[k] t) on [0, horizon].
struct SoeKernel {
    std::vector<double> weights;
    std::vector<double> rates;
    double horizon = 0.0;
    /// Sup of |approx/phi - 1| on a log grid over [1e-2, horizon] (and t = 0).
    double max_rel_error = 0.0;

    double operator()(double t) const;
    /// int_0^t of the approximation
    double mass(double t) const;
};

/// Sum-of-exponentials fit of phi. Rates start geometric, weights start from
/// a quadrature of (1+t)^(-a-1) = Gamma(a+1)^(-1) int x^a e^(-x(1+t)) dx; both
/// are then refined by Levenberg-Marquardt on relative error in log
/// coordinates. Weights are finally rescaled so the mass on [0, horizon]
/// matches phi. exponential_test is represented exactly by one term.
SoeKernel soe_fit(const KernelSpec& spec, int n_terms, double horizon);

/// With soe == nullptr the exact engine is used: Ogata thinning with the
/// intensity recomputed over the full history. Otherwise the kernel is
/// replaced by the SoE approximation with O(n_terms) updates.
EventStream simulate_hawkes(const MarketParams& params, const KernelSpec& spec, double horizon, Rng& rng,
                            Side side = Side::buy, const SoeKernel* soe = nullptr);
EventStream simulate_hawkes(const MarketParams& params, const KernelSpec& spec, double horizon,
                            std::uint64_t seed, std::uint64_t replication = 0, Side side = Side::buy,
                            const SoeKernel* soe = nullptr);

/// Hawkes intensity muT + aT sum_{t_i < t} phi(t - t_i); `times` sorted.
double hawkes_intensity(const MarketParams& params, const KernelSpec& spec, const std::vector<double>& times,
                        double t);

/// Inhomogeneous Poisson process by thinning against `bound`; throws if the
/// intensity is negative or above the bound.
EventStream simulate_poisson(const std::function<double(double)>& intensity, double bound, double horizon,
                             Rng& rng, Side side = Side::meta);

/// Metaorder child orders: Poisson with intensity IT f(t/T) on [0, T].
EventStream simulate_metaorder(const MarketParams& params, const Profile& f, double T, Rng& rng);
EventStream simulate_metaorder(const MarketParams& params, const Profile& f, double T, std::uint64_t seed,
                               std::uint64_t replication = 0);

struct OrderFlow {
    EventStream buy, sell, meta;
};

/// Independent buy and sell Hawkes streams on [0, horizon] plus the
/// metaorder on [0, params.T], all keyed by (seed, replication).
OrderFlow simulate_order_flow(const MarketParams& params, const KernelSpec& spec, const Profile& f,
                              double horizon, std::uint64_t seed, std::uint64_t replication,
                              const SoeKernel* soe = nullptr);

enum class PriceScale { micro, rescaled };

struct PricePath {
    std::vector<double> t;
    std::vector<double> values;
    PriceScale scale = PriceScale::micro;
};

/// P_t = sum xi(t - t_i) over buy and meta events minus the same sum over
/// sell events. `meta` may be empty.
PricePath price_path(const EventStream& buy, const EventStream& sell, const EventStream& meta,
                     const KernelSpec& spec, const MarketParams& params, const std::vector<double>& grid);

/// (M^a - M^b)/(1 - aT) with M = N - int lambda. The compensator is a
/// trapezoid quadrature of the intensity with sub-step `quad_step`, split at
/// event times.
PricePath price_path_martingale(const EventStream& buy, const EventStream& sell, const KernelSpec& spec,
                                const MarketParams& params, const std::vector<double>& grid,
                                double quad_step = 1e-3);

/// Time divided by T, price by T betaT.
PricePath rescale_price(const PricePath& path, const MarketParams& params, double T);

void write_events_csv(std::ostream& os, const EventStream& s, std::uint64_t seed, double T, double alpha);
void write_price_csv(std::ostream& os, const PricePath& p, std::uint64_t seed, double T, double alpha);

}  // namespace hawkes_impact
