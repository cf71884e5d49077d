#include "hawkes_impact/hawkes_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/format.hpp"

namespace hawkes_impact {

std::string to_string(Side s) {
    switch (s) {
        case Side::buy: return "buy";
        case Side::sell: return "sell";
        case Side::meta: return "meta";
    }
    return "?";
}

std::vector<double> EventStream::times(Side s) const {
    std::vector<double> out;
    for (const auto& e : events)
        if (e.side == s) out.push_back(e.time);
    return out;
}

std::size_t EventStream::count(Side s) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [s](const Event& e) { return e.side == s; }));
}

EventStream EventStream::swapped() const {
    EventStream out = *this;
    for (auto& e : out.events) {
        if (e.side == Side::buy)
            e.side = Side::sell;
        else if (e.side == Side::sell)
            e.side = Side::buy;
    }
    return out;
}

void EventStream::validate() const {
    double last[3] = {-1.0, -1.0, -1.0};
    double prev = 0.0;
    for (const auto& e : events) {
        if (!(e.time >= 0.0) || e.time > horizon) throw DomainError("event outside [0, horizon]");
        if (e.time < prev) throw DomainError("events out of order");
        auto& l = last[static_cast<int>(e.side)];
        if (!(e.time > l)) throw DomainError("repeated event time within one side");
        l = e.time;
        prev = e.time;
    }
}

EventStream merge(const EventStream& a, const EventStream& b) {
    EventStream out;
    out.horizon = std::max(a.horizon, b.horizon);
    out.events.resize(a.events.size() + b.events.size());
    std::merge(a.events.begin(), a.events.end(), b.events.begin(), b.events.end(), out.events.begin(),
               [](const Event& x, const Event& y) { return x.time < y.time; });
    return out;
}

// ---------------------------------------------------------------------------
// Sum of exponentials

double SoeKernel::operator()(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) s += weights[k] * std::exp(-rates[k] * t);
    return s;
}

double SoeKernel::mass(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) s += weights[k] * -std::expm1(-rates[k] * t) / rates[k];
    return s;
}

namespace {

// Residuals (approx/phi - 1) at fixed nodes; parameters are log weights then log rates.
struct SoeResidual : Eigen::DenseFunctor<double> {
    const std::vector<double>& t;
    const std::vector<double>& target;
    int n;

    SoeResidual(int n_terms, const std::vector<double>& nodes, const std::vector<double>& values)
        : Eigen::DenseFunctor<double>(2 * n_terms, static_cast<int>(nodes.size())),
          t(nodes),
          target(values),
          n(n_terms) {}

    int operator()(const InputType& p, ValueType& r) const {
        for (std::size_t i = 0; i < t.size(); ++i) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += std::exp(p[k] - std::exp(p[n + k]) * t[i]);
            r[static_cast<Eigen::Index>(i)] = s / target[i] - 1.0;
        }
        return 0;
    }

    int df(const InputType& p, JacobianType& J) const {
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            for (int k = 0; k < n; ++k) {
                const double x = std::exp(p[n + k]);
                const double e = std::exp(p[k] - x * t[i]) / target[i];
                J(row, k) = e;
                J(row, n + k) = -e * x * t[i];
            }
        }
        return 0;
    }
};

double soe_sup_error(const SoeKernel& s, const KernelSpec& spec, double horizon) {
    double err = std::fabs(s(0.0) / spec.phi(0.0) - 1.0);
    for (double t : log_spaced(1e-2, horizon, 4000)) err = std::max(err, std::fabs(s(t) / spec.phi(t) - 1.0));
    return err;
}

// One Levenberg-Marquardt run from a quadrature start with rates on [x_lo, x_hi].
// Returns false when a weight collapses to zero or a parameter blows up.
bool soe_attempt(const KernelSpec& spec, int n, double horizon, double x_lo, double x_hi, SoeKernel& out) {
    const double a = spec.alpha();
    const double d = n > 1 ? std::log(x_hi / x_lo) / (n - 1) : 0.0;
    Eigen::VectorXd p(2 * n);
    for (int k = 0; k < n; ++k) {
        const double x = n > 1 ? x_lo * std::exp(d * k) : 1.0;
        const double w = n > 1 ? a * d * std::pow(x, a + 1.0) * std::exp(-x) / std::tgamma(a + 1.0) : a;
        p[k] = std::log(w);
        p[n + k] = std::log(x);
    }

    std::vector<double> nodes{0.0};
    for (double t : log_spaced(1e-2, horizon, 299)) nodes.push_back(t);
    std::vector<double> target(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) target[i] = spec.phi(nodes[i]);

    SoeResidual f(n, nodes, target);
    Eigen::LevenbergMarquardt<SoeResidual> lm(f);
    lm.setMaxfev(200 * (n + 1));
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    lm.setGtol(0.0);
    lm.minimize(p);

    out.horizon = horizon;
    out.weights.assign(static_cast<std::size_t>(n), 0.0);
    out.rates.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        const double w = std::exp(p[k]);
        const double x = std::exp(p[n + k]);
        if (!(w > 0.0) || !std::isfinite(w) || !(x > 0.0) || !std::isfinite(x)) return false;
        out.weights[static_cast<std::size_t>(k)] = w;
        out.rates[static_cast<std::size_t>(k)] = x;
    }
    // Moment matching on [0, horizon].
    const double scale = spec.mass(0.0, horizon) / out.mass(horizon);
    for (auto& w : out.weights) w *= scale;
    out.max_rel_error = soe_sup_error(out, spec, horizon);
    return std::isfinite(out.max_rel_error);
}

}  // namespace

SoeKernel soe_fit(const KernelSpec& spec, int n_terms, double horizon) {
    if (n_terms < 1) throw DomainError("soe_fit: n_terms must be at least 1");
    if (!(horizon > 1e-2)) throw DomainError("soe_fit: horizon too short");
    SoeKernel best;
    best.horizon = horizon;
    if (spec.family() == KernelFamily::exponential_test) {
        best.weights = {1.0};
        best.rates = {1.0};
        best.max_rel_error = 0.0;
        return best;
    }
    // A few starting ranges; the least-squares problem has flat directions in
    // which a redundant term can underflow, so one start is not always enough.
    bool found = false;
    for (double hi : {30.0, 20.0, 10.0}) {
        for (double lo : {0.1, 0.03, 0.3}) {
            SoeKernel trial;
            if (!soe_attempt(spec, n_terms, horizon, lo / horizon, hi, trial)) continue;
            if (!found || trial.max_rel_error < best.max_rel_error) best = trial;
            found = true;
            if (best.max_rel_error < 1e-3) return best;
        }
    }
    if (!found) throw ApproximationError("soe_fit: every start produced a non-positive weight");
    return best;
}

// ---------------------------------------------------------------------------
// Hawkes simulation

namespace {

void check_params(const MarketParams& p) {
    if (!(p.aT < 1.0)) throw InstabilityError("simulate_hawkes: aT must be below 1");
    if (!(p.aT >= 0.0)) throw DomainError("simulate_hawkes: aT must be non-negative");
    if (!(p.muT >= 0.0) || !std::isfinite(p.muT)) throw DomainError("simulate_hawkes: muT must be non-negative");
}

Stream stream_of(Side s) {
    switch (s) {
        case Side::buy: return Stream::buy;
        case Side::sell: return Stream::sell;
        case Side::meta: return Stream::meta;
    }
    return Stream::aux;
}

EventStream hawkes_exact(const MarketParams& p, const KernelSpec& spec, double horizon, Rng& rng, Side side) {
    EventStream out;
    out.horizon = horizon;
    std::vector<double> times;
    const double jump = p.aT * spec.phi(0.0);
    double t = 0.0;
    double bound = p.muT;
    while (bound > 0.0) {
        t += exponential(rng, bound);
        if (t > horizon) break;
        double lam = p.muT;
        if (p.aT > 0.0) {
            double s = 0.0;
            for (double ti : times) s += spec.phi(t - ti);
            lam += p.aT * s;
        }
        if (uniform01(rng) * bound <= lam) {
            times.push_back(t);
            out.events.push_back({t, side});
            bound = lam + jump;
        } else {
            bound = lam;
        }
    }
    return out;
}

EventStream hawkes_soe(const MarketParams& p, const SoeKernel& soe, double horizon, Rng& rng, Side side) {
    EventStream out;
    out.horizon = horizon;
    const std::size_t n = soe.rates.size();
    std::vector<double> state(n, 0.0);
    double jump = 0.0;
    for (double w : soe.weights) jump += w;
    jump *= p.aT;
    double t = 0.0;
    double bound = p.muT;
    while (bound > 0.0) {
        const double dt = exponential(rng, bound);
        t += dt;
        if (t > horizon) break;
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            state[k] *= std::exp(-soe.rates[k] * dt);
            s += soe.weights[k] * state[k];
        }
        const double lam = p.muT + p.aT * s;
        if (uniform01(rng) * bound <= lam) {
            out.events.push_back({t, side});
            for (auto& v : state) v += 1.0;
            bound = lam + jump;
        } else {
            bound = lam;
        }
    }
    return out;
}

}  // namespace

EventStream simulate_hawkes(const MarketParams& params, const KernelSpec& spec, double horizon, Rng& rng,
                            Side side, const SoeKernel* soe) {
    check_params(params);
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw DomainError("simulate_hawkes: bad horizon");
    if (soe != nullptr) return hawkes_soe(params, *soe, horizon, rng, side);
    return hawkes_exact(params, spec, horizon, rng, side);
}

EventStream simulate_hawkes(const MarketParams& params, const KernelSpec& spec, double horizon,
                            std::uint64_t seed, std::uint64_t replication, Side side, const SoeKernel* soe) {
    Rng rng = make_rng(seed, replication, stream_of(side));
    return simulate_hawkes(params, spec, horizon, rng, side, soe);
}

double hawkes_intensity(const MarketParams& params, const KernelSpec& spec, const std::vector<double>& times,
                        double t) {
    double s = 0.0;
    for (double ti : times) {
        if (ti >= t) break;
        s += spec.phi(t - ti);
    }
    return params.muT + params.aT * s;
}

EventStream simulate_poisson(const std::function<double(double)>& intensity, double bound, double horizon,
                             Rng& rng, Side side) {
    if (!(bound >= 0.0) || !std::isfinite(bound)) throw DomainError("simulate_poisson: bound must be finite");
    EventStream out;
    out.horizon = horizon;
    if (bound == 0.0) return out;
    double t = 0.0;
    for (;;) {
        t += exponential(rng, bound);
        if (t > horizon) break;
        const double lam = intensity(t);
        if (lam < 0.0) throw DomainError("simulate_poisson: negative intensity");
        if (lam > bound * (1.0 + 1e-12)) throw DomainError("simulate_poisson: intensity above bound");
        if (uniform01(rng) * bound <= lam) out.events.push_back({t, side});
    }
    return out;
}

EventStream simulate_metaorder(const MarketParams& params, const Profile& f, double T, Rng& rng) {
    if (!(T > 0.0)) throw DomainError("simulate_metaorder: T must be positive");
    const double I = params.IT();
    if (!(I >= 0.0)) throw DomainError("simulate_metaorder: IT must be non-negative");
    auto nu = [&](double t) { return I * f(t / T); };
    return simulate_poisson(nu, I * f.sup(), T, rng, Side::meta);
}

EventStream simulate_metaorder(const MarketParams& params, const Profile& f, double T, std::uint64_t seed,
                               std::uint64_t replication) {
    Rng rng = make_rng(seed, replication, Stream::meta);
    return simulate_metaorder(params, f, T, rng);
}

OrderFlow simulate_order_flow(const MarketParams& params, const KernelSpec& spec, const Profile& f,
                              double horizon, std::uint64_t seed, std::uint64_t replication,
                              const SoeKernel* soe) {
    OrderFlow flow;
    flow.buy = simulate_hawkes(params, spec, horizon, seed, replication, Side::buy, soe);
    flow.sell = simulate_hawkes(params, spec, horizon, seed, replication, Side::sell, soe);
    flow.meta = simulate_metaorder(params, f, params.T, seed, replication);
    flow.meta.horizon = std::max(flow.meta.horizon, horizon);
    return flow;
}

// ---------------------------------------------------------------------------
// Prices

namespace {

void check_grid(const std::vector<double>& grid, double horizon) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw DomainError("price grid must be non-negative");
        if (grid[i] > horizon * (1.0 + 1e-12)) throw DomainError("price grid extends beyond the horizon");
        if (i > 0 && !(grid[i] >= grid[i - 1])) throw DomainError("price grid must be sorted");
    }
}

// sum_{t_i <= t} xi(t - t_i) on every grid point
void add_xi_sums(const EventStream& s, Side side, const KernelSpec& spec, double aT,
                 const std::vector<double>& grid, std::vector<double>& acc) {
    const double c = aT / (1.0 - aT);
    for (const auto& e : s.events) {
        if (e.side != side) continue;
        auto it = std::lower_bound(grid.begin(), grid.end(), e.time);
        for (auto j = static_cast<std::size_t>(it - grid.begin()); j < grid.size(); ++j)
            acc[j] += 1.0 + c * spec.tail(grid[j] - e.time);
    }
}

}  // namespace

PricePath price_path(const EventStream& buy, const EventStream& sell, const EventStream& meta,
                     const KernelSpec& spec, const MarketParams& params, const std::vector<double>& grid) {
    if (!(params.aT < 1.0)) throw InstabilityError("price_path: aT must be below 1");
    double horizon = std::max(buy.horizon, sell.horizon);
    if (!meta.events.empty()) horizon = std::max(horizon, meta.horizon);
    check_grid(grid, horizon);
    std::vector<double> plus(grid.size(), 0.0), minus(grid.size(), 0.0);
    // Labels are read from the events, so a swapped stream flips the sign exactly.
    for (const EventStream* s : {&buy, &sell}) {
        add_xi_sums(*s, Side::buy, spec, params.aT, grid, plus);
        add_xi_sums(*s, Side::sell, spec, params.aT, grid, minus);
    }
    add_xi_sums(meta, Side::meta, spec, params.aT, grid, plus);
    PricePath out;
    out.t = grid;
    out.values.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) out.values[j] = plus[j] - minus[j];
    return out;
}

namespace {

// N_t - int_0^t lambda on every grid point
std::vector<double> compensated_counts(const std::vector<double>& times, const KernelSpec& spec,
                                       const MarketParams& params, const std::vector<double>& grid,
                                       double quad_step) {
    std::vector<double> out(grid.size());
    // Left limit of the intensity: events at exactly t are excluded.
    auto lam = [&](double t) { return hawkes_intensity(params, spec, times, t); };
    auto lam_right = [&](double t) {
        double v = lam(t);
        for (double ti : times)
            if (ti == t) v += params.aT * spec.phi(0.0);
        return v;
    };
    double comp = 0.0;
    double pos = 0.0;
    std::size_t next_event = 0;
    std::size_t count = 0;
    auto integrate_to = [&](double b) {
        if (b <= pos) return;
        const auto m = static_cast<std::size_t>(std::ceil((b - pos) / quad_step));
        const double h = (b - pos) / static_cast<double>(m);
        double left = lam_right(pos);
        for (std::size_t i = 1; i <= m; ++i) {
            const double x = pos + h * static_cast<double>(i);
            const double right = lam(x);
            comp += 0.5 * h * (left + right);
            left = (i == m) ? right : lam_right(x);
        }
        pos = b;
    };
    for (std::size_t j = 0; j < grid.size(); ++j) {
        while (next_event < times.size() && times[next_event] <= grid[j]) {
            integrate_to(times[next_event]);
            ++count;
            ++next_event;
        }
        integrate_to(grid[j]);
        out[j] = static_cast<double>(count) - comp;
    }
    return out;
}

}  // namespace

PricePath price_path_martingale(const EventStream& buy, const EventStream& sell, const KernelSpec& spec,
                                const MarketParams& params, const std::vector<double>& grid, double quad_step) {
    if (!(params.aT < 1.0)) throw InstabilityError("price_path_martingale: aT must be below 1");
    if (!(quad_step > 0.0)) throw DomainError("price_path_martingale: quad_step must be positive");
    check_grid(grid, std::max(buy.horizon, sell.horizon));
    auto collect = [](const EventStream& a, const EventStream& b, Side s) {
        auto x = a.times(s);
        auto y = b.times(s);
        std::vector<double> out(x.size() + y.size());
        std::merge(x.begin(), x.end(), y.begin(), y.end(), out.begin());
        return out;
    };
    const auto ta = collect(buy, sell, Side::buy);
    const auto tb = collect(buy, sell, Side::sell);
    const auto ma = compensated_counts(ta, spec, params, grid, quad_step);
    const auto mb = compensated_counts(tb, spec, params, grid, quad_step);
    PricePath out;
    out.t = grid;
    out.values.resize(grid.size());
    const double c = 1.0 / (1.0 - params.aT);
    for (std::size_t j = 0; j < grid.size(); ++j) out.values[j] = c * (ma[j] - mb[j]);
    return out;
}

PricePath rescale_price(const PricePath& path, const MarketParams& params, double T) {
    if (!(T > 0.0)) throw DomainError("rescale_price: T must be positive");
    const double scale = 1.0 / (T * params.betaT());
    PricePath out;
    out.scale = PriceScale::rescaled;
    out.t.resize(path.t.size());
    out.values.resize(path.values.size());
    for (std::size_t i = 0; i < path.t.size(); ++i) out.t[i] = path.t[i] / T;
    for (std::size_t i = 0; i < path.values.size(); ++i) out.values[i] = path.values[i] * scale;
    return out;
}

void write_events_csv(std::ostream& os, const EventStream& s, std::uint64_t seed, double T, double alpha) {
    os << "# seed=" << seed << " T=" << format_double(T) << " alpha=" << format_double(alpha) << "\n";
    os << "time,side\n";
    for (const auto& e : s.events) os << format_double(e.time) << ',' << to_string(e.side) << '\n';
}

void write_price_csv(std::ostream& os, const PricePath& p, std::uint64_t seed, double T, double alpha) {
    os << "# seed=" << seed << " T=" << format_double(T) << " alpha=" << format_double(alpha)
       << " scale=" << (p.scale == PriceScale::micro ? "micro" : "rescaled") << "\n";
    os << "t,price\n";
    for (std::size_t i = 0; i < p.t.size(); ++i) os << format_double(p.t[i]) << ',' << format_double(p.values[i]) << '\n';
}

}  // namespace hawkes_impact
