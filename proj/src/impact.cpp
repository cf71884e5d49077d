#include "hawkes_impact/impact.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/format.hpp"
#include "hawkes_impact/parallel.hpp"
#include "hawkes_impact/stats.hpp"

namespace hawkes_impact {

namespace {

// int_0^t f(t - y) k(y) dy for piecewise-linear f, given antiderivatives
// R(y) = int_0^y k and S(y) = int_0^y z k(z) dz.
double lag_integral(const Profile& f, double t, const std::function<double(double)>& R,
                    const std::function<double(double)>& S) {
    const auto& x = f.knots();
    const auto& v = f.values();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        const double s0 = x[k];
        const double s1 = std::min(x[k + 1], t);
        if (s1 <= s0) break;
        // f(s) = c0 + c1 s on the piece; with y = t - s, f = (c0 + c1 t) - c1 y
        const double c1 = (v[k + 1] - v[k]) / (x[k + 1] - x[k]);
        const double c0 = v[k] - c1 * s0;
        const double ylo = t - s1;
        const double yhi = t - s0;
        total += (c0 + c1 * t) * (R(yhi) - R(ylo));
        if (c1 != 0.0) total -= c1 * (S(yhi) - S(ylo));
    }
    return total;
}

void check_grid(const std::vector<double>& grid) {
    for (double t : grid)
        if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("impact grid must be finite and non-negative");
}

ImpactCurve make_curve(const std::vector<double>& grid, const std::string& mode, double T, double alpha, double K,
                       double gamma, const Profile& f) {
    ImpactCurve c;
    c.t = grid;
    c.mode = mode;
    c.T = T;
    c.alpha = alpha;
    c.K = K;
    c.gamma = gamma;
    c.profile_id = f.id();
    c.mi.resize(grid.size());
    c.pmi.resize(grid.size());
    c.tmi.resize(grid.size());
    return c;
}

}  // namespace

ImpactCurve analytic_mi(const MarketParams& params, const KernelSpec& spec, const Profile& f,
                        const std::vector<double>& grid) {
    if (!(params.aT < 1.0)) throw InstabilityError("analytic_mi: aT must be below 1");
    check_grid(grid);
    const double T = params.T;
    auto c = make_curve(grid, "analytic", T, spec.alpha(), params.K, params.gamma, f);
    auto R = [&](double y) { return spec.tail_integral(T * y) / T; };
    auto S = [&](double y) { return spec.tail_moment(T * y) / (T * T); };
    const double amp = params.aT / (1.0 - params.aT);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double tmi_unit = amp * lag_integral(f, grid[i], R, S);
        c.pmi[i] = params.gamma * f.integral(grid[i]);
        c.tmi[i] = params.gamma * tmi_unit;
        c.mi[i] = c.pmi[i] + c.tmi[i];
    }
    return c;
}

ImpactCurve macroscopic_mi(double alpha, double K, double gamma, const Profile& f, const std::vector<double>& grid) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw DomainError("macroscopic_mi: alpha must lie in (0,1]");
    check_grid(grid);
    auto c = make_curve(grid, "limit", 0.0, alpha, K, gamma, f);
    auto R = [alpha](double y) { return std::pow(y, 1.0 - alpha) / (1.0 - alpha); };
    auto S = [alpha](double y) { return std::pow(y, 2.0 - alpha) / (2.0 - alpha); };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double unit = alpha == 1.0 ? K * f(t) : K * (1.0 - alpha) * lag_integral(f, t, R, S);
        c.pmi[i] = gamma * f.integral(t);
        c.tmi[i] = gamma * unit;
        c.mi[i] = c.pmi[i] + c.tmi[i];
    }
    return c;
}

ImpactCurve mc_mi(const MarketParams& params, const KernelSpec& spec, const Profile& f,
                  const std::vector<double>& grid, std::size_t reps, std::uint64_t seed, McMode mode,
                  const SoeKernel* soe) {
    if (reps < 1) throw DomainError("mc_mi: reps must be at least 1");
    if (!(params.aT < 1.0)) throw InstabilityError("mc_mi: aT must be below 1");
    check_grid(grid);
    const double T = params.T;
    std::vector<double> micro(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) micro[i] = grid[i] * T;
    const double horizon = micro.empty() ? T : std::max(T, micro.back());
    const EventStream none{{}, horizon};

    auto job = [&](std::size_t r) {
        PricePath p;
        if (mode == McMode::conditional) {
            auto meta = simulate_metaorder(params, f, T, seed, r);
            meta.horizon = horizon;
            p = price_path(none, none, meta, spec, params, micro);
        } else {
            const auto flow = simulate_order_flow(params, spec, f, horizon, seed, r, soe);
            p = price_path(flow.buy, flow.sell, flow.meta, spec, params, micro);
        }
        return rescale_price(p, params, T).values;
    };
    std::vector<RunningStats> acc(grid.size());
    ordered_fold(reps, job, [&](std::size_t, std::vector<double> v) {
        for (std::size_t i = 0; i < v.size(); ++i) acc[i].add(v[i]);
    });

    auto c = make_curve(grid, "mc", T, spec.alpha(), params.K, params.gamma, f);
    c.stderr_mi.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        c.mi[i] = acc[i].mean();
        c.stderr_mi[i] = acc[i].stderr_mean();
        c.pmi[i] = params.gamma * f.integral(grid[i]);
        c.tmi[i] = c.mi[i] - c.pmi[i];
    }
    return c;
}

PowerLawFit fit_power_law(const ImpactCurve& curve, FitWindow window, double s) {
    if (!(s > 0.0)) throw DomainError("fit_power_law: execution end must be positive");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        const double t = curve.t[i];
        const double v = curve.tmi[i];
        double abscissa = 0.0;
        if (window == FitWindow::execution) {
            if (t < 0.1 * s || t > s) continue;
            abscissa = t;
        } else {
            if (t < 5.0 || t > 50.0) continue;
            abscissa = t - s;
        }
        if (!(v > 0.0)) throw FitError("fit_power_law: tmi must be positive on the window");
        x.push_back(std::log(abscissa));
        y.push_back(std::log(v));
    }
    if (x.size() < 5) throw FitError("fit_power_law: fewer than 5 points on the window");
    const auto fit = linear_fit(x, y);
    return {fit.slope, fit.slope_stderr, fit.points};
}

void write_impact_csv(std::ostream& os, const ImpactCurve& c) {
    os << "# mode=" << c.mode << " T=" << (c.mode == "limit" ? std::string("limit") : format_double(c.T))
       << " alpha=" << format_double(c.alpha) << " K=" << format_double(c.K) << " gamma=" << format_double(c.gamma)
       << " profile=" << c.profile_id << "\n";
    const bool se = !c.stderr_mi.empty();
    os << (se ? "t,mi,pmi,tmi,stderr\n" : "t,mi,pmi,tmi\n");
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        os << format_double(c.t[i]) << ',' << format_double(c.mi[i]) << ',' << format_double(c.pmi[i]) << ','
           << format_double(c.tmi[i]);
        if (se) os << ',' << format_double(c.stderr_mi[i]);
        os << '\n';
    }
}

}  // namespace hawkes_impact
