#include "hawkes_impact/heston.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/format.hpp"
#include "hawkes_impact/mittag.hpp"
#include "hawkes_impact/random.hpp"
#include "hawkes_impact/stats.hpp"

namespace hawkes_impact {

std::vector<double> VariancePath::time_changed_w(double delta) const {
    std::vector<double> w(grid.size(), 0.0);
    const double s = 1.0 / std::sqrt(delta);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) w[k + 1] = w[k] + s * (dWa[k] + dWb[k]);
    return w;
}

namespace {

void check_common(const HestonParams& p, const UniformGrid& grid) {
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) throw DomainError("heston: lambda must be positive");
    if (!(p.delta > 0.0)) throw DomainError("heston: delta must be positive");
    if (grid.size() < 2) throw DomainError("heston: grid needs at least two points");
}

// Price increments (dWa - dWb)/sqrt(delta), X = (Xa + Xb)/delta.
void combine(HestonPath& out, double delta) {
    auto& v = out.variance;
    const std::size_t n = v.grid.size();
    v.X.resize(n);
    for (std::size_t i = 0; i < n; ++i) v.X[i] = (v.Xa[i] + v.Xb[i]) / delta;
    out.price.grid = v.grid;
    out.price.price.assign(n, 0.0);
    const double s = 1.0 / std::sqrt(delta);
    for (std::size_t k = 0; k + 1 < n; ++k) out.price.price[k + 1] = out.price.price[k] + s * (v.dWa[k] - v.dWb[k]);
}

struct KernelTables {
    double alpha = -1.0, lambda = -1.0, step = -1.0;
    std::size_t size = 0;
    std::vector<double> F, FF;
};

// F and its integral on the grid; paths of one experiment share them.
const KernelTables& kernel_tables(const HestonParams& p, const UniformGrid& grid) {
    thread_local KernelTables cache;
    if (cache.alpha != p.alpha || cache.lambda != p.lambda || cache.step != grid.step() || cache.size != grid.size()) {
        const mittag::MittagLefflerParams ml(p.alpha, p.lambda);
        cache.F = mittag::ml_cdf_table(ml, grid);
        cache.FF = mittag::ml_cdf_integral_table(ml, grid);
        cache.alpha = p.alpha;
        cache.lambda = p.lambda;
        cache.step = grid.step();
        cache.size = grid.size();
    }
    return cache;
}

}  // namespace

HestonPath simulate_rough_heston(const HestonParams& p, const UniformGrid& grid, std::uint64_t seed,
                                 std::uint64_t replication) {
    check_common(p, grid);
    if (!(p.alpha > 0.5) || !(p.alpha <= 1.0)) {
        throw DomainError("simulate_rough_heston needs alpha in (1/2, 1]; use simulate_hyper_rough for alpha <= 1/2");
    }
    const std::size_t n = grid.size();
    const double h = grid.step();
    const double sigma = 1.0 / std::sqrt(p.delta * p.lambda);
    // d[m] = lambda/Gamma(alpha) int over the cell at lag m of (lag)^(alpha-1)
    std::vector<double> d(n, 0.0);
    const double c = p.lambda * std::pow(h, p.alpha) / std::tgamma(p.alpha + 1.0);
    for (std::size_t m = 1; m < n; ++m) {
        const double md = static_cast<double>(m);
        d[m] = c * (std::pow(md, p.alpha) - std::pow(md - 1.0, p.alpha));
    }

    HestonPath out;
    auto& v = out.variance;
    v.grid = grid;
    const double sqh = std::sqrt(h);
    auto run_side = [&](Stream stream, std::vector<double>& Y, std::vector<double>& X, std::vector<double>& dW) {
        Rng rng = make_rng(seed, replication, stream);
        std::normal_distribution<double> normal;
        std::vector<double> raw(n, 0.0), drive(n, 0.0);
        Y.assign(n, 0.0);
        X.assign(n, 0.0);
        dW.assign(n - 1, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double yp = std::max(raw[k], 0.0);
            const double dB = sqh * normal(rng);
            dW[k] = std::sqrt(yp) * dB;
            drive[k] = (1.0 - raw[k]) + sigma * std::sqrt(yp) * dB / h;
            double acc = 0.0;
            for (std::size_t j = 0; j <= k; ++j) acc += d[k + 1 - j] * drive[j];
            raw[k + 1] = acc;
            Y[k + 1] = std::max(acc, 0.0);
            X[k + 1] = X[k] + 0.5 * h * (Y[k] + Y[k + 1]);
        }
    };
    run_side(Stream::variance_a, v.Ya, v.Xa, v.dWa);
    run_side(Stream::variance_b, v.Yb, v.Xb, v.dWb);
    v.Y.resize(n);
    for (std::size_t i = 0; i < n; ++i) v.Y[i] = (v.Ya[i] + v.Yb[i]) / p.delta;
    combine(out, p.delta);
    out.price.rho.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = v.Ya[i] + v.Yb[i];
        out.price.rho[i] = s > 0.0 ? (v.Ya[i] - v.Yb[i]) / s : 0.0;
    }
    return out;
}

HestonPath simulate_hyper_rough(const HestonParams& p, const UniformGrid& grid, std::uint64_t seed,
                                std::uint64_t replication) {
    check_common(p, grid);
    if (!(p.alpha > 0.0) || !(p.alpha <= 0.5)) {
        throw DomainError("simulate_hyper_rough needs alpha in (0, 1/2]; use simulate_rough_heston for alpha > 1/2");
    }
    const std::size_t n = grid.size();
    const double sigma = 1.0 / std::sqrt(p.delta * p.lambda);
    const auto& tables = kernel_tables(p, grid);
    const auto& F = tables.F;
    const auto& FF = tables.FF;

    HestonPath out;
    auto& v = out.variance;
    v.grid = grid;
    auto run_side = [&](Stream stream, std::vector<double>& X, std::vector<double>& Z) {
        Rng rng = make_rng(seed, replication, stream);
        std::normal_distribution<double> normal;
        X.assign(n, 0.0);
        Z.assign(n - 1, 0.0);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            // F(t_{j+1} - t_{k+1}) weighs Z_k; the k = j weight is F(0) = 0.
            double acc = FF[j + 1];
            for (std::size_t k = 0; k < j; ++k) acc += sigma * F[j - k] * Z[k];
            if (acc < X[j]) {
                ++v.clamped;
                acc = X[j];
            }
            X[j + 1] = acc;
            Z[j] = std::sqrt(X[j + 1] - X[j]) * normal(rng);
        }
    };
    run_side(Stream::variance_a, v.Xa, v.dWa);
    run_side(Stream::variance_b, v.Xb, v.dWb);
    combine(out, p.delta);
    return out;
}

HestonPath simulate_heston(const HestonParams& p, const UniformGrid& grid, std::uint64_t seed,
                           std::uint64_t replication) {
    return p.alpha > 0.5 ? simulate_rough_heston(p, grid, seed, replication)
                         : simulate_hyper_rough(p, grid, seed, replication);
}

double expected_variance(const HestonParams& p, double t) {
    return 2.0 / p.delta * mittag::ml_cdf_integral(mittag::MittagLefflerParams(p.alpha, p.lambda), t);
}

std::vector<double> fractional_derivative(const std::vector<double>& path, double alpha, const UniformGrid& grid) {
    if (!(alpha >= 0.0) || !(alpha < 1.0)) throw DomainError("fractional_derivative: alpha must lie in [0,1)");
    if (path.size() != grid.size()) throw DomainError("fractional_derivative: path length does not match grid");
    if (path.empty() || path[0] != 0.0) throw DomainError("fractional_derivative: path must start at 0");
    const std::size_t n = grid.size();
    const double b = 1.0 - alpha;
    std::vector<double> w(n, 0.0);
    for (std::size_t m = 1; m < n; ++m) {
        const double md = static_cast<double>(m);
        w[m] = std::pow(md, b) - std::pow(md - 1.0, b);
    }
    // slope on each cell times the exact kernel integral over that cell
    const double scale = std::pow(grid.step(), -alpha) / std::tgamma(2.0 - alpha);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < i; ++k) acc += w[i - k] * (path[k + 1] - path[k]);
        out[i] = scale * acc;
    }
    return out;
}

RoughnessEstimate roughness_estimate(const std::vector<std::vector<double>>& paths, const UniformGrid& grid,
                                     const std::vector<double>& q_list, const std::vector<double>& lags) {
    if (paths.empty()) throw DomainError("roughness_estimate: no paths");
    if (q_list.empty()) throw DomainError("roughness_estimate: empty q list");
    if (lags.size() < 3) throw DomainError("roughness_estimate: need at least three lags");
    const double h = grid.step();
    std::vector<std::size_t> steps;
    for (double d : lags) {
        if (d < h * (1.0 - 1e-9)) throw DomainError("roughness_estimate: lag " + format_double(d) + " below grid step");
        const auto s = static_cast<std::size_t>(std::llround(d / h));
        if (s + 1 >= grid.size()) throw DomainError("roughness_estimate: lag beyond grid");
        steps.push_back(s);
    }
    for (const auto& x : paths) {
        if (x.size() != grid.size()) throw DomainError("roughness_estimate: path length does not match grid");
    }
    for (double q : q_list) {
        if (!(q > 0.0)) throw DomainError("roughness_estimate: q must be positive");
    }

    RoughnessEstimate est;
    est.q = q_list;
    std::vector<double> log_lag;
    for (auto s : steps) log_lag.push_back(std::log(static_cast<double>(s) * h));
    for (double q : q_list) {
        std::vector<double> log_m;
        for (auto s : steps) {
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& x : paths) {
                for (std::size_t i = 0; i + s < x.size(); ++i) sum += std::pow(std::fabs(x[i + s] - x[i]), q);
                count += x.size() - s;
            }
            const double m = sum / static_cast<double>(count);
            if (!(m > 0.0)) throw FitError("roughness_estimate: path has no increments");
            log_m.push_back(std::log(m));
        }
        const auto fit = linear_fit(log_lag, log_m);
        est.zeta.push_back(fit.slope);
        est.zeta_stderr.push_back(fit.slope_stderr);
        est.slope_over_q.push_back(fit.slope / q);
    }
    if (q_list.size() >= 3) {
        const auto fit = linear_fit(est.q, est.zeta);
        est.regularity = fit.slope;
        est.regularity_stderr = fit.slope_stderr;
    } else if (q_list.size() == 2) {
        est.regularity = (est.zeta[1] - est.zeta[0]) / (est.q[1] - est.q[0]);
        est.regularity_stderr = std::hypot(est.zeta_stderr[0], est.zeta_stderr[1]) / std::fabs(est.q[1] - est.q[0]);
    } else {
        est.regularity = est.slope_over_q[0];
        est.regularity_stderr = est.zeta_stderr[0] / est.q[0];
    }
    return est;
}

std::vector<double> brownian_path(const UniformGrid& grid, std::uint64_t seed, std::uint64_t replication) {
    Rng rng = make_rng(seed, replication, Stream::aux);
    std::normal_distribution<double> normal;
    const double sq = std::sqrt(grid.step());
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t k = 1; k < w.size(); ++k) w[k] = w[k - 1] + sq * normal(rng);
    return w;
}

void write_variance_csv(std::ostream& os, const VariancePath& v) {
    os << "# clamped=" << v.clamped << "\n";
    os << (v.has_spot() ? "t,Xa,Xb,X,Ya,Yb,Y\n" : "t,Xa,Xb,X\n");
    for (std::size_t i = 0; i < v.grid.size(); ++i) {
        os << format_double(v.grid[i]) << ',' << format_double(v.Xa[i]) << ',' << format_double(v.Xb[i]) << ','
           << format_double(v.X[i]);
        if (v.has_spot()) {
            os << ',' << format_double(v.Ya[i]) << ',' << format_double(v.Yb[i]) << ',' << format_double(v.Y[i]);
        }
        os << '\n';
    }
}

void write_macro_price_csv(std::ostream& os, const MacroPricePath& p) {
    os << (p.rho.empty() ? "t,price\n" : "t,price,rho\n");
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        os << format_double(p.grid[i]) << ',' << format_double(p.price[i]);
        if (!p.rho.empty()) os << ',' << format_double(p.rho[i]);
        os << '\n';
    }
}

}  // namespace hawkes_impact
