#include "hawkes_impact/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/format.hpp"
#include "hawkes_impact/mittag.hpp"

namespace hawkes_impact {

TestFunction::TestFunction(std::function<double(double)> fn, std::string id) : fn_(std::move(fn)), id_(std::move(id)) {
    if (!fn_) throw DomainError("TestFunction: empty function");
}

TestFunction TestFunction::zero() {
    return {[](double) { return 0.0; }, "zero"};
}

TestFunction TestFunction::linear(double u) {
    return {[u](double t) { return u * t; }, "linear:u=" + format_double(u)};
}

TestFunction TestFunction::plateau(double u, double w) {
    if (!(w > 0.0) || !(w < 1.0)) throw DomainError("plateau: w must lie in (0,1)");
    auto m = [w](double t) {
        if (t <= 1.0 - w) return t;
        if (t >= 1.0 + w) return 1.0;
        const double d = t - 1.0 + w;
        return t - d * d / (4.0 * w);
    };
    return {[u, m](double t) { return u * m(t); }, "plateau:u=" + format_double(u) + ",w=" + format_double(w)};
}

TestFunction TestFunction::constant(double u) {
    return {[u](double) { return u; }, "const:u=" + format_double(u)};
}

TestFunction TestFunction::scaled(double c) const {
    auto fn = fn_;
    return {[fn, c](double t) { return c * fn(t); }, id_ + "*" + format_double(c)};
}

namespace {

std::map<std::string, double> parse_keys(const std::string& text, const std::string& body) {
    std::map<std::string, double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("bad test function: " + text);
        try {
            std::size_t used = 0;
            const std::string val = item.substr(eq + 1);
            out[item.substr(0, eq)] = std::stod(val, &used);
            if (used != val.size()) throw UsageError("bad number in test function: " + text);
        } catch (const std::logic_error&) {
            throw UsageError("bad number in test function: " + text);
        }
    }
    return out;
}

double require(const std::map<std::string, double>& keys, const std::string& k, const std::string& text) {
    auto it = keys.find(k);
    if (it == keys.end()) throw UsageError("test function needs " + k + ": " + text);
    return it->second;
}

}  // namespace

TestFunction TestFunction::parse(const std::string& text) {
    if (text == "zero") return zero();
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const auto keys = parse_keys(text, colon == std::string::npos ? "" : text.substr(colon + 1));
    if (kind == "linear") return linear(require(keys, "u", text));
    if (kind == "const") return constant(require(keys, "u", text));
    if (kind == "plateau") {
        auto w = keys.find("w");
        try {
            return plateau(require(keys, "u", text), w == keys.end() ? 0.1 : w->second);
        } catch (const DomainError& e) {
            throw UsageError(std::string(e.what()) + " in " + text);
        }
    }
    throw UsageError("unknown test function: " + text);
}

std::vector<cplx> solve_quadratic_volterra(double alpha, double lambda, cplx q, const std::vector<cplx>& forcing,
                                           const UniformGrid& grid, const PicardOptions& opts,
                                           std::vector<double>* residuals) {
    const std::size_t n = grid.size();
    if (forcing.size() != n) throw DomainError("solve_quadratic_volterra: forcing size does not match grid");
    const mittag::MittagLefflerParams ml(alpha, lambda);
    const auto F = mittag::ml_cdf_table(ml, grid);
    const auto FF = mittag::ml_cdf_integral_table(ml, grid);
    const double h = grid.step();

    // Cell j covers lag u in [jh, (j+1)h]; A weighs the node at lag (j+1)h,
    // B the node at lag jh.
    std::vector<double> A(n, 0.0), B(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double dFF = (FF[j + 1] - FF[j]) / h;
        A[j] = F[j + 1] - dFF;
        B[j] = dFF - F[j];
    }

    std::vector<cplx> y(n, 0.0), next(n), G(n);
    double damping = 1.0;
    double prev = INFINITY;
    int rises = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        for (std::size_t k = 0; k < n; ++k) G[k] = q * y[k] * y[k] + forcing[k];
        next[0] = 0.0;
        for (std::size_t m = 1; m < n; ++m) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += A[m - 1 - k] * G[k] + B[m - 1 - k] * G[k + 1];
            next[m] = acc;
        }
        double res = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            res = std::max(res, std::abs(next[k] - y[k]));
            y[k] += damping * (next[k] - y[k]);
        }
        if (!std::isfinite(res)) throw IterationError("Volterra Picard iteration diverged", res);
        if (residuals) residuals->push_back(res);
        if (res <= opts.tolerance) return y;
        if (it > 5 && res > prev && ++rises >= 2) damping = 0.5;
        prev = res;
    }
    throw IterationError("Volterra Picard iteration did not converge", prev);
}

std::vector<cplx> exp_cumulative_integral(const std::vector<cplx>& y, double step) {
    std::vector<cplx> out(y.size());
    cplx acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i > 0) acc += 0.5 * step * (y[i - 1] + y[i]);
        out[i] = std::exp(acc);
    }
    return out;
}

namespace {

void check_params(const TestFunction& h, double delta, const UniformGrid& grid) {
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    if (grid.size() < 2) throw DomainError("grid needs at least two points");
    if (h(0.0) != 0.0) throw DomainError("test function must vanish at 0, got h(0) = " + format_double(h(0.0)));
}

}  // namespace

RiccatiSolution solve_volterra_riccati(const TestFunction& h, double alpha, double lambda, double delta,
                                       const UniformGrid& grid, const PicardOptions& opts) {
    check_params(h, delta, grid);
    std::vector<cplx> forcing(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) forcing[k] = cplx(0.0, 2.0 * h(grid[k]) / delta);
    RiccatiSolution sol;
    sol.grid = grid;
    sol.h_id = h.id();
    sol.g = solve_quadratic_volterra(alpha, lambda, 1.0 / (4.0 * delta), forcing, grid, opts, &sol.residuals);
    sol.K_of_t = exp_cumulative_integral(sol.g, grid.step());
    return sol;
}

std::vector<cplx> solve_single_side(const TestFunction& h, double alpha, double lambda, double delta,
                                    const UniformGrid& grid, const PicardOptions& opts) {
    check_params(h, delta, grid);
    std::vector<cplx> forcing(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) forcing[k] = cplx(0.0, h(grid[k]) / delta);
    return solve_quadratic_volterra(alpha, lambda, 0.5, forcing, grid, opts);
}

HawkesCharSolution hawkes_char_fixed_point(const TestFunction& h, const KernelSpec& spec, double aT,
                                           const std::function<double(double)>& nu, const UniformGrid& grid,
                                           const PicardOptions& opts) {
    if (!(aT < 1.0)) throw InstabilityError("hawkes_char_fixed_point: aT must be below 1");
    if (!(aT >= 0.0)) throw DomainError("hawkes_char_fixed_point: aT must be non-negative");
    const std::size_t n = grid.size();
    if (n < 2) throw DomainError("grid needs at least two points");
    const auto w = cell_weights(spec, grid);

    HawkesCharSolution sol;
    sol.grid = grid;
    sol.C.assign(n, 1.0);
    sol.C[0] = std::exp(cplx(0.0, h(0.0)));
    for (std::size_t m = 1; m < n; ++m) {
        // every cell except the last-node contribution of cell 0
        cplx known = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            known += w.left[m - 1 - k] * (sol.C[k] - 1.0);
            if (k + 1 < m) known += w.right[m - 1 - k] * (sol.C[k + 1] - 1.0);
        }
        const cplx base = cplx(0.0, h(grid[m])) + aT * known;
        cplx c = sol.C[m - 1];
        double res = INFINITY;
        int it = 0;
        constexpr double kNodeTol = 1e-14;
        for (; it < opts.max_iterations && res > kNodeTol; ++it) {
            const cplx next = std::exp(base + aT * w.right[0] * (c - 1.0));
            res = std::abs(next - c);
            c = next;
        }
        if (res > kNodeTol) {
            throw IterationError("Hawkes characteristic fixed point did not converge", res);
        }
        sol.C[m] = c;
    }

    std::vector<double> nu_vals(n);
    for (std::size_t k = 0; k < n; ++k) {
        nu_vals[k] = nu(grid[k]);
        if (!(nu_vals[k] >= 0.0)) throw DomainError("baseline intensity must be non-negative");
    }
    sol.L_of_t.assign(n, 1.0);
    for (std::size_t m = 1; m < n; ++m) {
        cplx acc = 0.5 * ((sol.C[0] - 1.0) * nu_vals[m] + (sol.C[m] - 1.0) * nu_vals[0]);
        for (std::size_t k = 1; k < m; ++k) acc += (sol.C[k] - 1.0) * nu_vals[m - k];
        sol.L_of_t[m] = std::exp(acc * grid.step());
    }
    return sol;
}

ComplexEstimate char_functional_mc(const std::vector<std::vector<double>>& paths, const UniformGrid& grid,
                                   const TestFunction& h, std::size_t t_index) {
    if (paths.empty()) throw DomainError("char_functional_mc: no paths");
    if (t_index >= grid.size()) throw DomainError("char_functional_mc: t_index outside grid");
    const double t = grid[t_index];
    std::vector<double> weights(t_index);
    for (std::size_t j = 0; j < t_index; ++j) weights[j] = h(t - 0.5 * (grid[j] + grid[j + 1]));
    std::vector<cplx> samples;
    samples.reserve(paths.size());
    for (const auto& x : paths) {
        if (x.size() != grid.size()) throw DomainError("char_functional_mc: path length does not match grid");
        double s = 0.0;
        for (std::size_t j = 0; j < t_index; ++j) s += weights[j] * (x[j + 1] - x[j]);
        samples.emplace_back(std::cos(s), std::sin(s));
    }
    if (samples.size() == 1) return {samples[0], 0.0};
    return complex_mean(samples);
}

ComplexEstimate char_functional_mc_events(const std::vector<std::vector<double>>& event_times, double weight,
                                          const TestFunction& h, double t) {
    if (event_times.empty()) throw DomainError("char_functional_mc_events: no replications");
    std::vector<cplx> samples;
    samples.reserve(event_times.size());
    for (const auto& ev : event_times) {
        double s = 0.0;
        for (double tau : ev) {
            if (tau <= t) s += h(t - tau);
        }
        s *= weight;
        samples.emplace_back(std::cos(s), std::sin(s));
    }
    if (samples.size() == 1) return {samples[0], 0.0};
    return complex_mean(samples);
}

void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol) {
    os << "# h=" << sol.h_id << " iterations=" << sol.residuals.size() << "\n";
    os << "t,re_g,im_g,re_K,im_K\n";
    for (std::size_t i = 0; i < sol.g.size(); ++i) {
        os << format_double(sol.grid[i]) << ',' << format_double(sol.g[i].real()) << ','
           << format_double(sol.g[i].imag()) << ',' << format_double(sol.K_of_t[i].real()) << ','
           << format_double(sol.K_of_t[i].imag()) << '\n';
    }
}

}  // namespace hawkes_impact
