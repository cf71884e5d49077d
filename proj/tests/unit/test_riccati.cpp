#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/experiment.hpp"
#include "hawkes_impact/hawkes_sim.hpp"
#include "hawkes_impact/heston.hpp"
#include "hawkes_impact/riccati.hpp"

using namespace hawkes_impact;

namespace {

// g' = lambda (g^2/(4 delta) + 2 i h/delta - g), g(0) = 0, by classical RK4;
// returns g and K = exp(int g) on the nodes of `grid`.
std::pair<std::vector<cplx>, std::vector<cplx>> rk4_riccati(const TestFunction& h, double lambda, double delta,
                                                             const UniformGrid& grid, int substeps) {
    const cplx I(0.0, 1.0);
    auto rhs = [&](double t, cplx g) { return lambda * (g * g / (4.0 * delta) + 2.0 * I * h(t) / delta - g); };
    std::vector<cplx> g(grid.size()), K(grid.size());
    cplx y = 0.0, integral = 0.0;
    g[0] = 0.0;
    K[0] = 1.0;
    const double dt = grid.step() / substeps;
    for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
        for (int s = 0; s < substeps; ++s) {
            const double t = grid[n] + s * dt;
            // augment with the integral of g
            const cplx k1 = rhs(t, y);
            const cplx k2 = rhs(t + dt / 2, y + dt / 2.0 * k1);
            const cplx k3 = rhs(t + dt / 2, y + dt / 2.0 * k2);
            const cplx k4 = rhs(t + dt, y + dt * k3);
            integral += dt / 6.0 * (y + 2.0 * (y + dt / 4.0 * k1) + 2.0 * (y + dt / 4.0 * k2) + (y + dt * k3));
            y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        g[n + 1] = y;
        K[n + 1] = std::exp(integral);
    }
    return {g, K};
}

double sup_abs(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

const double kLambdaHalf = 2.0 / std::sqrt(std::numbers::pi);

}  // namespace

TEST_CASE("test functions") {
    CHECK(TestFunction::parse("linear:u=0.5")(2.0) == doctest::Approx(1.0));
    CHECK(TestFunction::parse("zero")(3.0) == 0.0);
    CHECK(TestFunction::parse("const:u=2")(0.0) == 2.0);
    const auto p = TestFunction::parse("plateau:u=2,w=0.2");
    CHECK(p(0.0) == 0.0);
    CHECK(p(0.5) == doctest::Approx(1.0));
    CHECK(p(3.0) == doctest::Approx(2.0));
    // C1 across the smoothing window
    const double e = 1e-6;
    for (double t : {0.8, 1.2}) CHECK((p(t + e) - p(t - e)) / (2 * e) == doctest::Approx(t < 1.0 ? 2.0 : 0.0).epsilon(1e-4));
    for (const char* bad : {"cubic:u=1", "linear", "linear:u=abc", "plateau:u=1,w=2", ""}) {
        CHECK_THROWS_AS(TestFunction::parse(bad), UsageError);
    }
    CHECK(TestFunction::linear(0.5).scaled(2.0)(1.0) == doctest::Approx(1.0));
}

TEST_CASE("zero test function") {
    const auto sol = solve_volterra_riccati(TestFunction::zero(), 0.4, 1.0, 1.0, UniformGrid::over(1.0, 100));
    for (std::size_t i = 0; i < sol.g.size(); ++i) {
        CHECK(sol.g[i] == cplx(0.0, 0.0));
        CHECK(sol.K_of_t[i] == cplx(1.0, 0.0));
    }
}

TEST_CASE("argument checks") {
    const auto grid = UniformGrid::over(1.0, 50);
    CHECK_THROWS_AS(solve_volterra_riccati(TestFunction::constant(1.0), 0.5, 1.0, 1.0, grid), DomainError);
    CHECK_THROWS_AS(solve_volterra_riccati(TestFunction::linear(1.0), 0.5, 1.0, 0.0, grid), DomainError);
    PicardOptions tight;
    tight.max_iterations = 2;
    CHECK_THROWS_AS(solve_volterra_riccati(TestFunction::linear(3.0), 0.5, 1.0, 1.0, grid, tight), IterationError);
}

TEST_CASE("alpha = 1 reduces to the classical Riccati ODE") {
    const auto h = TestFunction::linear(0.5);
    const auto grid = UniformGrid::over(2.0, 400);
    const auto sol = solve_volterra_riccati(h, 1.0, 1.0, 1.0, grid);
    const auto [g, K] = rk4_riccati(h, 1.0, 1.0, grid, 20);
    CHECK(sup_abs(sol.g, g) <= 1e-4);
    CHECK(sup_abs(sol.K_of_t, K) <= 1e-4);
    // other rates and scales
    const auto sol2 = solve_volterra_riccati(TestFunction::plateau(1.5), 1.0, 2.0, 0.7, grid);
    const auto ref2 = rk4_riccati(TestFunction::plateau(1.5), 2.0, 0.7, grid, 20);
    CHECK(sup_abs(sol2.g, ref2.first) <= 1e-4);
}

TEST_CASE("bounded characteristic functional and conjugation symmetry") {
    const auto grid = UniformGrid::over(1.0, 400);
    for (double alpha : {0.3, 0.5, 0.8}) {
        for (double u : {0.5, 2.0, 5.0}) {
            const auto plus = solve_volterra_riccati(TestFunction::linear(u), alpha, kLambdaHalf, 1.0, grid);
            const auto minus = solve_volterra_riccati(TestFunction::linear(-u), alpha, kLambdaHalf, 1.0, grid);
            CHECK(plus.g[0] == cplx(0.0, 0.0));
            CHECK(plus.K_of_t[0] == cplx(1.0, 0.0));
            for (std::size_t i = 0; i < grid.size(); ++i) {
                CHECK(std::abs(plus.K_of_t[i]) <= 1.0 + 1e-12);
                CHECK(std::abs(minus.g[i] - std::conj(plus.g[i])) <= 1e-9);
            }
        }
    }
}

TEST_CASE("Picard residuals contract after burn-in") {
    for (double alpha : {0.4, 0.7, 1.0}) {
        const auto sol = solve_volterra_riccati(TestFunction::linear(0.5), alpha, 1.0, 1.0, UniformGrid::over(1.0, 1000));
        const auto& r = sol.residuals;
        REQUIRE(r.size() >= 4);
        CHECK(r.back() <= 1e-10);
        for (std::size_t k = 3; k + 1 < r.size(); ++k) {
            if (r[k] < 1e-12) break;
            CHECK(r[k + 1] < r[k]);
        }
    }
}

TEST_CASE("single-side theta equation reproduces the combined solution") {
    const auto grid = UniformGrid::over(1.0, 800);
    for (double delta : {1.0, 0.6}) {
        const auto h = TestFunction::plateau(1.2);
        const auto sol = solve_volterra_riccati(h, 0.4, kLambdaHalf, delta, grid);
        const auto theta = solve_single_side(h.scaled(1.0 / delta), 0.4, kLambdaHalf, delta, grid);
        std::vector<cplx> scaled(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) scaled[i] = 2.0 * delta * theta[i];
        const auto K = exp_cumulative_integral(scaled, grid.step());
        CHECK(std::abs(K.back() - sol.K_of_t.back()) <= 1e-8);
    }
}

TEST_CASE("grid refinement is consistent with second order") {
    for (double alpha : {0.4, 0.7}) {
        std::vector<cplx> k;
        for (std::size_t n : {250, 500, 1000}) {
            k.push_back(solve_volterra_riccati(TestFunction::linear(0.5), alpha, 1.0, 1.0, UniformGrid::over(1.0, n))
                            .K_of_t.back());
        }
        const double d1 = std::abs(k[1] - k[0]), d2 = std::abs(k[2] - k[1]);
        CAPTURE(alpha);
        CAPTURE(d1);
        CAPTURE(d2);
        CHECK(d2 <= 4.0 * d1 / 4.0);
    }
}

TEST_CASE("Hawkes fixed point: trivial and Poisson cases") {
    const auto grid = UniformGrid::over(3.0, 300);
    const KernelSpec spec(KernelFamily::exponential_test, 0.5);
    auto one = [](double) { return 1.0; };
    const auto z = hawkes_char_fixed_point(TestFunction::zero(), spec, 0.5, one, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(z.C[i] - 1.0) <= 1e-15);
        CHECK(std::abs(z.L_of_t[i] - 1.0) <= 1e-15);
    }
    const double u = 0.8;
    const auto p = hawkes_char_fixed_point(TestFunction::constant(u), spec, 0.0, one, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const cplx expected = std::exp(grid[i] * (std::exp(cplx(0.0, u)) - 1.0));
        CHECK(std::abs(p.L_of_t[i] - expected) <= 1e-12);
    }
    CHECK_THROWS_AS(hawkes_char_fixed_point(TestFunction::constant(u), spec, 1.0, one, grid), InstabilityError);
}

TEST_CASE("Hawkes fixed point against simulation") {
    const KernelSpec spec(KernelFamily::exponential_test, 0.5);
    MarketParams params;
    params.aT = 0.5;
    params.muT = 1.0;
    const double u = 0.7;
    const auto h = TestFunction::constant(u);
    const auto grid = UniformGrid::over(5.0, 2000);
    const auto fp = hawkes_char_fixed_point(h, spec, 0.5, [](double) { return 1.0; }, grid);
    std::vector<std::vector<double>> times;
    for (std::uint64_t r = 0; r < 100000; ++r) times.push_back(simulate_hawkes(params, spec, 5.0, 42, r).times(Side::buy));
    for (double t : {1.0, 5.0}) {
        const auto mc = char_functional_mc_events(times, 1.0, h, t);
        const cplx L = fp.L_of_t[static_cast<std::size_t>(std::lround(t / grid.step()))];
        CAPTURE(t);
        CHECK(std::abs(mc.mean - L) <= 3.0 * mc.stderr_mean);
        CHECK(std::fabs(std::abs(mc.mean) - std::abs(L)) <= 3.0 * mc.stderr_mean);
    }
}

TEST_CASE("path estimator") {
    const auto grid = UniformGrid::over(1.0, 1000);
    std::vector<double> lin(grid.size());
    const double c = 1.3, u = 0.9;
    for (std::size_t i = 0; i < grid.size(); ++i) lin[i] = c * grid[i];
    const auto zero = char_functional_mc({lin, lin}, grid, TestFunction::zero(), grid.size() - 1);
    CHECK(zero.mean == cplx(1.0, 0.0));
    CHECK(zero.stderr_mean == 0.0);
    const auto est = char_functional_mc({lin}, grid, TestFunction::linear(u), grid.size() - 1);
    CHECK(std::abs(est.mean - std::exp(cplx(0.0, u * c / 2.0))) <= 1e-6);
    CHECK_THROWS_AS(char_functional_mc({}, grid, TestFunction::zero(), 1), DomainError);
}

TEST_CASE("Riccati functional against hyper-rough paths") {
    const double alpha = 0.4, delta = 1.0, lambda = 1.0 / std::tgamma(2.0 - alpha);
    const auto grid = UniformGrid::over(1.0, 2048);
    std::vector<std::vector<double>> paths;
    fold_heston({alpha, lambda, delta}, grid, 400, 3, [&](std::size_t, HestonPath&& p) { paths.push_back(p.variance.X); });
    for (const auto& h : {TestFunction::linear(0.5), TestFunction::plateau(1.5)}) {
        const auto K = solve_volterra_riccati(h, alpha, lambda, delta, UniformGrid::over(1.0, 1000)).K_of_t.back();
        const auto mc = char_functional_mc(paths, grid, h, grid.size() - 1);
        CAPTURE(h.id());
        CHECK(std::abs(mc.mean - K) <= 3.0 * mc.stderr_mean);
    }
}

TEST_CASE("Riccati functional against rescaled Hawkes, plateau test function") {
    const double alpha = 0.5;
    const KernelSpec spec(KernelFamily::power_law_shifted, alpha);
    const auto params = schedule(1e4, spec, 1.0, 1.0, 0.0);
    CHECK(params.lambda() == doctest::Approx(kLambdaHalf).epsilon(1e-14));
    const auto h = TestFunction::plateau(1.0);
    const auto K = solve_volterra_riccati(h, alpha, params.lambda(), 1.0, UniformGrid::over(1.0, 1000)).K_of_t.back();
    CHECK(std::abs(K) <= 1.0);
    const auto soe = soe_fit(spec, 12, params.T);
    std::vector<cplx> samples(2000);
    fold_rescaled(params, spec, h, samples.size(), 19, &soe,
                  [&](std::size_t i, const RescaledReplication& r) { samples[i] = std::exp(cplx(0.0, r.phase)); });
    const auto mc = complex_mean(samples);
    CHECK(std::abs(mc.mean - K) <= 3.0 * mc.stderr_mean);
}

TEST_CASE("riccati csv") {
    const auto sol = solve_volterra_riccati(TestFunction::linear(0.5), 0.5, 1.0, 1.0, UniformGrid::over(1.0, 10));
    std::ostringstream os;
    write_riccati_csv(os, sol);
    CHECK(os.str().find("t,re_g,im_g,re_K,im_K") != std::string::npos);
}
