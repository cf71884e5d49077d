#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/impact.hpp"
#include "hawkes_impact/profile.hpp"

using namespace hawkes_impact;

namespace {

const KernelSpec kHalf(KernelFamily::power_law_shifted, 0.5);

double sup_distance(const ImpactCurve& a, const ImpactCurve& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.t.size(); ++i) s = std::max(s, std::fabs(a.mi[i] - b.mi[i]));
    return s;
}

}  // namespace

TEST_CASE("decomposition and monotone permanent impact") {
    const auto grid = lin_spaced(0.0, 5.0, 101);
    const auto p = schedule(1e3, kHalf, 1.0, 1.0, 0.1);
    const auto a = analytic_mi(p, kHalf, Profile::flat(), grid);
    const auto l = macroscopic_mi(0.5, 1.0, 0.1, Profile::flat(), grid);
    for (const auto* c : {&a, &l}) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::fabs(c->mi[i] - c->pmi[i] - c->tmi[i]) <= 1e-12);
            if (i > 0) CHECK(c->pmi[i] >= c->pmi[i - 1]);
            if (grid[i] >= 1.0) CHECK(c->pmi[i] == doctest::Approx(0.1).epsilon(1e-14));
        }
    }
    CHECK(a.mode == "analytic");
    CHECK(l.mode == "limit");
}

TEST_CASE("zero participation gives zero impact") {
    const auto grid = lin_spaced(0.0, 3.0, 31);
    const auto p = schedule(1e3, kHalf, 1.0, 1.0, 0.0);
    for (const auto& c : {analytic_mi(p, kHalf, Profile::flat(), grid), macroscopic_mi(0.5, 1.0, 0.0, Profile::flat(), grid),
                          mc_mi(p, kHalf, Profile::flat(), grid, 50, 1, McMode::conditional)}) {
        for (double v : c.mi) CHECK(v == 0.0);
    }
    const auto plain = mc_mi(p, kHalf, Profile::flat(), grid, 300, 2, McMode::plain);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(std::fabs(plain.mi[i]) <= 3.0 * plain.stderr_mi[i]);
}

TEST_CASE("limit curve values") {
    const std::vector<double> grid = {0.25, 1.0, 2.0, 50.0};
    const auto l = macroscopic_mi(0.5, 1.0, 0.1, Profile::flat(), grid);
    CHECK(l.tmi[0] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(l.tmi[2] == doctest::Approx(0.1 * (std::sqrt(2.0) - 1.0)).epsilon(1e-12));
    CHECK(l.tmi[2] == doctest::Approx(0.041421).epsilon(1e-5));
    CHECK(l.tmi[3] < 0.1 * l.tmi[1]);
    for (double t = 0.01; t <= 1.0; t += 0.01) {
        const auto c = macroscopic_mi(0.5, 1.0, 0.1, Profile::flat(), {t});
        CHECK(std::fabs(c.tmi[0] - 0.1 * std::sqrt(t)) <= 1e-6);
    }
    const auto one = macroscopic_mi(1.0, 1.0, 0.1, Profile::flat(), {0.5, 2.0});
    CHECK(one.tmi[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(one.tmi[1] == 0.0);
}

TEST_CASE("alpha = 1 limit reshapes the profile") {
    const auto f = Profile::from_points({0.0, 0.5, 1.0}, {2.0, 0.5, 1.0}, "tent");
    const auto grid = lin_spaced(0.0, 2.0, 41);
    const auto c = macroscopic_mi(1.0, 1.7, 0.1, f, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c.tmi[i] == doctest::Approx(0.1 * 1.7 * f(grid[i])));
}

TEST_CASE("finite-T analytic transient impact approaches the limit") {
    const auto p = schedule(1e4, kHalf, 1.0, 1.0, 0.1);
    const auto a = analytic_mi(p, kHalf, Profile::flat(), {0.25});
    CHECK(std::fabs(a.tmi[0] - 0.05) <= 0.005);

    const auto grid = lin_spaced(0.1, 5.0, 50);
    for (double alpha : {0.3, 0.5, 0.7}) {
        const KernelSpec spec(KernelFamily::power_law_shifted, alpha);
        const auto lim = macroscopic_mi(alpha, 1.0, 0.1, Profile::flat(), grid);
        double prev = 1e300;
        for (double T : {1e2, 1e3, 1e4}) {
            const double d = sup_distance(analytic_mi(schedule(T, spec, 1.0, 1.0, 0.1), spec, Profile::flat(), grid), lim);
            CAPTURE(alpha);
            CAPTURE(T);
            CHECK(d < prev);
            prev = d;
        }
    }
}

TEST_CASE("exact linearity in gamma") {
    const auto grid = lin_spaced(0.0, 5.0, 51);
    const auto f = Profile::from_points({0.0, 0.3, 1.0}, {0.5, 1.5, 0.8}, "bump");
    const auto p1 = schedule(2e3, kHalf, 1.0, 1.0, 0.1);
    const auto p2 = schedule(2e3, kHalf, 1.0, 1.0, 0.2);
    const auto a1 = analytic_mi(p1, kHalf, f, grid), a2 = analytic_mi(p2, kHalf, f, grid);
    const auto l1 = macroscopic_mi(0.5, 1.0, 0.1, f, grid), l2 = macroscopic_mi(0.5, 1.0, 0.2, f, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a2.mi[i] == 2.0 * a1.mi[i]);
        CHECK(l2.mi[i] == 2.0 * l1.mi[i]);
        CHECK(a2.pmi[i] == 2.0 * a1.pmi[i]);
        CHECK(l2.tmi[i] == 2.0 * l1.tmi[i]);
    }
    const auto m1 = mc_mi(p1, kHalf, f, grid, 400, 5, McMode::conditional);
    const auto m2 = mc_mi(p2, kHalf, f, grid, 400, 6, McMode::conditional);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(std::fabs(m2.mi[i] - 2.0 * m1.mi[i]) <= 3.0 * std::hypot(m2.stderr_mi[i], 2.0 * m1.stderr_mi[i]));
    }
}

TEST_CASE("Monte Carlo matches the analytic curve") {
    const auto p = schedule(2000.0, kHalf, 1.0, 1.0, 0.1);
    const auto grid = lin_spaced(0.25, 3.0, 12);
    const auto an = analytic_mi(p, kHalf, Profile::flat(), grid);
    const auto mc = mc_mi(p, kHalf, Profile::flat(), grid, 4000, 41, McMode::conditional);
    REQUIRE(mc.stderr_mi.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CAPTURE(grid[i]);
        CHECK(std::fabs(mc.mi[i] - an.mi[i]) <= 3.0 * mc.stderr_mi[i]);
        CHECK(mc.pmi[i] == an.pmi[i]);
        CHECK(mc.tmi[i] == doctest::Approx(mc.mi[i] - mc.pmi[i]));
    }
}

TEST_CASE("execution-window power law fits") {
    const auto grid = lin_spaced(0.0, 5.0, 501);
    CHECK(fit_power_law(macroscopic_mi(0.5, 1.0, 0.1, Profile::flat(), grid), FitWindow::execution).exponent ==
          doctest::Approx(0.5).epsilon(1e-3));
    CHECK(fit_power_law(macroscopic_mi(0.3, 1.0, 0.1, Profile::flat(), grid), FitWindow::execution).exponent ==
          doctest::Approx(0.7).epsilon(1e-3));
    // far from execution the transient decays like t^(-alpha) times (1 - alpha)
    const auto wide = lin_spaced(0.0, 60.0, 601);
    const auto decay = fit_power_law(macroscopic_mi(0.5, 1.0, 0.1, Profile::flat(), wide), FitWindow::decay);
    CHECK(decay.exponent < -0.45);
    CHECK(decay.exponent > -0.6);
    CHECK_THROWS_AS(fit_power_law(macroscopic_mi(0.5, 1.0, 0.1, Profile::flat(), {0.0, 0.5, 1.0}), FitWindow::execution),
                    FitError);
}

TEST_CASE("profiles") {
    const auto flat = Profile::flat();
    CHECK(flat(0.5) == 1.0);
    CHECK(flat(1.5) == 0.0);
    CHECK(flat.total() == doctest::Approx(1.0));
    const auto path = std::string("profile_test.csv");
    {
        std::ofstream os(path);
        os << "# ramp\nx,f\n0,0\n1,2\n";
    }
    const auto ramp = Profile::parse(path);
    CHECK(ramp(0.5) == doctest::Approx(1.0));
    CHECK(ramp.total() == doctest::Approx(1.0));
    CHECK(ramp.sup() == 2.0);
    CHECK_THROWS(Profile::parse("no_such_profile.csv"));
}

TEST_CASE("impact csv") {
    const auto c = macroscopic_mi(0.5, 1.0, 0.1, Profile::flat(), {0.0, 0.5, 1.0});
    std::ostringstream os;
    write_impact_csv(os, c);
    const std::string s = os.str();
    CHECK(s.find("t,mi,pmi,tmi") != std::string::npos);
    CHECK(s.find("0.5,") != std::string::npos);
}
