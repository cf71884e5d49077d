#include "hawkes_impact/kernels.hpp"

#include <cmath>
#include <ostream>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/format.hpp"

namespace hawkes_impact {

std::string to_string(KernelFamily f) {
    return f == KernelFamily::power_law_shifted ? "power_law_shifted" : "exponential_test";
}

KernelFamily parse_family(const std::string& name) {
    if (name == "power_law_shifted" || name == "power") return KernelFamily::power_law_shifted;
    if (name == "exponential_test" || name == "exp") return KernelFamily::exponential_test;
    throw UsageError("unknown kernel family: " + name);
}

KernelSpec::KernelSpec(KernelFamily family, double alpha) : family_(family), alpha_(alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw DomainError("KernelSpec: alpha must lie in (0,1)");
}

namespace {

void check_time(double t) {
    if (!(t >= 0.0) || std::isnan(t)) throw DomainError("kernel evaluated at negative time");
}

}  // namespace

double KernelSpec::phi(double t) const {
    check_time(t);
    if (family_ == KernelFamily::exponential_test) return std::exp(-t);
    return alpha_ * std::pow(1.0 + t, -alpha_ - 1.0);
}

double KernelSpec::tail(double t) const {
    check_time(t);
    if (family_ == KernelFamily::exponential_test) return std::exp(-t);
    return std::pow(1.0 + t, -alpha_);
}

double KernelSpec::tail_integral(double t) const {
    check_time(t);
    if (family_ == KernelFamily::exponential_test) return -std::expm1(-t);
    const double b = 1.0 - alpha_;
    return std::expm1(b * std::log1p(t)) / b;
}

double KernelSpec::tail_moment(double t) const {
    check_time(t);
    if (family_ == KernelFamily::exponential_test) return 1.0 - (1.0 + t) * std::exp(-t);
    const double a = alpha_;
    const double l = std::log1p(t);
    // v^(2-a)/(2-a) - v^(1-a)/(1-a) taken between 1 and 1+t
    return std::expm1((2.0 - a) * l) / (2.0 - a) - std::expm1((1.0 - a) * l) / (1.0 - a);
}

double KernelSpec::mass(double a, double b) const {
    check_time(a);
    if (!(b >= a)) throw DomainError("mass: need b >= a");
    if (family_ == KernelFamily::exponential_test) return std::exp(-a) * -std::expm1(-(b - a));
    const double w = (b - a) / (1.0 + a);
    return std::pow(1.0 + a, -alpha_) * -std::expm1(-alpha_ * std::log1p(w));
}

namespace {

// int_a^b (u - a) phi(u) du = R(b) - R(a) - (b - a) tail(b)
double shifted_moment(const KernelSpec& k, double a, double b) {
    const double w = b - a;
    if (k.family() == KernelFamily::exponential_test) {
        return std::exp(-a) * (-std::expm1(-w) - w * std::exp(-w));
    }
    const double al = k.alpha();
    const double r = w / (1.0 + a);
    const double dR = std::pow(1.0 + a, 1.0 - al) * std::expm1((1.0 - al) * std::log1p(r)) / (1.0 - al);
    return dR - w * std::pow(1.0 + b, -al);
}

}  // namespace

double KernelSpec::first_moment(double a, double b) const {
    return a * mass(a, b) + shifted_moment(*this, a, b);
}

double MarketParams::lambda() const {
    return 1.0 / (K * std::tgamma(2.0 - alpha));
}

double phi_eval(const KernelSpec& spec, double t) { return spec.phi(t); }
double phi_tail(const KernelSpec& spec, double t) { return spec.tail(t); }

namespace {

void check_branching(double aT) {
    if (!(aT < 1.0)) throw InstabilityError("branching ratio aT must be below 1");
    if (!(aT >= 0.0)) throw DomainError("branching ratio aT must be non-negative");
}

}  // namespace

CellWeights cell_weights(const KernelSpec& spec, const UniformGrid& grid) {
    const std::size_t n = grid.size();
    const double h = grid.step();
    CellWeights w;
    w.left.assign(n, 0.0);
    w.right.assign(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double lo = grid[j];
        const double hi = grid[j + 1];
        w.left[j] = shifted_moment(spec, lo, hi) / h;
        w.right[j] = spec.mass(lo, hi) - w.left[j];
    }
    return w;
}

SampledFunction resolvent_psi(const KernelSpec& spec, double aT, const UniformGrid& grid) {
    check_branching(aT);
    const std::size_t n = grid.size();

    const auto w = cell_weights(spec, grid);
    const auto& A = w.left;
    const auto& B = w.right;
    std::vector<double> C(n);
    for (std::size_t j = 1; j + 1 < n; ++j) C[j] = A[j - 1] + B[j];

    std::vector<double> psi(n, 0.0);
    psi[0] = aT * spec.phi(0.0);
    const double diag = 1.0 - aT * B[0];
    for (std::size_t m = 1; m < n; ++m) {
        double acc = psi[0] * A[m - 1];
        for (std::size_t k = 1; k < m; ++k) acc += psi[k] * C[m - k];
        psi[m] = aT * (spec.phi(grid[m]) + acc) / diag;
    }
    return {grid, std::move(psi)};
}

double resolvent_mass(const KernelSpec& spec, double aT, const SampledFunction& psi) {
    check_branching(aT);
    const auto& g = psi.grid;
    const std::size_t n = g.size();
    const double t = g.back();
    double conv = 0.0;
    if (n > 1) {
        conv = 0.5 * (spec.tail(t) * psi.values[0] + spec.tail(0.0) * psi.values[n - 1]);
        for (std::size_t k = 1; k + 1 < n; ++k) conv += spec.tail(t - g[k]) * psi.values[k];
        conv *= g.step();
    }
    return psi.integral() + aT / (1.0 - aT) * (spec.tail(t) + conv);
}

double xi_value(const KernelSpec& spec, double aT, double t) {
    check_branching(aT);
    return 1.0 + aT / (1.0 - aT) * spec.tail(t);
}

SampledFunction xi_grid(const KernelSpec& spec, double aT, const UniformGrid& grid) {
    check_branching(aT);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = xi_value(spec, aT, grid[i]);
    return {grid, std::move(v)};
}

MarketParams schedule(double T, const KernelSpec& spec, double K, double delta, double gamma) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("schedule: T must be positive");
    if (!(K > 0.0)) throw DomainError("schedule: K must be positive");
    if (!(delta > 0.0)) throw DomainError("schedule: delta must be positive");
    if (!(gamma >= 0.0) || !(gamma < 1.0)) throw DomainError("schedule: gamma must lie in [0,1)");
    MarketParams p;
    p.T = T;
    p.K = K;
    p.delta = delta;
    p.gamma = gamma;
    p.alpha = spec.alpha();
    p.aT = 1.0 - spec.tail_integral(T) / (T * K);
    if (!(p.aT > 0.0) || !(p.aT < 1.0)) {
        throw ScheduleError("schedule: implied aT = " + format_double(p.aT) + " is outside (0,1); use a larger T");
    }
    p.muT = delta / ((1.0 - p.aT) * T);
    return p;
}

void write_sampled_csv(std::ostream& os, const SampledFunction& f, const KernelSpec& spec, double aT) {
    os << "# kernel=" << to_string(spec.family()) << " alpha=" << format_double(spec.alpha())
       << " aT=" << format_double(aT) << "\n";
    os << "t,value\n";
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        os << format_double(f.grid[i]) << ',' << format_double(f.values[i]) << '\n';
    }
}

}  // namespace hawkes_impact
