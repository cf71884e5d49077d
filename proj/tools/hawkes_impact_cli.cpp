// Command line front end: per-module subcommands plus `run --config`.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/experiment.hpp"
#include "hawkes_impact/format.hpp"
#include "hawkes_impact/heston.hpp"
#include "hawkes_impact/impact.hpp"
#include "hawkes_impact/mittag.hpp"
#include "hawkes_impact/riccati.hpp"
#include "hawkes_impact/stats.hpp"

namespace hi = hawkes_impact;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFlags = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
}

struct MlOpts {
    double alpha = 0.5, beta = 1.0, z = 0.0;
};

struct SimulateOpts {
    double alpha = 0.5, T = 1000.0, K = 1.0, delta = 1.0, gamma = 0.0;
    std::optional<double> aT, horizon;
    std::string kernel = "power", profile = "flat", engine = "exact";
    std::size_t reps = 1, grid_points = 201, soe_terms = 12;
    std::uint64_t seed = 0;
    std::string out;
};

struct ImpactOpts {
    std::string mode = "analytic", profile = "flat", engine = "exact", mc_mode = "conditional";
    double alpha = 0.5, K = 1.0, gamma = 0.1, T = 1e4, t_max = 5.0;
    std::size_t grid_points = 201, reps = 1000;
    std::uint64_t seed = 0;
    std::string out;
};

struct RiccatiOpts {
    double alpha = 0.5, lambda = 1.0, delta = 1.0, tmax = 1.0;
    std::string h = "linear:u=0.5";
    std::size_t steps = 1000;
    std::string out;
};

struct HestonOpts {
    double alpha = 0.6, delta = 1.0;
    std::optional<double> lambda, K;
    std::size_t paths = 1, steps = 4096;
    std::uint64_t seed = 0;
    std::string out;
};

hi::MarketParams market(const SimulateOpts& o, const hi::KernelSpec& spec) {
    if (!o.aT) return hi::schedule(o.T, spec, o.K, o.delta, o.gamma);
    hi::MarketParams p;
    p.T = o.T;
    p.K = o.K;
    p.delta = o.delta;
    p.gamma = o.gamma;
    p.alpha = o.alpha;
    p.aT = *o.aT;
    if (!(p.aT >= 0.0) || !(p.aT < 1.0)) throw hi::UsageError("--aT must lie in [0,1)");
    p.muT = o.delta / ((1.0 - p.aT) * o.T);
    return p;
}

int cmd_ml(const MlOpts& o) {
    std::cout << hi::format_double(hi::mittag::ml_e(o.alpha, o.beta, o.z)) << '\n';
    return kExitPass;
}

int cmd_simulate(const SimulateOpts& o) {
    const hi::KernelSpec spec(hi::parse_family(o.kernel), o.alpha);
    const auto params = market(o, spec);
    const auto f = hi::Profile::parse(o.profile);
    const double horizon = o.horizon.value_or(o.T);
    std::optional<hi::SoeKernel> soe;
    if (o.engine == "soe") {
        soe = hi::soe_fit(spec, static_cast<int>(o.soe_terms), horizon);
    } else if (o.engine != "exact") {
        throw hi::UsageError("--engine must be exact or soe");
    }
    const auto grid = hi::lin_spaced(0.0, horizon, o.grid_points);
    hi::RunningStats counts;
    for (std::size_t r = 0; r < o.reps; ++r) {
        const auto flow = hi::simulate_order_flow(params, spec, f, horizon, o.seed, r, soe ? &*soe : nullptr);
        const auto merged = hi::merge(hi::merge(flow.buy, flow.sell), flow.meta);
        counts.add(static_cast<double>(flow.buy.events.size() + flow.sell.events.size()));
        auto ev = open_out(o.out, "events_" + std::to_string(r) + ".csv");
        hi::write_events_csv(ev, merged, o.seed, params.T, o.alpha);
        auto pr = open_out(o.out, "price_" + std::to_string(r) + ".csv");
        hi::write_price_csv(pr, hi::price_path(flow.buy, flow.sell, flow.meta, spec, params, grid), o.seed, params.T,
                            o.alpha);
    }
    std::cout << "aT=" << hi::format_double(params.aT) << " muT=" << hi::format_double(params.muT)
              << " mean_hawkes_events=" << hi::format_double(counts.mean()) << '\n';
    return kExitPass;
}

void write_figure1(const fs::path& dir, const ImpactOpts& o) {
    const auto grid = hi::lin_spaced(0.0, o.t_max, o.grid_points);
    const auto c = hi::macroscopic_mi(o.alpha, o.K, o.gamma, hi::Profile::flat(), grid);
    auto os = open_out(dir, "figure1.csv");
    os << "# mode=limit alpha=" << hi::format_double(o.alpha) << " K=" << hi::format_double(o.K)
       << " gamma=" << hi::format_double(o.gamma) << " profile=flat\n";
    os << "t,mi,pmi,tmi\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << hi::format_double(c.t[i]) << ',' << hi::format_double(c.mi[i]) << ',' << hi::format_double(c.pmi[i])
           << ',' << hi::format_double(c.tmi[i]) << '\n';
    }
}

int cmd_impact(const ImpactOpts& o, bool seed_given) {
    const auto f = hi::Profile::parse(o.profile);
    const auto grid = hi::lin_spaced(0.0, o.t_max, o.grid_points);
    hi::ImpactCurve curve;
    if (o.mode == "limit") {
        curve = hi::macroscopic_mi(o.alpha, o.K, o.gamma, f, grid);
    } else {
        const hi::KernelSpec spec(hi::KernelFamily::power_law_shifted, o.alpha);
        const auto params = hi::schedule(o.T, spec, o.K, 1.0, o.gamma);
        if (o.mode == "analytic") {
            curve = hi::analytic_mi(params, spec, f, grid);
        } else if (o.mode == "mc") {
            if (!seed_given) throw hi::UsageError("--seed is required for --mode mc");
            std::optional<hi::SoeKernel> soe;
            if (o.engine == "soe") soe = hi::soe_fit(spec, 12, o.T * (o.t_max + 1.0));
            else if (o.engine != "exact") throw hi::UsageError("--engine must be exact or soe");
            hi::McMode mode;
            if (o.mc_mode == "plain") mode = hi::McMode::plain;
            else if (o.mc_mode == "conditional") mode = hi::McMode::conditional;
            else throw hi::UsageError("--mc-mode must be plain or conditional");
            curve = hi::mc_mi(params, spec, f, grid, o.reps, o.seed, mode, soe ? &*soe : nullptr);
        } else {
            throw hi::UsageError("--mode must be analytic, mc or limit");
        }
    }
    auto os = open_out(o.out, "impact.csv");
    hi::write_impact_csv(os, curve);
    if (std::fabs(o.alpha - 0.5) < 1e-12) write_figure1(o.out, o);
    return kExitPass;
}

int cmd_riccati(const RiccatiOpts& o) {
    const auto h = hi::TestFunction::parse(o.h);
    const auto grid = hi::UniformGrid::over(o.tmax, o.steps);
    const auto sol = hi::solve_volterra_riccati(h, o.alpha, o.lambda, o.delta, grid);
    auto os = open_out(o.out, "riccati.csv");
    hi::write_riccati_csv(os, sol);
    const auto k = sol.K_of_t.back();
    std::cout << "K=" << hi::format_double(k.real()) << (k.imag() < 0 ? "" : "+") << hi::format_double(k.imag())
              << "i iterations=" << sol.residuals.size() << '\n';
    return kExitPass;
}

int cmd_heston(const HestonOpts& o) {
    if (o.lambda.has_value() == o.K.has_value()) throw hi::UsageError("give exactly one of --lambda and --K");
    const double lambda = o.lambda ? *o.lambda : 1.0 / (*o.K * std::tgamma(2.0 - o.alpha));
    const hi::HestonParams p{o.alpha, lambda, o.delta};
    const auto grid = hi::UniformGrid::over(1.0, o.steps);
    hi::RunningStats x1;
    std::size_t clamped = 0;
    hi::fold_heston(p, grid, o.paths, o.seed, [&](std::size_t i, hi::HestonPath&& path) {
        x1.add(path.variance.X.back());
        clamped += path.variance.clamped;
        auto v = open_out(o.out, "variance_" + std::to_string(i) + ".csv");
        hi::write_variance_csv(v, path.variance);
        auto pr = open_out(o.out, "price_" + std::to_string(i) + ".csv");
        hi::write_macro_price_csv(pr, path.price);
    });
    std::cout << "mean_X1=" << hi::format_double(x1.mean())
              << " expected_X1=" << hi::format_double(hi::expected_variance(p, 1.0))
              << " clamp_fraction=" << hi::format_double(static_cast<double>(clamped) / (2.0 * o.paths * o.steps))
              << '\n';
    return kExitPass;
}

int cmd_run(const std::string& config) {
    const auto cfg = hi::ExperimentConfig::load(config);
    const auto art = hi::run_experiment(cfg);
    for (const auto& [name, ok] : art.summary.at("flags").items()) {
        std::cout << (ok.get<bool>() ? "PASS " : "FAIL ") << name << '\n';
    }
    std::cout << "summary: " << (cfg.output_dir / "summary.json").string() << '\n';
    return art.passed ? kExitPass : kExitFlags;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hawkes order flow, market impact and rough Heston limits"};
    app.require_subcommand(1);

    auto* ml_grp = app.add_subcommand("ml", "Mittag-Leffler utilities");
    ml_grp->require_subcommand(1);
    MlOpts ml;
    auto* ml_eval = ml_grp->add_subcommand("eval", "print E_{alpha,beta}(z)");
    ml_eval->add_option("--alpha", ml.alpha)->required();
    ml_eval->add_option("--beta", ml.beta)->required();
    ml_eval->add_option("--z", ml.z)->required();

    SimulateOpts sim;
    auto* simulate = app.add_subcommand("simulate", "simulate order flow and price paths");
    simulate->add_option("--alpha", sim.alpha);
    simulate->add_option("--T", sim.T);
    simulate->add_option("--aT", sim.aT, "branching ratio; default comes from the schedule");
    simulate->add_flag_function("--schedule", [](std::int64_t) {}, "use the near-instability schedule (default)");
    simulate->add_option("--K", sim.K);
    simulate->add_option("--delta", sim.delta);
    simulate->add_option("--gamma", sim.gamma);
    simulate->add_option("--kernel", sim.kernel, "power or exp");
    simulate->add_option("--profile", sim.profile, "flat or a CSV file");
    simulate->add_option("--horizon", sim.horizon, "simulation horizon, default T");
    simulate->add_option("--grid-points", sim.grid_points);
    simulate->add_option("--reps", sim.reps);
    simulate->add_option("--seed", sim.seed)->required();
    simulate->add_option("--engine", sim.engine, "exact or soe");
    simulate->add_option("--soe-terms", sim.soe_terms);
    simulate->add_option("--out", sim.out)->required();

    ImpactOpts imp;
    auto* impact = app.add_subcommand("impact", "market impact curves");
    impact->add_option("--mode", imp.mode, "analytic, mc or limit");
    impact->add_option("--alpha", imp.alpha);
    impact->add_option("--K", imp.K);
    impact->add_option("--gamma", imp.gamma);
    impact->add_option("--T", imp.T);
    impact->add_option("--profile", imp.profile);
    impact->add_option("--grid-points", imp.grid_points);
    impact->add_option("--t-max", imp.t_max);
    impact->add_option("--reps", imp.reps);
    auto* imp_seed = impact->add_option("--seed", imp.seed);
    impact->add_option("--engine", imp.engine, "exact or soe");
    impact->add_option("--mc-mode", imp.mc_mode, "plain or conditional");
    impact->add_option("--out", imp.out)->required();

    RiccatiOpts ric;
    auto* riccati = app.add_subcommand("riccati", "solve the Volterra Riccati equation");
    riccati->set_help_flag("--help", "Print this help message and exit");
    riccati->add_option("--alpha", ric.alpha);
    riccati->add_option("--lambda", ric.lambda);
    riccati->add_option("--delta", ric.delta);
    riccati->add_option("--h", ric.h, "linear:u=.., plateau:u=..,w=.. or zero");
    riccati->add_option("--tmax", ric.tmax);
    riccati->add_option("--steps", ric.steps);
    riccati->add_option("--out", ric.out)->required();

    HestonOpts hes;
    auto* heston = app.add_subcommand("heston", "simulate rough / hyper-rough Heston paths");
    heston->add_option("--alpha", hes.alpha);
    heston->add_option("--lambda", hes.lambda);
    heston->add_option("--K", hes.K);
    heston->add_option("--delta", hes.delta);
    heston->add_option("--paths", hes.paths);
    heston->add_option("--steps", hes.steps);
    heston->add_option("--seed", hes.seed)->required();
    heston->add_option("--out", hes.out)->required();

    std::string config;
    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("--config", config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (ml_eval->parsed()) return cmd_ml(ml);
        if (simulate->parsed()) return cmd_simulate(sim);
        if (impact->parsed()) return cmd_impact(imp, imp_seed->count() > 0);
        if (riccati->parsed()) return cmd_riccati(ric);
        if (heston->parsed()) return cmd_heston(hes);
        if (run->parsed()) return cmd_run(config);
    } catch (const hi::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
