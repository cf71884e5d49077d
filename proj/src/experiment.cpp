#include "hawkes_impact/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/format.hpp"
#include "hawkes_impact/impact.hpp"
#include "hawkes_impact/parallel.hpp"
#include "hawkes_impact/stats.hpp"

namespace hawkes_impact {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Schema {
    ExperimentKind kind;
    const char* name;
    std::vector<std::string> required;
    std::vector<std::string> optional;
};

const std::vector<Schema>& schemas() {
    static const std::vector<Schema> s = {
        {ExperimentKind::figure1_impact, "figure1_impact", {"alpha", "K", "gamma", "seed"},
         {"T", "reps", "grid_points", "t_max"}},
        {ExperimentKind::impact_convergence, "impact_convergence", {"alpha", "K", "gamma", "T", "seed"},
         {"grid_points", "t_max"}},
        {ExperimentKind::char_function_bridge, "char_function_bridge", {"alpha", "K", "delta", "u", "paths", "steps", "seed"},
         {"T", "reps", "soe_terms"}},
        {ExperimentKind::roughness_sweep, "roughness_sweep", {"alpha", "K", "delta", "paths", "steps", "seed"}, {}},
        {ExperimentKind::micro_macro_price, "micro_macro_price", {"alpha", "K", "delta", "T", "reps", "steps", "seed"},
         {"soe_terms"}},
    };
    return s;
}

const Schema& schema_for(ExperimentKind k) {
    for (const auto& s : schemas()) {
        if (s.kind == k) return s;
    }
    throw UsageError("no schema for experiment");
}

bool numeric_value(const json& v) {
    if (v.is_number()) return true;
    if (!v.is_array() || v.empty()) return false;
    return std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
}

}  // namespace

std::string to_string(ExperimentKind k) { return schema_for(k).name; }

ExperimentKind parse_experiment(const std::string& name) {
    for (const auto& s : schemas()) {
        if (name == s.name) return s.kind;
    }
    throw UsageError("unknown experiment: " + name);
}

ExperimentConfig ExperimentConfig::from_json(const json& doc_in) {
    const json& doc = doc_in.contains("config") ? doc_in.at("config") : doc_in;
    if (!doc.is_object()) throw UsageError("config must be a JSON object");
    if (!doc.contains("experiment") || !doc.at("experiment").is_string()) {
        throw UsageError("config needs a string field 'experiment'");
    }
    ExperimentConfig cfg;
    cfg.experiment = parse_experiment(doc.at("experiment").get<std::string>());
    if (doc.contains("parameters")) {
        if (!doc.at("parameters").is_object()) throw UsageError("'parameters' must be an object");
        cfg.parameters = doc.at("parameters");
    }
    if (!doc.contains("output_dir") || !doc.at("output_dir").is_string()) {
        throw UsageError("config needs a string field 'output_dir'");
    }
    cfg.output_dir = doc.at("output_dir").get<std::string>();

    const auto& sc = schema_for(cfg.experiment);
    std::set<std::string> allowed(sc.required.begin(), sc.required.end());
    allowed.insert(sc.optional.begin(), sc.optional.end());
    for (const auto& key : sc.required) {
        if (!cfg.parameters.contains(key)) throw UsageError(std::string(sc.name) + " needs parameter '" + key + "'");
    }
    for (auto it = cfg.parameters.begin(); it != cfg.parameters.end(); ++it) {
        if (!allowed.count(it.key())) throw UsageError("unknown parameter '" + it.key() + "' for " + sc.name);
        if (!numeric_value(it.value())) throw UsageError("parameter '" + it.key() + "' must be a number or list of numbers");
    }
    const double seed = cfg.number("seed");
    if (!(seed >= 0.0) || seed != std::floor(seed) || seed > 9.007e15) {
        throw UsageError("seed must be a non-negative integer");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

json ExperimentConfig::to_json() const {
    return {{"experiment", to_string(experiment)}, {"parameters", parameters}, {"output_dir", output_dir.string()}};
}

double ExperimentConfig::number(const std::string& key) const {
    if (!parameters.contains(key)) throw UsageError("missing parameter '" + key + "'");
    const auto& v = parameters.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.size() == 1) return v.at(0).get<double>();
    throw UsageError("parameter '" + key + "' must be a single number");
}

double ExperimentConfig::number_or(const std::string& key, double fallback) const {
    return parameters.contains(key) ? number(key) : fallback;
}

std::vector<double> ExperimentConfig::list(const std::string& key) const {
    if (!parameters.contains(key)) throw UsageError("missing parameter '" + key + "'");
    const auto& v = parameters.at(key);
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
}

std::uint64_t ExperimentConfig::seed() const { return static_cast<std::uint64_t>(number("seed")); }

// ---------------------------------------------------------------------------
// Monte Carlo drivers

RescaledReplication rescaled_replication(const MarketParams& params, const KernelSpec& spec, const TestFunction& h,
                                         std::uint64_t seed, std::uint64_t replication, const SoeKernel* soe) {
    const double T = params.T;
    const double unit = 1.0 / (T * params.betaT());
    RescaledReplication r;
    double count = 0.0;
    for (Side side : {Side::buy, Side::sell}) {
        const auto s = simulate_hawkes(params, spec, T, seed, replication, side, soe);
        const double sign = side == Side::buy ? 1.0 : -1.0;
        for (const auto& e : s.events) {
            count += 1.0;
            r.price1 += sign * xi_value(spec, params.aT, T - e.time);
            r.phase += h(1.0 - e.time / T);
        }
    }
    r.X1 = count * unit / params.delta;
    r.price1 *= unit;
    r.phase *= unit / params.delta;
    return r;
}

void fold_rescaled(const MarketParams& params, const KernelSpec& spec, const TestFunction& h, std::size_t reps,
                   std::uint64_t seed, const SoeKernel* soe,
                   const std::function<void(std::size_t, const RescaledReplication&)>& fold) {
    ordered_fold(
        reps, [&](std::size_t i) { return rescaled_replication(params, spec, h, seed, i, soe); },
        [&](std::size_t i, RescaledReplication r) { fold(i, r); });
}

void fold_heston(const HestonParams& p, const UniformGrid& grid, std::size_t paths, std::uint64_t seed,
                 const std::function<void(std::size_t, HestonPath&&)>& fold) {
    ordered_fold(
        paths, [&](std::size_t i) { return simulate_heston(p, grid, seed, i); },
        [&](std::size_t i, HestonPath path) { fold(i, std::move(path)); });
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Context {
    const ExperimentConfig& cfg;
    RunArtifact& art;

    void table(const std::string& name, const std::function<void(std::ostream&)>& writer) {
        const fs::path file = cfg.output_dir / (name + ".csv");
        std::ofstream os(file);
        if (!os) throw std::runtime_error("cannot write " + file.string());
        writer(os);
        art.tables[name] = file;
    }
    void flag(const std::string& name, bool ok) {
        art.summary["flags"][name] = ok;
        if (!ok) art.passed = false;
    }
};

std::size_t count_param(const ExperimentConfig& cfg, const std::string& key, double fallback = -1.0) {
    const double v = fallback < 0.0 ? cfg.number(key) : cfg.number_or(key, fallback);
    if (!(v >= 0.0) || v != std::floor(v)) throw UsageError("parameter '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::vector<double> time_grid(double t_max, std::size_t points) {
    if (points < 3) throw UsageError("grid_points must be at least 3");
    return lin_spaced(0.0, t_max, points);
}

void write_figure1(std::ostream& os, const ImpactCurve& c) {
    os << "# mode=" << c.mode << " alpha=" << format_double(c.alpha) << " K=" << format_double(c.K)
       << " gamma=" << format_double(c.gamma) << " profile=" << c.profile_id << "\n";
    os << "t,mi,pmi,tmi\n";
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        os << format_double(c.t[i]) << ',' << format_double(c.mi[i]) << ',' << format_double(c.pmi[i]) << ','
           << format_double(c.tmi[i]) << '\n';
    }
}

struct ShapeCheck {
    bool rises = true;
    bool concave = true;
    bool decays = true;
};

// Rise and concavity on (0, s], non-increasing after s; `slack` absorbs noise.
ShapeCheck impact_shape(const ImpactCurve& c, double s, const std::vector<double>& slack) {
    ShapeCheck out;
    const auto tol = [&](std::size_t i) { return slack.empty() ? 1e-12 : 3.0 * slack[i]; };
    for (std::size_t i = 1; i < c.t.size(); ++i) {
        if (c.t[i] <= s) {
            if (c.mi[i] < c.mi[i - 1] - tol(i)) out.rises = false;
            if (i + 1 < c.t.size() && c.t[i + 1] <= s && c.t[i - 1] > 0.0) {
                const double d2 = c.mi[i + 1] - 2.0 * c.mi[i] + c.mi[i - 1];
                if (d2 > 2.0 * tol(i)) out.concave = false;
            }
        } else if (c.t[i - 1] >= s && c.mi[i] > c.mi[i - 1] + tol(i)) {
            out.decays = false;
        }
    }
    return out;
}

void run_figure1(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double alpha = cfg.number("alpha");
    const double K = cfg.number("K");
    const double gamma = cfg.number("gamma");
    const double t_max = cfg.number_or("t_max", 5.0);
    const auto grid = time_grid(t_max, count_param(cfg, "grid_points", 501));
    const auto f = Profile::flat();

    const auto limit = macroscopic_mi(alpha, K, gamma, f, grid);
    ctx.table("limit", [&](std::ostream& os) { write_impact_csv(os, limit); });
    ctx.table("figure1", [&](std::ostream& os) { write_figure1(os, limit); });
    const auto shape = impact_shape(limit, 1.0, {});
    ctx.art.summary["limit"] = {{"rises", shape.rises}, {"concave", shape.concave}, {"decays", shape.decays}};
    ctx.flag("limit_shape", shape.rises && shape.concave && shape.decays);
    const auto fit = fit_power_law(limit, FitWindow::execution);
    ctx.art.summary["limit"]["execution_exponent"] = fit.exponent;
    ctx.flag("limit_execution_exponent", std::fabs(fit.exponent - (1.0 - alpha)) <= 0.1);

    if (!cfg.has("T")) return;
    const double T = cfg.number("T");
    const KernelSpec spec(KernelFamily::power_law_shifted, alpha);
    const auto params = schedule(T, spec, K, 1.0, gamma);
    const std::size_t reps = count_param(cfg, "reps", 0);
    const auto curve = reps > 0 ? mc_mi(params, spec, f, grid, reps, cfg.seed(), McMode::conditional)
                                : analytic_mi(params, spec, f, grid);
    ctx.table(curve.mode, [&](std::ostream& os) { write_impact_csv(os, curve); });
    const auto s = impact_shape(curve, 1.0, curve.stderr_mi);
    const auto cfit = fit_power_law(curve, FitWindow::execution);
    ctx.art.summary[curve.mode] = {{"T", T},
                                   {"reps", reps},
                                   {"rises", s.rises},
                                   {"decays", s.decays},
                                   {"execution_exponent", cfit.exponent},
                                   {"execution_exponent_stderr", cfit.stderr_exponent}};
    ctx.flag(curve.mode + "_shape", s.rises && s.decays && cfit.exponent < 1.0);
    ctx.flag(curve.mode + "_execution_exponent", std::fabs(cfit.exponent - (1.0 - alpha)) <= 0.1);
}

void run_convergence(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double alpha = cfg.number("alpha");
    const double K = cfg.number("K");
    const double gamma = cfg.number("gamma");
    const auto grid = time_grid(cfg.number_or("t_max", 5.0), count_param(cfg, "grid_points", 201));
    const auto f = Profile::flat();
    const KernelSpec spec(KernelFamily::power_law_shifted, alpha);
    const auto limit = macroscopic_mi(alpha, K, gamma, f, grid);
    ctx.table("limit", [&](std::ostream& os) { write_impact_csv(os, limit); });

    auto Ts = cfg.list("T");
    std::sort(Ts.begin(), Ts.end());
    double previous = INFINITY;
    bool decreasing = true;
    json rows = json::array();
    for (double T : Ts) {
        const auto c = analytic_mi(schedule(T, spec, K, 1.0, gamma), spec, f, grid);
        double dev = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) dev = std::max(dev, std::fabs(c.mi[i] - limit.mi[i]));
        ctx.table("analytic_T" + format_double(T), [&](std::ostream& os) { write_impact_csv(os, c); });
        rows.push_back({{"T", T}, {"sup_deviation", dev}});
        if (!(dev < previous)) decreasing = false;
        previous = dev;
    }
    ctx.art.summary["convergence"] = rows;
    ctx.flag("deviation_decreases_with_T", decreasing);
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

void run_bridge(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double alpha = cfg.number("alpha");
    const double K = cfg.number("K");
    const double delta = cfg.number("delta");
    const auto h = TestFunction::linear(cfg.number("u"));
    const std::size_t steps = count_param(cfg, "steps");
    const std::size_t paths = count_param(cfg, "paths");
    const HestonParams hp{alpha, 1.0 / (K * std::tgamma(2.0 - alpha)), delta};
    const auto grid = UniformGrid::over(1.0, steps);

    const auto ric = solve_volterra_riccati(h, alpha, hp.lambda, delta, grid);
    ctx.table("riccati", [&](std::ostream& os) { write_riccati_csv(os, ric); });
    const auto k_ric = ric.K_of_t.back();
    ctx.art.summary["riccati"] = {{"K", complex_json(k_ric)}, {"iterations", ric.residuals.size()}};

    std::vector<cplx> samples(paths);
    fold_heston(hp, grid, paths, cfg.seed(), [&](std::size_t i, HestonPath&& p) {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
            s += h(1.0 - 0.5 * (grid[j] + grid[j + 1])) * (p.variance.X[j + 1] - p.variance.X[j]);
        }
        samples[i] = {std::cos(s), std::sin(s)};
    });
    const auto est = complex_mean(samples);
    const double z = std::abs(est.mean - k_ric) / est.stderr_mean;
    ctx.art.summary["heston"] = {{"K", complex_json(est.mean)}, {"stderr", est.stderr_mean}, {"z", z}};
    ctx.flag("heston_within_3se", z <= 3.0);

    const std::size_t reps = count_param(cfg, "reps", 0);
    if (reps == 0 || !cfg.has("T")) return;
    const KernelSpec spec(KernelFamily::power_law_shifted, alpha);
    const auto params = schedule(cfg.number("T"), spec, K, delta, 0.0);
    const std::size_t terms = count_param(cfg, "soe_terms", 12);
    SoeKernel soe;
    if (terms > 0) soe = soe_fit(spec, static_cast<int>(terms), params.T);
    std::vector<cplx> hs(reps);
    fold_rescaled(params, spec, h, reps, cfg.seed(), terms > 0 ? &soe : nullptr,
                  [&](std::size_t i, const RescaledReplication& r) { hs[i] = {std::cos(r.phase), std::sin(r.phase)}; });
    const auto hest = complex_mean(hs);
    const double hz = std::abs(hest.mean - k_ric) / hest.stderr_mean;
    ctx.art.summary["hawkes"] = {{"K", complex_json(hest.mean)}, {"stderr", hest.stderr_mean}, {"z", hz},
                                 {"T", params.T}, {"aT", params.aT}};
    ctx.flag("hawkes_within_3se", hz <= 3.0);
}

const std::vector<double> kRoughnessQ = {2.0, 3.0, 4.0, 6.0};
constexpr int kRoughnessLags[] = {1, 2, 4, 8, 16};

void run_roughness(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double K = cfg.number("K");
    const double delta = cfg.number("delta");
    const std::size_t steps = count_param(cfg, "steps");
    const std::size_t paths = count_param(cfg, "paths");
    const auto grid = UniformGrid::over(1.0, steps);
    std::vector<double> lags;
    for (int l : kRoughnessLags) lags.push_back(l * grid.step());

    json rows = json::array();
    std::ostringstream table;
    table << "alpha,q,zeta,slope_over_q\n";
    for (double alpha : cfg.list("alpha")) {
        const HestonParams hp{alpha, 1.0 / (K * std::tgamma(2.0 - alpha)), delta};
        std::vector<std::vector<double>> X(paths);
        fold_heston(hp, grid, paths, cfg.seed(), [&](std::size_t i, HestonPath&& p) { X[i] = std::move(p.variance.X); });
        const auto est = roughness_estimate(X, grid, kRoughnessQ, lags);
        const double target = std::min(1.0, 2.0 * alpha);
        const bool smooth_expected = alpha > 0.5;
        bool regime_ok = true;
        for (double s : est.slope_over_q) {
            if (smooth_expected && !(s > 0.9)) regime_ok = false;
        }
        if (!smooth_expected && !(est.slope_over_q.back() < 0.95)) regime_ok = false;
        for (std::size_t i = 0; i < est.q.size(); ++i) {
            table << format_double(alpha) << ',' << format_double(est.q[i]) << ',' << format_double(est.zeta[i]) << ','
                  << format_double(est.slope_over_q[i]) << '\n';
        }
        rows.push_back({{"alpha", alpha},
                        {"regularity", est.regularity},
                        {"regularity_stderr", est.regularity_stderr},
                        {"target", target},
                        {"slope_over_q", est.slope_over_q}});
        ctx.flag("regularity_alpha_" + format_double(alpha), std::fabs(est.regularity - target) <= 0.1);
        ctx.flag("regime_alpha_" + format_double(alpha), regime_ok);
    }
    ctx.table("roughness", [&](std::ostream& os) { os << table.str(); });
    ctx.art.summary["roughness"] = rows;
}

void run_micro_macro(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double alpha = cfg.number("alpha");
    const double K = cfg.number("K");
    const double delta = cfg.number("delta");
    const std::size_t reps = count_param(cfg, "reps");
    const std::size_t steps = count_param(cfg, "steps");
    const KernelSpec spec(KernelFamily::power_law_shifted, alpha);
    const auto params = schedule(cfg.number("T"), spec, K, delta, 0.0);
    const std::size_t terms = count_param(cfg, "soe_terms", 12);
    SoeKernel soe;
    if (terms > 0) soe = soe_fit(spec, static_cast<int>(terms), params.T);

    std::vector<double> x_micro(reps), p_micro(reps), x_macro(reps), p_macro(reps);
    fold_rescaled(params, spec, TestFunction::zero(), reps, cfg.seed(), terms > 0 ? &soe : nullptr,
                  [&](std::size_t i, const RescaledReplication& r) {
                      x_micro[i] = r.X1;
                      p_micro[i] = r.price1;
                  });
    const HestonParams hp{alpha, params.lambda(), delta};
    fold_heston(hp, UniformGrid::over(1.0, steps), reps, cfg.seed(), [&](std::size_t i, HestonPath&& p) {
        x_macro[i] = p.variance.X.back();
        p_macro[i] = p.price.price.back();
    });
    ctx.table("terminal", [&](std::ostream& os) {
        os << "rep,X_micro,price_micro,X_macro,price_macro\n";
        for (std::size_t i = 0; i < reps; ++i) {
            os << i << ',' << format_double(x_micro[i]) << ',' << format_double(p_micro[i]) << ','
               << format_double(x_macro[i]) << ',' << format_double(p_macro[i]) << '\n';
        }
    });
    const double ks_x = ks_distance(x_micro, x_macro);
    const double ks_p = ks_distance(p_micro, p_macro);
    ctx.art.summary["ks"] = {{"X1", ks_x}, {"price1", ks_p}, {"T", params.T}, {"aT", params.aT}};
    ctx.flag("ks_X1", ks_x <= 0.08);
    ctx.flag("ks_price1", ks_p <= 0.08);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_json(const fs::path& file, const json& doc) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << doc.dump(2) << '\n';
}

}  // namespace

RunArtifact run_experiment(const ExperimentConfig& config) {
    // Validate before touching the file system.
    const auto checked = ExperimentConfig::from_json(config.to_json());
    fs::create_directories(checked.output_dir);

    RunArtifact art;
    art.passed = true;
    art.summary = {{"experiment", to_string(checked.experiment)}, {"flags", json::object()}};
    Context ctx{checked, art};
    try {
        switch (checked.experiment) {
            case ExperimentKind::figure1_impact: run_figure1(ctx); break;
            case ExperimentKind::impact_convergence: run_convergence(ctx); break;
            case ExperimentKind::char_function_bridge: run_bridge(ctx); break;
            case ExperimentKind::roughness_sweep: run_roughness(ctx); break;
            case ExperimentKind::micro_macro_price: run_micro_macro(ctx); break;
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(to_string(checked.experiment) + ": " + e.what());
    }
    json tables = json::object();
    for (const auto& [name, path] : art.tables) tables[name] = path.filename().string();
    art.summary["tables"] = tables;
    art.summary["passed"] = art.passed;
    art.manifest = {{"config", checked.to_json()},
                    {"library_version", kLibraryVersion},
                    {"timestamp", utc_timestamp()},
                    {"tables", tables}};
    write_json(checked.output_dir / "summary.json", art.summary);
    write_json(checked.output_dir / "manifest.json", art.manifest);
    return art;
}

}  // namespace hawkes_impact
