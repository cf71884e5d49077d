#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes_impact/heston.hpp"
#include "hawkes_impact/hawkes_sim.hpp"
#include "hawkes_impact/kernels.hpp"
#include "hawkes_impact/riccati.hpp"

namespace hawkes_impact {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class ExperimentKind { figure1_impact, impact_convergence, char_function_bridge, roughness_sweep, micro_macro_price };

std::string to_string(ExperimentKind k);
/// Throws UsageError for unknown names.
ExperimentKind parse_experiment(const std::string& name);

/// Experiment name, flat parameter map (numbers or lists of numbers) and
/// output directory. The seed is always required.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::figure1_impact;
    nlohmann::json parameters = nlohmann::json::object();
    std::filesystem::path output_dir;

    /// Accepts a config document or a manifest written by run_experiment.
    /// Throws UsageError on unknown experiments, missing or unknown keys and
    /// non-numeric values.
    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::vector<double> list(const std::string& key) const;
    std::uint64_t seed() const;
    bool has(const std::string& key) const { return parameters.contains(key); }
};

struct RunArtifact {
    nlohmann::json manifest;
    /// table name -> file written under the output directory
    std::map<std::string, std::filesystem::path> tables;
    nlohmann::json summary;
    bool passed = false;
};

/// Runs the experiment, writes its tables, manifest.json and summary.json.
RunArtifact run_experiment(const ExperimentConfig& config);

/// Statistics of one replication of the two-sided flow, in rescaled units:
/// X1 = (N^a_T + N^b_T)/(delta T beta), price1 = P_T/(T beta) and
/// phase = sum over events of h(1 - t_i/T)/(delta T beta).
struct RescaledReplication {
    double X1 = 0.0;
    double price1 = 0.0;
    double phase = 0.0;
};

RescaledReplication rescaled_replication(const MarketParams& params, const KernelSpec& spec, const TestFunction& h,
                                         std::uint64_t seed, std::uint64_t replication, const SoeKernel* soe);

/// Replications folded in index order (parallel over HAWKES_IMPACT_THREADS).
void fold_rescaled(const MarketParams& params, const KernelSpec& spec, const TestFunction& h, std::size_t reps,
                   std::uint64_t seed, const SoeKernel* soe,
                   const std::function<void(std::size_t, const RescaledReplication&)>& fold);

/// Heston paths folded in index order.
void fold_heston(const HestonParams& p, const UniformGrid& grid, std::size_t paths, std::uint64_t seed,
                 const std::function<void(std::size_t, HestonPath&&)>& fold);

}  // namespace hawkes_impact
