#pragma once

#include "simbeam/ao_driver.hpp"
#include "simbeam/config.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace simbeam {

enum class Experiment { convergence, rate_vs_layers, rate_vs_atoms };

std::string_view experiment_name(Experiment e);

struct SweepSpec {
    Experiment experiment = Experiment::convergence;
    /// L values (rate_vs_layers) or N values (rate_vs_atoms); ignored for convergence.
    std::vector<Index> values;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> schemes = {"theta_iter", "w_iter", "theta_single", "w_single"};
    Architecture architecture = Architecture::simwdb;
    ScenarioConfig base;
    AoConfig ao;
    /// Empty: do not write files.
    std::filesystem::path out_dir;
    /// 0: SIMBEAM_THREADS or hardware concurrency.
    unsigned threads = 0;

    /// Throws std::invalid_argument on an infeasible spec.
    void validate() const;
};

struct ResultRow {
    std::string experiment;
    std::string scheme;
    Index sweep_value = 0;
    std::uint64_t drop_seed = 0;
    double asr_bits = 0.0;
    int outer_iterations = 0;
    int inner_pg_steps = 0;
    double wall_seconds = 0.0;
};

struct ConvergenceRow {
    std::string scheme;
    std::uint64_t drop = 0;
    int iteration = 0;
    double asr_nats = 0.0;
    double asr_bits = 0.0;
};

struct SummaryRow {
    std::string scheme;
    Index sweep_value = 0;
    double mean_asr_bits = 0.0;
    double stderr_bits = 0.0;
    std::size_t drops = 0;
    /// Percentage gain of theta_iter over each benchmark, filled on theta_iter rows.
    std::map<std::string, double> gain_vs;
};

/// Every scheme run for one (sweep value, drop) pair, from one shared start.
struct DropOutcome {
    Index sweep_value = 0;
    std::uint64_t drop_seed = 0;
    std::vector<AoTrace> traces;
};

struct ExperimentOutput {
    std::vector<DropOutcome> drops;
    std::vector<ResultRow> results;
    std::vector<ConvergenceRow> convergence;
    std::vector<SummaryRow> summary;
};

/// Runs every requested scheme from one initial point and checks that all
/// of them saw the same (theta0, W0).
DropOutcome run_drop(const ScenarioConfig& scenario, std::uint64_t drop_seed, const std::vector<Scheme>& schemes,
                     const AoConfig& ao, Index sweep_value = 0);

ExperimentOutput run_convergence(const SweepSpec& spec);
ExperimentOutput run_sweep(const SweepSpec& spec);

/// Per-(scheme, sweep value) mean and standard error, plus gains of theta_iter.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows, const std::vector<std::string>& schemes);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows, const std::vector<std::string>& schemes);

/// Thread count from SIMBEAM_THREADS (0 or unset: hardware concurrency).
unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace simbeam
