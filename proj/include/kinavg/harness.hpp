#pragma once

// Monte Carlo orchestration: (eps, delta) sweeps with per-cell replications,
// deterministic seed streams, aggregation into convergence tables, and the
// structured self-check suite. Tasks are independent; a fixed-size pool pulls
// them from an atomic counter and results land in preallocated slots, so
// outputs are identical for any thread count.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kinavg/analysis.hpp"
#include "kinavg/config.hpp"
#include "kinavg/driving.hpp"
#include "kinavg/kinetic.hpp"
#include "kinavg/limit.hpp"
#include "kinavg/velocity.hpp"

namespace kinavg {

void parallel_for(std::size_t n_tasks, int n_threads, const std::function<void(std::size_t)>& fn);

enum class Coupling { independent, diagonal, ratio };

struct SweepConfig {
    std::vector<double> eps_list;
    std::vector<double> delta_list;
    Coupling coupling = Coupling::diagonal;
    double ratio_p = 1.0;  // delta = eps^p when coupling == ratio
    double T = 0.25;
    int n_modes = 64;
    double c1 = 0.5, c2 = 0.5;
    int replications = 1;
    std::uint64_t seed = 0;
    double varsigma = 1.0;
    int n_outputs = 64;
    int threads = 1;
    std::string out_dir;  // empty = no files written

    // model / driving / reaction / initial data
    Config raw;

    static SweepConfig from_config(const Config& cfg);
    std::vector<std::pair<double, double>> cells() const;
};

struct CellAggregate {
    double eps = 0, delta = 0;
    int replications = 0;
    double mean_sup_hneg = 0, se_sup_hneg = 0;
    double mean_l2_time = 0, se_l2_time = 0;
    double mean_hneg_T = 0, se_hneg_T = 0;
    double stop_fraction = 0;
    int failures = 0;
};

struct SweepResult {
    std::vector<ErrorRecord> records;        // one per (cell, replication)
    std::vector<CellAggregate> aggregates;   // one per cell
    bool any_flagged = false;

    std::string records_csv() const;
    std::string aggregate_csv() const;
};

// Builds model, sigma, initial data from cfg.raw; validates every cell
// against the admissibility bounds (throws naming the bound); runs the sweep.
SweepResult run_sweep(const SweepConfig& cfg);

// Writes records.csv, aggregate.csv and manifest.json under cfg.out_dir.
void write_sweep_outputs(const SweepConfig& cfg, const SweepResult& result);

// --- self-check suite -------------------------------------------------------

struct CheckItem {
    std::string module;
    std::string name;
    bool passed = false;
    double observed = 0;
    double tolerance = 0;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckItem> items;
    bool all_passed() const {
        for (const auto& it : items)
            if (!it.passed) return false;
        return true;
    }
    std::string to_string() const;
};

struct CheckOptions {
    std::uint64_t seed = 20240901;
    // fault injection for tests: checked in place of the shipped models
    std::optional<VelocityModel> model_override;
};

CheckReport check_suite(const CheckOptions& opt = {});

// --- shared builders --------------------------------------------------------

VelocityModel model_from_config(const Config& cfg);
SigmaModel sigma_from_config(const Config& cfg, int n_modes);
Spectrum rho0_from_config(const Config& cfg, int n_modes);

}  // namespace kinavg
