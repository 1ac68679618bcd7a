#pragma once

#include "morl/config.hpp"

namespace morl {

Dataset resolve_dataset(const RunConfig& cfg);

// writes contexts.csv, losses.csv, losses.svg into out_dir
DetectResult cmd_detect(const RunConfig& cfg, const Dataset& data,
                        const std::string& out_dir);

struct SeedOutcome {
    std::uint64_t seed = 0;
    AnnualResult result;
};

struct RunOutcome {
    std::string method;
    std::vector<int> context_starts;
    BudgetLedger ledger;
    std::vector<SeedOutcome> seeds;
};

// trains/evaluates cfg.method for every seed, writes the run directory
// (manifest.txt, metrics.csv, solutions/front/rewards CSVs)
RunOutcome cmd_run(const RunConfig& cfg);

// aggregates >= 2 run directories into summary/percentage tables and plots
void cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir);

// one seed of one method against a prepared dataset + contexts (shared by
// cmd_run and the acceptance harness)
AnnualResult run_method_once(const RunConfig& cfg, const MethodInfo& info,
                             const Dataset& data, const std::vector<int>& context_starts,
                             std::uint64_t seed);

double percent_improvement(double candidate, double baseline);

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> read_manifest(const std::string& path);

}  // namespace morl
