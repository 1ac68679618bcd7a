#pragma once

#include <optional>

#include "morl/context.hpp"
#include "morl/dyna.hpp"
#include "morl/gpi.hpp"
#include "morl/metrics.hpp"

namespace morl {

struct MetaConfig {
    double outer_lr = 3e-4;       // reptile interpolation step
    int n_epochs = 3;
    int inner_steps = 480;
    int contexts_per_epoch = 10;  // sampled without replacement per epoch
    int finetune_steps = 96;
    double finetune_lr = -1.0;    // < 0: reuse the agent learning rate
    double finetune_eps_start = 0.2;
    int subwindow_hours = 12;     // finetune slice length within the shift day
    bool batch_average = false;   // average task deltas per epoch instead of serial steps
};

struct BaselineConfig {
    long plain_steps = 40000;     // month / year / joint training budget
    long finetune_extra = 5000;   // extra steps per shift day when finetuning the month model
};

enum class MethodKind { Rule1, Rule2, Month, FinetuneMonth, Year, Joint, RGpi, FinetuneRGpi };

struct BudgetLedger {
    long data_volume = 0;
    long training_budget = 0;
};

BudgetLedger budget_ledger(MethodKind kind, int n_contexts, int n_days,
                           const MetaConfig& meta, const BaselineConfig& baseline);

// phi + eps (phi' - phi), elementwise.
MlpParams reptile_step(const MlpParams& phi, const MlpParams& phi_prime, double eps);

LayerShape qnet_shape(int feature_dim, int n_actions, int n_obj, const AgentConfig& cfg);

// One task-adaptation run: clones phi into a fresh agent and trains it on a
// single day (optionally an hour slice) for `steps` environment steps.
MlpParams inner_train(const MlpParams& phi, const Dataset& data, const EnvConfig& env,
                      int day, int steps, Variant variant, const AgentConfig& acfg,
                      const DynConfig& dcfg, std::uint64_t seed, int hour_begin = 0,
                      int hour_end = 24, std::vector<WeightVec>* support_out = nullptr);

struct MetaResult {
    MlpParams phi;
    long training_budget = 0;
    long data_volume = 0;
};

// Reptile meta-training over shift-day tasks: each epoch samples contexts
// without replacement, adapts a clone on each context's start day, and
// interpolates the initialization toward the adapted parameters.
MetaResult meta_train(const Dataset& data, const EnvConfig& env,
                      const std::vector<int>& context_starts, Variant variant,
                      const AgentConfig& acfg, const DynConfig& dcfg,
                      const MetaConfig& mcfg, std::uint64_t seed);

struct DayLogRow {
    int day = 0;
    double neg_cost = 0.0;
    double comfort = 0.0;
    int context_id = 0;
    int finetuned = 0;
};

struct PolicySnapshot {
    MlpParams params;
    std::vector<WeightVec> support;
};

struct AnnualResult {
    SolutionSet full_set;  // one value per evaluation weight
    SolutionSet front;
    MetricReport metrics;
    std::vector<WeightVec> weights;
    std::vector<DayLogRow> log_w91, log_w19;  // traces of the anchored policies
    long training_budget = 0;
    long data_volume = 0;
    std::vector<std::uint64_t> restart_hashes;  // params hash at each context restart
    std::optional<MlpParams> final_params;      // checkpointable artifact, when learned
    std::vector<WeightVec> final_support;
};

// Executes per-segment policy snapshots over the whole dataset for every
// evaluation weight and derives the solution set, metrics, and anchor traces.
AnnualResult evaluate_year(const std::vector<PolicySnapshot>& snapshots,
                           const std::vector<ContextSegment>& segments,
                           const std::vector<int>& finetuned_flags, const Dataset& data,
                           const EnvConfig& env, int n_eval_weights,
                           std::array<double, 2> hv_ref = kHvReference);

// The annual few-shot loop: at each detected context start the original phi
// is re-finetuned on a random sub-window of that day, and the result acts
// until the next shift. finetune_steps = 0 degenerates to evaluating phi.
AnnualResult finetune_run_year(const MlpParams& phi, const Dataset& data,
                               const EnvConfig& env, const std::vector<int>& context_starts,
                               Variant variant, const AgentConfig& acfg,
                               const DynConfig& dcfg, const MetaConfig& mcfg,
                               int n_eval_weights, std::uint64_t seed,
                               std::array<double, 2> hv_ref = kHvReference);

AnnualResult baseline_run(MethodKind kind, Variant variant, const Dataset& data,
                          const EnvConfig& env, const std::vector<int>& context_starts,
                          const AgentConfig& acfg, const DynConfig& dcfg,
                          const BaselineConfig& bcfg, int n_eval_weights,
                          std::uint64_t seed,
                          std::array<double, 2> hv_ref = kHvReference);

AnnualResult rule_run(int rule, const Dataset& data, const EnvConfig& env,
                      std::array<double, 2> hv_ref = kHvReference);

}  // namespace morl
