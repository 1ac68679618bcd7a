#include "morl/reptile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace morl {

BudgetLedger budget_ledger(MethodKind kind, int n_contexts, int n_days,
                           const MetaConfig& meta, const BaselineConfig& baseline) {
    BudgetLedger l;
    const long ctx_data = 24L * n_contexts;
    switch (kind) {
        case MethodKind::Rule1:
        case MethodKind::Rule2:
            break;
        case MethodKind::Month:
            l.data_volume = 30L * 24;
            l.training_budget = baseline.plain_steps;
            break;
        case MethodKind::FinetuneMonth:
            l.data_volume = 30L * 24 + ctx_data;
            l.training_budget = baseline.plain_steps + baseline.finetune_extra * n_contexts;
            break;
        case MethodKind::Year:
            l.data_volume = 24L * n_days;
            l.training_budget = baseline.plain_steps;
            break;
        case MethodKind::Joint:
            l.data_volume = ctx_data;
            l.training_budget = baseline.plain_steps;
            break;
        case MethodKind::RGpi:
            l.data_volume = ctx_data;
            l.training_budget = static_cast<long>(meta.n_epochs) *
                                std::min(meta.contexts_per_epoch, n_contexts) *
                                meta.inner_steps;
            break;
        case MethodKind::FinetuneRGpi: {
            BudgetLedger base = budget_ledger(MethodKind::RGpi, n_contexts, n_days, meta,
                                              baseline);
            l.data_volume = base.data_volume;
            l.training_budget =
                base.training_budget + static_cast<long>(meta.finetune_steps) * n_contexts;
            break;
        }
    }
    return l;
}

MlpParams reptile_step(const MlpParams& phi, const MlpParams& phi_prime, double eps) {
    if (phi.shape != phi_prime.shape || phi.theta.size() != phi_prime.theta.size())
        throw std::invalid_argument("reptile_step: shape mismatch");
    if (eps == 1.0) return phi_prime;  // exact endpoint, no rounding detour
    MlpParams out = phi;
    for (std::size_t i = 0; i < out.theta.size(); ++i)
        out.theta[i] = phi.theta[i] + eps * (phi_prime.theta[i] - phi.theta[i]);
    return out;
}

LayerShape qnet_shape(int feature_dim, int n_actions, int n_obj, const AgentConfig& cfg) {
    LayerShape shape;
    shape.sizes.push_back(feature_dim + n_obj);
    for (int h : cfg.hidden) shape.sizes.push_back(h);
    shape.sizes.push_back(n_actions * n_obj);
    shape.act = Activation::ReluLinear;
    return shape;
}

MlpParams inner_train(const MlpParams& phi, const Dataset& data, const EnvConfig& env,
                      int day, int steps, Variant variant, const AgentConfig& acfg,
                      const DynConfig& dcfg, std::uint64_t seed, int hour_begin,
                      int hour_end, std::vector<WeightVec>* support_out) {
    EnergyTaskEnv task(data, env, {day}, hour_begin, hour_end);
    GpiAgent agent(phi, task.num_actions(), task.num_objectives(), acfg, seed, variant,
                   &dcfg);
    agent.train(task, steps);
    if (support_out) *support_out = agent.support();
    return agent.params();
}

MetaResult meta_train(const Dataset& data, const EnvConfig& env,
                      const std::vector<int>& context_starts, Variant variant,
                      const AgentConfig& acfg, const DynConfig& dcfg,
                      const MetaConfig& mcfg, std::uint64_t seed) {
    if (context_starts.empty()) throw std::invalid_argument("meta_train: no contexts");
    MetaResult res;
    res.phi = init_mlp(qnet_shape(4, 2, 2, acfg), split_seed(seed, 9000));
    Rng rng(split_seed(seed, 9001));

    const int per_epoch =
        std::min(mcfg.contexts_per_epoch, static_cast<int>(context_starts.size()));
    for (int epoch = 0; epoch < mcfg.n_epochs; ++epoch) {
        std::vector<int> order(context_starts.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(static_cast<std::size_t>(per_epoch));

        const MlpParams epoch_base = res.phi;
        std::vector<double> delta_sum;
        if (mcfg.batch_average) delta_sum.assign(res.phi.theta.size(), 0.0);

        for (int slot = 0; slot < per_epoch; ++slot) {
            const int day = context_starts[static_cast<std::size_t>(order[slot])];
            const std::uint64_t inner_seed =
                split_seed(seed, 100 + static_cast<std::uint64_t>(epoch) * 64 + slot);
            const MlpParams& base = mcfg.batch_average ? epoch_base : res.phi;
            MlpParams adapted = inner_train(base, data, env, day, mcfg.inner_steps,
                                            variant, acfg, dcfg, inner_seed);
            if (mcfg.batch_average) {
                for (std::size_t i = 0; i < delta_sum.size(); ++i)
                    delta_sum[i] += adapted.theta[i] - epoch_base.theta[i];
            } else {
                res.phi = reptile_step(res.phi, adapted, mcfg.outer_lr);
            }
            res.training_budget += mcfg.inner_steps;
        }
        if (mcfg.batch_average) {
            for (std::size_t i = 0; i < delta_sum.size(); ++i)
                res.phi.theta[i] =
                    epoch_base.theta[i] + mcfg.outer_lr * delta_sum[i] / per_epoch;
        }
    }
    res.data_volume = 24L * static_cast<long>(context_starts.size());
    return res;
}

namespace {

std::vector<int> segment_days(const ContextSegment& seg) {
    std::vector<int> days;
    for (int d = seg.start_day; d <= seg.end_day; ++d) days.push_back(d);
    return days;
}

std::vector<DayLogRow> trace_policy(const std::vector<PolicySnapshot>& snapshots,
                                    const std::vector<ContextSegment>& segments,
                                    const std::vector<int>& finetuned_flags,
                                    const Dataset& data, const EnvConfig& env,
                                    const WeightVec& w) {
    std::vector<DayLogRow> log;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const PolicySnapshot& snap = snapshots[si];
        for (int day = segments[si].start_day; day <= segments[si].end_day; ++day) {
            EnergyTaskEnv task(data, env, {day});
            const ValueVec v = evaluate_policy(snap.params, w, snap.support, task);
            log.push_back({day, v[0], v[1], segments[si].id, finetuned_flags[si]});
        }
    }
    return log;
}

}  // namespace

AnnualResult evaluate_year(const std::vector<PolicySnapshot>& snapshots,
                           const std::vector<ContextSegment>& segments,
                           const std::vector<int>& finetuned_flags, const Dataset& data,
                           const EnvConfig& env, int n_eval_weights,
                           std::array<double, 2> hv_ref) {
    if (snapshots.size() != segments.size() || finetuned_flags.size() != segments.size())
        throw std::invalid_argument("evaluate_year: one snapshot and flag per segment");
    AnnualResult res;
    res.weights = even_weights(n_eval_weights);
    for (std::size_t k = 0; k < res.weights.size(); ++k) {
        ValueVec total(2, 0.0);
        for (std::size_t si = 0; si < segments.size(); ++si) {
            EnergyTaskEnv task(data, env, segment_days(segments[si]));
            const ValueVec v = evaluate_policy(snapshots[si].params, res.weights[k],
                                               snapshots[si].support, task);
            total[0] += v[0];
            total[1] += v[1];
        }
        res.full_set.push_back({total, static_cast<int>(k)});
    }
    res.front = pareto_filter(res.full_set);
    res.metrics = compute_metrics(res.full_set, 100, hv_ref);

    auto argmax_at = [&](const WeightVec& w) {
        std::size_t best = 0;
        double bu = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < res.full_set.size(); ++k) {
            const double u = utility(res.full_set[k].value, w);
            if (u > bu) {
                bu = u;
                best = k;
            }
        }
        return best;
    };
    res.log_w91 = trace_policy(snapshots, segments, finetuned_flags, data, env,
                               res.weights[argmax_at({0.9, 0.1})]);
    res.log_w19 = trace_policy(snapshots, segments, finetuned_flags, data, env,
                               res.weights[argmax_at({0.1, 0.9})]);
    return res;
}

AnnualResult finetune_run_year(const MlpParams& phi, const Dataset& data,
                               const EnvConfig& env, const std::vector<int>& context_starts,
                               Variant variant, const AgentConfig& acfg,
                               const DynConfig& dcfg, const MetaConfig& mcfg,
                               int n_eval_weights, std::uint64_t seed,
                               std::array<double, 2> hv_ref) {
    const auto segments =
        segments_from_starts(context_starts, data.first_day(), data.last_day());
    Rng rng(split_seed(seed, 7000));

    AgentConfig fcfg = acfg;
    if (mcfg.finetune_lr > 0) fcfg.lr = mcfg.finetune_lr;
    fcfg.eps_start = mcfg.finetune_eps_start;

    std::vector<PolicySnapshot> snapshots;
    std::vector<int> flags;
    AnnualResult res;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        // every context restarts from the original meta-trained parameters
        res.restart_hashes.push_back(params_hash(phi));
        PolicySnapshot snap;
        if (mcfg.finetune_steps > 0) {
            const int span = std::clamp(mcfg.subwindow_hours, 1, 23);
            const int start = uniform_int(rng, 0, 24 - span);
            snap.params = inner_train(phi, data, env, segments[si].start_day,
                                      mcfg.finetune_steps, variant, fcfg, dcfg,
                                      split_seed(seed, 7100 + si), start, start + span,
                                      &snap.support);
            flags.push_back(1);
        } else {
            snap.params = phi;
            snap.support = {{0.0, 1.0}, {1.0, 0.0}};
            flags.push_back(0);
        }
        snapshots.push_back(std::move(snap));
    }
    AnnualResult eval =
        evaluate_year(snapshots, segments, flags, data, env, n_eval_weights, hv_ref);
    eval.restart_hashes = std::move(res.restart_hashes);
    eval.training_budget =
        static_cast<long>(mcfg.finetune_steps) * static_cast<long>(segments.size());
    eval.data_volume = 24L * static_cast<long>(segments.size());
    eval.final_support = snapshots.back().support;
    return eval;
}

AnnualResult baseline_run(MethodKind kind, Variant variant, const Dataset& data,
                          const EnvConfig& env, const std::vector<int>& context_starts,
                          const AgentConfig& acfg, const DynConfig& dcfg,
                          const BaselineConfig& bcfg, int n_eval_weights,
                          std::uint64_t seed, std::array<double, 2> hv_ref) {
    std::vector<int> train_days;
    switch (kind) {
        case MethodKind::Month:
        case MethodKind::FinetuneMonth: {
            if (data.num_days() < 30)
                throw DataError("baseline_run: month training needs 30 days of data");
            for (int d = data.first_day(); d < data.first_day() + 30; ++d)
                train_days.push_back(d);
            break;
        }
        case MethodKind::Year: {
            for (int d = data.first_day(); d <= data.last_day(); ++d)
                train_days.push_back(d);
            break;
        }
        case MethodKind::Joint: {
            if (context_starts.empty())
                throw std::invalid_argument("baseline_run: joint training needs contexts");
            train_days = context_starts;
            break;
        }
        default:
            throw std::invalid_argument("baseline_run: unknown baseline kind");
    }

    EnergyTaskEnv task(data, env, train_days);
    GpiAgent agent(task.feature_dim(), task.num_actions(), task.num_objectives(), acfg,
                   seed, variant, &dcfg);
    agent.train(task, bcfg.plain_steps);

    const BudgetLedger ledger = budget_ledger(
        kind, static_cast<int>(context_starts.size()), data.num_days(), MetaConfig{}, bcfg);

    std::vector<PolicySnapshot> snapshots;
    std::vector<ContextSegment> segments;
    std::vector<int> flags;
    if (kind == MethodKind::FinetuneMonth) {
        segments = segments_from_starts(context_starts, data.first_day(), data.last_day());
        for (const ContextSegment& seg : segments) {
            // cumulative retraining on each shift day, continuing from the
            // current parameters (no reset)
            EnergyTaskEnv day_task(data, env, {seg.start_day});
            agent.train(day_task, bcfg.finetune_extra);
            snapshots.push_back({agent.params(), agent.support()});
            flags.push_back(1);
        }
    } else {
        segments = {{1, data.first_day(), data.last_day()}};
        snapshots.push_back({agent.params(), agent.support()});
        flags.push_back(0);
    }

    AnnualResult res =
        evaluate_year(snapshots, segments, flags, data, env, n_eval_weights, hv_ref);
    res.training_budget = ledger.training_budget;
    res.data_volume = ledger.data_volume;
    res.final_params = agent.params();
    res.final_support = agent.support();
    return res;
}

AnnualResult rule_run(int rule, const Dataset& data, const EnvConfig& env,
                      std::array<double, 2> hv_ref) {
    ValueVec total(2, 0.0);
    std::vector<DayLogRow> log;
    for (int day = data.first_day(); day <= data.last_day(); ++day) {
        EnvState s = env_reset(data, env, day);
        double day_cost = 0.0, day_comfort = 0.0;
        bool done = false;
        while (!done) {
            const Transition tr = env_step(data, env, s, rule_policy(rule, s), day);
            day_cost += tr.reward.neg_cost;
            day_comfort += tr.reward.comfort;
            s = tr.next_state;
            done = tr.done;
        }
        total[0] += day_cost;
        total[1] += day_comfort;
        log.push_back({day, day_cost, day_comfort, 1, 0});
    }
    AnnualResult res;
    res.full_set = {{total, rule}};
    res.front = res.full_set;
    res.metrics = compute_metrics(res.full_set, 100, hv_ref);
    res.weights = even_weights(2);
    res.log_w91 = log;
    res.log_w19 = std::move(log);
    return res;
}

}  // namespace morl
