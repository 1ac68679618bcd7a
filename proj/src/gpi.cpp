#include "morl/gpi.hpp"

#include <algorithm>
#include <cmath>

#include "morl/dyna.hpp"

namespace morl {

// ---------------------------------------------------------------------------
// EnergyTaskEnv

EnergyTaskEnv::EnergyTaskEnv(const Dataset& data, const EnvConfig& cfg,
                             std::vector<int> days, int hour_begin, int hour_end)
    : data_(data), cfg_(cfg), days_(std::move(days)), hour_begin_(hour_begin),
      hour_end_(hour_end) {
    if (days_.empty()) throw std::invalid_argument("EnergyTaskEnv: empty day pool");
    if (hour_begin_ < 0 || hour_end_ > 24 || hour_end_ - hour_begin_ < 1)
        throw std::invalid_argument("EnergyTaskEnv: bad hour slice");
    for (int d : days_)
        if (!data_.has_day(d))
            throw DataError("EnergyTaskEnv: day " + std::to_string(d) + " not in dataset");
}

std::vector<double> EnergyTaskEnv::features(const EnvState& s) const {
    const double dmax = data_.max_demand() > 0 ? data_.max_demand() : 1.0;
    const double rmax = data_.max_renewable() > 0 ? data_.max_renewable() : 1.0;
    return {s.background_demand_kw / dmax, s.hour / 23.0,
            static_cast<double>(s.remaining_task_hours) / cfg_.task_hours,
            s.renewable_kw / rmax};
}

std::vector<double> EnergyTaskEnv::reset(int episode) {
    day_ = days_[static_cast<std::size_t>(episode) % days_.size()];
    state_ = env_reset(data_, cfg_, day_);
    if (hour_begin_ > 0) {
        const HourlyRecord& r = data_.at(day_, hour_begin_);
        state_.hour = hour_begin_;
        state_.background_demand_kw = r.background_demand_kw;
        state_.renewable_kw = r.renewable_kw;
    }
    done_ = false;
    return features(state_);
}

StepOut EnergyTaskEnv::step(int action) {
    if (done_) throw std::logic_error("EnergyTaskEnv: step after episode end");
    Transition tr = env_step(data_, cfg_, state_, action, day_);
    state_ = tr.next_state;
    done_ = tr.done || tr.next_state.hour >= hour_end_;
    return {features(state_), {tr.reward.neg_cost, tr.reward.comfort}, done_};
}

// ---------------------------------------------------------------------------
// Replay

void ReplayBuffer::push(Sample s) {
    if (ring_.size() < cap_) {
        ring_.push_back(std::move(s));
        next_ = ring_.size() % cap_;
        full_ = ring_.size() == cap_;
        return;
    }
    ring_[next_] = std::move(s);
    next_ = (next_ + 1) % cap_;
    full_ = true;
}

// ---------------------------------------------------------------------------
// GPI primitives

std::vector<std::vector<double>> q_values(const MlpParams& qnet,
                                          std::span<const double> state, const WeightVec& w) {
    std::vector<double> in(state.begin(), state.end());
    in.insert(in.end(), w.begin(), w.end());
    const std::vector<double> out = forward(qnet, in);
    const int d = static_cast<int>(w.size());
    if (out.size() % d != 0)
        throw std::invalid_argument("q_values: output dim not divisible by objective count");
    const int n_actions = static_cast<int>(out.size()) / d;
    std::vector<std::vector<double>> q(n_actions, std::vector<double>(d));
    for (int a = 0; a < n_actions; ++a)
        for (int j = 0; j < d; ++j) q[a][j] = out[static_cast<std::size_t>(a) * d + j];
    return q;
}

int gpi_action_generic(
    const std::function<std::vector<std::vector<double>>(const WeightVec&)>& q_for,
    const WeightVec& w, const std::vector<WeightVec>& support) {
    if (support.empty()) throw std::invalid_argument("gpi_action: empty weight support");
    int best_action = 0;
    double best = -std::numeric_limits<double>::infinity();
    bool first = true;
    int n_actions = 0;
    std::vector<double> gpi_value;  // max_{w'} Q(s,a,w') . w per action
    for (const WeightVec& wp : support) {
        const auto q = q_for(wp);
        if (first) {
            n_actions = static_cast<int>(q.size());
            gpi_value.assign(n_actions, -std::numeric_limits<double>::infinity());
            first = false;
        }
        for (int a = 0; a < n_actions; ++a)
            gpi_value[a] = std::max(gpi_value[a], utility(q[a], w));
    }
    for (int a = 0; a < n_actions; ++a) {
        if (gpi_value[a] > best) {  // strict: ties keep the lowest action index
            best = gpi_value[a];
            best_action = a;
        }
    }
    return best_action;
}

int gpi_action(const MlpParams& qnet, std::span<const double> state, const WeightVec& w,
               const std::vector<WeightVec>& support) {
    return gpi_action_generic(
        [&](const WeightVec& wp) { return q_values(qnet, state, wp); }, w, support);
}

namespace {

bool support_contains(const std::vector<WeightVec>& support, const WeightVec& w) {
    for (const auto& s : support)
        if (std::abs(s[0] - w[0]) <= 1e-9) return true;
    return false;
}

std::vector<WeightVec> with_weight(const std::vector<WeightVec>& support, const WeightVec& w) {
    std::vector<WeightVec> out = support;
    if (!support_contains(out, w)) out.push_back(w);
    return out;
}

}  // namespace

ValueVec evaluate_policy(const MlpParams& qnet, const WeightVec& w,
                         const std::vector<WeightVec>& support, EpisodeEnv& env,
                         const std::vector<int>* episodes) {
    std::vector<int> all;
    if (!episodes) {
        all.resize(env.num_episodes());
        for (int i = 0; i < env.num_episodes(); ++i) all[i] = i;
        episodes = &all;
    }
    if (episodes->empty()) throw std::invalid_argument("evaluate_policy: no episodes");
    const std::vector<WeightVec> m = with_weight(support, w);
    ValueVec total(env.num_objectives(), 0.0);
    for (int ep : *episodes) {
        std::vector<double> s = env.reset(ep);
        bool done = false;
        while (!done) {
            const int a = gpi_action(qnet, s, w, m);
            StepOut out = env.step(a);
            for (std::size_t j = 0; j < total.size(); ++j) total[j] += out.reward[j];
            s = std::move(out.features);
            done = out.done;
        }
    }
    return total;
}

SolutionSet extract_front(const MlpParams& qnet, const std::vector<WeightVec>& support,
                          EpisodeEnv& env, const std::vector<int>* episodes) {
    if (support.empty()) throw std::invalid_argument("extract_front: empty support");
    SolutionSet set;
    for (std::size_t i = 0; i < support.size(); ++i)
        set.push_back({evaluate_policy(qnet, support[i], support, env, episodes),
                       static_cast<int>(i)});
    return pareto_filter(set);
}

// ---------------------------------------------------------------------------
// GpiAgent

GpiAgent::GpiAgent(int feature_dim, int n_actions, int n_obj, const AgentConfig& cfg,
                   std::uint64_t seed, Variant variant, const DynConfig* dyn_cfg)
    : cfg_(cfg), variant_(variant), replay_(cfg.replay_capacity),
      rng_(split_seed(seed, 1)), n_actions_(n_actions), n_obj_(n_obj),
      feature_dim_(feature_dim) {
    LayerShape shape;
    shape.sizes.push_back(feature_dim + n_obj);
    for (int h : cfg_.hidden) shape.sizes.push_back(h);
    shape.sizes.push_back(n_actions * n_obj);
    shape.act = Activation::ReluLinear;
    qnet_ = init_mlp(shape, split_seed(seed, 0));
    target_ = qnet_;
    adam_ = make_adam(qnet_.theta.size(), cfg_.lr);
    support_ = {{0.0, 1.0}, {1.0, 0.0}};
    if (variant_ == Variant::PD) {
        const DynConfig dc = dyn_cfg ? *dyn_cfg : DynConfig{};
        dyna_ = std::make_unique<DynaParts>(feature_dim, n_actions, n_obj, dc,
                                            cfg_.replay_capacity, split_seed(seed, 2));
    }
}

GpiAgent::GpiAgent(MlpParams params, int n_actions, int n_obj, const AgentConfig& cfg,
                   std::uint64_t seed, Variant variant, const DynConfig* dyn_cfg)
    : cfg_(cfg), variant_(variant), qnet_(std::move(params)),
      replay_(cfg.replay_capacity), rng_(split_seed(seed, 1)), n_actions_(n_actions),
      n_obj_(n_obj) {
    feature_dim_ = qnet_.shape.input_dim() - n_obj;
    if (qnet_.shape.output_dim() != n_actions * n_obj)
        throw std::invalid_argument("GpiAgent: params output dim does not match |A| x d");
    target_ = qnet_;
    adam_ = make_adam(qnet_.theta.size(), cfg_.lr);
    support_ = {{0.0, 1.0}, {1.0, 0.0}};
    if (variant_ == Variant::PD) {
        const DynConfig dc = dyn_cfg ? *dyn_cfg : DynConfig{};
        dyna_ = std::make_unique<DynaParts>(feature_dim_, n_actions, n_obj, dc,
                                            cfg_.replay_capacity, split_seed(seed, 2));
    }
}

GpiAgent::~GpiAgent() = default;
GpiAgent::GpiAgent(GpiAgent&&) noexcept = default;

int GpiAgent::act_greedy(std::span<const double> state, const WeightVec& w) const {
    return gpi_action(qnet_, state, w, with_weight(support_, w));
}

double GpiAgent::epsilon(long budget) const {
    if (budget <= 0) return cfg_.eps_end;
    const double anneal_steps = cfg_.eps_fraction * static_cast<double>(budget);
    if (anneal_steps <= 0) return cfg_.eps_end;
    const double frac = std::min(1.0, static_cast<double>(env_steps_) / anneal_steps);
    return cfg_.eps_start + frac * (cfg_.eps_end - cfg_.eps_start);
}

std::vector<WeightVec> GpiAgent::batch_weights(std::size_t n) {
    std::vector<WeightVec> ws(n);
    const std::size_t n_uniform =
        static_cast<std::size_t>(std::llround(cfg_.uniform_weight_frac * n));
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n - n_uniform && !support_.empty()) {
            ws[i] = support_[static_cast<std::size_t>(
                uniform_int(rng_, 0, static_cast<int>(support_.size()) - 1))];
        } else {
            const double w0 = uniform_real(rng_, 0.0, 1.0);
            ws[i] = {w0, 1.0 - w0};
        }
    }
    return ws;
}

double GpiAgent::td_train_step(const std::vector<const Sample*>& batch,
                               const std::vector<WeightVec>& weights,
                               const std::vector<double>* is_weights) {
    if (batch.empty()) throw std::invalid_argument("td_train_step: empty batch");
    if (weights.size() != batch.size())
        throw std::invalid_argument("td_train_step: one weight per sample required");

    const int d = n_obj_;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    std::vector<double> grad(qnet_.theta.size(), 0.0);
    std::vector<double> in, grad_out;
    double total_loss = 0.0;
    last_td_errors_.assign(batch.size(), 0.0);
    last_max_td_ = 0.0;

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Sample& t = *batch[i];
        const WeightVec& w = weights[i];
        const double isw = is_weights ? (*is_weights)[i] : 1.0;

        // vector target: r, bootstrapped through the target net at the GPI
        // action when the transition is not terminal
        std::vector<double> y = t.r;
        if (!t.done) {
            const auto m = with_weight(support_, w);
            const int a_star = gpi_action(target_, t.s2, w, m);
            const auto qt = q_values(target_, t.s2, w);
            for (int j = 0; j < d; ++j) y[j] += env_gamma_ * qt[a_star][j];
        }

        in.assign(t.s.begin(), t.s.end());
        in.insert(in.end(), w.begin(), w.end());
        const std::vector<double> out = forward(qnet_, in);

        grad_out.assign(out.size(), 0.0);
        double sample_loss = 0.0;
        double td_l1 = 0.0;
        for (int j = 0; j < d; ++j) {
            const double td = out[static_cast<std::size_t>(t.a) * d + j] - y[j];
            sample_loss += td * td / d;
            td_l1 += std::abs(td) / d;
            last_max_td_ = std::max(last_max_td_, std::abs(td));
            grad_out[static_cast<std::size_t>(t.a) * d + j] = isw * 2.0 * td / d * inv_batch;
        }
        last_td_errors_[i] = td_l1;
        total_loss += isw * sample_loss;
        backward_accum(qnet_, in, grad_out, grad);
    }

    adam_step(qnet_, adam_, grad);
    ++grad_updates_;
    if (cfg_.target_update > 0 && grad_updates_ % cfg_.target_update == 0) target_ = qnet_;
    return total_loss * inv_batch;
}

WeightVec GpiAgent::select_next_weight(const SolutionSet& front) {
    const std::vector<WeightVec> candidates = corner_weights(ccs_prune(front));
    std::vector<WeightVec> unvisited;
    for (const auto& c : candidates)
        if (!support_contains(support_, c)) unvisited.push_back(c);
    // The optimistic improvement estimate (best utility plus last TD
    // magnitude, minus best utility) is the same at every corner, so the
    // ordering reduces to: unvisited first, then lowest w0.
    if (!unvisited.empty()) return unvisited.front();
    if (last_max_td_ > 0.0 && !candidates.empty()) return candidates.front();
    // refinement mode: revisit a random known corner
    return support_[static_cast<std::size_t>(
        uniform_int(rng_, 0, static_cast<int>(support_.size()) - 1))];
}

bool GpiAgent::maybe_reselect_weight(EpisodeEnv& env, long step_in_run) {
    if (!behavior_w_.empty() && cfg_.weight_hold_steps > 0 &&
        step_in_run % cfg_.weight_hold_steps != 0)
        return false;
    std::vector<int> eval_eps;
    const int n = env.num_episodes();
    const int k = std::min(cfg_.front_eval_episodes, n);
    for (int i = 0; i < k; ++i)
        eval_eps.push_back(static_cast<int>(static_cast<long>(i) * n / k));
    SolutionSet front;
    bool disturbed = false;
    if (env_steps_ > 0) {
        front = extract_front(qnet_, support_, env, &eval_eps);
        disturbed = true;  // evaluation rolled episodes on the shared env
    }
    behavior_w_ = select_next_weight(front);
    if (!support_contains(support_, behavior_w_) &&
        static_cast<int>(support_.size()) < cfg_.max_support)
        support_.push_back(behavior_w_);
    return disturbed;
}

void GpiAgent::train(EpisodeEnv& env, long n_steps, long budget_hint) {
    if (n_steps <= 0) return;
    budget_ = budget_hint > 0 ? budget_hint : n_steps;
    env_gamma_ = env.gamma();
    std::vector<double> s;
    bool done = true;
    for (long step = 0; step < n_steps; ++step) {
        if (maybe_reselect_weight(env, step)) done = true;  // eval consumed the episode
        if (done) {
            s = env.reset(static_cast<int>(episode_counter_++ % env.num_episodes()));
            done = false;
        }

        const double eps = epsilon(budget_);
        int a;
        if (uniform_real(rng_, 0.0, 1.0) < eps)
            a = uniform_int(rng_, 0, n_actions_ - 1);
        else
            a = act_greedy(s, behavior_w_);

        StepOut out = env.step(a);
        Sample sample{s, a, out.reward, out.features, out.done};
        ++env_steps_;
        if (variant_ == Variant::LS) {
            replay_.push(std::move(sample));
        } else {
            DynaParts& dp = *dyna_;
            const bool holdout = dp.cfg.holdout_every > 0 &&
                                 (dp.real_count % dp.cfg.holdout_every) == 0;
            if (holdout) {
                dp.quality_holdout.push_back(sample);
                while (dp.quality_holdout.size() >
                       static_cast<std::size_t>(dp.cfg.holdout_cap))
                    dp.quality_holdout.pop_front();
            }
            dp.replay.push_real(std::move(sample), holdout);
            ++dp.real_count;
        }
        s = std::move(out.features);
        done = out.done;

        if (variant_ == Variant::PD) pd_model_hooks();
        if (variant_ == Variant::LS)
            td_update_ls();
        else
            td_update_pd();
    }
}

double GpiAgent::td_update_ls() {
    if (replay_.size() < static_cast<std::size_t>(cfg_.learning_starts)) return 0.0;
    const std::size_t b = static_cast<std::size_t>(cfg_.batch_size);
    std::vector<const Sample*> batch(b);
    for (auto& p : batch)
        p = &replay_.at(static_cast<std::size_t>(
            uniform_int(rng_, 0, static_cast<int>(replay_.size()) - 1)));
    return td_train_step(batch, batch_weights(b), nullptr);
}

double GpiAgent::td_update_pd() {
    DynaParts& dp = *dyna_;
    if (dp.replay.real_size() < static_cast<std::size_t>(cfg_.learning_starts)) return 0.0;
    const double frac = std::min(1.0, static_cast<double>(env_steps_) /
                                          static_cast<double>(std::max<long>(budget_, 1)));
    const double beta = dp.cfg.beta_start + frac * (dp.cfg.beta_end - dp.cfg.beta_start);
    // a closed quality gate suspends synthetic data use entirely
    const double cap = dp.gate_open ? dp.cfg.synth_cap : 0.0;
    auto batch = dp.replay.sample(static_cast<std::size_t>(cfg_.batch_size), cap, beta, rng_);
    const double loss = td_train_step(batch.samples, batch_weights(batch.samples.size()),
                                      &batch.is_weights);
    last_synth_frac_ = batch.synth_fraction;
    for (std::size_t i = 0; i < batch.refs.size(); ++i)
        dp.replay.update_priority(batch.refs[i], last_td_errors_[i], dp.cfg.per_alpha,
                                  dp.cfg.per_floor);
    return loss;
}

void GpiAgent::pd_model_hooks() {
    DynaParts& dp = *dyna_;
    if (dp.model_override) {
        dp.gate_open = true;  // exact model: nothing to learn or validate
    } else if (dp.replay.real_size() >= static_cast<std::size_t>(cfg_.learning_starts) &&
               dp.cfg.train_every > 0 && env_steps_ % dp.cfg.train_every == 0) {
        for (int it = 0; it < dp.cfg.train_iters; ++it) {
            auto mb = dp.replay.sample_real_for_model(
                static_cast<std::size_t>(dp.cfg.model_batch), rng_);
            if (mb.empty()) break;
            dp.ensemble.train_step(mb, rng_);
        }
        if (!dp.quality_holdout.empty()) {
            std::vector<const Sample*> hold;
            for (const Sample& s2 : dp.quality_holdout) hold.push_back(&s2);
            QualityReport q = model_quality(dp.ensemble, hold);
            dp.quality_history.emplace_back(env_steps_, q);
            dp.gate_open = q.feature_mse <= dp.cfg.gate_mse;
        }
    }
    if (dp.gate_open && dp.cfg.imagine_every > 0 &&
        env_steps_ % dp.cfg.imagine_every == 0 && dp.replay.real_size() > 0) {
        const DynamicsModel& model =
            dp.model_override ? *dp.model_override : dp.ensemble;
        std::vector<const Sample*> branch(static_cast<std::size_t>(dp.cfg.n_rollouts));
        for (auto& p : branch)
            p = &dp.replay
                     .real_at(static_cast<std::size_t>(uniform_int(
                         rng_, 0, static_cast<int>(dp.replay.real_size()) - 1)))
                     .sample;
        auto entries = imagine(model, qnet_, support_, branch, dp.cfg.n_rollouts,
                               dp.cfg.horizon, rng_);
        for (auto& e : entries)
            dp.replay.push_synth(std::move(e.sample), e.priority, e.source_model);
    }
}

ValueVec GpiAgent::evaluate(EpisodeEnv& env, const WeightVec& w) const {
    return evaluate_policy(qnet_, w, support_, env);
}

SolutionSet GpiAgent::front(EpisodeEnv& env) const {
    return extract_front(qnet_, support_, env);
}

}  // namespace morl
