#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "morl/env.hpp"
#include "morl/mo.hpp"
#include "morl/net.hpp"

namespace morl {

enum class Variant { LS, PD };

struct StepOut {
    std::vector<double> features;
    std::vector<double> reward;
    bool done = false;
};

// Episodic training surface the learners consume: normalized feature vectors,
// discrete actions, vector rewards. Episodes are drawn from a fixed pool.
class EpisodeEnv {
  public:
    virtual ~EpisodeEnv() = default;
    virtual int feature_dim() const = 0;
    virtual int num_actions() const = 0;
    virtual int num_objectives() const = 0;
    virtual int num_episodes() const = 0;
    virtual std::vector<double> reset(int episode) = 0;
    virtual StepOut step(int action) = 0;
    virtual double gamma() const = 0;
};

// Appliance-scheduling episodes over a day pool. Features are
// [demand/max_demand, hour/23, remaining/task_hours, renewable/max_renewable].
// An optional hour slice truncates episodes to [hour_begin, hour_end).
class EnergyTaskEnv : public EpisodeEnv {
  public:
    EnergyTaskEnv(const Dataset& data, const EnvConfig& cfg, std::vector<int> days,
                  int hour_begin = 0, int hour_end = 24);

    int feature_dim() const override { return 4; }
    int num_actions() const override { return 2; }
    int num_objectives() const override { return 2; }
    int num_episodes() const override { return static_cast<int>(days_.size()); }
    std::vector<double> reset(int episode) override;
    StepOut step(int action) override;
    double gamma() const override { return cfg_.gamma; }

    std::vector<double> features(const EnvState& s) const;
    const EnvState& state() const { return state_; }
    int current_day() const { return day_; }

  private:
    const Dataset& data_;
    EnvConfig cfg_;
    std::vector<int> days_;
    int hour_begin_, hour_end_;
    EnvState state_;
    int day_ = 1;
    bool done_ = true;
};

// Weight-free replay record over normalized features.
struct Sample {
    std::vector<double> s;
    int a = 0;
    std::vector<double> r;
    std::vector<double> s2;
    bool done = false;
};

// FIFO ring buffer.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity) : cap_(capacity) {}
    void push(Sample s);
    std::size_t size() const { return full_ ? cap_ : next_; }
    std::size_t capacity() const { return cap_; }
    const Sample& at(std::size_t i) const { return ring_[i]; }

  private:
    std::vector<Sample> ring_;
    std::size_t cap_;
    std::size_t next_ = 0;
    bool full_ = false;
};

// Q(s, a, w) for every action: |A| x d matrix from one conditioned forward
// pass on input [features, w].
std::vector<std::vector<double>> q_values(const MlpParams& qnet,
                                          std::span<const double> state, const WeightVec& w);

// argmax_a max_{w' in support} Q(s, a, w') . w; ties resolve to the lowest
// action index.
int gpi_action(const MlpParams& qnet, std::span<const double> state, const WeightVec& w,
               const std::vector<WeightVec>& support);

// Same rule over an arbitrary Q provider (w' -> |A| x d matrix); lets tests
// drive the selection rule from hand-built tables.
int gpi_action_generic(
    const std::function<std::vector<std::vector<double>>(const WeightVec&)>& q_for,
    const WeightVec& w, const std::vector<WeightVec>& support);

// Undiscounted reward-vector sum over episodes (all pool episodes unless an
// explicit list is given), acting greedily via GPI over support plus w itself.
ValueVec evaluate_policy(const MlpParams& qnet, const WeightVec& w,
                         const std::vector<WeightVec>& support, EpisodeEnv& env,
                         const std::vector<int>* episodes = nullptr);

// evaluate_policy per support weight, then Pareto filter. policy_id indexes
// the support weight that produced each value.
SolutionSet extract_front(const MlpParams& qnet, const std::vector<WeightVec>& support,
                          EpisodeEnv& env, const std::vector<int>* episodes = nullptr);

struct AgentConfig {
    std::vector<int> hidden = {256, 256, 256, 256};
    double lr = 3e-4;
    int batch_size = 256;
    std::size_t replay_capacity = 200000;
    int target_update = 200;
    double eps_start = 1.0;
    double eps_end = 0.05;
    double eps_fraction = 0.5;      // share of the budget spent annealing
    int weight_hold_steps = 240;    // env steps between corner re-selection
    int max_support = 12;
    double uniform_weight_frac = 0.5;  // share of batch weights drawn uniformly
    int learning_starts = 64;
    int front_eval_episodes = 4;    // episode subsample for training-time fronts
};

struct DynConfig;   // dyna.hpp
struct DynaParts;   // internal model-based state, defined in dyna.cpp

// Weight-conditioned multi-objective Q-learner with GPI action selection and
// corner-weight scheduling. Variant PD adds a learned dynamics ensemble and
// prioritized synthetic replay.
class GpiAgent {
  public:
    GpiAgent(int feature_dim, int n_actions, int n_obj, const AgentConfig& cfg,
             std::uint64_t seed, Variant variant = Variant::LS,
             const DynConfig* dyn_cfg = nullptr);
    // Clone construction for meta-learning inner loops: fresh optimizer,
    // replay, and support around existing parameters.
    GpiAgent(MlpParams params, int n_actions, int n_obj, const AgentConfig& cfg,
             std::uint64_t seed, Variant variant = Variant::LS,
             const DynConfig* dyn_cfg = nullptr);
    ~GpiAgent();
    GpiAgent(GpiAgent&&) noexcept;

    const MlpParams& params() const { return qnet_; }
    const std::vector<WeightVec>& support() const { return support_; }
    void set_support(std::vector<WeightVec> m) { support_ = std::move(m); }
    void set_gamma(double g) { env_gamma_ = g; }
    Variant variant() const { return variant_; }

    int act_greedy(std::span<const double> state, const WeightVec& w) const;
    double epsilon(long budget) const;

    // One Adam step on the vector TD loss over an explicit batch; returns the
    // loss and records per-sample TD magnitudes.
    double td_train_step(const std::vector<const Sample*>& batch,
                         const std::vector<WeightVec>& weights,
                         const std::vector<double>* is_weights = nullptr);
    const std::vector<double>& last_td_errors() const { return last_td_errors_; }

    // Corner-weight schedule: prefer unvisited corners of the current front's
    // hull; with no positive improvement estimate left, refine a random
    // visited corner.
    WeightVec select_next_weight(const SolutionSet& front);

    // Runs n_steps environment steps with exactly one gradient update per
    // step once the replay warm-up is met. budget_hint scales the epsilon
    // anneal (defaults to n_steps).
    void train(EpisodeEnv& env, long n_steps, long budget_hint = -1);

    ValueVec evaluate(EpisodeEnv& env, const WeightVec& w) const;
    SolutionSet front(EpisodeEnv& env) const;

    long env_steps() const { return env_steps_; }
    long grad_updates() const { return grad_updates_; }
    const ReplayBuffer& replay() const { return replay_; }

    // Test/bench access to the underlying model-based machinery (PD only).
    DynaParts* dyna() { return dyna_.get(); }
    double synthetic_batch_fraction() const { return last_synth_frac_; }

  private:
    friend struct DynaParts;
    std::vector<WeightVec> batch_weights(std::size_t n);
    bool maybe_reselect_weight(EpisodeEnv& env, long step_in_run);
    double td_update_ls();
    double td_update_pd();
    void pd_model_hooks();

    AgentConfig cfg_;
    Variant variant_;
    MlpParams qnet_, target_;
    AdamState adam_;
    std::vector<WeightVec> support_;
    ReplayBuffer replay_;
    Rng rng_;
    int n_actions_ = 2, n_obj_ = 2, feature_dim_ = 0;
    long env_steps_ = 0, grad_updates_ = 0, budget_ = 0;
    unsigned long episode_counter_ = 0;
    double env_gamma_ = 0.99;
    double last_max_td_ = 0.0;
    double last_synth_frac_ = 0.0;
    std::vector<double> last_td_errors_;
    WeightVec behavior_w_;
    std::unique_ptr<DynaParts> dyna_;
};

}  // namespace morl
