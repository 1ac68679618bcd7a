#pragma once

#include <deque>

#include "morl/gpi.hpp"

namespace morl {

struct DynConfig {
    int ensemble_size = 5;
    int horizon = 3;
    int n_rollouts = 10;
    double synth_cap = 0.5;        // max synthetic share of a sampled batch
    double gate_mse = 0.05;        // holdout feature-MSE bound for injection
    std::vector<int> hidden = {64, 64};
    double lr = 1e-3;
    int train_every = 250;         // env steps between model update rounds
    int train_iters = 50;          // gradient steps per member per round
    int model_batch = 64;
    int imagine_every = 8;
    std::size_t synth_capacity = 50000;
    double per_alpha = 0.6;
    double per_floor = 1e-3;
    double beta_start = 0.4, beta_end = 1.0;
    int holdout_every = 10;        // every k-th real sample joins the holdout
    int holdout_cap = 128;         // recent holdout window the gate judges on
};

struct DynPrediction {
    std::vector<double> next_features;
    std::vector<double> reward;
    double done_prob = 0.0;
    bool done = false;
};

// Predictive interface used by imagination rollouts; the learned ensemble
// implements it, and tests may substitute an exact environment model.
class DynamicsModel {
  public:
    virtual ~DynamicsModel() = default;
    virtual DynPrediction predict(std::span<const double> features, int action,
                                  Rng& rng) const = 0;
    virtual double disagreement(std::span<const double> features, int action) const = 0;
};

// MLP ensemble predicting (delta features, reward vector, done logit) from
// [features, action one-hot]. Members train on independently bootstrapped
// batches.
class Ensemble : public DynamicsModel {
  public:
    Ensemble(int feature_dim, int n_actions, int n_obj, const DynConfig& cfg,
             std::uint64_t seed);

    int size() const { return static_cast<int>(members_.size()); }
    const MlpParams& member(int i) const { return members_[i]; }

    // One Adam step per member on bootstrapped resamples of the batch;
    // returns per-member loss.
    std::vector<double> train_step(const std::vector<const Sample*>& batch, Rng& rng);

    // loss of one member on a batch as-is, no bootstrap, no update
    double eval_loss(int member, const std::vector<const Sample*>& batch) const;
    void set_member(int i, MlpParams p) { members_[static_cast<std::size_t>(i)] = std::move(p); }

    DynPrediction predict_member(int member, std::span<const double> features,
                                 int action) const;
    DynPrediction predict(std::span<const double> features, int action,
                          Rng& rng) const override;
    double disagreement(std::span<const double> features, int action) const override;

  private:
    std::vector<double> model_input(std::span<const double> features, int action) const;
    int feature_dim_, n_actions_, n_obj_;
    std::vector<MlpParams> members_;
    std::vector<AdamState> adams_;
};

struct PrioritizedEntry {
    Sample sample;
    double priority = 1.0;
    bool synthetic = false;
    int source_model = -1;  // ensemble member that generated a synthetic entry
    bool holdout = false;   // real entries reserved for model validation
};

double priority_from_td(double td_error, double alpha = 0.6, double floor = 1e-3);

// Replay with separate real and synthetic FIFO pools, priority-proportional
// sampling, and a hard cap on the synthetic share of every batch.
class PrioritizedReplay {
  public:
    PrioritizedReplay(std::size_t real_capacity, std::size_t synth_capacity);

    void push_real(Sample s, bool holdout);
    void push_synth(Sample s, double priority, int source_model);

    std::size_t real_size() const { return real_.size(); }
    std::size_t synth_size() const { return synth_.size(); }
    const PrioritizedEntry& real_at(std::size_t i) const { return real_[i]; }
    const PrioritizedEntry& synth_at(std::size_t i) const { return synth_[i]; }

    struct Ref {
        bool synthetic;
        std::size_t index;
    };
    struct Batch {
        std::vector<const Sample*> samples;
        std::vector<Ref> refs;
        std::vector<double> is_weights;  // normalized to max 1
        double synth_fraction = 0.0;
    };
    // cap_frac bounds the synthetic share; beta is the importance exponent.
    Batch sample(std::size_t n, double cap_frac, double beta, Rng& rng);
    void update_priority(const Ref& ref, double td_error, double alpha, double floor);

    // batch of non-holdout real samples for model training
    std::vector<const Sample*> sample_real_for_model(std::size_t n, Rng& rng) const;
    std::vector<const Sample*> holdout() const;

  private:
    struct Pool {
        std::vector<PrioritizedEntry> ring;
        std::size_t cap, next = 0;
        bool full = false;
        std::size_t size() const { return full ? cap : next; }
    };
    void push(Pool& pool, PrioritizedEntry e);
    Pool real_impl_, synth_impl_;
    std::vector<PrioritizedEntry>& real_ = real_impl_.ring;    // convenience views
    std::vector<PrioritizedEntry>& synth_ = synth_impl_.ring;
    std::size_t draw_from(const Pool& pool, Rng& rng) const;
    double max_priority_real_ = 1.0;
};

// Short GPI-guided rollouts from replayed real states through the model;
// priority = 1 + ensemble disagreement at the branched state.
std::vector<PrioritizedEntry> imagine(const DynamicsModel& model, const MlpParams& qnet,
                                      const std::vector<WeightVec>& support,
                                      const std::vector<const Sample*>& branch_states,
                                      int n_rollouts, int horizon, Rng& rng);

struct QualityReport {
    std::vector<double> per_feature_mse;
    double feature_mse = 0.0;  // mean over features
    double reward_mse = 0.0;
    double done_accuracy = 0.0;
    double disagreement_mean = 0.0;
};

QualityReport model_quality(const Ensemble& ensemble,
                            const std::vector<const Sample*>& holdout);

void write_quality_csv(const std::string& path,
                       const std::vector<std::pair<long, QualityReport>>& history);

// PD-side state owned by GpiAgent.
struct DynaParts {
    DynaParts(int feature_dim, int n_actions, int n_obj, const DynConfig& cfg,
              std::size_t real_capacity, std::uint64_t seed);
    DynConfig cfg;
    Ensemble ensemble;
    PrioritizedReplay replay;
    bool gate_open = false;
    long real_count = 0;
    // most recent validation samples; the gate tracks the current context
    std::deque<Sample> quality_holdout;
    std::vector<std::pair<long, QualityReport>> quality_history;
    // substitute dynamics for imagination (ensemble training and the quality
    // gate are bypassed; used to wire an exact environment model in)
    const DynamicsModel* model_override = nullptr;
};

}  // namespace morl
