#include "morl/dyna.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace morl {

namespace {
inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(int feature_dim, int n_actions, int n_obj, const DynConfig& cfg,
                   std::uint64_t seed)
    : feature_dim_(feature_dim), n_actions_(n_actions), n_obj_(n_obj) {
    if (cfg.ensemble_size < 2)
        throw std::invalid_argument("Ensemble: at least 2 members required");
    LayerShape shape;
    shape.sizes.push_back(feature_dim + n_actions);  // features + action one-hot
    for (int h : cfg.hidden) shape.sizes.push_back(h);
    shape.sizes.push_back(feature_dim + n_obj + 1);  // delta features, reward, done logit
    shape.act = Activation::ReluLinear;
    for (int i = 0; i < cfg.ensemble_size; ++i) {
        members_.push_back(init_mlp(shape, split_seed(seed, static_cast<std::uint64_t>(i))));
        adams_.push_back(make_adam(members_.back().theta.size(), cfg.lr));
    }
}

std::vector<double> Ensemble::model_input(std::span<const double> features,
                                          int action) const {
    std::vector<double> in(features.begin(), features.end());
    for (int a = 0; a < n_actions_; ++a) in.push_back(a == action ? 1.0 : 0.0);
    return in;
}

std::vector<double> Ensemble::train_step(const std::vector<const Sample*>& batch,
                                         Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("Ensemble::train_step: empty batch");
    std::vector<double> losses(members_.size(), 0.0);
    const int out_dim = feature_dim_ + n_obj_ + 1;
    std::vector<double> grad, grad_out, in;
    for (std::size_t m = 0; m < members_.size(); ++m) {
        grad.assign(members_[m].theta.size(), 0.0);
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        double loss = 0.0;
        for (std::size_t k = 0; k < batch.size(); ++k) {
            // independent bootstrap: each member sees its own resample
            const Sample& t = *batch[static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<int>(batch.size()) - 1))];
            in = model_input(t.s, t.a);
            const std::vector<double> out = forward(members_[m], in);
            grad_out.assign(out.size(), 0.0);
            // targets: delta state, reward vector, done bit (through sigmoid)
            for (int j = 0; j < feature_dim_; ++j) {
                const double e = out[j] - (t.s2[j] - t.s[j]);
                loss += e * e / out_dim * inv_b;
                grad_out[j] = 2.0 * e / out_dim * inv_b;
            }
            for (int j = 0; j < n_obj_; ++j) {
                const double e = out[feature_dim_ + j] - t.r[j];
                loss += e * e / out_dim * inv_b;
                grad_out[feature_dim_ + j] = 2.0 * e / out_dim * inv_b;
            }
            const double p = sigmoid(out[out_dim - 1]);
            const double e = p - (t.done ? 1.0 : 0.0);
            loss += e * e / out_dim * inv_b;
            grad_out[out_dim - 1] = 2.0 * e * p * (1.0 - p) / out_dim * inv_b;
            backward_accum(members_[m], in, grad_out, grad);
        }
        adam_step(members_[m], adams_[m], grad);
        losses[m] = loss;
    }
    return losses;
}

double Ensemble::eval_loss(int member, const std::vector<const Sample*>& batch) const {
    if (batch.empty()) throw std::invalid_argument("Ensemble::eval_loss: empty batch");
    const int out_dim = feature_dim_ + n_obj_ + 1;
    const MlpParams& net = members_[static_cast<std::size_t>(member)];
    double loss = 0.0;
    for (const Sample* t : batch) {
        const std::vector<double> out = forward(net, model_input(t->s, t->a));
        for (int j = 0; j < feature_dim_; ++j) {
            const double e = out[j] - (t->s2[j] - t->s[j]);
            loss += e * e / out_dim;
        }
        for (int j = 0; j < n_obj_; ++j) {
            const double e = out[feature_dim_ + j] - t->r[j];
            loss += e * e / out_dim;
        }
        const double p = sigmoid(out[out_dim - 1]);
        const double e = p - (t->done ? 1.0 : 0.0);
        loss += e * e / out_dim;
    }
    return loss / static_cast<double>(batch.size());
}

DynPrediction Ensemble::predict_member(int member, std::span<const double> features,
                                       int action) const {
    const std::vector<double> out = forward(members_[static_cast<std::size_t>(member)],
                                            model_input(features, action));
    DynPrediction p;
    p.next_features.resize(feature_dim_);
    for (int j = 0; j < feature_dim_; ++j) p.next_features[j] = features[j] + out[j];
    p.reward.assign(out.begin() + feature_dim_, out.begin() + feature_dim_ + n_obj_);
    p.done_prob = sigmoid(out[feature_dim_ + n_obj_]);
    p.done = p.done_prob > 0.5;
    return p;
}

DynPrediction Ensemble::predict(std::span<const double> features, int action,
                                Rng& rng) const {
    return predict_member(uniform_int(rng, 0, size() - 1), features, action);
}

double Ensemble::disagreement(std::span<const double> features, int action) const {
    // mean per-dimension variance of next-feature predictions across members
    std::vector<std::vector<double>> preds;
    preds.reserve(members_.size());
    for (int m = 0; m < size(); ++m)
        preds.push_back(predict_member(m, features, action).next_features);
    double total = 0.0;
    for (int j = 0; j < feature_dim_; ++j) {
        double mean = 0.0;
        for (const auto& p : preds) mean += p[j];
        mean /= preds.size();
        double var = 0.0;
        for (const auto& p : preds) var += (p[j] - mean) * (p[j] - mean);
        total += var / preds.size();
    }
    return total / feature_dim_;
}

// ---------------------------------------------------------------------------
// Prioritized replay

double priority_from_td(double td_error, double alpha, double floor) {
    if (!std::isfinite(td_error)) throw NumericError("priority_from_td: non-finite TD error");
    return std::pow(std::abs(td_error) + floor, alpha);
}

PrioritizedReplay::PrioritizedReplay(std::size_t real_capacity, std::size_t synth_capacity) {
    real_impl_.cap = real_capacity;
    synth_impl_.cap = synth_capacity;
}

void PrioritizedReplay::push(Pool& pool, PrioritizedEntry e) {
    if (pool.ring.size() < pool.cap) {
        pool.ring.push_back(std::move(e));
        pool.next = pool.ring.size() % pool.cap;
        pool.full = pool.ring.size() == pool.cap;
        return;
    }
    pool.ring[pool.next] = std::move(e);
    pool.next = (pool.next + 1) % pool.cap;
    pool.full = true;
}

void PrioritizedReplay::push_real(Sample s, bool holdout) {
    PrioritizedEntry e;
    e.sample = std::move(s);
    e.priority = max_priority_real_;  // fresh samples start at the running max
    e.synthetic = false;
    e.holdout = holdout;
    push(real_impl_, std::move(e));
}

void PrioritizedReplay::push_synth(Sample s, double priority, int source_model) {
    if (!(priority > 0.0)) throw std::invalid_argument("push_synth: priority must be > 0");
    PrioritizedEntry e;
    e.sample = std::move(s);
    e.priority = priority;
    e.synthetic = true;
    e.source_model = source_model;
    push(synth_impl_, std::move(e));
}

std::size_t PrioritizedReplay::draw_from(const Pool& pool, Rng& rng) const {
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) total += pool.ring[i].priority;
    double x = uniform_real(rng, 0.0, total);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        x -= pool.ring[i].priority;
        if (x <= 0.0) return i;
    }
    return pool.size() - 1;
}

PrioritizedReplay::Batch PrioritizedReplay::sample(std::size_t n, double cap_frac,
                                                   double beta, Rng& rng) {
    if (real_impl_.size() == 0) throw std::invalid_argument("sample: no real data");
    Batch out;
    std::size_t n_synth = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor(cap_frac * static_cast<double>(n))),
        synth_impl_.size());
    const std::size_t n_real = n - n_synth;

    double real_total = 0.0, synth_total = 0.0;
    for (std::size_t i = 0; i < real_impl_.size(); ++i)
        real_total += real_impl_.ring[i].priority;
    for (std::size_t i = 0; i < synth_impl_.size(); ++i)
        synth_total += synth_impl_.ring[i].priority;

    auto draw = [&](bool synthetic) {
        const Pool& pool = synthetic ? synth_impl_ : real_impl_;
        const double total = synthetic ? synth_total : real_total;
        const std::size_t idx = draw_from(pool, rng);
        out.samples.push_back(&pool.ring[idx].sample);
        out.refs.push_back({synthetic, idx});
        const double prob = pool.ring[idx].priority / total;
        out.is_weights.push_back(
            std::pow(static_cast<double>(pool.size()) * prob, -beta));
    };
    for (std::size_t i = 0; i < n_real; ++i) draw(false);
    for (std::size_t i = 0; i < n_synth; ++i) draw(true);

    double wmax = 0.0;
    for (double w : out.is_weights) wmax = std::max(wmax, w);
    if (wmax > 0.0)
        for (double& w : out.is_weights) w /= wmax;
    out.synth_fraction = static_cast<double>(n_synth) / static_cast<double>(n);
    return out;
}

void PrioritizedReplay::update_priority(const Ref& ref, double td_error, double alpha,
                                        double floor) {
    Pool& pool = ref.synthetic ? synth_impl_ : real_impl_;
    if (ref.index >= pool.size()) return;  // entry already evicted
    const double p = priority_from_td(td_error, alpha, floor);
    pool.ring[ref.index].priority = p;
    if (!ref.synthetic) max_priority_real_ = std::max(max_priority_real_, p);
}

std::vector<const Sample*> PrioritizedReplay::sample_real_for_model(std::size_t n,
                                                                    Rng& rng) const {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < real_impl_.size(); ++i)
        if (!real_impl_.ring[i].holdout) candidates.push_back(i);
    std::vector<const Sample*> out;
    if (candidates.empty()) return out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(&real_impl_.ring[candidates[static_cast<std::size_t>(uniform_int(
                          rng, 0, static_cast<int>(candidates.size()) - 1))]]
                           .sample);
    return out;
}

std::vector<const Sample*> PrioritizedReplay::holdout() const {
    std::vector<const Sample*> out;
    for (std::size_t i = 0; i < real_impl_.size(); ++i)
        if (real_impl_.ring[i].holdout) out.push_back(&real_impl_.ring[i].sample);
    return out;
}

// ---------------------------------------------------------------------------
// Imagination and model quality

std::vector<PrioritizedEntry> imagine(const DynamicsModel& model, const MlpParams& qnet,
                                      const std::vector<WeightVec>& support,
                                      const std::vector<const Sample*>& branch_states,
                                      int n_rollouts, int horizon, Rng& rng) {
    std::vector<PrioritizedEntry> out;
    if (horizon <= 0 || n_rollouts <= 0 || branch_states.empty()) return out;
    if (support.empty()) throw std::invalid_argument("imagine: empty weight support");
    for (int roll = 0; roll < n_rollouts; ++roll) {
        const Sample& seed = *branch_states[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(branch_states.size()) - 1))];
        const WeightVec w = support[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(support.size()) - 1))];
        std::vector<double> s = seed.s;
        for (int h = 0; h < horizon; ++h) {
            const int a = gpi_action(qnet, s, w, support);
            DynPrediction pred = model.predict(s, a, rng);
            PrioritizedEntry e;
            e.sample = {s, a, pred.reward, pred.next_features, pred.done};
            e.priority = 1.0 + model.disagreement(s, a);
            e.synthetic = true;
            e.source_model = 0;
            out.push_back(std::move(e));
            if (pred.done) break;
            s = std::move(pred.next_features);
        }
    }
    return out;
}

QualityReport model_quality(const Ensemble& ensemble,
                            const std::vector<const Sample*>& holdout) {
    if (holdout.empty()) throw std::invalid_argument("model_quality: empty holdout");
    const int fdim = static_cast<int>(holdout.front()->s.size());
    const int d = static_cast<int>(holdout.front()->r.size());
    if (fdim == 0 || d == 0)
        throw std::invalid_argument("model_quality: degenerate feature or reward slice");
    QualityReport rep;
    rep.per_feature_mse.assign(fdim, 0.0);
    long done_hits = 0;
    for (const Sample* t : holdout) {
        // score the ensemble mean prediction
        std::vector<double> mean_next(fdim, 0.0), mean_r(d, 0.0);
        double mean_done = 0.0;
        for (int m = 0; m < ensemble.size(); ++m) {
            DynPrediction p = ensemble.predict_member(m, t->s, t->a);
            for (int j = 0; j < fdim; ++j) mean_next[j] += p.next_features[j];
            for (int j = 0; j < d; ++j) mean_r[j] += p.reward[j];
            mean_done += p.done_prob;
        }
        for (double& v : mean_next) v /= ensemble.size();
        for (double& v : mean_r) v /= ensemble.size();
        mean_done /= ensemble.size();
        for (int j = 0; j < fdim; ++j) {
            const double e = mean_next[j] - t->s2[j];
            rep.per_feature_mse[j] += e * e;
        }
        for (int j = 0; j < d; ++j) {
            const double e = mean_r[j] - t->r[j];
            rep.reward_mse += e * e;
        }
        if ((mean_done > 0.5) == t->done) ++done_hits;
        rep.disagreement_mean += ensemble.disagreement(t->s, t->a);
    }
    const double n = static_cast<double>(holdout.size());
    for (double& v : rep.per_feature_mse) v /= n;
    rep.reward_mse /= n * d;
    rep.done_accuracy = done_hits / n;
    rep.disagreement_mean /= n;
    for (double v : rep.per_feature_mse) rep.feature_mse += v;
    rep.feature_mse /= fdim;
    return rep;
}

void write_quality_csv(const std::string& path,
                       const std::vector<std::pair<long, QualityReport>>& history) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "step,feature,mse,reward_mse,done_accuracy,disagreement\n";
    for (const auto& [step, rep] : history)
        for (std::size_t j = 0; j < rep.per_feature_mse.size(); ++j)
            out << step << ',' << j << ',' << rep.per_feature_mse[j] << ',' << rep.reward_mse
                << ',' << rep.done_accuracy << ',' << rep.disagreement_mean << '\n';
}

DynaParts::DynaParts(int feature_dim, int n_actions, int n_obj, const DynConfig& cfg_in,
                     std::size_t real_capacity, std::uint64_t seed)
    : cfg(cfg_in), ensemble(feature_dim, n_actions, n_obj, cfg_in, seed),
      replay(real_capacity, cfg_in.synth_capacity) {}

}  // namespace morl
