#include "morl/context.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace morl {

std::vector<DayWindow> make_windows(const Dataset& data) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const HourlyRecord& r : data.records()) {
        lo = std::min(lo, r.renewable_kw);
        hi = std::max(hi, r.renewable_kw);
    }
    const double range = hi - lo;
    std::vector<DayWindow> windows;
    windows.reserve(static_cast<std::size_t>(data.num_days()));
    for (int d = data.first_day(); d <= data.last_day(); ++d) {
        DayWindow w;
        w.day = d;
        w.x.resize(24);
        for (int h = 0; h < 24; ++h)
            w.x[h] = range > 0 ? (data.at(d, h).renewable_kw - lo) / range : 0.0;
        windows.push_back(std::move(w));
    }
    return windows;
}

LayerShape autoencoder_shape(const DetectorConfig& cfg) {
    LayerShape shape;
    shape.act = Activation::SigmoidAll;
    shape.sizes.push_back(24);
    for (int s : cfg.encoder) shape.sizes.push_back(s);
    for (auto it = cfg.encoder.rbegin() + 1; it != cfg.encoder.rend(); ++it)
        shape.sizes.push_back(*it);
    shape.sizes.push_back(24);
    return shape;
}

double recon_loss(const MlpParams& ae, const DayWindow& win) {
    const std::vector<double> y = forward(ae, win.x);
    return mse_loss_grad(y, win.x).first;
}

MlpParams retrain(MlpParams ae, std::span<const DayWindow> windows,
                  const DetectorConfig& cfg) {
    if (windows.empty()) throw std::invalid_argument("retrain: empty window slice");
    AdamState adam = make_adam(ae.theta.size(), cfg.lr);
    std::vector<double> grad(ae.theta.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const DayWindow& w : windows) {
            const std::vector<double> y = forward(ae, w.x);
            auto [loss, grad_out] = mse_loss_grad(y, w.x);
            (void)loss;
            std::fill(grad.begin(), grad.end(), 0.0);
            backward_accum(ae, w.x, grad_out, grad);
            adam_step(ae, adam, grad);
        }
    }
    return ae;
}

DetectResult detect(const std::vector<DayWindow>& windows, const DetectorConfig& cfg) {
    if (windows.size() < 2) throw std::invalid_argument("detect: need at least 2 windows");
    DetectResult res;
    res.ae = init_mlp(autoencoder_shape(cfg), cfg.seed);

    std::vector<double> loss_list;  // cleared at every detected shift
    double threshold = -std::numeric_limits<double>::infinity();
    std::size_t next_allowed = 0;

    for (std::size_t i = 0; i < windows.size(); ++i) {
        const double loss = recon_loss(res.ae, windows[i]);
        res.losses.push_back(loss);
        res.thresholds.push_back(threshold);

        const bool eligible = i >= next_allowed;
        // ulp guard: the rolling mean of identical losses can round a hair
        // below the loss itself, which must not count as an exceedance
        bool trigger = eligible;
        if (std::isfinite(threshold)) {
            const double margin = std::max(1e-12, 1e-9 * std::abs(threshold));
            trigger = eligible && loss > threshold + margin;
        }
        res.triggered.push_back(trigger ? 1 : 0);
        double recorded = loss;
        if (trigger) {
            res.context_starts.push_back(windows[i].day);
            loss_list.clear();
            // the new context consists of this window alone so far
            res.ae = retrain(std::move(res.ae), std::span(&windows[i], 1), cfg);
            recorded = recon_loss(res.ae, windows[i]);
            next_allowed = i + static_cast<std::size_t>(std::max(1, cfg.refractory));
        }
        loss_list.push_back(recorded);

        const std::size_t take =
            std::min<std::size_t>(loss_list.size(), static_cast<std::size_t>(cfg.rolling));
        double mean = 0.0;
        for (std::size_t k = loss_list.size() - take; k < loss_list.size(); ++k)
            mean += loss_list[k];
        threshold = mean / static_cast<double>(take);
    }
    return res;
}

std::vector<ContextSegment> segments_from_starts(const std::vector<int>& starts,
                                                 int first_day, int last_day) {
    if (starts.empty() || starts.front() != first_day)
        throw std::invalid_argument("segments_from_starts: first context must open on day 1");
    std::vector<ContextSegment> segs;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        ContextSegment s;
        s.id = static_cast<int>(i) + 1;
        s.start_day = starts[i];
        s.end_day = i + 1 < starts.size() ? starts[i + 1] - 1 : last_day;
        if (s.end_day < s.start_day)
            throw std::invalid_argument("segments_from_starts: starts not increasing");
        segs.push_back(s);
    }
    return segs;
}

}  // namespace morl
