#pragma once

#include <span>

#include "morl/env.hpp"
#include "morl/net.hpp"

namespace morl {

// One day of renewable output, min-max scaled to [0,1] over the full dataset.
struct DayWindow {
    int day = 1;
    std::vector<double> x;  // 24 values
};

std::vector<DayWindow> make_windows(const Dataset& data);

struct DetectorConfig {
    std::vector<int> encoder = {64, 32, 16};  // mirrored into a symmetric AE
    int epochs = 500;
    double lr = 1e-3;
    int rolling = 7;     // threshold = mean of the last `rolling` losses
    int refractory = 7;  // windows after a shift before triggering again
    std::uint64_t seed = 12345;
};

LayerShape autoencoder_shape(const DetectorConfig& cfg);

double recon_loss(const MlpParams& ae, const DayWindow& win);

// Warm-start training on a window slice: per-epoch pass with one Adam step
// per window.
MlpParams retrain(MlpParams ae, std::span<const DayWindow> windows,
                  const DetectorConfig& cfg);

struct DetectResult {
    std::vector<int> context_starts;   // day 1 is always first
    std::vector<double> losses;        // pre-decision reconstruction loss per window
    std::vector<double> thresholds;    // threshold in force at each decision
    std::vector<int> triggered;        // 0/1 per window
    MlpParams ae;                      // final detector state
};

// Reconstruction-loss changepoint scan: a window whose loss exceeds the
// rolling mean opens a new context and retrains the AE on it. The initial
// threshold of -inf makes window 1 always open context 1.
DetectResult detect(const std::vector<DayWindow>& windows, const DetectorConfig& cfg);

struct ContextSegment {
    int id = 0;
    int start_day = 1;
    int end_day = 1;
};

// Contiguous partition of [first_day, last_day] from detected starts.
std::vector<ContextSegment> segments_from_starts(const std::vector<int>& starts,
                                                 int first_day, int last_day);

}  // namespace morl
