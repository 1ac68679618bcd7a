#pragma once

#include <array>
#include <optional>

#include "morl/mo.hpp"

namespace morl {

struct MetricReport {
    double eu = 0.0;
    double hv = 0.0;
    std::optional<double> sp;          // undefined for fewer than 2 points
    std::optional<double> hv_over_sp;  // defined only when sp > 0
    double bill_w91 = 0.0;             // pounds at preference [0.9, 0.1]
    double comfort_w19 = 0.0;          // comfort count at preference [0.1, 0.9]
};

inline constexpr std::array<double, 2> kHvReference = {-1300.0, 0.0};

// Mean over n evenly spaced weights of the best scalarized value in the set.
double expected_utility(const SolutionSet& s, int n = 100);

// Area dominated by the set relative to ref (2-D, maximization). Every point
// must weakly dominate ref; offenders raise NumericError naming the point.
double hypervolume2d(const SolutionSet& s, std::array<double, 2> ref = kHvReference);

// Mean squared gap between consecutive sorted solutions per objective.
// Absent when |s| < 2.
std::optional<double> sparsity(const SolutionSet& s);

// (bill at w=[0.9,0.1], comfort at w=[0.1,0.9]) of the utility-maximizing
// entries; bill = -v0, comfort = v1.
std::pair<double, double> anchored_values(const SolutionSet& s);

MetricReport compute_metrics(const SolutionSet& s, int eu_weights = 100,
                             std::array<double, 2> ref = kHvReference);

}  // namespace morl
