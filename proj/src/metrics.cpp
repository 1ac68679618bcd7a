#include "morl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace morl {

double expected_utility(const SolutionSet& s, int n) {
    if (s.empty()) throw std::invalid_argument("expected_utility: empty solution set");
    double total = 0.0;
    for (const WeightVec& w : even_weights(n)) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Solution& e : s) best = std::max(best, utility(e.value, w));
        total += best;
    }
    return total / n;
}

double hypervolume2d(const SolutionSet& s, std::array<double, 2> ref) {
    if (s.empty()) throw std::invalid_argument("hypervolume2d: empty solution set");
    for (const Solution& e : s) {
        if (e.value.size() != 2)
            throw std::invalid_argument("hypervolume2d: implemented for 2 objectives");
        if (e.value[0] < ref[0] || e.value[1] < ref[1]) {
            std::ostringstream msg;
            msg << "hypervolume2d: point (" << e.value[0] << ", " << e.value[1]
                << ") of policy " << e.policy_id << " falls below the reference point";
            throw NumericError(msg.str());
        }
    }
    SolutionSet pf = pareto_filter(s);
    // sweep in ascending v1; each point adds the strip above the previous one
    std::sort(pf.begin(), pf.end(),
              [](const Solution& a, const Solution& b) { return a.value[1] < b.value[1]; });
    double area = 0.0;
    double y = ref[1];
    for (const Solution& e : pf) {
        area += (e.value[0] - ref[0]) * (e.value[1] - y);
        y = e.value[1];
    }
    return area;
}

std::optional<double> sparsity(const SolutionSet& s) {
    if (s.size() < 2) return std::nullopt;
    const std::size_t m = s.front().value.size();
    double total = 0.0;
    std::vector<double> col(s.size());
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < s.size(); ++i) col[i] = s[i].value[j];
        std::sort(col.begin(), col.end());
        for (std::size_t i = 0; i + 1 < col.size(); ++i) {
            const double gap = col[i] - col[i + 1];
            total += gap * gap;
        }
    }
    return total / static_cast<double>(s.size() - 1);
}

std::pair<double, double> anchored_values(const SolutionSet& s) {
    if (s.empty()) throw std::invalid_argument("anchored_values: empty solution set");
    auto best_at = [&](const WeightVec& w) -> const Solution& {
        const Solution* best = &s.front();
        double bu = utility(best->value, w);
        for (const Solution& e : s) {
            const double u = utility(e.value, w);
            if (u > bu) {
                bu = u;
                best = &e;
            }
        }
        return *best;
    };
    const Solution& cost_side = best_at({0.9, 0.1});
    const Solution& comfort_side = best_at({0.1, 0.9});
    return {-cost_side.value[0], comfort_side.value[1]};
}

MetricReport compute_metrics(const SolutionSet& s, int eu_weights,
                             std::array<double, 2> ref) {
    MetricReport r;
    r.eu = expected_utility(s, eu_weights);
    r.hv = hypervolume2d(s, ref);
    r.sp = sparsity(pareto_filter(s));
    if (r.sp && *r.sp > 0.0) r.hv_over_sp = r.hv / *r.sp;
    auto [bill, comfort] = anchored_values(s);
    r.bill_w91 = bill;
    r.comfort_w19 = comfort;
    return r;
}

}  // namespace morl
