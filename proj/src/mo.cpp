#include "morl/mo.hpp"

#include <algorithm>
#include <cmath>

namespace morl {

double utility(const ValueVec& v, const WeightVec& w) {
    if (v.size() != w.size()) throw std::invalid_argument("utility: dimension mismatch");
    double u = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) u += v[i] * w[i];
    return u;
}

bool dominates(const ValueVec& a, const ValueVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dominates: dimension mismatch");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

SolutionSet pareto_filter(const SolutionSet& s) {
    SolutionSet out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < s.size() && keep; ++j) {
            if (j == i) continue;
            if (dominates(s[j].value, s[i].value)) keep = false;
            // equal vectors: keep only the first occurrence
            if (j < i && s[j].value == s[i].value) keep = false;
        }
        if (keep) out.push_back(s[i]);
    }
    return out;
}

SolutionSet ccs_prune(const SolutionSet& s) {
    SolutionSet pf = pareto_filter(s);
    if (pf.size() <= 2) return pf;
    for (const auto& e : pf)
        if (e.value.size() != 2)
            throw std::invalid_argument("ccs_prune: implemented for 2 objectives");

    // Pareto-filtered 2-D points sorted by v0 ascending have v1 strictly
    // descending; the CCS is the concave-from-above chain over that sweep.
    std::vector<std::size_t> order(pf.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pf[a].value[0] < pf[b].value[0];
    });

    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        const double ox = pf[o].value[0], oy = pf[o].value[1];
        return (pf[a].value[0] - ox) * (pf[b].value[1] - oy) -
               (pf[a].value[1] - oy) * (pf[b].value[0] - ox);
    };

    // hull indices into pf, walked in ascending v0; collinear points stay
    // (they tie with the mixture at the shared corner weight)
    std::vector<std::size_t> hull;
    for (std::size_t idx : order) {
        while (hull.size() >= 2 &&
               cross(hull[hull.size() - 2], hull[hull.size() - 1], idx) > 0.0)
            hull.pop_back();
        hull.push_back(idx);
    }

    std::sort(hull.begin(), hull.end());  // restore input order
    SolutionSet out;
    for (std::size_t i : hull) out.push_back(pf[i]);
    return out;
}

std::vector<WeightVec> corner_weights(const SolutionSet& s) {
    for (const auto& e : s)
        if (e.value.size() != 2)
            throw std::invalid_argument("corner_weights: implemented for 2 objectives");

    std::vector<WeightVec> corners = {{0.0, 1.0}, {1.0, 0.0}};
    std::vector<Solution> hull(s.begin(), s.end());
    std::sort(hull.begin(), hull.end(),
              [](const Solution& a, const Solution& b) { return a.value[0] < b.value[0]; });
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        const ValueVec& a = hull[i].value;
        const ValueVec& b = hull[i + 1].value;
        // tie point of a.w = b.w on the simplex: w0 (a0-b0) + (1-w0)(a1-b1) = 0
        const double denom = (a[0] - b[0]) + (b[1] - a[1]);
        if (std::abs(denom) < 1e-15) continue;  // identical utilities everywhere
        const double w0 = (b[1] - a[1]) / denom;
        if (w0 < -1e-12 || w0 > 1.0 + 1e-12) continue;  // no crossing inside the simplex
        corners.push_back({std::clamp(w0, 0.0, 1.0), 1.0 - std::clamp(w0, 0.0, 1.0)});
    }
    std::sort(corners.begin(), corners.end(),
              [](const WeightVec& a, const WeightVec& b) { return a[0] < b[0]; });
    std::vector<WeightVec> dedup;
    for (const auto& w : corners)
        if (dedup.empty() || w[0] - dedup.back()[0] > 1e-9) dedup.push_back(w);
    return dedup;
}

std::vector<WeightVec> even_weights(int n) {
    if (n < 2) throw std::invalid_argument("even_weights: n must be >= 2");
    std::vector<WeightVec> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double w0 = static_cast<double>(k) / (n - 1);
        out.push_back({w0, 1.0 - w0});
    }
    return out;
}

}  // namespace morl
