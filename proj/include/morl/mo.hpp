#pragma once

#include <vector>

#include "morl/common.hpp"

namespace morl {

// d-dimensional return/value vector; d = 2 throughout this toolkit
// (negative annual cost, comfort count) but dominance and utility are
// dimension-generic.
using ValueVec = std::vector<double>;

// Preference weight on the simplex: components >= 0, sum == 1.
using WeightVec = std::vector<double>;

struct Solution {
    ValueVec value;
    int policy_id = -1;
};

using SolutionSet = std::vector<Solution>;

// Linear utility: inner product v . w.
double utility(const ValueVec& v, const WeightVec& w);

// Strict Pareto dominance: a >= b componentwise and a > b somewhere.
bool dominates(const ValueVec& a, const ValueVec& b);

// Non-dominated subset, stable order. Exact duplicates keep the first
// occurrence only.
SolutionSet pareto_filter(const SolutionSet& s);

// Convex coverage set for d = 2: the subset whose members maximize v . w for
// some weight on the simplex (upper convex hull of the Pareto set; points
// exactly on a hull segment tie with the mixture and are kept).
SolutionSet ccs_prune(const SolutionSet& s);

// Simplex extrema plus every weight where two adjacent hull vectors tie in
// utility. Input must be CCS-pruned; d = 2. Sorted ascending by w[0],
// deduplicated at 1e-9.
std::vector<WeightVec> corner_weights(const SolutionSet& s);

// n evenly spaced weights on the 2-simplex: w0 = k/(n-1), k = 0..n-1.
std::vector<WeightVec> even_weights(int n);

}  // namespace morl
