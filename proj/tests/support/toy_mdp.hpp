#pragma once

// Two-state, two-action, two-objective MDP with horizon 2, small enough to
// enumerate every deterministic time-dependent policy as an exact oracle.
//
//   s0, a0 -> r (1.0, 0.0), stay in s0      s1, a0 -> r (0.7, 0.6), go to s0
//   s0, a1 -> r (0.0, 1.0), go to s1        s1, a1 -> r (0.2, 0.8), stay in s1
//
// Start in s0. The convex coverage set over returns is
// {(2,0), (0.7,1.6), (0.2,1.8)}.

#include <array>

#include "morl/gpi.hpp"

namespace toy {

inline constexpr int kHorizon = 2;

inline double reward0(int s, int a) {
    static constexpr double r[2][2] = {{1.0, 0.0}, {0.7, 0.2}};
    return r[s][a];
}
inline double reward1(int s, int a) {
    static constexpr double r[2][2] = {{0.0, 1.0}, {0.6, 0.8}};
    return r[s][a];
}
inline int next_state(int /*s*/, int a) { return a; }  // action picks the next state

class ToyMdp : public morl::EpisodeEnv {
  public:
    int feature_dim() const override { return 3; }
    int num_actions() const override { return 2; }
    int num_objectives() const override { return 2; }
    int num_episodes() const override { return 1; }
    double gamma() const override { return 1.0; }

    std::vector<double> reset(int) override {
        t_ = 0;
        s_ = 0;
        return features();
    }

    morl::StepOut step(int action) override {
        morl::StepOut out;
        out.reward = {reward0(s_, action), reward1(s_, action)};
        s_ = next_state(s_, action);
        ++t_;
        out.done = t_ >= kHorizon;
        out.features = features();
        return out;
    }

  private:
    std::vector<double> features() const {
        return {static_cast<double>(t_) / kHorizon, s_ == 0 ? 1.0 : 0.0,
                s_ == 1 ? 1.0 : 0.0};
    }
    int t_ = 0;
    int s_ = 0;
};

// exact return of a time-dependent deterministic policy pi(t, s)
inline morl::ValueVec policy_return(const std::array<std::array<int, 2>, kHorizon>& pi) {
    int s = 0;
    morl::ValueVec v = {0.0, 0.0};
    for (int t = 0; t < kHorizon; ++t) {
        const int a = pi[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
        v[0] += reward0(s, a);
        v[1] += reward1(s, a);
        s = next_state(s, a);
    }
    return v;
}

// enumerate all 16 time-dependent deterministic policies
inline morl::SolutionSet all_policy_values() {
    morl::SolutionSet out;
    int id = 0;
    for (int a00 = 0; a00 < 2; ++a00)
        for (int a01 = 0; a01 < 2; ++a01)
            for (int a10 = 0; a10 < 2; ++a10)
                for (int a11 = 0; a11 < 2; ++a11)
                    out.push_back({policy_return({{{a00, a01}, {a10, a11}}}), id++});
    return out;
}

inline morl::SolutionSet oracle_ccs() { return morl::ccs_prune(all_policy_values()); }

}  // namespace toy
