#include "gridmotion/stats.hpp"

#include <cmath>

#include "gridmotion/random.hpp"

namespace gmc {

void StatModel::validate() const {
    if (!(t >= 0.0 && t <= 1.0))
        throw Error("StatModel: t must lie in [0, 1]");
    if (!(beta > 0.0))
        throw Error("StatModel: beta must be positive");
    if (!(m_over_M > 0.0 && m_over_M < 1.0))
        throw Error("StatModel: m_over_M must lie in (0, 1)");
    if (beta * m_over_M > 1.0)
        throw Error("StatModel: beta * m_over_M must not exceed 1");
}

double p_true(const StatModel& model) {
    return model.t + (1.0 - model.t) * model.beta * model.m_over_M;
}

double p_false(const StatModel& model) {
    return model.beta * (1.0 - model.t) * model.m_over_M;
}

double support_threshold(const StatModel& model, int n, double k_sigma) {
    if (n < 1)
        throw Error("support_threshold: n must be >= 1");
    const double pf = p_false(model);
    return n * pf + k_sigma * std::sqrt(n * pf * (1.0 - pf));
}

SeparabilityReport separability(const StatModel& model, int n, double k_sigma) {
    if (n < 1)
        throw Error("separability: n must be >= 1");
    SeparabilityReport rep;
    rep.p_true = p_true(model);
    rep.p_false = p_false(model);
    rep.mean_true = n * rep.p_true;
    rep.stddev_true = std::sqrt(n * rep.p_true * (1.0 - rep.p_true));
    rep.mean_false = n * rep.p_false;
    rep.stddev_false = std::sqrt(n * rep.p_false * (1.0 - rep.p_false));
    rep.threshold = support_threshold(model, n, k_sigma);
    rep.separable = (rep.mean_true - k_sigma * rep.stddev_true) > rep.threshold;
    return rep;
}

MonteCarloResult monte_carlo_check(const StatModel& model, int n, long trials,
                                   std::uint64_t seed) {
    if (n < 1)
        throw Error("monte_carlo_check: n must be >= 1");
    if (trials < 1)
        throw Error("monte_carlo_check: trials must be >= 1");
    model.validate();

    Rng rng(seed);
    const double chance_hit = model.beta * model.m_over_M;
    long hits_true = 0;
    long hits_false = 0;
    // Stage 1: the neighbor is motion-consistent with probability t. A
    // consistent neighbor lands in the region only under the same-motion
    // hypothesis. Stage 2: an inconsistent neighbor still lands there by
    // chance with probability beta*m/M, under either hypothesis.
    for (long trial = 0; trial < trials; ++trial) {
        for (int k = 0; k < n; ++k) {
            const bool consistent = uniform01(rng) < model.t;
            const bool chance = uniform01(rng) < chance_hit;
            if (consistent || chance) ++hits_true;
            if (!consistent && chance) ++hits_false;
        }
    }
    const double samples = static_cast<double>(trials) * n;
    return {hits_true / samples, hits_false / samples};
}

} // namespace gmc
