#pragma once

#include <cstdint>

#include "gridmotion/error.hpp"

namespace gmc {

/**
 * Motion-coherence probability model.
 *
 * A keypoint's neighborhood supports its motion hypothesis with probability
 * p_true when the region really moves together, and with probability p_false
 * when it does not:
 *
 *   p_true  = t + (1 - t) * beta * m/M
 *   p_false = beta * (1 - t) * m/M
 *
 * t is the probability that a neighbor is motion-consistent, beta absorbs
 * violations caused by repeated structure, and m/M is the fraction of
 * feature locations falling in the region by chance. The support count over
 * n neighbors is then binomial under either hypothesis, and the gap
 * p_true - p_false = t * (1 - beta * m/M) >= 0 is what makes the count a
 * usable test statistic.
 */
struct StatModel {
    double t = 0.6;
    double beta = 1.0;
    double m_over_M = 0.04;

    /// Throws Error when the parameters leave [0,1] probability ranges.
    void validate() const;
};

double p_true(const StatModel& model);
double p_false(const StatModel& model);

/// Classification threshold on the support count: the mean of the false
/// binomial plus k_sigma standard deviations, tau(n) = n*p_false +
/// k_sigma*sqrt(n*p_false*(1-p_false)).
double support_threshold(const StatModel& model, int n, double k_sigma);

struct SeparabilityReport {
    double p_true = 0.0;
    double p_false = 0.0;
    double mean_true = 0.0;
    double stddev_true = 0.0;
    double mean_false = 0.0;
    double stddev_false = 0.0;
    double threshold = 0.0;
    /// True when the k-sigma lower bound of the true binomial clears tau(n).
    bool separable = false;
};

SeparabilityReport separability(const StatModel& model, int n, double k_sigma);

struct MonteCarloResult {
    double empirical_p_true = 0.0;
    double empirical_p_false = 0.0;
};

/// Simulates the two-stage generative process behind p_true/p_false over
/// n keypoints per trial and returns empirical frequencies. Deterministic
/// under a fixed seed.
MonteCarloResult monte_carlo_check(const StatModel& model, int n, long trials,
                                   std::uint64_t seed);

} // namespace gmc
