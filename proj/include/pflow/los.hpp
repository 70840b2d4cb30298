#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pflow/rng.hpp"

namespace pflow {

/// Length-of-stay distribution: gamma by method of moments, or a fixed value
/// when the standard deviation is zero. Draws are whole days, at least one.
struct LosDistribution
{
    double mean = 1.0;
    double sd = 0.0;
    double shape = 0.0; ///< gamma shape, 0 when fixed
    double scale = 0.0; ///< gamma scale, 0 when fixed

    bool fixed() const { return sd == 0.0; }
};

LosDistribution fit_los(double mean_days, double sd_days);

/// Gamma draw rounded half-up, clamped to >= 1.
int sample_los(const LosDistribution& dist, Rng& rng);

/// Exact probability of each whole-day draw of sample_los; element k-1 holds
/// P(draw == k). The tail is cut once less than 1e-12 of mass remains.
Eigen::VectorXd los_pmf(const LosDistribution& dist);

/// Steady-state distribution of days left for agents already in a facility.
class RemainingLosDistribution
{
  public:
    RemainingLosDistribution() = default;
    /// weights(r-1) is the weight of r remaining days.
    explicit RemainingLosDistribution(Eigen::VectorXd weights);

    const Eigen::VectorXd& weights() const { return weights_; }
    double mean() const;
    int max_days() const { return static_cast<int>(weights_.size()); }

    int sample(Rng& rng) const { return static_cast<int>(sampler_.sample(rng)) + 1; }

    /// Days the aging loop ran and its last day-over-day total variation.
    int aging_days = 0;
    double final_tv_change = 0.0;

  private:
    Eigen::VectorXd weights_;
    DiscreteSampler sampler_;
};

struct AgingOptions
{
    int empirical_draws = 200000; ///< size of the LOS sample the daily cohort is built from
    double horizon_multiple = 10.0; ///< minimum days as a multiple of the mean LOS
    double tv_tolerance = 1e-3;
};

/// Ages a LOS distribution: every simulated day a cohort of stays (the
/// empirical histogram of `empirical_draws` draws) joins the pool, the pool is
/// snapshotted, and every stay loses one day, dropping those that reach zero.
/// Runs at least horizon_multiple * mean days and until the snapshot moves by
/// less than tv_tolerance in total variation; returns the final snapshot.
RemainingLosDistribution age_distribution(const LosDistribution& dist, Rng& rng, const AgingOptions& options = {});

inline int sample_remaining_los(const RemainingLosDistribution& rd, Rng& rng) { return rd.sample(rng); }

} // namespace pflow
