#include "pflow/los.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "pflow/types.hpp"

namespace pflow {

namespace {

int round_half_up_days(double x) { return std::max(1, static_cast<int>(std::floor(x + 0.5))); }

double gamma_density(double x, double shape, double scale)
{
    if (x <= 0.0)
        return 0.0;
    return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale));
}

/// Simpson's rule for the gamma density over [a, b].
double gamma_mass(double a, double b, double shape, double scale)
{
    constexpr int kPanels = 64;
    const double h = (b - a) / kPanels;
    double sum = gamma_density(a, shape, scale) + gamma_density(b, shape, scale);
    for (int i = 1; i < kPanels; ++i)
        sum += (i % 2 ? 4.0 : 2.0) * gamma_density(a + i * h, shape, scale);
    return sum * h / 3.0;
}

} // namespace

LosDistribution fit_los(double mean_days, double sd_days)
{
    if (!(mean_days > 0.0) || !std::isfinite(mean_days))
        throw InputError("LOS mean must be positive, got " + std::to_string(mean_days));
    if (!(sd_days >= 0.0) || !std::isfinite(sd_days))
        throw InputError("LOS sd must be non-negative, got " + std::to_string(sd_days));
    LosDistribution d;
    d.mean = mean_days;
    d.sd = sd_days;
    if (sd_days > 0.0) {
        d.shape = (mean_days / sd_days) * (mean_days / sd_days);
        d.scale = sd_days * sd_days / mean_days;
    }
    return d;
}

int sample_los(const LosDistribution& dist, Rng& rng)
{
    if (dist.fixed())
        return round_half_up_days(dist.mean);
    return round_half_up_days(rng.gamma(dist.shape, dist.scale));
}

Eigen::VectorXd los_pmf(const LosDistribution& dist)
{
    if (dist.fixed()) {
        const int k = round_half_up_days(dist.mean);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
        p(k - 1) = 1.0;
        return p;
    }
    // Draws in [k - 0.5, k + 0.5) become k; everything below 1.5 becomes 1.
    std::vector<double> mass{0.0};
    double captured = 0.0;
    const double limit = dist.mean + 60.0 * dist.sd + 10.0;
    for (int k = 2;; ++k) {
        const double m = gamma_mass(k - 0.5, k + 0.5, dist.shape, dist.scale);
        mass.push_back(m);
        captured += m;
        if ((k > dist.mean && m < 1e-14 && k > dist.mean + 10.0 * dist.sd) || k > limit)
            break;
    }
    mass[0] = std::max(0.0, 1.0 - captured);
    Eigen::VectorXd p = Eigen::Map<Eigen::VectorXd>(mass.data(), static_cast<Eigen::Index>(mass.size()));
    return p / p.sum();
}

RemainingLosDistribution::RemainingLosDistribution(Eigen::VectorXd weights) : weights_(std::move(weights))
{
    if (weights_.size() == 0 || (weights_.array() < 0.0).any() || !(weights_.sum() > 0.0))
        throw InputError("remaining-LOS weights must be non-negative with a positive sum");
    weights_ /= weights_.sum();
    sampler_ = DiscreteSampler(std::span<const double>(weights_.data(), static_cast<std::size_t>(weights_.size())));
}

double RemainingLosDistribution::mean() const
{
    const Eigen::VectorXd days = Eigen::VectorXd::LinSpaced(weights_.size(), 1.0, static_cast<double>(weights_.size()));
    return weights_.dot(days);
}

RemainingLosDistribution age_distribution(const LosDistribution& dist, Rng& rng, const AgingOptions& options)
{
    // Daily cohort: histogram of LOS draws (index k-1 counts stays of k days).
    Eigen::VectorXd cohort;
    if (dist.fixed()) {
        const int k = sample_los(dist, rng);
        cohort = Eigen::VectorXd::Zero(k);
        cohort(k - 1) = 1.0;
    } else {
        std::vector<double> counts;
        for (int i = 0; i < options.empirical_draws; ++i) {
            const auto k = static_cast<std::size_t>(sample_los(dist, rng));
            if (counts.size() < k)
                counts.resize(k, 0.0);
            counts[k - 1] += 1.0;
        }
        cohort = Eigen::Map<Eigen::VectorXd>(counts.data(), static_cast<Eigen::Index>(counts.size()));
    }
    const Eigen::Index longest = cohort.size();
    const int min_days = std::max(1, static_cast<int>(std::ceil(options.horizon_multiple * dist.mean)));

    Eigen::VectorXd pool = Eigen::VectorXd::Zero(longest);
    Eigen::VectorXd snapshot = Eigen::VectorXd::Zero(longest);
    Eigen::VectorXd previous = snapshot;
    double tv = 1.0;
    int day = 0;
    // Once every cohort age is present the pool stops changing, so this ends
    // by day longest + 1 at the latest.
    while (day < min_days || tv >= options.tv_tolerance) {
        pool += cohort;
        snapshot = pool / pool.sum();
        tv = day == 0 ? 1.0 : 0.5 * (snapshot - previous).cwiseAbs().sum();
        previous = snapshot;
        ++day;
        if (longest > 1)
            pool.head(longest - 1) = pool.tail(longest - 1).eval();
        pool(longest - 1) = 0.0;
    }
    RemainingLosDistribution out(snapshot);
    out.aging_days = day;
    out.final_tv_change = tv;
    return out;
}

} // namespace pflow
