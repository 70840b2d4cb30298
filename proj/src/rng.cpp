#include "pflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pflow {

std::uint64_t Rng::uniform_below(std::uint64_t n)
{
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = engine_();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = engine_();
            m = static_cast<unsigned __int128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::standard_normal()
{
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_normal_ = true;
    return u * factor;
}

double Rng::gamma(double shape, double scale)
{
    if (shape < 1.0) {
        // Boost to shape + 1, then scale back by U^(1/shape).
        const double u = uniform01();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

std::size_t Rng::weighted_index(std::span<const double> weights)
{
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0))
        throw std::invalid_argument("weighted_index: weights must have a positive sum");
    const double target = uniform01() * total;
    double running = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0)
            continue;
        running += weights[i];
        last_positive = i;
        if (target < running)
            return i;
    }
    return last_positive;
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights)
{
    cumulative_.reserve(weights.size());
    double running = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("DiscreteSampler: weights must be finite and non-negative");
        running += w;
        cumulative_.push_back(running);
    }
}

std::size_t DiscreteSampler::sample(Rng& rng) const
{
    if (empty())
        throw std::logic_error("DiscreteSampler: no positive weight to sample from");
    const double target = rng.uniform01() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    auto i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i >= cumulative_.size())
        i = cumulative_.size() - 1;
    // upper_bound skips zero-width entries already; guard the float edge.
    while (i > 0 && cumulative_[i] == cumulative_[i - 1])
        --i;
    return i;
}

double DiscreteSampler::probability(std::size_t i) const
{
    if (empty() || i >= cumulative_.size())
        return 0.0;
    const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_[i] - lo) / cumulative_.back();
}

} // namespace pflow
