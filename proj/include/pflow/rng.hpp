#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pflow {

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the distributions below are implemented here so
/// that a seed produces the same draws with any standard library.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t uniform_below(std::uint64_t n);

    bool bernoulli(double p) { return uniform01() < p; }

    double standard_normal();

    /// Gamma(shape, scale) via Marsaglia-Tsang.
    double gamma(double shape, double scale);

    /// Index drawn with probability proportional to weights (not necessarily normalized).
    std::size_t weighted_index(std::span<const double> weights);

    template <typename T>
    void shuffle(std::vector<T>& items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// Precomputed cumulative weights for repeated draws from one discrete distribution.
class DiscreteSampler
{
  public:
    DiscreteSampler() = default;
    explicit DiscreteSampler(std::span<const double> weights);

    std::size_t sample(Rng& rng) const;
    bool empty() const { return cumulative_.empty() || cumulative_.back() <= 0.0; }
    std::size_t size() const { return cumulative_.size(); }
    double probability(std::size_t i) const;

  private:
    std::vector<double> cumulative_;
};

} // namespace pflow
