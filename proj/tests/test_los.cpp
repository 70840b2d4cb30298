#include <doctest.h>

#include <cmath>

#include "pflow/los.hpp"
#include "pflow/types.hpp"

using namespace pflow;

TEST_CASE("method-of-moments gamma fit")
{
    const auto d = fit_los(5.327, 1.083);
    CHECK(d.shape == doctest::Approx(24.194).epsilon(1e-4));
    CHECK(d.scale == doctest::Approx(0.22018).epsilon(1e-4));
    CHECK(d.shape * d.scale == doctest::Approx(5.327));
    CHECK(d.shape * d.scale * d.scale == doctest::Approx(1.083 * 1.083));
    CHECK_THROWS_AS(fit_los(0.0, 1.0), InputError);
    CHECK_THROWS_AS(fit_los(5.0, -1.0), InputError);
}

TEST_CASE("fixed LOS when sd is zero")
{
    const auto d = fit_los(4.4, 0.0);
    CHECK(d.fixed());
    Rng r(41);
    for (int i = 0; i < 10; ++i)
        CHECK(sample_los(d, r) == 4);
    CHECK(sample_los(fit_los(0.2, 0.0), r) == 1);
    CHECK(sample_los(fit_los(2.5, 0.0), r) == 3);
}

TEST_CASE("LOS draws: Monte Carlo moments and pmf agree")
{
    for (const auto [m, s] : {std::pair{5.327, 1.083}, std::pair{25.0, 10.0}, std::pair{3.0, 2.5}}) {
        const auto d = fit_los(m, s);
        const auto pmf = los_pmf(d);
        CHECK(pmf.sum() == doctest::Approx(1.0));
        Rng r(42);
        const int n = 200000;
        Eigen::VectorXd hist = Eigen::VectorXd::Zero(pmf.size() + 200);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const int k = sample_los(d, r);
            REQUIRE(k >= 1);
            sum += k;
            if (k <= hist.size())
                hist(k - 1) += 1.0;
        }
        // With little mass below one day, rounding leaves the mean near the input.
        if (s < m / 2.0)
            CHECK(sum / n == doctest::Approx(m).epsilon(0.02));
        double pmf_mean = 0.0;
        for (Eigen::Index k = 0; k < pmf.size(); ++k) {
            pmf_mean += (k + 1) * pmf(k);
            CHECK(std::abs(hist(k) / n - pmf(k)) < 0.005);
        }
        CHECK(pmf_mean == doctest::Approx(sum / n).epsilon(0.01));
    }
}

TEST_CASE("aged distribution of a fixed stay is uniform over 1..k")
{
    for (int k : {1, 2, 7, 30}) {
        Rng r(43);
        const auto rd = age_distribution(fit_los(k, 0.0), r);
        REQUIRE(rd.max_days() == k);
        for (int i = 0; i < k; ++i)
            CHECK(rd.weights()(i) == doctest::Approx(1.0 / k));
        CHECK(rd.mean() == doctest::Approx((k + 1) / 2.0));
        CHECK(rd.aging_days >= k);
    }
}

TEST_CASE("aged mean equals E[L(L+1)/2] / E[L]")
{
    for (const auto [m, s] : {std::pair{5.327, 1.083}, std::pair{25.0, 10.0}, std::pair{100.0, 80.0}}) {
        const auto d = fit_los(m, s);
        const auto pmf = los_pmf(d);
        double el = 0.0, tri = 0.0;
        for (Eigen::Index i = 0; i < pmf.size(); ++i) {
            const double L = static_cast<double>(i + 1);
            el += L * pmf(i);
            tri += L * (L + 1.0) / 2.0 * pmf(i);
        }
        Rng r(44);
        const auto rd = age_distribution(d, r);
        CHECK(rd.mean() == doctest::Approx(tri / el).epsilon(0.01));
        CHECK(rd.final_tv_change < 1e-3);
        CHECK(rd.aging_days >= static_cast<int>(std::ceil(10.0 * m)));
    }
}

TEST_CASE("remaining-LOS sampling follows the weights")
{
    Eigen::VectorXd w(3);
    w << 1.0, 0.0, 3.0;
    RemainingLosDistribution rd(w);
    Rng r(45);
    int threes = 0;
    for (int i = 0; i < 40000; ++i) {
        const int k = rd.sample(r);
        REQUIRE(k != 2);
        threes += k == 3;
    }
    CHECK(threes / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
    CHECK_THROWS_AS(RemainingLosDistribution(Eigen::VectorXd::Zero(3)), InputError);
}
