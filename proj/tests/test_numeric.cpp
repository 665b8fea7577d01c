#include <gtest/gtest.h>

#include <cmath>

#include "pivdml/numeric.hpp"

using namespace pivdml;

// Reference values computed with scipy.stats.chi2 (version 1.11), frozen here.
TEST(Chi2Quantile, MatchesReferenceValues) {
    struct Case {
        double p, df, want;
    };
    const Case cases[] = {
        {0.95, 1, 3.84145882069412},
        {0.99, 1, 6.63489660102121},
        {0.90, 1, 2.7055434540954},
        {0.50, 1, 0.454936423119572},
        {0.05, 1, 0.00393214000001952},
        {0.95, 2, 5.99146454710798},
        {0.95, 3, 7.81472790325118},
        {0.25, 4, 1.92255752622955},
        {0.95, 5, 11.0704976935164},
        {0.99, 5, 15.086272469389},
        {0.50, 10, 9.34181776559197},
        {0.95, 10, 18.3070380532751},
        {0.975, 30, 46.9792422436712},
    };
    for (const auto& c : cases) {
        double got = chi2_quantile(c.p, c.df);
        EXPECT_NEAR(got, c.want, 1e-10 * c.want)
            << "p=" << c.p << " df=" << c.df;
    }
}

TEST(Chi2Cdf, MatchesReferenceValues) {
    EXPECT_NEAR(chi2_cdf(3.841458820694124, 1), 0.95, 1e-12);
    EXPECT_NEAR(chi2_cdf(5.991464547107979, 2), 0.95, 1e-12);
    EXPECT_NEAR(chi2_cdf(1.145476226061769, 5), 0.05, 1e-12);
    EXPECT_NEAR(chi2_cdf(18.30703805327515, 10), 0.95, 1e-12);
    EXPECT_NEAR(chi2_sf(4.0, 1), 0.04550026389635857, 1e-12);
}

TEST(Chi2Cdf, BasicShape) {
    EXPECT_DOUBLE_EQ(chi2_cdf(0.0, 1), 0.0);
    EXPECT_DOUBLE_EQ(chi2_sf(0.0, 3), 1.0);
    for (double df : {1.0, 2.0, 5.0, 30.0}) {
        double prev = 0.0;
        for (double x = 0.25; x < 80.0; x += 0.25) {
            double c = chi2_cdf(x, df);
            EXPECT_GE(c, prev) << "df=" << df << " x=" << x;
            EXPECT_NEAR(c + chi2_sf(x, df), 1.0, 1e-12);
            prev = c;
        }
    }
}

TEST(Chi2Quantile, RoundTripsThroughCdf) {
    for (double df : {1.0, 2.0, 3.0, 7.0, 15.0}) {
        for (double p = 0.01; p < 0.995; p += 0.07) {
            double x = chi2_quantile(p, df);
            EXPECT_NEAR(chi2_cdf(x, df), p, 1e-10) << "df=" << df << " p=" << p;
        }
    }
}

TEST(Chi2Quantile, EdgeProbabilities) {
    EXPECT_DOUBLE_EQ(chi2_quantile(0.0, 1), 0.0);
    EXPECT_THROW(chi2_quantile(1.0, 1), NumericError);
    EXPECT_THROW(chi2_quantile(-0.2, 2), NumericError);
    EXPECT_THROW(chi2_quantile(0.5, 0.0), NumericError);
}

TEST(Chi2Pdf, IntegratesToCdf) {
    double df = 3.0;
    double acc = 0.0, h = 1e-4;
    for (double x = h / 2; x < 5.0; x += h) acc += chi2_pdf(x, df) * h;
    EXPECT_NEAR(acc, chi2_cdf(5.0, df), 1e-6);
}

TEST(Moments, MeanAndVariance) {
    std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    EXPECT_DOUBLE_EQ(mean(v), 2.5);
    EXPECT_DOUBLE_EQ(variance(v), 1.25);
    EXPECT_DOUBLE_EQ(dot(v.data(), v.data(), 4), 30.0);
}
