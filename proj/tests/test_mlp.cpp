#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pivdml/mlp.hpp"
#include "pivdml/rng.hpp"

using namespace pivdml;

TEST(MlpGradient, MatchesCentralDifferences) {
    int n = 12, p = 3, h = 4;
    MlpData data;
    data.n = n;
    data.p = p;
    data.h = h;
    data.decay = 0.05;
    Rng rng(17);
    data.X.resize(static_cast<std::size_t>(n) * p);
    data.y.resize(n);
    for (auto& v : data.X) v = rng.normal();
    for (auto& v : data.y) v = rng.normal();

    int nw = data.n_weights();
    std::vector<double> w(nw);
    for (int trial = 0; trial < 20; ++trial) {
        for (int k = 0; k < nw; ++k) w[k] = rng.uniform(-1.0, 1.0);
        std::vector<double> grad;
        mlp_loss_grad(data, w, &grad);

        double eps = 1e-6;
        for (int k = 0; k < nw; ++k) {
            std::vector<double> wp = w, wm = w;
            wp[k] += eps;
            wm[k] -= eps;
            double fp = mlp_loss_grad(data, wp, nullptr);
            double fm = mlp_loss_grad(data, wm, nullptr);
            double fd = (fp - fm) / (2.0 * eps);
            double denom = std::max({std::fabs(grad[k]), std::fabs(fd), 1e-8});
            EXPECT_LT(std::fabs(grad[k] - fd) / denom, 1e-4)
                << "trial " << trial << " weight " << k;
        }
    }
}

TEST(Mlp, FitsConstantResponse) {
    int n = 50, q = 2;
    std::vector<double> X(static_cast<std::size_t>(n) * q), y(n, -3.5);
    Rng rng(5);
    for (auto& v : X) v = rng.normal();

    MlpParams params;
    params.size = 3;
    params.maxit = 200;
    MlpFit fit = fit_mlp(X.data(), n, q, y.data(), params);
    std::vector<double> pred(n);
    fit.predict(X.data(), n, q, pred.data());
    // gradient descent leaves small residual weights, so allow 1e-2
    for (int i = 0; i < n; ++i) EXPECT_NEAR(pred[i], -3.5, 1e-2);
}

TEST(Mlp, LearnsLinearFunctionOutOfSample) {
    int n = 500, q = 1;
    std::vector<double> X(n), y(n);
    Rng rng(23);
    for (int i = 0; i < n; ++i) {
        X[i] = rng.uniform(-2.0, 2.0);
        y[i] = 3.0 * X[i] + 1.0;
    }
    MlpParams params;
    params.size = 4;
    params.decay = 0.0;
    params.maxit = 2000;
    params.seed = 3;
    MlpFit fit = fit_mlp(X.data(), n, q, y.data(), params);

    int m = 200;
    std::vector<double> Xt(m), yt(m), pred(m);
    for (int i = 0; i < m; ++i) {
        Xt[i] = rng.uniform(-2.0, 2.0);
        yt[i] = 3.0 * Xt[i] + 1.0;
    }
    fit.predict(Xt.data(), m, q, pred.data());
    double mse = 0.0, sy = 0.0, sy2 = 0.0;
    for (int i = 0; i < m; ++i) {
        mse += (yt[i] - pred[i]) * (yt[i] - pred[i]);
        sy += yt[i];
        sy2 += yt[i] * yt[i];
    }
    mse /= m;
    double sd_y = std::sqrt(sy2 / m - (sy / m) * (sy / m));
    EXPECT_LT(std::sqrt(mse), 0.1 * sd_y);
}

TEST(Mlp, HugeDecayShrinksToResponseMean) {
    int n = 80, q = 2;
    std::vector<double> X(static_cast<std::size_t>(n) * q), y(n);
    Rng rng(31);
    for (auto& v : X) v = rng.normal();
    for (int i = 0; i < n; ++i) y[i] = 4.0 + 2.0 * X[i] + rng.normal();
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= n;

    MlpParams params;
    params.size = 3;
    params.decay = 1e9;
    params.maxit = 500;
    MlpFit fit = fit_mlp(X.data(), n, q, y.data(), params);
    std::vector<double> pred(n);
    fit.predict(X.data(), n, q, pred.data());
    for (int i = 0; i < n; ++i) EXPECT_NEAR(pred[i], ybar, 1e-3 * std::fabs(ybar) + 1e-3);
}

TEST(Mlp, RejectsOversizedNetworks) {
    int n = 10, q = 100;
    std::vector<double> X(static_cast<std::size_t>(n) * q, 0.5), y(n, 1.0);
    MlpParams params;
    params.size = 30;   // 30 * 101 + 31 > 2000
    EXPECT_THROW(fit_mlp(X.data(), n, q, y.data(), params), DataError);
}

TEST(Mlp, ReportsDivergenceOnNonFiniteResponse) {
    int n = 10, q = 1;
    std::vector<double> X(n, 1.0), y(n, 1.0);
    y[3] = std::numeric_limits<double>::infinity();
    MlpParams params;
    try {
        fit_mlp(X.data(), n, q, y.data(), params);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("divergence"), std::string::npos);
    }
}

TEST(Mlp, DeterministicGivenSeed) {
    int n = 40, q = 2;
    std::vector<double> X(static_cast<std::size_t>(n) * q), y(n);
    Rng rng(2);
    for (auto& v : X) v = rng.normal();
    for (int i = 0; i < n; ++i) y[i] = X[i] - X[n + i] + 0.1 * rng.normal();

    MlpParams params;
    params.seed = 12;
    params.maxit = 50;
    MlpFit a = fit_mlp(X.data(), n, q, y.data(), params);
    MlpFit b = fit_mlp(X.data(), n, q, y.data(), params);
    EXPECT_EQ(a.w, b.w);

    params.seed = 13;
    MlpFit c = fit_mlp(X.data(), n, q, y.data(), params);
    EXPECT_NE(a.w, c.w);
}
