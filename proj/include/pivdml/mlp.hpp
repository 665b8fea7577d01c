#ifndef PIVDML_MLP_HPP
#define PIVDML_MLP_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "numeric.hpp"
#include "rng.hpp"

namespace pivdml {

// Single hidden layer network: logistic hidden units, linear output,
// squared error loss with an L2 penalty (decay) on all weights. Inputs are
// standardized and the response is centered internally, so a heavily
// penalized network shrinks toward the response mean. Trained by full-batch
// gradient descent with backtracking line search.
struct MlpParams {
    int size = 5;          // hidden units
    double decay = 0.0;    // L2 penalty on all weights
    int maxit = 100;
    std::uint64_t seed = 1;
    int max_params = 2000;
};

namespace detail {

inline double logistic(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace detail

// Standardized training data plus architecture, the domain of the loss.
// Weight layout: for each hidden unit h, [bias, w_1..w_p]; then the output
// layer [bias, v_1..v_H].
struct MlpData {
    std::vector<double> X;   // column major, standardized, n rows p cols
    std::vector<double> y;
    int n = 0;
    int p = 0;
    int h = 0;
    double decay = 0.0;

    int n_weights() const { return h * (p + 1) + h + 1; }
};

// Penalized loss and, when grad is non-null, its analytic gradient.
inline double mlp_loss_grad(const MlpData& data, const std::vector<double>& w,
                            std::vector<double>* grad) {
    int n = data.n, p = data.p, H = data.h;
    int nw = data.n_weights();
    if (static_cast<int>(w.size()) != nw) throw NumericError("mlp: weight vector size mismatch");
    const double* out_w = w.data() + H * (p + 1);

    if (grad) grad->assign(nw, 0.0);

    std::vector<double> act(H);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        double yhat = out_w[0];
        for (int hh = 0; hh < H; ++hh) {
            const double* wh = w.data() + hh * (p + 1);
            double t = wh[0];
            for (int j = 0; j < p; ++j) t += wh[j + 1] * data.X[static_cast<std::size_t>(j) * n + i];
            act[hh] = detail::logistic(t);
            yhat += out_w[1 + hh] * act[hh];
        }
        double e = yhat - data.y[i];
        loss += e * e;
        if (grad) {
            double de = 2.0 * e;
            double* gout = grad->data() + H * (p + 1);
            gout[0] += de;
            for (int hh = 0; hh < H; ++hh) {
                gout[1 + hh] += de * act[hh];
                double gh = de * out_w[1 + hh] * act[hh] * (1.0 - act[hh]);
                double* gw = grad->data() + hh * (p + 1);
                gw[0] += gh;
                for (int j = 0; j < p; ++j) {
                    gw[j + 1] += gh * data.X[static_cast<std::size_t>(j) * n + i];
                }
            }
        }
    }
    double pen = 0.0;
    for (double v : w) pen += v * v;
    loss += data.decay * pen;
    if (grad) {
        for (int k = 0; k < nw; ++k) (*grad)[k] += 2.0 * data.decay * w[k];
    }
    return loss;
}

struct MlpFit {
    std::vector<double> mu, sd;   // input standardization
    std::vector<double> w;
    int p = 0;
    int h = 0;
    double y_mean = 0.0;          // the network is trained on centered responses
    double final_loss = 0.0;

    double predict_row(const double* x) const {
        const double* out_w = w.data() + h * (p + 1);
        double yhat = y_mean + out_w[0];
        for (int hh = 0; hh < h; ++hh) {
            const double* wh = w.data() + hh * (p + 1);
            double t = wh[0];
            for (int j = 0; j < p; ++j) t += wh[j + 1] * (x[j] - mu[j]) / sd[j];
            yhat += out_w[1 + hh] * detail::logistic(t);
        }
        return yhat;
    }

    // X is column major with n rows.
    void predict(const double* X, int n, int q, double* out) const {
        std::vector<double> row(p);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p && j < q; ++j) row[j] = X[static_cast<std::size_t>(j) * n + i];
            out[i] = predict_row(row.data());
        }
    }
};

inline MlpFit fit_mlp(const double* X, int n, int q, const double* y, const MlpParams& params) {
    if (n < 1) throw DataError("mlp: empty training set");
    if (params.size < 1) throw DataError("mlp: need at least one hidden unit");
    int nw = params.size * (q + 1) + params.size + 1;
    if (nw > params.max_params) {
        throw DataError("mlp: " + std::to_string(nw) + " weights exceed the cap of " +
                        std::to_string(params.max_params) +
                        "; reduce hidden units or input dimension");
    }

    MlpFit fit;
    fit.p = q;
    fit.h = params.size;
    fit.mu.assign(q, 0.0);
    fit.sd.assign(q, 1.0);

    MlpData data;
    data.n = n;
    data.p = q;
    data.h = params.size;
    data.decay = params.decay;
    data.y.assign(y, y + n);
    double ybar = 0.0;
    for (int i = 0; i < n; ++i) ybar += data.y[i];
    ybar /= n;
    for (int i = 0; i < n; ++i) data.y[i] -= ybar;
    fit.y_mean = ybar;
    data.X.resize(static_cast<std::size_t>(n) * q);
    for (int j = 0; j < q; ++j) {
        const double* c = X + static_cast<std::size_t>(j) * n;
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += c[i];
        m /= n;
        double v = 0.0;
        for (int i = 0; i < n; ++i) v += (c[i] - m) * (c[i] - m);
        v = std::sqrt(v / n);
        fit.mu[j] = m;
        fit.sd[j] = (v > 1e-12 * std::max(1.0, std::fabs(m))) ? v : 1.0;
        double* o = data.X.data() + static_cast<std::size_t>(j) * n;
        for (int i = 0; i < n; ++i) o[i] = (c[i] - m) / fit.sd[j];
    }

    Rng rng(derive_seed(params.seed, 0x6d6c7031ULL));
    std::vector<double> w(nw);
    for (int k = 0; k < nw; ++k) w[k] = rng.uniform(-0.5, 0.5);

    std::vector<double> grad, trial(nw);
    double loss = mlp_loss_grad(data, w, &grad);
    if (!std::isfinite(loss)) throw NumericError("divergence: non-finite loss in network training");
    double lr = 1e-2;
    for (int it = 0; it < params.maxit; ++it) {
        double gnorm2 = 0.0;
        for (double g : grad) gnorm2 += g * g;
        if (gnorm2 <= 1e-24) break;
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            for (int k = 0; k < nw; ++k) trial[k] = w[k] - lr * grad[k];
            double trial_loss = mlp_loss_grad(data, trial, nullptr);
            if (trial_loss < loss) {
                w.swap(trial);
                loss = mlp_loss_grad(data, w, &grad);
                lr *= 1.5;
                improved = true;
                break;
            }
            lr *= 0.5;
        }
        if (!improved) break;
    }

    fit.w = std::move(w);
    fit.final_loss = loss;
    return fit;
}

} // namespace pivdml

#endif
