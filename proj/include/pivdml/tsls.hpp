#ifndef PIVDML_TSLS_HPP
#define PIVDML_TSLS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dml.hpp"
#include "ols.hpp"
#include "panel.hpp"
#include "weak_iv.hpp"

namespace pivdml {

// Control sets for the two-stage baseline on first differences.
// none: intercept only. current: levels of the current period.
// pair: levels of both periods. diff: differenced controls.
enum class TslsControls { none, current, pair, diff };

inline std::string tsls_controls_name(TslsControls c) {
    switch (c) {
        case TslsControls::none: return "none";
        case TslsControls::current: return "current";
        case TslsControls::pair: return "pair";
        case TslsControls::diff: return "diff";
    }
    return "?";
}

inline TslsControls parse_tsls_controls(const std::string& s) {
    if (s == "none") return TslsControls::none;
    if (s == "current") return TslsControls::current;
    if (s == "pair") return TslsControls::pair;
    if (s == "diff") return TslsControls::diff;
    throw DataError("unknown control set: " + s + " (expected none, current, pair or diff)");
}

struct TslsOptions {
    TslsControls controls = TslsControls::pair;
    double level = 0.95;
    double theta0 = 0.0;
};

struct TslsEstimate {
    double theta = 0.0;
    double se = 0.0;
    Eigen::VectorXd pi;
    Eigen::VectorXd delta;
    double sigma_theta = 0.0;
    Eigen::MatrixXd sigma_pi;
    Eigen::MatrixXd sigma_delta;
    Eigen::MatrixXd sigma_delta_pi;
    WeakIvReport weak_iv;
    double model_rmse = 0.0;
    int n_rows = 0;
    int n_units = 0;
    int n_controls = 0;
};

// Linear baseline: partials the chosen controls (plus intercept) out of the
// differenced outcome, treatment and instruments, then computes the IV
// estimate with clustered variance blocks on the full sample.
inline TslsEstimate estimate_2sls_fd(const FdData& fd, const TslsOptions& opt) {
    int n = fd.n;
    int p = fd.p;

    std::vector<const std::vector<double>*> ctrl_cols;
    std::vector<std::string> ctrl_names;
    std::vector<std::vector<double>> diff_storage;
    auto base_name = [&](int j) {
        return j < static_cast<int>(fd.x_names.size()) ? fd.x_names[j] : "x" + std::to_string(j + 1);
    };
    switch (opt.controls) {
        case TslsControls::none:
            break;
        case TslsControls::current:
            for (int j = 0; j < p; ++j) {
                ctrl_cols.push_back(&fd.xpair[j]);
                ctrl_names.push_back(base_name(j));
            }
            break;
        case TslsControls::pair:
            for (int j = 0; j < 2 * p; ++j) {
                ctrl_cols.push_back(&fd.xpair[j]);
                ctrl_names.push_back(j < p ? base_name(j) : base_name(j - p) + "_lag");
            }
            break;
        case TslsControls::diff:
            diff_storage.resize(p);
            for (int j = 0; j < p; ++j) {
                diff_storage[j].resize(n);
                for (int i = 0; i < n; ++i) {
                    diff_storage[j][i] = fd.xpair[j][i] - fd.xpair[p + j][i];
                }
                ctrl_cols.push_back(&diff_storage[j]);
                ctrl_names.push_back("d_" + base_name(j));
            }
            break;
    }

    Eigen::MatrixXd C(n, ctrl_cols.size());
    for (std::size_t j = 0; j < ctrl_cols.size(); ++j) {
        C.col(j) = Eigen::Map<const Eigen::VectorXd>(ctrl_cols[j]->data(), n);
    }

    Eigen::VectorXd ry = partial_out(Eigen::Map<const Eigen::VectorXd>(fd.dy.data(), n), C, &ctrl_names);
    Eigen::VectorXd rd = partial_out(Eigen::Map<const Eigen::VectorXd>(fd.dd.data(), n), C, &ctrl_names);

    NuisancePredictions preds;
    preds.lhat.resize(n);
    preds.rhat.resize(n);
    preds.mhat.assign(fd.r, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        preds.lhat[i] = fd.dy[i] - ry[i];
        preds.rhat[i] = fd.dd[i] - rd[i];
    }
    for (int j = 0; j < fd.r; ++j) {
        Eigen::VectorXd rz = partial_out(Eigen::Map<const Eigen::VectorXd>(fd.dz[j].data(), n), C, &ctrl_names);
        for (int i = 0; i < n; ++i) preds.mhat[j][i] = fd.dz[j][i] - rz[i];
    }

    std::vector<int> all_rows(n);
    for (int i = 0; i < n; ++i) all_rows[i] = i;
    FoldEstimate fold = estimate_fold(fd, all_rows, preds, 0);

    TslsEstimate out;
    out.theta = fold.theta;
    out.pi = fold.pi;
    out.delta = fold.delta;
    out.sigma_theta = fold.var_theta;
    out.se = std::sqrt(fold.var_theta);
    out.sigma_pi = fold.var_pi;
    out.sigma_delta = fold.var_delta;
    out.sigma_delta_pi = fold.cov_delta_pi;
    double smod = 0.0;
    for (int i = 0; i < n; ++i) {
        double e = ry[i] - rd[i] * fold.theta;
        smod += e * e;
    }
    out.model_rmse = std::sqrt(smod / n);
    out.n_rows = n;
    out.n_units = fd.n_units();
    out.n_controls = static_cast<int>(ctrl_cols.size());
    out.weak_iv = make_weak_iv_report(out.delta, out.pi, out.sigma_delta, out.sigma_pi,
                                      out.sigma_delta_pi, opt.level, opt.theta0);
    return out;
}

} // namespace pivdml

#endif
