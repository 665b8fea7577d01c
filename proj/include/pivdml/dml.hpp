#ifndef PIVDML_DML_HPP
#define PIVDML_DML_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "dictionary.hpp"
#include "learner.hpp"
#include "numeric.hpp"
#include "panel.hpp"

namespace pivdml {

// Out-of-fold nuisance predictions on the first-differenced sample:
// lhat approximates E[dy | x pair], rhat approximates E[dd | x pair],
// mhat[j] approximates E[dz_j | x pair].
struct NuisancePredictions {
    std::vector<double> lhat;
    std::vector<double> rhat;
    std::vector<std::vector<double>> mhat;
};

struct FoldEstimate {
    int k = -1;
    double theta = 0.0;
    Eigen::VectorXd pi;
    Eigen::VectorXd delta;
    double var_theta = 0.0;
    Eigen::MatrixXd var_pi;
    Eigen::MatrixXd var_delta;
    Eigen::MatrixXd cov_delta_pi;
    double denom = 0.0;        // sum of v_perp * (dd - rhat)
    int n_rows = 0;
    int n_units = 0;
    int n_clusters = 0;
};

struct DmlEstimate {
    double theta = 0.0;
    double se = 0.0;
    Eigen::VectorXd pi;
    Eigen::VectorXd delta;
    double sigma_theta = 0.0;          // variance of theta
    Eigen::MatrixXd sigma_pi;
    Eigen::MatrixXd sigma_delta;
    Eigen::MatrixXd sigma_delta_pi;    // cov(delta, pi) block
    std::vector<FoldEstimate> folds;
    std::vector<int> unit_fold;
    NuisancePredictions preds;
    double model_rmse = 0.0;
    double resid_rmse_l = 0.0;
    double resid_rmse_r = 0.0;
    double resid_rmse_m = 0.0;
    int n_rows = 0;
    int n_units = 0;
    int K = 0;
};

struct DmlOptions {
    int K = 3;
    std::uint64_t seed = 0;
    LearnerSpec learner;
    bool tune = false;
};

namespace detail {

inline std::vector<double> gather_matrix(const double* X, int n, int q,
                                         const std::vector<int>& rows) {
    int m = static_cast<int>(rows.size());
    std::vector<double> out(static_cast<std::size_t>(m) * q);
    for (int j = 0; j < q; ++j) {
        const double* src = X + static_cast<std::size_t>(j) * n;
        double* dst = out.data() + static_cast<std::size_t>(j) * m;
        for (int i = 0; i < m; ++i) dst[i] = src[rows[i]];
    }
    return out;
}

inline std::vector<double> gather_vector(const std::vector<double>& v,
                                         const std::vector<int>& rows) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
    return out;
}

} // namespace detail

// Builds the feature matrix used by the nuisance learners: the stacked pair
// of control levels, optionally expanded with the polynomial dictionary.
inline std::vector<double> nuisance_features(const FdData& fd, bool dictionary, int& q_out) {
    if (dictionary) {
        q_out = dictionary_size(2 * fd.p);
        return dictionary_matrix(fd.xpair);
    }
    q_out = 2 * fd.p;
    return flat_matrix(fd.xpair);
}

// Cross-fitting: units are split into K folds; each fold's predictions come
// from models trained on the other folds only.
inline NuisancePredictions learn_nuisances(const FdData& fd, const std::vector<int>& unit_fold,
                                           const LearnerSpec& spec, bool tune = false) {
    int K = 0;
    for (int f : unit_fold) K = std::max(K, f + 1);

    int q = 0;
    std::vector<double> X = nuisance_features(fd, spec.dictionary, q);

    LearnerSpec spec_l = spec, spec_r = spec, spec_m = spec;
    if (tune && (spec.kind == LearnerKind::boosting || spec.kind == LearnerKind::mlp)) {
        spec_l = grid_search_tune(spec, X.data(), fd.n, q, fd.dy.data()).spec;
        spec_r = grid_search_tune(spec, X.data(), fd.n, q, fd.dd.data()).spec;
        spec_m = grid_search_tune(spec, X.data(), fd.n, q, fd.dz[0].data()).spec;
    }

    NuisancePredictions preds;
    preds.lhat.assign(fd.n, 0.0);
    preds.rhat.assign(fd.n, 0.0);
    preds.mhat.assign(fd.r, std::vector<double>(fd.n, 0.0));

    for (int k = 0; k < K; ++k) {
        std::vector<int> train_rows, test_rows;
        train_rows.reserve(fd.n);
        for (int i = 0; i < fd.n; ++i) {
            (unit_fold[fd.unit[i]] == k ? test_rows : train_rows).push_back(i);
        }
        if (train_rows.empty() || test_rows.empty()) {
            throw DataError("cross-fitting produced an empty fold");
        }
        int ntr = static_cast<int>(train_rows.size());
        int nte = static_cast<int>(test_rows.size());

        std::vector<double> Xtr = detail::gather_matrix(X.data(), fd.n, q, train_rows);
        std::vector<double> ytr = detail::gather_vector(fd.dy, train_rows);
        std::vector<double> dtr = detail::gather_vector(fd.dd, train_rows);
        std::vector<std::vector<double>> ztr(fd.r);
        for (int j = 0; j < fd.r; ++j) ztr[j] = detail::gather_vector(fd.dz[j], train_rows);

        LearnerSpec fold_spec = spec_l;
        fold_spec.seed = derive_seed(spec.seed, 0xf01d0000ULL + static_cast<std::uint64_t>(k));

        std::vector<Model> models;
        if (spec_l.kind == spec_r.kind && spec_l.kind == spec_m.kind &&
            spec.kind == LearnerKind::lasso) {
            std::vector<const double*> ys{ytr.data(), dtr.data()};
            for (int j = 0; j < fd.r; ++j) ys.push_back(ztr[j].data());
            models = fit_models_shared(fold_spec, Xtr.data(), ntr, q, ys);
        } else {
            models.resize(2 + fd.r);
            LearnerSpec sl = spec_l, sr = spec_r, sm = spec_m;
            sl.seed = sr.seed = sm.seed = fold_spec.seed;
            models[0] = fit_model(sl, Xtr.data(), ntr, q, ytr.data());
            models[1] = fit_model(sr, Xtr.data(), ntr, q, dtr.data());
            for (int j = 0; j < fd.r; ++j) {
                models[2 + j] = fit_model(sm, Xtr.data(), ntr, q, ztr[j].data());
            }
        }

        std::vector<double> Xte = detail::gather_matrix(X.data(), fd.n, q, test_rows);
        std::vector<double> pred(nte);
        models[0].predict(Xte.data(), nte, q, pred.data());
        for (int i = 0; i < nte; ++i) preds.lhat[test_rows[i]] = pred[i];
        models[1].predict(Xte.data(), nte, q, pred.data());
        for (int i = 0; i < nte; ++i) preds.rhat[test_rows[i]] = pred[i];
        for (int j = 0; j < fd.r; ++j) {
            models[2 + j].predict(Xte.data(), nte, q, pred.data());
            for (int i = 0; i < nte; ++i) preds.mhat[j][test_rows[i]] = pred[i];
        }
    }
    return preds;
}

// Per-fold IV estimate on residualized first differences, with clustered
// finite-sample variance blocks. All scores use residualized quantities.
inline FoldEstimate estimate_fold(const FdData& fd, const std::vector<int>& rows,
                                  const NuisancePredictions& preds, int fold_id) {
    int m = static_cast<int>(rows.size());
    int r = fd.r;
    if (m < r + 1) throw NumericError("fold too small for estimation");

    Eigen::MatrixXd V(m, r);
    Eigen::VectorXd ry(m), rd(m);
    for (int i = 0; i < m; ++i) {
        int row = rows[i];
        ry[i] = fd.dy[row] - preds.lhat[row];
        rd[i] = fd.dd[row] - preds.rhat[row];
        for (int j = 0; j < r; ++j) V(i, j) = fd.dz[j][row] - preds.mhat[j][row];
    }

    Eigen::MatrixXd Qvv = V.transpose() * V;
    Eigen::LLT<Eigen::MatrixXd> llt(Qvv);
    if (llt.info() != Eigen::Success) {
        throw NumericError("singular instrument residual covariance in fold " +
                           std::to_string(fold_id));
    }

    FoldEstimate est;
    est.k = fold_id;
    est.n_rows = m;
    est.pi = llt.solve(V.transpose() * rd);
    est.delta = llt.solve(V.transpose() * ry);

    Eigen::VectorXd vperp = V * est.pi;
    double denom = vperp.dot(rd);
    double sd_d = 0.0, mean_d = 0.0;
    for (int i = 0; i < m; ++i) mean_d += fd.dd[rows[i]];
    mean_d /= m;
    for (int i = 0; i < m; ++i) {
        double c = fd.dd[rows[i]] - mean_d;
        sd_d += c * c;
    }
    sd_d = std::sqrt(sd_d / m);
    if (!std::isfinite(denom) || denom == 0.0 || std::fabs(denom) / m < 1e-10 * sd_d) {
        throw NumericError("degenerate first stage in fold " + std::to_string(fold_id));
    }
    est.denom = denom;
    est.theta = vperp.dot(ry) / denom;

    Eigen::VectorXd u = ry - rd * est.theta;
    Eigen::VectorXd rho = rd - V * est.pi;
    Eigen::VectorXd e = ry - V * est.delta;

    std::map<int, int> cluster_slot;
    for (int i = 0; i < m; ++i) {
        int c = fd.cluster[rows[i]];
        if (!cluster_slot.count(c)) {
            int slot = static_cast<int>(cluster_slot.size());
            cluster_slot[c] = slot;
        }
    }
    int G = static_cast<int>(cluster_slot.size());
    est.n_clusters = G;

    std::vector<double> s_th(G, 0.0);
    Eigen::MatrixXd s_pi = Eigen::MatrixXd::Zero(G, r);
    Eigen::MatrixXd s_de = Eigen::MatrixXd::Zero(G, r);
    for (int i = 0; i < m; ++i) {
        int g = cluster_slot[fd.cluster[rows[i]]];
        s_th[g] += vperp[i] * u[i];
        for (int j = 0; j < r; ++j) {
            s_pi(g, j) += V(i, j) * rho[i];
            s_de(g, j) += V(i, j) * e[i];
        }
    }

    double meat_th = 0.0;
    for (double s : s_th) meat_th += s * s;
    est.var_theta = meat_th / (denom * denom);

    Eigen::MatrixXd meat_pi = s_pi.transpose() * s_pi;
    Eigen::MatrixXd meat_de = s_de.transpose() * s_de;
    Eigen::MatrixXd meat_dp = s_de.transpose() * s_pi;
    Eigen::MatrixXd Qinv_meat_pi = llt.solve(meat_pi);
    Eigen::MatrixXd Qinv_meat_de = llt.solve(meat_de);
    Eigen::MatrixXd Qinv_meat_dp = llt.solve(meat_dp);
    est.var_pi = llt.solve(Qinv_meat_pi.transpose()).transpose();
    est.var_delta = llt.solve(Qinv_meat_de.transpose()).transpose();
    est.cov_delta_pi = llt.solve(Qinv_meat_dp.transpose()).transpose();

    std::vector<char> seen_unit(fd.n_units(), 0);
    for (int i : rows) seen_unit[fd.unit[i]] = 1;
    for (char s : seen_unit) est.n_units += s;
    return est;
}

// Combines fold estimates: unweighted means for points, unit-share weighted
// variances plus a between-fold dispersion term at the aggregate scale.
inline void aggregate_folds(DmlEstimate& out) {
    int K = static_cast<int>(out.folds.size());
    int r = static_cast<int>(out.folds[0].pi.size());
    double N = 0.0;
    for (const auto& f : out.folds) N += f.n_units;

    out.theta = 0.0;
    out.pi = Eigen::VectorXd::Zero(r);
    out.delta = Eigen::VectorXd::Zero(r);
    for (const auto& f : out.folds) {
        out.theta += f.theta / K;
        out.pi += f.pi / K;
        out.delta += f.delta / K;
    }

    out.sigma_theta = 0.0;
    out.sigma_pi = Eigen::MatrixXd::Zero(r, r);
    out.sigma_delta = Eigen::MatrixXd::Zero(r, r);
    out.sigma_delta_pi = Eigen::MatrixXd::Zero(r, r);
    for (const auto& f : out.folds) {
        double w = f.n_units / N;
        out.sigma_theta += w * w * f.var_theta + w * (f.theta - out.theta) * (f.theta - out.theta) / N;
        out.sigma_pi += w * w * f.var_pi + w * (f.pi - out.pi) * (f.pi - out.pi).transpose() / N;
        out.sigma_delta += w * w * f.var_delta + w * (f.delta - out.delta) * (f.delta - out.delta).transpose() / N;
        out.sigma_delta_pi += w * w * f.cov_delta_pi + w * (f.delta - out.delta) * (f.pi - out.pi).transpose() / N;
    }
    out.se = std::sqrt(out.sigma_theta);
}

// Core estimator given any out-of-fold predictions. Exposed separately so
// the orthogonality of the moment conditions can be probed by perturbing
// the predictions directly.
inline DmlEstimate estimate_from_predictions(const FdData& fd, const std::vector<int>& unit_fold,
                                             const NuisancePredictions& preds) {
    int K = 0;
    for (int f : unit_fold) K = std::max(K, f + 1);

    DmlEstimate out;
    out.K = K;
    out.n_rows = fd.n;
    out.n_units = fd.n_units();
    out.unit_fold = unit_fold;
    out.preds = preds;

    for (int k = 0; k < K; ++k) {
        std::vector<int> rows;
        for (int i = 0; i < fd.n; ++i) {
            if (unit_fold[fd.unit[i]] == k) rows.push_back(i);
        }
        if (rows.empty()) throw DataError("fold " + std::to_string(k) + " has no rows");
        out.folds.push_back(estimate_fold(fd, rows, preds, k));
    }
    aggregate_folds(out);

    double sl = 0.0, sr = 0.0, sm = 0.0, smod = 0.0;
    for (int i = 0; i < fd.n; ++i) {
        sl += (fd.dy[i] - preds.lhat[i]) * (fd.dy[i] - preds.lhat[i]);
        sr += (fd.dd[i] - preds.rhat[i]) * (fd.dd[i] - preds.rhat[i]);
        double e = (fd.dy[i] - preds.lhat[i]) - (fd.dd[i] - preds.rhat[i]) * out.theta;
        smod += e * e;
    }
    for (int j = 0; j < fd.r; ++j) {
        for (int i = 0; i < fd.n; ++i) {
            sm += (fd.dz[j][i] - preds.mhat[j][i]) * (fd.dz[j][i] - preds.mhat[j][i]);
        }
    }
    out.model_rmse = std::sqrt(smod / fd.n);
    out.resid_rmse_l = std::sqrt(sl / fd.n);
    out.resid_rmse_r = std::sqrt(sr / fd.n);
    out.resid_rmse_m = std::sqrt(sm / (static_cast<double>(fd.n) * fd.r));
    return out;
}

inline DmlEstimate dml_estimate(const FdData& fd, const DmlOptions& opt) {
    std::vector<int> unit_fold = block_kfold(fd.n_units(), opt.K, opt.seed);
    NuisancePredictions preds = learn_nuisances(fd, unit_fold, opt.learner, opt.tune);
    return estimate_from_predictions(fd, unit_fold, preds);
}

// Re-estimates theta after moving the nuisance predictions by eps times a
// per-row direction (same shape as the predictions) and returns the change.
// First-order insensitivity to nuisance error means the change should shrink
// quadratically in eps.
inline double orthogonality_probe(const FdData& fd, const std::vector<int>& unit_fold,
                                  const NuisancePredictions& preds,
                                  const NuisancePredictions& direction, double eps) {
    DmlEstimate base = estimate_from_predictions(fd, unit_fold, preds);
    NuisancePredictions moved = preds;
    for (int i = 0; i < fd.n; ++i) {
        moved.lhat[i] += eps * direction.lhat[i];
        moved.rhat[i] += eps * direction.rhat[i];
        for (int j = 0; j < fd.r; ++j) moved.mhat[j][i] += eps * direction.mhat[j][i];
    }
    DmlEstimate shifted = estimate_from_predictions(fd, unit_fold, moved);
    return shifted.theta - base.theta;
}

} // namespace pivdml

#endif
