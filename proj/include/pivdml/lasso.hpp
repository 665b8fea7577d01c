#ifndef PIVDML_LASSO_HPP
#define PIVDML_LASSO_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "numeric.hpp"
#include "rng.hpp"

namespace pivdml {

// L1-penalized least squares, objective
//   (1 / (2n)) * sum_i (y_i - a0 - x_i' b)^2 + lambda * sum_j |b_j|
// fit by covariance-update coordinate descent on internally standardized
// columns with an unpenalized intercept. The auto grid has n_lambda
// log-spaced points from lambda_max down to lambda_min_ratio * lambda_max;
// the penalty minimizing row-wise cross-validated MSE is chosen, with ties
// going to the larger penalty, and the reported fit is the full-data path
// solution at that penalty.
struct LassoParams {
    std::vector<double> lambda_grid;  // explicit penalty grid; empty picks the auto grid
    int n_lambda = 100;
    double lambda_min_ratio = 1e-4;
    int cv_folds = 5;
    double tol = 1e-6;             // on the squared standardized coefficient step
    int max_passes = 1000;
    double dev_max = 0.999;        // stop the path once this deviance ratio is reached
    double dev_min_gain = 1e-5;    // or once a grid step improves it by less than this
    int dfmax = 0;                 // or once this many columns are active; 0 picks a default
    int max_gram_cols = 4096;      // precompute the full gram when q is at most this
    std::uint64_t seed = 0;
};

struct LassoFit {
    double intercept = 0.0;
    std::vector<double> beta;          // original scale
    double lambda = 0.0;
    int lambda_index = -1;
    std::vector<double> lambda_path;
    std::vector<double> cv_mse;
    int n_active = 0;

    double predict_row(const double* x) const {
        double s = intercept;
        for (std::size_t j = 0; j < beta.size(); ++j) s += beta[j] * x[j];
        return s;
    }

    // X is column major with n rows.
    void predict(const double* X, int n, int q, double* out) const {
        for (int i = 0; i < n; ++i) out[i] = intercept;
        for (int j = 0; j < q && j < static_cast<int>(beta.size()); ++j) {
            double b = beta[j];
            if (b == 0.0) continue;
            const double* c = X + static_cast<std::size_t>(j) * n;
            for (int i = 0; i < n; ++i) out[i] += b * c[i];
        }
    }
};

namespace detail {

inline double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

// Column means and standard deviations (population form); columns with
// effectively zero variance are excluded from the penalized path.
struct ColumnStats {
    std::vector<double> mu, sd;
    std::vector<char> excluded;
    int n = 0;
};

inline ColumnStats make_stats(const double* colsum, const double* colsumsq, int q, int n) {
    ColumnStats st;
    st.n = n;
    st.mu.resize(q);
    st.sd.resize(q);
    st.excluded.assign(q, 0);
    for (int j = 0; j < q; ++j) {
        double m = colsum[j] / n;
        double v = std::max(0.0, colsumsq[j] / n - m * m);
        st.mu[j] = m;
        st.sd[j] = std::sqrt(v);
        if (!(st.sd[j] > 1e-9 * std::max(1.0, std::fabs(m)))) st.excluded[j] = 1;
    }
    return st;
}

inline ColumnStats stats_from_matrix(const double* X, int n, int q) {
    std::vector<double> s(q), ss(q);
    for (int j = 0; j < q; ++j) {
        const double* c = X + static_cast<std::size_t>(j) * n;
        double a = 0.0, b = 0.0;
        for (int i = 0; i < n; ++i) {
            a += c[i];
            b += c[i] * c[i];
        }
        s[j] = a;
        ss[j] = b;
    }
    return make_stats(s.data(), ss.data(), q, n);
}

struct CdPath {
    std::vector<std::vector<double>> beta_std;   // one vector per lambda
};

// Coordinate descent along a penalty grid with warm starts. grow(j) must
// return the j-th row of the standardized gram (q values, unit diagonal).
// Residual correlations are maintained for every coordinate; the running
// linear and quadratic forms track RSS so the path can stop once the fit
// saturates (deviance ratio near one, stalling gains, or an active set as
// large as the sample). Later grid points then repeat the last solution.
template <class RowFn>
inline CdPath cd_path(RowFn&& grow, const std::vector<double>& c, double var_y,
                      const ColumnStats& st, int n_rows, const std::vector<double>& lambdas,
                      const LassoParams& params) {
    int q = static_cast<int>(c.size());
    CdPath out;
    out.beta_std.reserve(lambdas.size());
    if (!(var_y > 0.0)) {
        out.beta_std.assign(lambdas.size(), std::vector<double>(q, 0.0));
        return out;
    }
    double tol_sq = params.tol * var_y;
    int dfmax = params.dfmax > 0 ? params.dfmax
                                 : std::max(50, std::min(n_rows, q) / 4);

    std::vector<double> r = c;
    std::vector<double> beta(q, 0.0);
    double lin = 0.0, quad = 0.0;

    auto sweep = [&](double lambda, bool active_only) {
        double maxd = 0.0;
        for (int j = 0; j < q; ++j) {
            if (st.excluded[j]) continue;
            if (active_only && beta[j] == 0.0) continue;
            double z = r[j] + beta[j];
            double nb = soft_threshold(z, lambda);
            double d = nb - beta[j];
            if (d != 0.0) {
                lin += d * c[j];
                quad += 2.0 * d * (c[j] - r[j]) + d * d;
                const double* g = grow(j);
                for (int k = 0; k < q; ++k) r[k] -= g[k] * d;
                beta[j] = nb;
                double ad = std::fabs(d);
                if (ad > maxd) maxd = ad;
            }
        }
        return maxd;
    };

    double prev_dev = 0.0;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        double lambda = lambdas[li];
        int passes = 0;
        while (passes < params.max_passes) {
            double maxd = sweep(lambda, false);
            ++passes;
            if (maxd * maxd < tol_sq) break;
            while (passes < params.max_passes) {
                double md = sweep(lambda, true);
                ++passes;
                if (md * md < tol_sq) break;
            }
        }
        out.beta_std.push_back(beta);

        double rss = var_y - 2.0 * lin + quad;
        double dev = 1.0 - rss / var_y;
        int n_active = 0;
        for (double b : beta) {
            if (b != 0.0) ++n_active;
        }
        bool saturated = dev > params.dev_max || n_active >= n_rows || n_active >= dfmax ||
                         (li > 0 && dev - prev_dev < params.dev_min_gain);
        prev_dev = dev;
        if (saturated && li + 1 < lambdas.size()) {
            for (std::size_t rest = li + 1; rest < lambdas.size(); ++rest) {
                out.beta_std.push_back(beta);
            }
            break;
        }
    }
    return out;
}

// Maps standardized coefficients back to the original column scale.
inline void to_original_scale(const std::vector<double>& beta_std, const ColumnStats& st,
                              double y_mean, double& intercept, std::vector<double>& beta) {
    int q = static_cast<int>(beta_std.size());
    beta.assign(q, 0.0);
    double shift = 0.0;
    for (int j = 0; j < q; ++j) {
        if (st.excluded[j] || beta_std[j] == 0.0) continue;
        beta[j] = beta_std[j] / st.sd[j];
        shift += beta[j] * st.mu[j];
    }
    intercept = y_mean - shift;
}

// Gram rows computed on demand from the data matrix and cached, for designs
// too wide to hold a full gram.
class LazyGram {
public:
    LazyGram(const double* X, int n, int q, const ColumnStats& st)
        : X_(X), n_(n), q_(q), st_(st) {
        slot_.assign(q_, -1);
    }

    const double* row(int j) {
        int s = slot_[j];
        if (s >= 0) return store_[s].data();
        Eigen::Map<const Eigen::MatrixXd> Xm(X_, n_, q_);
        Eigen::Map<const Eigen::VectorXd> xj(X_ + static_cast<std::size_t>(j) * n_, n_);
        Eigen::VectorXd raw = Xm.transpose() * xj;
        store_.emplace_back(q_, 0.0);
        std::vector<double>& g = store_.back();
        if (!st_.excluded[j]) {
            for (int k = 0; k < q_; ++k) {
                if (st_.excluded[k]) continue;
                g[k] = (raw[k] / n_ - st_.mu[j] * st_.mu[k]) / (st_.sd[j] * st_.sd[k]);
            }
            g[j] = 1.0;
        }
        slot_[j] = static_cast<int>(store_.size()) - 1;
        return g.data();
    }

private:
    const double* X_;
    int n_, q_;
    const ColumnStats& st_;
    std::vector<int> slot_;
    std::vector<std::vector<double>> store_;
};

// Writes the standardized gram (q x q, row major) for a row subset whose raw
// gram is G minus an optional held-out block.
inline void build_std_gram(const Eigen::MatrixXd& G, const Eigen::MatrixXd* Gout, double n_sub,
                           const ColumnStats& st, std::vector<double>& gstd) {
    int q = static_cast<int>(G.rows());
    gstd.assign(static_cast<std::size_t>(q) * q, 0.0);
    for (int j = 0; j < q; ++j) {
        if (st.excluded[j]) continue;
        double* rowj = gstd.data() + static_cast<std::size_t>(j) * q;
        for (int k = 0; k <= j; ++k) {
            if (st.excluded[k]) continue;
            double raw = G(j, k) - (Gout ? (*Gout)(j, k) : 0.0);
            double v = (raw / n_sub - st.mu[j] * st.mu[k]) / (st.sd[j] * st.sd[k]);
            rowj[k] = v;
            gstd[static_cast<std::size_t>(k) * q + j] = v;
        }
        rowj[j] = 1.0;
    }
}

} // namespace detail

// Cross-validated lasso over a fixed column-major design. Multiple responses
// fit on the same rows share the gram work and the CV split. When the gram
// fits in memory it is built once per row subset with blocked rank updates
// (one per CV slice, so CV grams come from downdates); otherwise gram rows
// are built lazily per activated coordinate.
class LassoCv {
public:
    LassoCv(const double* X, int n, int q, const LassoParams& params)
        : X_(X), n_(n), q_(q), params_(params) {
        if (n_ < 3) throw DataError("lasso: need at least 3 rows");
        if (q_ < 1) throw DataError("lasso: need at least 1 column");
    }

    LassoFit fit(const double* y) {
        std::vector<const double*> ys{y};
        return fit_many(ys)[0];
    }

    std::vector<LassoFit> fit_many(const std::vector<const double*>& ys) {
        if (q_ <= params_.max_gram_cols) return fit_many_gram(ys);
        return fit_many_lazy(ys);
    }

private:
    struct TargetState {
        bool degenerate = false;
        double y_mean = 0.0;
        double var_y = 0.0;
        std::vector<double> grid;
        detail::CdPath full_path;
    };

    // Shared epilogue: pick the CV-minimizing penalty and map the full-data
    // solution at it back to the original scale.
    void select_and_finish(std::vector<LassoFit>& fits, std::vector<TargetState>& ts,
                           const std::vector<std::vector<double>>& cv_sq_err, bool did_cv,
                           const detail::ColumnStats& st_full) const {
        int L = grid_size();
        for (std::size_t t = 0; t < fits.size(); ++t) {
            if (ts[t].degenerate) continue;
            int best = 0;
            if (did_cv) {
                for (int li = 1; li < L; ++li) {
                    if (cv_sq_err[t][li] < cv_sq_err[t][best]) best = li;
                }
                fits[t].cv_mse.resize(L);
                for (int li = 0; li < L; ++li) fits[t].cv_mse[li] = cv_sq_err[t][li] / n_;
            } else {
                best = L - 1;
            }
            fits[t].lambda_index = best;
            fits[t].lambda = ts[t].grid[best];
            detail::to_original_scale(ts[t].full_path.beta_std[best], st_full, ts[t].y_mean,
                                      fits[t].intercept, fits[t].beta);
            fits[t].n_active = 0;
            for (double b : fits[t].beta) {
                if (b != 0.0) ++fits[t].n_active;
            }
        }
    }

    // Prepares per-target grid and flags degenerate responses.
    bool prime_target(const std::vector<double>& c, double ysum, double ysumsq, int n,
                      TargetState& t, LassoFit& fit) const {
        t.y_mean = ysum / n;
        t.var_y = std::max(0.0, ysumsq / n - t.y_mean * t.y_mean);
        double lmax = 0.0;
        for (double v : c) lmax = std::max(lmax, std::fabs(v));
        if (!(t.var_y > 0.0) || !(lmax > 1e-300)) {
            t.degenerate = true;
            fit.intercept = t.y_mean;
            fit.beta.assign(q_, 0.0);
            return false;
        }
        t.grid = make_grid(lmax);
        fit.lambda_path = t.grid;
        return true;
    }

    std::vector<LassoFit> fit_many_gram(const std::vector<const double*>& ys) const {
        int T = static_cast<int>(ys.size());
        int n = n_, q = q_;
        int L = grid_size();
        std::vector<LassoFit> fits(T);
        std::vector<TargetState> ts(T);

        int K = std::min(params_.cv_folds, n);
        bool do_cv = K >= 2;
        std::vector<int> fold = do_cv ? row_folds(K) : std::vector<int>(n, 0);
        if (!do_cv) K = 1;

        std::vector<std::vector<int>> slice_rows(K);
        for (int i = 0; i < n; ++i) slice_rows[fold[i]].push_back(i);

        // One gathered block and raw gram per CV slice; their sums give the
        // full-sample gram and moments.
        std::vector<Eigen::MatrixXd> Xs(K), Gs(K);
        std::vector<Eigen::VectorXd> colsum_s(K);
        std::vector<std::vector<Eigen::VectorXd>> xy_s(K, std::vector<Eigen::VectorXd>(T));
        std::vector<std::vector<double>> ysum_s(K, std::vector<double>(T, 0.0));
        std::vector<std::vector<double>> ysumsq_s(K, std::vector<double>(T, 0.0));

        for (int f = 0; f < K; ++f) {
            const std::vector<int>& rows = slice_rows[f];
            int m = static_cast<int>(rows.size());
            Xs[f].resize(m, q);
            for (int j = 0; j < q; ++j) {
                const double* src = X_ + static_cast<std::size_t>(j) * n;
                for (int i = 0; i < m; ++i) Xs[f](i, j) = src[rows[i]];
            }
            Gs[f] = Eigen::MatrixXd::Zero(q, q);
            Gs[f].selfadjointView<Eigen::Lower>().rankUpdate(Xs[f].transpose());
            Gs[f] = Gs[f].selfadjointView<Eigen::Lower>();
            colsum_s[f] = Xs[f].colwise().sum();
            for (int t = 0; t < T; ++t) {
                Eigen::VectorXd yv(m);
                for (int i = 0; i < m; ++i) yv[i] = ys[t][rows[i]];
                xy_s[f][t] = Xs[f].transpose() * yv;
                ysum_s[f][t] = yv.sum();
                ysumsq_s[f][t] = yv.squaredNorm();
            }
        }

        Eigen::MatrixXd G = Gs[0];
        Eigen::VectorXd colsum = colsum_s[0];
        std::vector<Eigen::VectorXd> xy_full(T);
        std::vector<double> ysum(T, 0.0), ysumsq(T, 0.0);
        for (int t = 0; t < T; ++t) {
            xy_full[t] = xy_s[0][t];
            ysum[t] = ysum_s[0][t];
            ysumsq[t] = ysumsq_s[0][t];
        }
        for (int f = 1; f < K; ++f) {
            G += Gs[f];
            colsum += colsum_s[f];
            for (int t = 0; t < T; ++t) {
                xy_full[t] += xy_s[f][t];
                ysum[t] += ysum_s[f][t];
                ysumsq[t] += ysumsq_s[f][t];
            }
        }

        Eigen::VectorXd diag = G.diagonal();
        detail::ColumnStats st_full = detail::make_stats(colsum.data(), diag.data(), q, n);

        std::vector<double> gstd;
        detail::build_std_gram(G, nullptr, n, st_full, gstd);
        auto full_row = [&](int j) { return gstd.data() + static_cast<std::size_t>(j) * q; };

        std::vector<double> c(q);
        for (int t = 0; t < T; ++t) {
            if (!prime_target(correlations_from(xy_full[t], colsum, st_full, n, ysum[t] / n, c),
                              ysum[t], ysumsq[t], n, ts[t], fits[t])) {
                continue;
            }
            ts[t].full_path = detail::cd_path(full_row, c, ts[t].var_y, st_full, n, ts[t].grid,
                                              params_);
        }

        std::vector<std::vector<double>> cv_sq_err(T, std::vector<double>(L, 0.0));
        if (do_cv) {
            std::vector<double> bo, pred;
            for (int f = 0; f < K; ++f) {
                const std::vector<int>& rows = slice_rows[f];
                int m = static_cast<int>(rows.size());
                if (m == 0 || m == n) continue;
                int n_tr = n - m;
                Eigen::VectorXd colsum_tr = colsum - colsum_s[f];
                Eigen::VectorXd diag_tr = diag - Gs[f].diagonal();
                detail::ColumnStats st_tr =
                    detail::make_stats(colsum_tr.data(), diag_tr.data(), q, n_tr);
                detail::build_std_gram(G, &Gs[f], n_tr, st_tr, gstd);
                auto tr_row = [&](int j) { return gstd.data() + static_cast<std::size_t>(j) * q; };

                for (int t = 0; t < T; ++t) {
                    if (ts[t].degenerate) continue;
                    Eigen::VectorXd xy_tr = xy_full[t] - xy_s[f][t];
                    double ysum_tr = ysum[t] - ysum_s[f][t];
                    double ysumsq_tr = ysumsq[t] - ysumsq_s[f][t];
                    double ybar_tr = ysum_tr / n_tr;
                    double var_tr = std::max(0.0, ysumsq_tr / n_tr - ybar_tr * ybar_tr);
                    correlations_from(xy_tr, colsum_tr, st_tr, n_tr, ybar_tr, c);
                    detail::CdPath path =
                        detail::cd_path(tr_row, c, var_tr, st_tr, n_tr, ts[t].grid, params_);

                    pred.assign(m, 0.0);
                    for (int li = 0; li < L; ++li) {
                        double a0 = 0.0;
                        detail::to_original_scale(path.beta_std[li], st_tr, ybar_tr, a0, bo);
                        for (int i = 0; i < m; ++i) pred[i] = a0;
                        for (int j = 0; j < q; ++j) {
                            if (bo[j] == 0.0) continue;
                            for (int i = 0; i < m; ++i) pred[i] += bo[j] * Xs[f](i, j);
                        }
                        double s = 0.0;
                        for (int i = 0; i < m; ++i) {
                            double e = ys[t][rows[i]] - pred[i];
                            s += e * e;
                        }
                        cv_sq_err[t][li] += s;
                    }
                }
            }
        }

        select_and_finish(fits, ts, cv_sq_err, do_cv, st_full);
        return fits;
    }

    std::vector<LassoFit> fit_many_lazy(const std::vector<const double*>& ys) const {
        int T = static_cast<int>(ys.size());
        int n = n_, q = q_;
        int L = grid_size();
        std::vector<LassoFit> fits(T);
        std::vector<TargetState> ts(T);

        detail::ColumnStats st_full = detail::stats_from_matrix(X_, n, q);
        detail::LazyGram gram_full(X_, n, q, st_full);
        auto full_row = [&](int j) { return gram_full.row(j); };

        Eigen::Map<const Eigen::MatrixXd> Xm(X_, n, q);
        Eigen::VectorXd colsum = Xm.colwise().sum();
        std::vector<double> c(q);
        for (int t = 0; t < T; ++t) {
            Eigen::Map<const Eigen::VectorXd> yv(ys[t], n);
            Eigen::VectorXd xy = Xm.transpose() * yv;
            double ysum = yv.sum();
            double ysumsq = yv.squaredNorm();
            if (!prime_target(correlations_from(xy, colsum, st_full, n, ysum / n, c), ysum,
                              ysumsq, n, ts[t], fits[t])) {
                continue;
            }
            ts[t].full_path =
                detail::cd_path(full_row, c, ts[t].var_y, st_full, n, ts[t].grid, params_);
        }

        int K = std::min(params_.cv_folds, n);
        bool do_cv = K >= 2;
        std::vector<std::vector<double>> cv_sq_err(T, std::vector<double>(L, 0.0));
        if (do_cv) {
            std::vector<int> fold = row_folds(K);
            std::vector<double> bo, pred;
            for (int f = 0; f < K; ++f) {
                std::vector<int> tr, va;
                for (int i = 0; i < n; ++i) (fold[i] == f ? va : tr).push_back(i);
                if (tr.empty() || va.empty()) continue;
                int ntr = static_cast<int>(tr.size());
                int nva = static_cast<int>(va.size());
                std::vector<double> Xtr(static_cast<std::size_t>(ntr) * q);
                std::vector<double> Xva(static_cast<std::size_t>(nva) * q);
                for (int j = 0; j < q; ++j) {
                    const double* src = X_ + static_cast<std::size_t>(j) * n;
                    for (int i = 0; i < ntr; ++i) Xtr[static_cast<std::size_t>(j) * ntr + i] = src[tr[i]];
                    for (int i = 0; i < nva; ++i) Xva[static_cast<std::size_t>(j) * nva + i] = src[va[i]];
                }
                detail::ColumnStats st_tr = detail::stats_from_matrix(Xtr.data(), ntr, q);
                detail::LazyGram gram_tr(Xtr.data(), ntr, q, st_tr);
                auto tr_row = [&](int j) { return gram_tr.row(j); };
                Eigen::Map<const Eigen::MatrixXd> Xtrm(Xtr.data(), ntr, q);
                Eigen::VectorXd colsum_tr = Xtrm.colwise().sum();

                std::vector<double> ytr(ntr);
                for (int t = 0; t < T; ++t) {
                    if (ts[t].degenerate) continue;
                    for (int i = 0; i < ntr; ++i) ytr[i] = ys[t][tr[i]];
                    Eigen::Map<const Eigen::VectorXd> ytrv(ytr.data(), ntr);
                    Eigen::VectorXd xy_tr = Xtrm.transpose() * ytrv;
                    double ybar_tr = ytrv.sum() / ntr;
                    double var_tr = std::max(0.0, ytrv.squaredNorm() / ntr - ybar_tr * ybar_tr);
                    correlations_from(xy_tr, colsum_tr, st_tr, ntr, ybar_tr, c);
                    detail::CdPath path =
                        detail::cd_path(tr_row, c, var_tr, st_tr, ntr, ts[t].grid, params_);

                    pred.assign(nva, 0.0);
                    for (int li = 0; li < L; ++li) {
                        double a0 = 0.0;
                        detail::to_original_scale(path.beta_std[li], st_tr, ybar_tr, a0, bo);
                        for (int i = 0; i < nva; ++i) pred[i] = a0;
                        for (int j = 0; j < q; ++j) {
                            if (bo[j] == 0.0) continue;
                            const double* cvx = Xva.data() + static_cast<std::size_t>(j) * nva;
                            for (int i = 0; i < nva; ++i) pred[i] += bo[j] * cvx[i];
                        }
                        double s = 0.0;
                        for (int i = 0; i < nva; ++i) {
                            double e = ys[t][va[i]] - pred[i];
                            s += e * e;
                        }
                        cv_sq_err[t][li] += s;
                    }
                }
            }
        }

        select_and_finish(fits, ts, cv_sq_err, do_cv, st_full);
        return fits;
    }

    // c_j = (x_j - mu_j)'(y - ybar) / (n sd_j), from raw inner products.
    const std::vector<double>& correlations_from(const Eigen::VectorXd& xy,
                                                 const Eigen::VectorXd& colsum,
                                                 const detail::ColumnStats& st, int n,
                                                 double ybar, std::vector<double>& c) const {
        c.assign(q_, 0.0);
        for (int j = 0; j < q_; ++j) {
            if (st.excluded[j]) continue;
            c[j] = (xy[j] - colsum[j] * ybar) / (n * st.sd[j]);
        }
        return c;
    }

    int grid_size() const {
        return params_.lambda_grid.empty() ? params_.n_lambda
                                           : static_cast<int>(params_.lambda_grid.size());
    }

    std::vector<double> make_grid(double lmax) const {
        if (!params_.lambda_grid.empty()) {
            std::vector<double> g = params_.lambda_grid;
            std::sort(g.begin(), g.end(), std::greater<double>());
            return g;
        }
        int L = grid_size();
        std::vector<double> g(L);
        if (L == 1) {
            g[0] = lmax;
            return g;
        }
        double lr = std::log(lmax);
        double lmin = std::log(lmax * params_.lambda_min_ratio);
        for (int i = 0; i < L; ++i) {
            g[i] = std::exp(lr + (lmin - lr) * i / (L - 1));
        }
        return g;
    }

    std::vector<int> row_folds(int K) const {
        std::vector<int> idx(n_);
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(derive_seed(params_.seed, 0x6c63766bULL));
        rng.shuffle(idx);
        std::vector<int> fold(n_);
        for (int i = 0; i < n_; ++i) fold[idx[i]] = i % K;
        return fold;
    }

    const double* X_;
    int n_, q_;
    LassoParams params_;
};

inline LassoFit fit_lasso(const double* X, int n, int q, const double* y,
                          const LassoParams& params) {
    LassoCv cv(X, n, q, params);
    return cv.fit(y);
}

} // namespace pivdml

#endif
