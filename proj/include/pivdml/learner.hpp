#ifndef PIVDML_LEARNER_HPP
#define PIVDML_LEARNER_HPP

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "boosting.hpp"
#include "lasso.hpp"
#include "mlp.hpp"
#include "numeric.hpp"
#include "ols.hpp"
#include "rng.hpp"

namespace pivdml {

enum class LearnerKind { linear, lasso, boosting, mlp };

inline std::string learner_name(LearnerKind k) {
    switch (k) {
        case LearnerKind::linear: return "linear";
        case LearnerKind::lasso: return "lasso";
        case LearnerKind::boosting: return "boosting";
        case LearnerKind::mlp: return "mlp";
    }
    return "?";
}

inline LearnerKind parse_learner(const std::string& s) {
    if (s == "linear") return LearnerKind::linear;
    if (s == "lasso") return LearnerKind::lasso;
    if (s == "boosting") return LearnerKind::boosting;
    if (s == "mlp") return LearnerKind::mlp;
    throw DataError("unknown learner: " + s + " (expected lasso, boosting, mlp or linear)");
}

// One learner configuration used for all nuisance regressions. The
// dictionary flag controls whether base features are expanded with the
// polynomial dictionary before fitting.
struct LearnerSpec {
    LearnerKind kind = LearnerKind::lasso;
    bool dictionary = true;
    LassoParams lasso;
    BoostParams boosting;
    MlpParams mlp;
    std::uint64_t seed = 0;
};

// A fitted regression of any supported kind.
struct Model {
    LearnerKind kind = LearnerKind::linear;
    LinearFit linear;
    LassoFit lasso;
    BoostFit boost;
    MlpFit mlp;

    void predict(const double* X, int n, int q, double* out) const {
        switch (kind) {
            case LearnerKind::linear: linear.predict(X, n, q, out); break;
            case LearnerKind::lasso: lasso.predict(X, n, q, out); break;
            case LearnerKind::boosting: boost.predict(X, n, q, out); break;
            case LearnerKind::mlp: mlp.predict(X, n, q, out); break;
        }
    }
};

inline Model fit_model(const LearnerSpec& spec, const double* X, int n, int q, const double* y) {
    Model m;
    m.kind = spec.kind;
    switch (spec.kind) {
        case LearnerKind::linear:
            m.linear = fit_linear(X, n, q, y);
            break;
        case LearnerKind::lasso: {
            LassoParams p = spec.lasso;
            p.seed = derive_seed(spec.seed, 0x6c61ULL);
            m.lasso = fit_lasso(X, n, q, y, p);
            break;
        }
        case LearnerKind::boosting:
            m.boost = fit_boosting(X, n, q, y, spec.boosting);
            break;
        case LearnerKind::mlp: {
            MlpParams p = spec.mlp;
            p.seed = derive_seed(spec.seed, 0x6d6cULL);
            m.mlp = fit_mlp(X, n, q, y, p);
            break;
        }
    }
    return m;
}

// Fits several responses on the same design. The lasso path shares its
// standardization, gram cache and CV split across responses.
inline std::vector<Model> fit_models_shared(const LearnerSpec& spec, const double* X, int n,
                                            int q, const std::vector<const double*>& ys) {
    std::vector<Model> out(ys.size());
    if (spec.kind == LearnerKind::lasso) {
        LassoParams p = spec.lasso;
        p.seed = derive_seed(spec.seed, 0x6c61ULL);
        LassoCv cv(X, n, q, p);
        std::vector<LassoFit> fits = cv.fit_many(ys);
        for (std::size_t t = 0; t < ys.size(); ++t) {
            out[t].kind = LearnerKind::lasso;
            out[t].lasso = std::move(fits[t]);
        }
        return out;
    }
    for (std::size_t t = 0; t < ys.size(); ++t) out[t] = fit_model(spec, X, n, q, ys[t]);
    return out;
}

// Random-search tuning: a fixed number of hyperparameter draws, each scored
// by seeded row-wise cross validation, argmin CV MSE wins (first draw on
// ties). Boosting draws l2 in [0,2] and maxdepth in {2..10}; the network
// draws size in {2..10} and decay in [0,0.5]. Other learners are returned
// unchanged.
struct TuneResult {
    LearnerSpec spec;
    std::vector<double> cv_mse;
    std::vector<std::string> candidates;
    int chosen = -1;
};

inline TuneResult grid_search_tune(const LearnerSpec& spec, const double* X, int n, int q,
                                   const double* y, int n_eval = 5, int cv_folds = 5) {
    TuneResult res;
    res.spec = spec;
    if (spec.kind != LearnerKind::boosting && spec.kind != LearnerKind::mlp) return res;
    if (n < cv_folds) throw DataError("tune: fewer rows than CV folds");

    Rng draw_rng(derive_seed(spec.seed, 0x74756e65ULL));
    std::vector<LearnerSpec> cands;
    for (int e = 0; e < n_eval; ++e) {
        LearnerSpec c = spec;
        if (spec.kind == LearnerKind::boosting) {
            c.boosting.l2 = draw_rng.uniform(0.0, 2.0);
            c.boosting.maxdepth = static_cast<int>(draw_rng.uniform_int(2, 10));
            res.candidates.push_back("l2=" + std::to_string(c.boosting.l2) +
                                     " maxdepth=" + std::to_string(c.boosting.maxdepth));
        } else {
            c.mlp.size = static_cast<int>(draw_rng.uniform_int(2, 10));
            c.mlp.decay = draw_rng.uniform(0.0, 0.5);
            res.candidates.push_back("size=" + std::to_string(c.mlp.size) +
                                     " decay=" + std::to_string(c.mlp.decay));
        }
        cands.push_back(c);
    }

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng fold_rng(derive_seed(spec.seed, 0x74637620ULL));
    fold_rng.shuffle(idx);
    std::vector<int> fold(n);
    for (int i = 0; i < n; ++i) fold[idx[i]] = i % cv_folds;

    res.cv_mse.assign(n_eval, 0.0);
    for (int f = 0; f < cv_folds; ++f) {
        std::vector<int> tr, va;
        for (int i = 0; i < n; ++i) (fold[i] == f ? va : tr).push_back(i);
        if (tr.empty() || va.empty()) continue;
        int ntr = static_cast<int>(tr.size());
        int nva = static_cast<int>(va.size());
        std::vector<double> Xtr(static_cast<std::size_t>(ntr) * q), Xva(static_cast<std::size_t>(nva) * q);
        for (int j = 0; j < q; ++j) {
            const double* src = X + static_cast<std::size_t>(j) * n;
            for (int i = 0; i < ntr; ++i) Xtr[static_cast<std::size_t>(j) * ntr + i] = src[tr[i]];
            for (int i = 0; i < nva; ++i) Xva[static_cast<std::size_t>(j) * nva + i] = src[va[i]];
        }
        std::vector<double> ytr(ntr), yva(nva), pred(nva);
        for (int i = 0; i < ntr; ++i) ytr[i] = y[tr[i]];
        for (int i = 0; i < nva; ++i) yva[i] = y[va[i]];
        for (int e = 0; e < n_eval; ++e) {
            Model m = fit_model(cands[e], Xtr.data(), ntr, q, ytr.data());
            m.predict(Xva.data(), nva, q, pred.data());
            double s = 0.0;
            for (int i = 0; i < nva; ++i) {
                double err = yva[i] - pred[i];
                s += err * err;
            }
            res.cv_mse[e] += s / n;
        }
    }

    int best = 0;
    for (int e = 1; e < n_eval; ++e) {
        if (res.cv_mse[e] < res.cv_mse[best]) best = e;
    }
    res.chosen = best;
    res.spec = cands[best];
    return res;
}

} // namespace pivdml

#endif
