#ifndef PIVDML_MC_HPP
#define PIVDML_MC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "dml.hpp"
#include "panel.hpp"
#include "rng.hpp"
#include "tsls.hpp"
#include "weak_iv.hpp"

namespace pivdml {

// Synthetic panel with unit fixed effects, an endogenous treatment and one
// instrument that is itself confounded by a unit effect. The structural
// effect is config.theta and the instrument strength is config.pi.
//
//   alpha_i = rho * Gamma_i + sqrt(1 - rho^2) * A_i,  Gamma_i ~ N(3, 9)
//   gamma_i ~ N(0, 25)
//   X_itj = Gamma_i + N(0, 1)
//   g(x) = 0.5 x1 + 0.5 x3 + 0.5 x1 1{x1 > 0}
//   Z_it = g(X_it) + gamma_i + V_it
//   D_it = Z_it pi + g(X_it) + 0.5 alpha_i + R_it
//   Y_it = D_it theta + g(X_it) + alpha_i + U_it
//
// with Var(U) = Var(R) = 1, Cov(U, R) = 0.6, Var(V) = 0.25 and V
// independent of (U, R).
struct DgpConfig {
    int n_units = 100;
    int T = 10;
    int p = 30;
    double theta = 0.5;
    double pi = 0.8;
    double rho = 0.9;
    std::uint64_t seed = 1;
};

inline double dgp_g(const double* x) {
    double s = 0.5 * x[0] + 0.5 * x[2];
    if (x[0] > 0.0) s += 0.5 * x[0];
    return s;
}

inline PanelData dgp_generate(const DgpConfig& cfg) {
    if (cfg.p < 3) throw DataError("dgp: needs at least 3 controls");
    if (cfg.T < 2) throw DataError("dgp: needs at least 2 periods");
    Rng rng(derive_seed(cfg.seed, 0x64677031ULL));

    PanelData pd;
    pd.z.resize(1);
    pd.x.resize(cfg.p);
    pd.z_names = {"z1"};
    for (int j = 0; j < cfg.p; ++j) pd.x_names.push_back("x" + std::to_string(j + 1));

    std::vector<double> xrow(cfg.p);
    double load = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
    for (int i = 0; i < cfg.n_units; ++i) {
        double gamma_big = rng.normal(3.0, 3.0);
        double a = rng.normal();
        double alpha = cfg.rho * gamma_big + load * a;
        double gamma_small = rng.normal(0.0, 5.0);
        std::string unit = std::to_string(i + 1);
        for (int t = 1; t <= cfg.T; ++t) {
            for (int j = 0; j < cfg.p; ++j) xrow[j] = gamma_big + rng.normal();
            double e1 = rng.normal();
            double e2 = rng.normal();
            double e3 = rng.normal();
            double u = e1;
            double rr = 0.6 * e1 + 0.8 * e2;
            double v = 0.5 * e3;
            double g = dgp_g(xrow.data());
            double z = g + gamma_small + v;
            double d = z * cfg.pi + g + 0.5 * alpha + rr;
            double y = d * cfg.theta + g + alpha + u;
            pd.unit.push_back(unit);
            pd.time.push_back(t);
            pd.y.push_back(y);
            pd.d.push_back(d);
            pd.z[0].push_back(z);
            for (int j = 0; j < cfg.p; ++j) pd.x[j].push_back(xrow[j]);
            pd.cluster.push_back(unit);
        }
    }
    return pd;
}

// True first-differenced nuisance values for a generated panel, used to
// score learned nuisances against the data generating process.
struct TrueNuisances {
    std::vector<double> l, r, m;
};

inline TrueNuisances true_nuisances(const FdData& fd, const DgpConfig& cfg) {
    TrueNuisances tn;
    tn.l.resize(fd.n);
    tn.r.resize(fd.n);
    tn.m.resize(fd.n);
    int p = fd.p;
    std::vector<double> cur(p), lag(p);
    for (int i = 0; i < fd.n; ++i) {
        for (int j = 0; j < p; ++j) {
            cur[j] = fd.xpair[j][i];
            lag[j] = fd.xpair[p + j][i];
        }
        double dg = dgp_g(cur.data()) - dgp_g(lag.data());
        tn.m[i] = dg;
        tn.r[i] = cfg.pi * dg + dg;
        tn.l[i] = cfg.theta * tn.r[i] + dg;
    }
    return tn;
}

// One estimator to run inside the study.
struct McEstimatorSpec {
    std::string name;
    bool is_dml = true;
    LearnerSpec learner;               // dml only
    int K = 3;                          // dml only
    bool tune = false;                  // dml only
    TslsControls controls = TslsControls::none;   // 2sls only
};

struct McConfig {
    DgpConfig dgp;
    int R = 100;
    double level = 0.95;
    std::uint64_t seed = 1;
    int threads = 1;
    double max_failure_share = 0.05;
    std::vector<McEstimatorSpec> estimators;
};

struct McRepResult {
    bool ok = false;
    std::string error;
    double theta = 0.0;
    double se = 0.0;
    double f_stat = 0.0;
    double ar_pvalue = 1.0;            // AR test at the true effect
    CsKind cs_kind = CsKind::bounded;
    double cs_lo = 0.0, cs_hi = 0.0;
    bool cs_includes_zero = false;
    bool cs_covers_truth = false;
    // Nuisance fit quality, dml only: out-of-fold residual RMSE against the
    // observed differenced targets, and RMSE against the true functions.
    double rmse_l = 0.0, rmse_r = 0.0, rmse_m = 0.0;
    double rmse_l_true = 0.0, rmse_r_true = 0.0, rmse_m_true = 0.0;
};

struct McSummary {
    std::string name;
    int n_ok = 0;
    int n_fail = 0;
    double bias = 0.0;
    double rmse = 0.0;
    double sd = 0.0;
    double mean_se = 0.0;
    double se_over_sd = 0.0;
    double mean_f = 0.0;
    double median_f = 0.0;
    double freq_f_gt_10 = 0.0;
    double freq_f_gt_16_3 = 0.0;
    double freq_f_gt_104_7 = 0.0;
    double freq_ar_reject = 0.0;       // p < 1 - level at the true effect
    double freq_bounded = 0.0;
    double freq_half_line = 0.0;
    double freq_disjoint = 0.0;
    double freq_real_line = 0.0;
    double freq_empty = 0.0;
    double freq_cs_includes_zero = 0.0;
    double freq_cs_covers_truth = 0.0;
    double freq_cs_bounded_excl_zero = 0.0;
    double rmse_l = 0.0, rmse_r = 0.0, rmse_m = 0.0;
    double rmse_l_true = 0.0, rmse_r_true = 0.0, rmse_m_true = 0.0;
};

struct McReport {
    McConfig config;
    std::vector<std::vector<McRepResult>> reps;   // [estimator][rep]
    std::vector<McSummary> summaries;
    bool aborted = false;
    std::string abort_reason;
};

namespace detail {

inline void run_one_rep(const McConfig& cfg, int rep, std::vector<std::vector<McRepResult>>& reps) {
    DgpConfig dcfg = cfg.dgp;
    dcfg.seed = cfg.seed + static_cast<std::uint64_t>(rep);
    PanelData panel = dgp_generate(dcfg);
    FdData fd = first_difference(panel);
    TrueNuisances tn = true_nuisances(fd, dcfg);

    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        const McEstimatorSpec& spec = cfg.estimators[e];
        McRepResult& out = reps[e][rep];
        try {
            Eigen::VectorXd delta, pi;
            Eigen::MatrixXd s_d, s_p, s_dp;
            if (spec.is_dml) {
                DmlOptions opt;
                opt.K = spec.K;
                opt.seed = dcfg.seed;
                opt.learner = spec.learner;
                opt.learner.seed = dcfg.seed;
                opt.tune = spec.tune;
                DmlEstimate est = dml_estimate(fd, opt);
                out.theta = est.theta;
                out.se = est.se;
                delta = est.delta;
                pi = est.pi;
                s_d = est.sigma_delta;
                s_p = est.sigma_pi;
                s_dp = est.sigma_delta_pi;
                out.rmse_l = est.resid_rmse_l;
                out.rmse_r = est.resid_rmse_r;
                out.rmse_m = est.resid_rmse_m;
                double el = 0.0, er = 0.0, em = 0.0;
                for (int i = 0; i < fd.n; ++i) {
                    el += (est.preds.lhat[i] - tn.l[i]) * (est.preds.lhat[i] - tn.l[i]);
                    er += (est.preds.rhat[i] - tn.r[i]) * (est.preds.rhat[i] - tn.r[i]);
                    em += (est.preds.mhat[0][i] - tn.m[i]) * (est.preds.mhat[0][i] - tn.m[i]);
                }
                out.rmse_l_true = std::sqrt(el / fd.n);
                out.rmse_r_true = std::sqrt(er / fd.n);
                out.rmse_m_true = std::sqrt(em / fd.n);
            } else {
                TslsOptions opt;
                opt.controls = spec.controls;
                opt.level = cfg.level;
                opt.theta0 = dcfg.theta;
                TslsEstimate est = estimate_2sls_fd(fd, opt);
                out.theta = est.theta;
                out.se = est.se;
                delta = est.delta;
                pi = est.pi;
                s_d = est.sigma_delta;
                s_p = est.sigma_pi;
                s_dp = est.sigma_delta_pi;
            }
            WeakIvReport wiv = make_weak_iv_report(delta, pi, s_d, s_p, s_dp, cfg.level, dcfg.theta);
            out.f_stat = wiv.f_stat;
            out.ar_pvalue = wiv.ar.pvalue;
            out.cs_kind = wiv.cs.kind;
            out.cs_lo = wiv.cs.lo;
            out.cs_hi = wiv.cs.hi;
            out.cs_includes_zero = wiv.cs.contains(0.0);
            out.cs_covers_truth = wiv.cs.contains(dcfg.theta);
            out.ok = true;
        } catch (const std::exception& ex) {
            out.ok = false;
            out.error = ex.what();
        }
    }
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

inline McSummary summarize_mc(const std::string& name, const std::vector<McRepResult>& rr,
                              const McConfig& cfg) {
    McSummary s;
    s.name = name;
    std::vector<double> thetas, ses, fs;
    for (const auto& r : rr) {
        if (!r.ok) {
            ++s.n_fail;
            continue;
        }
        ++s.n_ok;
        thetas.push_back(r.theta);
        ses.push_back(r.se);
        fs.push_back(r.f_stat);
        if (r.f_stat > 10.0) s.freq_f_gt_10 += 1;
        if (r.f_stat > kFStockYogo) s.freq_f_gt_16_3 += 1;
        if (r.f_stat > kFLee) s.freq_f_gt_104_7 += 1;
        if (r.ar_pvalue < 1.0 - cfg.level) s.freq_ar_reject += 1;
        switch (r.cs_kind) {
            case CsKind::bounded: s.freq_bounded += 1; break;
            case CsKind::half_line: s.freq_half_line += 1; break;
            case CsKind::disjoint: s.freq_disjoint += 1; break;
            case CsKind::real_line: s.freq_real_line += 1; break;
            case CsKind::empty: s.freq_empty += 1; break;
        }
        if (r.cs_includes_zero) s.freq_cs_includes_zero += 1;
        if (r.cs_covers_truth) s.freq_cs_covers_truth += 1;
        if (r.cs_kind == CsKind::bounded && !r.cs_includes_zero) s.freq_cs_bounded_excl_zero += 1;
        s.rmse_l += r.rmse_l;
        s.rmse_r += r.rmse_r;
        s.rmse_m += r.rmse_m;
        s.rmse_l_true += r.rmse_l_true;
        s.rmse_r_true += r.rmse_r_true;
        s.rmse_m_true += r.rmse_m_true;
    }
    if (s.n_ok == 0) return s;
    double n = s.n_ok;
    double mean_theta = 0.0;
    for (double t : thetas) mean_theta += t;
    mean_theta /= n;
    s.bias = mean_theta - cfg.dgp.theta;
    double rmse2 = 0.0, var = 0.0;
    for (double t : thetas) {
        rmse2 += (t - cfg.dgp.theta) * (t - cfg.dgp.theta);
        var += (t - mean_theta) * (t - mean_theta);
    }
    s.rmse = std::sqrt(rmse2 / n);
    s.sd = std::sqrt(var / n);
    for (double v : ses) s.mean_se += v;
    s.mean_se /= n;
    s.se_over_sd = (s.sd > 0.0) ? s.mean_se / s.sd : (s.mean_se == 0.0 ? 1.0 : 0.0);
    for (double f : fs) s.mean_f += f;
    s.mean_f /= n;
    s.median_f = detail::median_of(fs);
    s.freq_f_gt_10 /= n;
    s.freq_f_gt_16_3 /= n;
    s.freq_f_gt_104_7 /= n;
    s.freq_ar_reject /= n;
    s.freq_bounded /= n;
    s.freq_half_line /= n;
    s.freq_disjoint /= n;
    s.freq_real_line /= n;
    s.freq_empty /= n;
    s.freq_cs_includes_zero /= n;
    s.freq_cs_covers_truth /= n;
    s.freq_cs_bounded_excl_zero /= n;
    s.rmse_l /= n;
    s.rmse_r /= n;
    s.rmse_m /= n;
    s.rmse_l_true /= n;
    s.rmse_r_true /= n;
    s.rmse_m_true /= n;
    return s;
}

// Runs the replication study. Replication seeds are cfg.seed + rep index and
// every reduction runs in a fixed order, so results do not depend on the
// thread count.
inline McReport run_replications(const McConfig& cfg) {
    if (cfg.estimators.empty()) throw DataError("simulation: no estimators configured");
    if (cfg.R < 1) throw DataError("simulation: need at least one replication");

    McReport rep;
    rep.config = cfg;
    rep.reps.assign(cfg.estimators.size(), std::vector<McRepResult>(cfg.R));

    int threads = std::max(1, std::min(cfg.threads, cfg.R));
    if (threads == 1) {
        for (int r = 0; r < cfg.R; ++r) detail::run_one_rep(cfg, r, rep.reps);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            int lo = static_cast<int>(static_cast<long long>(cfg.R) * t / threads);
            int hi = static_cast<int>(static_cast<long long>(cfg.R) * (t + 1) / threads);
            pool.emplace_back([&, lo, hi]() {
                for (int r = lo; r < hi; ++r) detail::run_one_rep(cfg, r, rep.reps);
            });
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        McSummary s = summarize_mc(cfg.estimators[e].name, rep.reps[e], cfg);
        if (s.n_fail > cfg.max_failure_share * cfg.R) {
            rep.aborted = true;
            rep.abort_reason = "estimator " + s.name + " failed in " + std::to_string(s.n_fail) +
                               " of " + std::to_string(cfg.R) + " replications";
        }
        rep.summaries.push_back(std::move(s));
    }
    return rep;
}

} // namespace pivdml

#endif
