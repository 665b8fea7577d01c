#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pivdml/mc.hpp"

using namespace pivdml;

namespace {

double col_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double col_var(const std::vector<double>& v) {
    double m = col_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / v.size();
}

McEstimatorSpec dml_linear_spec(const std::string& name) {
    McEstimatorSpec s;
    s.name = name;
    s.is_dml = true;
    s.learner.kind = LearnerKind::linear;
    s.learner.dictionary = false;
    s.K = 3;
    return s;
}

McEstimatorSpec tsls_spec(const std::string& name) {
    McEstimatorSpec s;
    s.name = name;
    s.is_dml = false;
    s.controls = TslsControls::none;
    return s;
}

} // namespace

TEST(Dgp, DeterministicGivenSeed) {
    DgpConfig cfg;
    cfg.n_units = 12;
    cfg.T = 4;
    cfg.p = 4;
    cfg.seed = 5;
    PanelData a = dgp_generate(cfg);
    PanelData b = dgp_generate(cfg);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.d, b.d);
    EXPECT_EQ(a.z[0], b.z[0]);
    EXPECT_EQ(a.x[2], b.x[2]);

    cfg.seed = 6;
    PanelData c = dgp_generate(cfg);
    EXPECT_NE(a.y, c.y);
}

TEST(Dgp, PopulationMomentsOfObservables) {
    DgpConfig cfg;
    cfg.n_units = 4000;
    cfg.T = 10;
    cfg.p = 4;
    cfg.seed = 77;
    PanelData pd = dgp_generate(cfg);

    // X_itj = Gamma_i + noise with Gamma ~ N(3, 9): mean 3, variance 10
    EXPECT_NEAR(col_mean(pd.x[0]), 3.0, 0.1);
    EXPECT_NEAR(col_var(pd.x[0]), 10.0, 0.4);
    EXPECT_NEAR(col_var(pd.x[3]), 10.0, 0.4);
}

TEST(Dgp, StructuralErrorMomentsViaDifferences) {
    DgpConfig cfg;
    cfg.n_units = 4000;
    cfg.T = 10;
    cfg.p = 3;
    cfg.seed = 31;
    PanelData pd = dgp_generate(cfg);
    FdData fd = first_difference(pd);
    TrueNuisances tn = true_nuisances(fd, cfg);

    // dz - dg = dV, dd - pi dz - dg = dR, dy - theta dd - dg = dU
    std::vector<double> dV(fd.n), dR(fd.n), dU(fd.n);
    for (int i = 0; i < fd.n; ++i) {
        dV[i] = fd.dz[0][i] - tn.m[i];
        dR[i] = fd.dd[i] - cfg.pi * fd.dz[0][i] - tn.m[i];
        dU[i] = fd.dy[i] - cfg.theta * fd.dd[i] - tn.m[i];
    }
    EXPECT_NEAR(col_mean(dV), 0.0, 0.02);
    EXPECT_NEAR(col_var(dV), 0.5, 0.02);     // Var(V) = 0.25, doubled by differencing
    EXPECT_NEAR(col_var(dR), 2.0, 0.05);
    EXPECT_NEAR(col_var(dU), 2.0, 0.05);

    double c = 0.0;
    for (int i = 0; i < fd.n; ++i) c += (dU[i] - col_mean(dU)) * (dR[i] - col_mean(dR));
    c /= fd.n;
    EXPECT_NEAR(c / std::sqrt(col_var(dU) * col_var(dR)), 0.6, 0.03);
}

TEST(Dgp, UnitEffectVarianceMatchesDesign) {
    DgpConfig cfg;
    cfg.n_units = 4000;
    cfg.T = 10;
    cfg.p = 3;
    cfg.seed = 13;
    PanelData pd = dgp_generate(cfg);

    // per-unit average of y - theta d - g equals alpha_i + mean_t U_it;
    // across units its variance is Var(alpha) + 1/T = 0.81*9 + 0.19 + 0.1
    std::vector<double> unit_acc;
    double acc = 0.0;
    int count = 0;
    std::string cur = pd.unit[0];
    std::vector<double> xrow(cfg.p);
    for (std::size_t i = 0; i <= pd.n_rows(); ++i) {
        if (i == pd.n_rows() || pd.unit[i] != cur) {
            unit_acc.push_back(acc / count);
            if (i == pd.n_rows()) break;
            cur = pd.unit[i];
            acc = 0.0;
            count = 0;
        }
        for (int j = 0; j < cfg.p; ++j) xrow[j] = pd.x[j][i];
        acc += pd.y[i] - cfg.theta * pd.d[i] - dgp_g(xrow.data());
        count += 1;
    }
    ASSERT_EQ(unit_acc.size(), static_cast<std::size_t>(cfg.n_units));
    double want = 0.81 * 9.0 + 0.19 + 1.0 / cfg.T;
    EXPECT_NEAR(col_var(unit_acc), want, 0.5);
}

TEST(TrueNuisanceFunctions, SatisfyStructuralIdentities) {
    DgpConfig cfg;
    cfg.n_units = 15;
    cfg.T = 4;
    cfg.p = 5;
    cfg.seed = 3;
    FdData fd = first_difference(dgp_generate(cfg));
    TrueNuisances tn = true_nuisances(fd, cfg);

    std::vector<double> cur(cfg.p), lag(cfg.p);
    for (int i = 0; i < fd.n; ++i) {
        for (int j = 0; j < cfg.p; ++j) {
            cur[j] = fd.xpair[j][i];
            lag[j] = fd.xpair[cfg.p + j][i];
        }
        double dg = dgp_g(cur.data()) - dgp_g(lag.data());
        EXPECT_DOUBLE_EQ(tn.m[i], dg);
        EXPECT_DOUBLE_EQ(tn.r[i], (cfg.pi + 1.0) * dg);
        EXPECT_DOUBLE_EQ(tn.l[i], cfg.theta * tn.r[i] + dg);
    }
}

TEST(SummarizeMc, DegenerateEstimatorHasCleanSummary) {
    McConfig cfg;
    cfg.dgp.theta = 0.5;
    cfg.R = 8;
    std::vector<McRepResult> rr(8);
    for (auto& r : rr) {
        r.ok = true;
        r.theta = 0.5;
        r.se = 0.0;
        r.f_stat = 200.0;
        r.ar_pvalue = 0.5;
        r.cs_kind = CsKind::bounded;
        r.cs_includes_zero = false;
        r.cs_covers_truth = true;
    }
    McSummary s = summarize_mc("degenerate", rr, cfg);
    EXPECT_EQ(s.n_ok, 8);
    EXPECT_DOUBLE_EQ(s.bias, 0.0);
    EXPECT_DOUBLE_EQ(s.rmse, 0.0);
    EXPECT_DOUBLE_EQ(s.se_over_sd, 1.0);
    EXPECT_DOUBLE_EQ(s.freq_f_gt_104_7, 1.0);
    EXPECT_DOUBLE_EQ(s.freq_cs_bounded_excl_zero, 1.0);
    EXPECT_DOUBLE_EQ(s.freq_ar_reject, 0.0);
}

TEST(SummarizeMc, HandCheckedStatistics) {
    McConfig cfg;
    cfg.dgp.theta = 1.0;
    cfg.level = 0.95;
    std::vector<McRepResult> rr(4);
    double thetas[4] = {0.8, 1.2, 1.0, 1.4};
    double ses[4] = {0.2, 0.2, 0.3, 0.3};
    for (int i = 0; i < 4; ++i) {
        rr[i].ok = true;
        rr[i].theta = thetas[i];
        rr[i].se = ses[i];
        rr[i].f_stat = 10.0 + i * 10.0;  // 10 20 30 40
        rr[i].ar_pvalue = (i == 0) ? 0.01 : 0.5;
        rr[i].cs_kind = (i < 2) ? CsKind::bounded : CsKind::real_line;
        rr[i].cs_includes_zero = (i != 1);
    }
    rr[3].ok = false;

    McSummary s = summarize_mc("hand", rr, cfg);
    EXPECT_EQ(s.n_ok, 3);
    EXPECT_EQ(s.n_fail, 1);
    EXPECT_NEAR(s.bias, 0.0, 1e-15);
    EXPECT_NEAR(s.rmse, std::sqrt((0.04 + 0.04 + 0.0) / 3.0), 1e-12);
    EXPECT_NEAR(s.sd, std::sqrt(0.08 / 3.0), 1e-12);
    EXPECT_NEAR(s.mean_se, (0.2 + 0.2 + 0.3) / 3.0, 1e-12);
    EXPECT_NEAR(s.mean_f, 20.0, 1e-12);
    EXPECT_NEAR(s.median_f, 20.0, 1e-12);
    EXPECT_NEAR(s.freq_f_gt_10, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.freq_f_gt_16_3, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.freq_ar_reject, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.freq_bounded, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.freq_real_line, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.freq_cs_includes_zero, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.freq_cs_bounded_excl_zero, 1.0 / 3.0, 1e-12);
}

TEST(RunReplications, IdenticalAcrossThreadCounts) {
    McConfig cfg;
    cfg.dgp.n_units = 24;
    cfg.dgp.T = 4;
    cfg.dgp.p = 4;
    cfg.R = 6;
    cfg.seed = 11;
    cfg.estimators = {dml_linear_spec("dml-linear"), tsls_spec("2sls")};

    cfg.threads = 1;
    McReport a = run_replications(cfg);
    cfg.threads = 3;
    McReport b = run_replications(cfg);
    cfg.threads = 8;
    McReport c = run_replications(cfg);

    ASSERT_FALSE(a.aborted);
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        for (int r = 0; r < cfg.R; ++r) {
            EXPECT_EQ(a.reps[e][r].theta, b.reps[e][r].theta);
            EXPECT_EQ(a.reps[e][r].theta, c.reps[e][r].theta);
            EXPECT_EQ(a.reps[e][r].se, c.reps[e][r].se);
            EXPECT_EQ(a.reps[e][r].f_stat, c.reps[e][r].f_stat);
        }
        EXPECT_EQ(a.summaries[e].bias, c.summaries[e].bias);
        EXPECT_EQ(a.summaries[e].rmse, c.summaries[e].rmse);
    }
}

TEST(RunReplications, RepSeedsAreBasePlusIndex) {
    McConfig cfg;
    cfg.dgp.n_units = 10;
    cfg.dgp.T = 3;
    cfg.dgp.p = 3;
    cfg.R = 2;
    cfg.seed = 40;
    cfg.estimators = {tsls_spec("2sls")};
    McReport rep = run_replications(cfg);

    // rep 1 must coincide with a single rep at base seed 41
    McConfig cfg2 = cfg;
    cfg2.R = 1;
    cfg2.seed = 41;
    McReport rep2 = run_replications(cfg2);
    EXPECT_EQ(rep.reps[0][1].theta, rep2.reps[0][0].theta);
}

TEST(RunReplications, AbortsWhenAnEstimatorKeepsFailing) {
    McConfig cfg;
    cfg.dgp.n_units = 12;
    cfg.dgp.T = 3;
    cfg.dgp.p = 30;
    cfg.R = 4;
    cfg.seed = 2;
    McEstimatorSpec bad = dml_linear_spec("dml-mlp");
    bad.learner.kind = LearnerKind::mlp;
    bad.learner.dictionary = true;   // dictionary of 1950 features blows the weight cap
    bad.learner.mlp.size = 100;
    cfg.estimators = {bad};

    McReport rep = run_replications(cfg);
    EXPECT_TRUE(rep.aborted);
    EXPECT_FALSE(rep.abort_reason.empty());
    EXPECT_EQ(rep.summaries[0].n_fail, 4);
    EXPECT_FALSE(rep.reps[0][0].error.empty());
}

// Estimated standard errors should track the Monte Carlo dispersion of the
// point estimate when the nuisances are fit by plain least squares.
TEST(RunReplications, SeTracksMonteCarloSdForLinearLearner) {
    McConfig cfg;
    cfg.dgp.n_units = 300;
    cfg.dgp.T = 10;
    cfg.dgp.p = 10;
    cfg.R = 60;
    cfg.seed = 9;
    cfg.estimators = {dml_linear_spec("dml-linear")};

    McReport rep = run_replications(cfg);
    ASSERT_FALSE(rep.aborted);
    const McSummary& s = rep.summaries[0];
    EXPECT_EQ(s.n_fail, 0);
    EXPECT_GT(s.se_over_sd, 0.7);
    EXPECT_LT(s.se_over_sd, 1.4);
}
