// Command line front end: estimate on user panel data, run the Monte Carlo
// presets, or tune learner hyperparameters on a nuisance target.
//
// Exit codes: 0 ok, 2 data/configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <pivdml/pivdml.hpp>

namespace {

using namespace pivdml;

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

// Sink that writes to --out when given, otherwise to stdout.
struct OutputSink {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw DataError("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& stream() { return *os; }
};

void log_run(const std::string& command, std::uint64_t seed, const std::string& config) {
    std::cerr << "pivdml version=" << kVersion << " command=" << command
              << " seed=" << seed << " config_hash=" << fnv1a_hex(config) << "\n";
}

double wald_halfwidth(double level, double se) {
    return std::sqrt(chi2_quantile(level, 1.0)) * se;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOpts {
    std::string data;
    std::string unit, time, y, d;
    std::vector<std::string> z, x;
    std::string cluster;
    int folds = 3;
    std::string learner = "lasso";
    bool no_dictionary = false;
    bool tune = false;
    double level = 0.95;
    double theta0 = 0.0;
    std::uint64_t seed = 1;
    bool with_2sls = false;
    std::string controls = "pair";
    std::string out;
    std::string format = "table";
};

std::string estimate_config_string(const EstimateOpts& o) {
    std::ostringstream s;
    s << "command=estimate\ndata=" << o.data << "\nunit=" << o.unit << "\ntime=" << o.time
      << "\ny=" << o.y << "\nd=" << o.d << "\nz=" << join(o.z, ",") << "\nx=" << join(o.x, ",")
      << "\ncluster=" << o.cluster << "\nfolds=" << o.folds << "\nlearner=" << o.learner
      << "\ndictionary=" << (o.no_dictionary ? 0 : 1) << "\ntune=" << (o.tune ? 1 : 0)
      << "\nlevel=" << fmt_num(o.level) << "\ntheta0=" << fmt_num(o.theta0)
      << "\nseed=" << o.seed << "\nwith_2sls=" << (o.with_2sls ? 1 : 0)
      << "\ncontrols=" << o.controls << "\n";
    return s.str();
}

void kv_weak_iv(KvWriter& kv, const std::string& prefix, const WeakIvReport& w) {
    kv.add(prefix + "f_stat", w.f_stat);
    kv.add(prefix + "f_gt_10", w.f_stat > kFRuleOfThumb ? 1 : 0);
    kv.add(prefix + "f_gt_16_3", w.f_stat > kFStockYogo ? 1 : 0);
    kv.add(prefix + "f_gt_104_7", w.f_stat > kFLee ? 1 : 0);
    kv.add(prefix + "ar_stat", w.ar.stat);
    kv.add(prefix + "ar_pvalue", w.ar.pvalue);
    kv.add(prefix + "ar_theta0", w.theta0);
    kv.add(prefix + "cs_level", w.cs.level);
    kv.add(prefix + "cs_kind", cs_kind_name(w.cs.kind));
    kv.add(prefix + "cs_lo", w.cs.lo);
    kv.add(prefix + "cs_hi", w.cs.hi);
}

void table_weak_iv(std::ostream& os, const WeakIvReport& w) {
    os << "first stage\n";
    TableWriter tf({"F", "F>10", "F>16.30", "F>104.70"});
    tf.add_row({fmt_num(w.f_stat), w.f_stat > kFRuleOfThumb ? "yes" : "no",
                w.f_stat > kFStockYogo ? "yes" : "no", w.f_stat > kFLee ? "yes" : "no"});
    tf.write(os);
    os << "\nanderson-rubin (theta0=" << fmt_num(w.theta0) << ", level=" << fmt_num(w.cs.level)
       << ")\n";
    TableWriter ta({"AR stat", "p-value", "CS kind", "CS lo", "CS hi"});
    ta.add_row({fmt_num(w.ar.stat), fmt_num(w.ar.pvalue), cs_kind_name(w.cs.kind),
                fmt_num(w.cs.lo), fmt_num(w.cs.hi)});
    ta.write(os);
}

int cmd_estimate(const EstimateOpts& o) {
    const std::string config = estimate_config_string(o);
    log_run("estimate", o.seed, config);

    PanelSchema schema;
    schema.unit = o.unit;
    schema.time = o.time;
    schema.y = o.y;
    schema.d = o.d;
    schema.z = o.z;
    schema.x = o.x;
    schema.cluster = o.cluster;

    LoadReport load;
    PanelData panel = load_panel(o.data, schema, &load);
    FdData fd = first_difference(panel);

    DmlOptions opt;
    opt.K = o.folds;
    opt.seed = o.seed;
    opt.tune = o.tune;
    opt.learner.kind = parse_learner(o.learner);
    opt.learner.dictionary = !o.no_dictionary;
    opt.learner.seed = o.seed;

    DmlEstimate est = dml_estimate(fd, opt);
    WeakIvReport w = make_weak_iv_report(est.delta, est.pi, est.sigma_delta, est.sigma_pi,
                                         est.sigma_delta_pi, o.level, o.theta0);

    TslsEstimate tsls;
    if (o.with_2sls) {
        TslsOptions topt;
        topt.controls = parse_tsls_controls(o.controls);
        topt.level = o.level;
        topt.theta0 = o.theta0;
        tsls = estimate_2sls_fd(fd, topt);
    }

    OutputSink sink(o.out);
    std::ostream& os = sink.stream();
    double hw = wald_halfwidth(o.level, est.se);

    if (o.format == "kv") {
        KvWriter kv;
        kv.add("version", std::string(kVersion));
        kv.add("command", std::string("estimate"));
        kv.add("seed", static_cast<long long>(o.seed));
        kv.add("estimator", std::string("dml"));
        kv.add("learner", o.learner);
        kv.add("dictionary", o.no_dictionary ? 0 : 1);
        kv.add("tuned", o.tune ? 1 : 0);
        kv.add("folds", o.folds);
        kv.add("rows_read", static_cast<long long>(load.rows_read));
        kv.add("rows_dropped_missing", static_cast<long long>(load.rows_dropped_missing));
        kv.add("n_rows", est.n_rows);
        kv.add("n_units", est.n_units);
        kv.add("n_instruments", fd.r);
        kv.add("n_controls", fd.p);
        kv.add("theta", est.theta);
        kv.add("se", est.se);
        kv.add("wald_lo", est.theta - hw);
        kv.add("wald_hi", est.theta + hw);
        for (int j = 0; j < fd.r; ++j) {
            kv.add("pi." + std::to_string(j), est.pi[j]);
            kv.add("delta." + std::to_string(j), est.delta[j]);
        }
        kv.add("sigma_theta", est.sigma_theta);
        for (std::size_t k = 0; k < est.folds.size(); ++k) {
            const FoldEstimate& f = est.folds[k];
            std::string p = "fold." + std::to_string(k) + ".";
            kv.add(p + "theta", f.theta);
            kv.add(p + "n_units", f.n_units);
            kv.add(p + "n_rows", f.n_rows);
        }
        kv_weak_iv(kv, "", w);
        kv.add("model_rmse", est.model_rmse);
        kv.add("rmse_l", est.resid_rmse_l);
        kv.add("rmse_r", est.resid_rmse_r);
        kv.add("rmse_m", est.resid_rmse_m);
        if (o.with_2sls) {
            kv.add("tsls.controls", o.controls);
            kv.add("tsls.theta", tsls.theta);
            kv.add("tsls.se", tsls.se);
            for (int j = 0; j < fd.r; ++j) {
                kv.add("tsls.pi." + std::to_string(j), tsls.pi[j]);
                kv.add("tsls.delta." + std::to_string(j), tsls.delta[j]);
            }
            kv_weak_iv(kv, "tsls.", tsls.weak_iv);
            kv.add("tsls.model_rmse", tsls.model_rmse);
        }
        kv.write(os);
        return 0;
    }

    os << "panel iv dml estimate (version " << kVersion << ")\n\n";
    TableWriter meta({"rows", "dropped", "fd rows", "units", "instruments", "controls",
                      "folds", "learner"});
    meta.add_row({std::to_string(load.rows_read), std::to_string(load.rows_dropped_missing),
                  std::to_string(est.n_rows), std::to_string(est.n_units),
                  std::to_string(fd.r), std::to_string(fd.p), std::to_string(o.folds),
                  o.learner + (o.no_dictionary ? "" : "+dictionary") + (o.tune ? "+tune" : "")});
    meta.write(os);

    os << "\ntarget parameter\n";
    TableWriter t({"theta", "se", "wald lo", "wald hi"});
    t.add_row({fmt_num(est.theta), fmt_num(est.se), fmt_num(est.theta - hw),
               fmt_num(est.theta + hw)});
    t.write(os);

    os << "\nfirst stage and reduced form\n";
    TableWriter tp({"instrument", "pi", "delta"});
    for (int j = 0; j < fd.r; ++j) {
        tp.add_row({j < static_cast<int>(panel.z_names.size()) ? panel.z_names[j]
                                                               : std::to_string(j),
                    fmt_num(est.pi[j]), fmt_num(est.delta[j])});
    }
    tp.write(os);

    os << "\nper-fold estimates\n";
    TableWriter tk({"fold", "theta", "units", "rows"});
    for (std::size_t k = 0; k < est.folds.size(); ++k) {
        const FoldEstimate& f = est.folds[k];
        tk.add_row({std::to_string(k), fmt_num(f.theta), std::to_string(f.n_units),
                    std::to_string(f.n_rows)});
    }
    tk.write(os);

    os << "\n";
    table_weak_iv(os, w);

    os << "\nfit quality\n";
    TableWriter tq({"model rmse", "rmse l", "rmse r", "rmse m"});
    tq.add_row({fmt_num(est.model_rmse), fmt_num(est.resid_rmse_l), fmt_num(est.resid_rmse_r),
                fmt_num(est.resid_rmse_m)});
    tq.write(os);

    if (o.with_2sls) {
        os << "\n2sls baseline (controls=" << o.controls << ")\n";
        TableWriter tb({"theta", "se", "F", "AR p", "CS kind", "CS lo", "CS hi"});
        tb.add_row({fmt_num(tsls.theta), fmt_num(tsls.se), fmt_num(tsls.weak_iv.f_stat),
                    fmt_num(tsls.weak_iv.ar.pvalue), cs_kind_name(tsls.weak_iv.cs.kind),
                    fmt_num(tsls.weak_iv.cs.lo), fmt_num(tsls.weak_iv.cs.hi)});
        tb.write(os);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    std::string preset = "strong";
    int n_units = 100;
    int T = 10;
    int p = 30;
    int reps = 100;
    int folds = 3;
    std::vector<std::string> estimators;
    std::string controls = "none";
    bool tune = false;
    double level = 0.95;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;
    std::string format = "table";
};

std::string simulate_config_string(const SimulateOpts& o) {
    std::ostringstream s;
    s << "command=simulate\npreset=" << o.preset << "\nn_units=" << o.n_units << "\nT=" << o.T
      << "\np=" << o.p << "\nreps=" << o.reps << "\nfolds=" << o.folds
      << "\nestimators=" << join(o.estimators, ",") << "\ncontrols=" << o.controls
      << "\ntune=" << (o.tune ? 1 : 0) << "\nlevel=" << fmt_num(o.level) << "\nseed=" << o.seed
      << "\nthreads=" << o.threads << "\n";
    return s.str();
}

McEstimatorSpec make_estimator_spec(const std::string& name, const SimulateOpts& o) {
    McEstimatorSpec spec;
    spec.name = name;
    spec.K = o.folds;
    spec.tune = o.tune;
    if (name == "2sls") {
        spec.is_dml = false;
        spec.controls = parse_tsls_controls(o.controls);
        return spec;
    }
    const std::string prefix = "dml-";
    if (name.rfind(prefix, 0) == 0) {
        spec.is_dml = true;
        spec.learner.kind = parse_learner(name.substr(prefix.size()));
        spec.learner.dictionary = true;
        return spec;
    }
    throw DataError("unknown estimator: " + name +
                    " (expected 2sls or dml-{lasso|boosting|mlp|linear})");
}

int cmd_simulate(const SimulateOpts& o) {
    const std::string config = simulate_config_string(o);
    log_run("simulate", o.seed, config);

    McConfig cfg;
    cfg.dgp.n_units = o.n_units;
    cfg.dgp.T = o.T;
    cfg.dgp.p = o.p;
    if (o.preset == "strong") {
        cfg.dgp.pi = 0.8;
    } else if (o.preset == "weak") {
        cfg.dgp.pi = 0.001;
    } else {
        throw DataError("unknown preset: " + o.preset + " (expected strong or weak)");
    }
    cfg.R = o.reps;
    cfg.level = o.level;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    for (const auto& name : o.estimators) cfg.estimators.push_back(make_estimator_spec(name, o));

    McReport rep = run_replications(cfg);
    if (rep.aborted) throw NumericError("simulation aborted: " + rep.abort_reason);

    OutputSink sink(o.out);
    std::ostream& os = sink.stream();

    if (o.format == "kv") {
        KvWriter kv;
        kv.add("version", std::string(kVersion));
        kv.add("command", std::string("simulate"));
        kv.add("preset", o.preset);
        kv.add("n_units", o.n_units);
        kv.add("T", o.T);
        kv.add("p", o.p);
        kv.add("theta", cfg.dgp.theta);
        kv.add("pi", cfg.dgp.pi);
        kv.add("reps", o.reps);
        kv.add("folds", o.folds);
        kv.add("level", o.level);
        kv.add("seed", static_cast<long long>(o.seed));
        for (const auto& s : rep.summaries) {
            std::string p = "est." + s.name + ".";
            kv.add(p + "n_ok", s.n_ok);
            kv.add(p + "n_fail", s.n_fail);
            kv.add(p + "bias", s.bias);
            kv.add(p + "rmse", s.rmse);
            kv.add(p + "sd", s.sd);
            kv.add(p + "mean_se", s.mean_se);
            kv.add(p + "se_over_sd", s.se_over_sd);
            kv.add(p + "rmse_l", s.rmse_l);
            kv.add(p + "rmse_r", s.rmse_r);
            kv.add(p + "rmse_m", s.rmse_m);
            kv.add(p + "rmse_l_true", s.rmse_l_true);
            kv.add(p + "rmse_r_true", s.rmse_r_true);
            kv.add(p + "rmse_m_true", s.rmse_m_true);
            kv.add(p + "mean_f", s.mean_f);
            kv.add(p + "median_f", s.median_f);
            kv.add(p + "freq_f_gt_10", s.freq_f_gt_10);
            kv.add(p + "freq_f_gt_16_3", s.freq_f_gt_16_3);
            kv.add(p + "freq_f_gt_104_7", s.freq_f_gt_104_7);
            kv.add(p + "freq_ar_reject", s.freq_ar_reject);
            kv.add(p + "freq_bounded", s.freq_bounded);
            kv.add(p + "freq_half_line", s.freq_half_line);
            kv.add(p + "freq_disjoint", s.freq_disjoint);
            kv.add(p + "freq_real_line", s.freq_real_line);
            kv.add(p + "freq_empty", s.freq_empty);
            kv.add(p + "freq_cs_includes_zero", s.freq_cs_includes_zero);
            kv.add(p + "freq_cs_covers_truth", s.freq_cs_covers_truth);
            kv.add(p + "freq_cs_bounded_excl_zero", s.freq_cs_bounded_excl_zero);
        }
        kv.write(os);
        return 0;
    }

    os << "monte carlo (version " << kVersion << ")\n";
    os << "preset=" << o.preset << " n_units=" << o.n_units << " T=" << o.T << " p=" << o.p
       << " theta=" << fmt_num(cfg.dgp.theta) << " pi=" << fmt_num(cfg.dgp.pi)
       << " reps=" << o.reps << " folds=" << o.folds << " level=" << fmt_num(o.level)
       << " seed=" << o.seed << "\n\n";
    TableWriter t({"estimator", "bias", "rmse", "se/sd", "rmse l", "rmse r", "rmse m", "F",
                   "F>16.3", "F>104.7", "AR rej", "bounded", "half", "disjoint", "real line",
                   "incl 0", "fails"});
    for (const auto& s : rep.summaries) {
        t.add_row({s.name, fmt_num(s.bias), fmt_num(s.rmse), fmt_num(s.se_over_sd),
                   s.rmse_l > 0 ? fmt_num(s.rmse_l) : "--", s.rmse_r > 0 ? fmt_num(s.rmse_r) : "--",
                   s.rmse_m > 0 ? fmt_num(s.rmse_m) : "--", fmt_num(s.mean_f),
                   fmt_num(s.freq_f_gt_16_3), fmt_num(s.freq_f_gt_104_7),
                   fmt_num(s.freq_ar_reject), fmt_num(s.freq_bounded), fmt_num(s.freq_half_line),
                   fmt_num(s.freq_disjoint), fmt_num(s.freq_real_line),
                   fmt_num(s.freq_cs_includes_zero), std::to_string(s.n_fail)});
    }
    t.write(os);
    return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneOpts {
    std::string data;
    std::string unit, time, y, d;
    std::vector<std::string> z, x;
    std::string cluster;
    std::string target = "l";
    std::string learner = "boosting";
    bool no_dictionary = false;
    int n_eval = 5;
    int folds = 5;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "table";
};

std::string tune_config_string(const TuneOpts& o) {
    std::ostringstream s;
    s << "command=tune\ndata=" << o.data << "\nunit=" << o.unit << "\ntime=" << o.time
      << "\ny=" << o.y << "\nd=" << o.d << "\nz=" << join(o.z, ",") << "\nx=" << join(o.x, ",")
      << "\ntarget=" << o.target << "\nlearner=" << o.learner
      << "\ndictionary=" << (o.no_dictionary ? 0 : 1) << "\nn_eval=" << o.n_eval
      << "\nfolds=" << o.folds << "\nseed=" << o.seed << "\n";
    return s.str();
}

int cmd_tune(const TuneOpts& o) {
    const std::string config = tune_config_string(o);
    log_run("tune", o.seed, config);

    PanelSchema schema;
    schema.unit = o.unit;
    schema.time = o.time;
    schema.y = o.y;
    schema.d = o.d;
    schema.z = o.z;
    schema.x = o.x;
    schema.cluster = o.cluster;
    PanelData panel = load_panel(o.data, schema);
    FdData fd = first_difference(panel);

    int q = 0;
    std::vector<double> X = nuisance_features(fd, !o.no_dictionary, q);
    const std::vector<double>* target = nullptr;
    if (o.target == "l") {
        target = &fd.dy;
    } else if (o.target == "r") {
        target = &fd.dd;
    } else if (o.target == "m") {
        target = &fd.dz[0];
    } else {
        throw DataError("unknown tune target: " + o.target + " (expected l, r or m)");
    }

    LearnerSpec spec;
    spec.kind = parse_learner(o.learner);
    spec.dictionary = !o.no_dictionary;
    spec.seed = o.seed;
    TuneResult res = grid_search_tune(spec, X.data(), fd.n, q, target->data(), o.n_eval, o.folds);

    OutputSink sink(o.out);
    std::ostream& os = sink.stream();

    if (o.format == "kv") {
        KvWriter kv;
        kv.add("version", std::string(kVersion));
        kv.add("command", std::string("tune"));
        kv.add("seed", static_cast<long long>(o.seed));
        kv.add("target", o.target);
        kv.add("learner", o.learner);
        kv.add("dictionary", o.no_dictionary ? 0 : 1);
        kv.add("chosen", res.chosen);
        for (std::size_t i = 0; i < res.candidates.size(); ++i) {
            kv.add("candidate." + std::to_string(i) + ".params", res.candidates[i]);
            kv.add("candidate." + std::to_string(i) + ".cv_mse", res.cv_mse[i]);
        }
        if (spec.kind == LearnerKind::boosting) {
            kv.add("boosting.l2", res.spec.boosting.l2);
            kv.add("boosting.maxdepth", res.spec.boosting.maxdepth);
            kv.add("boosting.nrounds", res.spec.boosting.nrounds);
            kv.add("boosting.shrinkage", res.spec.boosting.shrinkage);
        } else if (spec.kind == LearnerKind::mlp) {
            kv.add("mlp.size", res.spec.mlp.size);
            kv.add("mlp.decay", res.spec.mlp.decay);
            kv.add("mlp.maxit", res.spec.mlp.maxit);
        }
        kv.write(os);
        return 0;
    }

    os << "learner tuning (version " << kVersion << ")\n";
    os << "target=" << o.target << " learner=" << o.learner << " n_eval=" << o.n_eval
       << " folds=" << o.folds << " seed=" << o.seed << "\n\n";
    TableWriter t({"candidate", "params", "cv mse", "chosen"});
    for (std::size_t i = 0; i < res.candidates.size(); ++i) {
        t.add_row({std::to_string(i), res.candidates[i], fmt_num(res.cv_mse[i]),
                   static_cast<int>(i) == res.chosen ? "*" : ""});
    }
    t.write(os);
    if (res.candidates.empty()) os << "learner has no tuned hyperparameters; spec echoed\n";
    return 0;
}

void add_schema_flags(CLI::App* cmd, std::string& data, std::string& unit, std::string& time,
                      std::string& y, std::string& d, std::vector<std::string>& z,
                      std::vector<std::string>& x, std::string& cluster) {
    cmd->add_option("--data", data, "input file (delimited text with a header row)")->required();
    cmd->add_option("--unit", unit, "unit id column")->required();
    cmd->add_option("--time", time, "time period column (integer)")->required();
    cmd->add_option("--y", y, "outcome column")->required();
    cmd->add_option("--d", d, "treatment column")->required();
    cmd->add_option("--z", z, "instrument column (repeatable)")->required();
    cmd->add_option("--x", x, "covariate column (repeatable)");
    cmd->add_option("--cluster", cluster, "cluster column (default: unit)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"panel instrumental-variable estimation with machine-learned nuisances"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key=value file (section.key=value)");

    EstimateOpts eo;
    CLI::App* est = app.add_subcommand("estimate", "estimate the treatment effect on panel data");
    add_schema_flags(est, eo.data, eo.unit, eo.time, eo.y, eo.d, eo.z, eo.x, eo.cluster);
    est->add_option("--folds", eo.folds, "cross-fitting folds K (default 3)");
    est->add_option("--learner", eo.learner, "nuisance learner: lasso, boosting, mlp or linear")
        ->check(CLI::IsMember({"lasso", "boosting", "mlp", "linear"}));
    est->add_flag("--no-dictionary", eo.no_dictionary, "use raw covariate pairs, no expansion");
    est->add_flag("--tune", eo.tune, "grid-search learner hyperparameters first");
    est->add_option("--level", eo.level, "confidence level (default 0.95)");
    est->add_option("--theta0", eo.theta0, "null value for the AR test (default 0)");
    est->add_option("--seed", eo.seed, "rng seed")->envname("PIVDML_SEED");
    est->add_flag("--with-2sls", eo.with_2sls, "also report the 2sls baseline");
    est->add_option("--controls", eo.controls, "2sls controls: none, current, pair or diff")
        ->check(CLI::IsMember({"none", "current", "pair", "diff"}));
    est->add_option("--out", eo.out, "output path (default stdout)");
    est->add_option("--format", eo.format, "output format")
        ->check(CLI::IsMember({"table", "kv"}));

    SimulateOpts so;
    CLI::App* sim = app.add_subcommand("simulate", "run a Monte Carlo preset");
    sim->add_option("--preset", so.preset, "design preset: strong or weak")
        ->check(CLI::IsMember({"strong", "weak"}));
    sim->add_option("--n-units", so.n_units, "panel units per replication (default 100)");
    sim->add_option("--t", so.T, "time periods (default 10)");
    sim->add_option("--p", so.p, "covariate count (default 30)");
    sim->add_option("--reps", so.reps, "replications (default 100)");
    sim->add_option("--folds", so.folds, "cross-fitting folds K (default 3)");
    sim->add_option("--estimator", so.estimators,
                    "estimator (repeatable): 2sls, dml-lasso, dml-boosting, dml-mlp, dml-linear");
    sim->add_option("--controls", so.controls, "2sls controls (default none)")
        ->check(CLI::IsMember({"none", "current", "pair", "diff"}));
    sim->add_flag("--tune", so.tune, "tune boosting/mlp before each replication");
    sim->add_option("--level", so.level, "confidence level (default 0.95)");
    sim->add_option("--seed", so.seed, "rng seed")->envname("PIVDML_SEED");
    sim->add_option("--threads", so.threads, "worker threads (results are thread-count invariant)");
    sim->add_option("--out", so.out, "output path (default stdout)");
    sim->add_option("--format", so.format, "output format")
        ->check(CLI::IsMember({"table", "kv"}));

    TuneOpts to;
    CLI::App* tun = app.add_subcommand("tune", "grid-search learner hyperparameters");
    add_schema_flags(tun, to.data, to.unit, to.time, to.y, to.d, to.z, to.x, to.cluster);
    tun->add_option("--target", to.target, "nuisance target: l (outcome), r (treatment), m (instrument)")
        ->check(CLI::IsMember({"l", "r", "m"}));
    tun->add_option("--learner", to.learner, "learner to tune")
        ->check(CLI::IsMember({"lasso", "boosting", "mlp", "linear"}));
    tun->add_flag("--no-dictionary", to.no_dictionary, "use raw covariate pairs, no expansion");
    tun->add_option("--n-eval", to.n_eval, "candidates to evaluate (default 5)");
    tun->add_option("--folds", to.folds, "cross-validation folds (default 5)");
    tun->add_option("--seed", to.seed, "rng seed")->envname("PIVDML_SEED");
    tun->add_option("--out", to.out, "output path (default stdout)");
    tun->add_option("--format", to.format, "output format")
        ->check(CLI::IsMember({"table", "kv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (est->parsed()) {
            if (eo.folds < 2) throw DataError("K >= 2 required (--folds)");
            if (!(eo.level > 0.0 && eo.level < 1.0)) throw DataError("--level must be in (0,1)");
            return cmd_estimate(eo);
        }
        if (sim->parsed()) {
            if (so.folds < 2) throw DataError("K >= 2 required (--folds)");
            if (!(so.level > 0.0 && so.level < 1.0)) throw DataError("--level must be in (0,1)");
            if (so.reps < 1) throw DataError("--reps must be positive");
            if (so.threads < 1) throw DataError("--threads must be positive");
            if (so.estimators.empty()) so.estimators = {"dml-lasso", "2sls"};
            return cmd_simulate(so);
        }
        if (tun->parsed()) {
            if (to.folds < 2) throw DataError("K >= 2 required (--folds)");
            return cmd_tune(to);
        }
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
