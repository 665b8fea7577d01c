#ifndef PIVDML_WEAK_IV_HPP
#define PIVDML_WEAK_IV_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "numeric.hpp"

namespace pivdml {

// Conventional first-stage thresholds used in reporting.
inline constexpr double kFRuleOfThumb = 10.0;
inline constexpr double kFStockYogo = 16.30;
inline constexpr double kFLee = 104.7;

// Effective first-stage F: pi' Var(pi)^{-1} pi / r.
inline double f_statistic(const Eigen::VectorXd& pi, const Eigen::MatrixXd& sigma_pi) {
    int r = static_cast<int>(pi.size());
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_pi);
    if (llt.info() != Eigen::Success) {
        throw NumericError("variance of first-stage coefficients is not positive definite");
    }
    return pi.dot(llt.solve(pi)) / r;
}

struct ArResult {
    double stat = 0.0;
    double pvalue = 1.0;
};

// Anderson-Rubin statistic with the variance held fixed at the estimate of
// Var(delta): (delta - pi * theta0)' Sigma^{-1} (delta - pi * theta0).
inline ArResult ar_statistic(const Eigen::VectorXd& delta, const Eigen::VectorXd& pi,
                             const Eigen::MatrixXd& sigma_delta, double theta0) {
    Eigen::VectorXd g = delta - pi * theta0;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_delta);
    if (llt.info() != Eigen::Success) {
        throw NumericError("variance of reduced-form coefficients is not positive definite");
    }
    ArResult res;
    res.stat = g.dot(llt.solve(g));
    res.pvalue = chi2_sf(res.stat, static_cast<double>(delta.size()));
    return res;
}

// Anderson-Rubin statistic with the null-dependent variance of the moment
// delta - pi * theta0, using the joint covariance of (delta, pi):
//   V(theta0) = S_dd - theta0 (S_dp + S_dp') + theta0^2 S_pp.
inline ArResult ar_statistic(const Eigen::VectorXd& delta, const Eigen::VectorXd& pi,
                             const Eigen::MatrixXd& sigma_delta, const Eigen::MatrixXd& sigma_pi,
                             const Eigen::MatrixXd& sigma_delta_pi, double theta0) {
    Eigen::VectorXd g = delta - pi * theta0;
    Eigen::MatrixXd V = sigma_delta - theta0 * (sigma_delta_pi + sigma_delta_pi.transpose()) +
                        theta0 * theta0 * sigma_pi;
    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success) {
        throw NumericError("null-dependent moment variance is not positive definite");
    }
    ArResult res;
    res.stat = g.dot(llt.solve(g));
    res.pvalue = chi2_sf(res.stat, static_cast<double>(delta.size()));
    return res;
}

enum class CsKind { bounded, half_line, disjoint, real_line, empty };

inline std::string cs_kind_name(CsKind k) {
    switch (k) {
        case CsKind::bounded: return "bounded";
        case CsKind::half_line: return "half_line";
        case CsKind::disjoint: return "disjoint";
        case CsKind::real_line: return "real_line";
        case CsKind::empty: return "empty";
    }
    return "?";
}

// Confidence set from inverting the AR test. For bounded and half_line the
// set is [lo, hi] (with an infinite endpoint for half lines); for disjoint
// it is (-inf, lo] union [hi, inf); real_line and empty need no endpoints.
struct ArConfidenceSet {
    CsKind kind = CsKind::bounded;
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;

    bool contains(double t) const {
        switch (kind) {
            case CsKind::empty: return false;
            case CsKind::real_line: return true;
            case CsKind::disjoint: return t <= lo || t >= hi;
            default: return t >= lo && t <= hi;
        }
    }
};

namespace detail {

// Classifies { theta : a theta^2 - 2 b theta + c <= 0 }.
inline ArConfidenceSet classify_quadratic(double a, double b, double c, double level) {
    ArConfidenceSet cs;
    cs.level = level;
    const double inf = std::numeric_limits<double>::infinity();
    double scale = std::max({std::fabs(b), std::fabs(c), 1.0});

    if (std::fabs(a) < 1e-12 * scale) {
        if (std::fabs(b) < 1e-12 * std::max(std::fabs(c), 1.0)) {
            cs.kind = (c <= 0.0) ? CsKind::real_line : CsKind::empty;
            cs.lo = (cs.kind == CsKind::real_line) ? -inf : 0.0;
            cs.hi = (cs.kind == CsKind::real_line) ? inf : 0.0;
            return cs;
        }
        cs.kind = CsKind::half_line;
        double bound = c / (2.0 * b);
        if (b > 0.0) {
            cs.lo = bound;
            cs.hi = inf;
        } else {
            cs.lo = -inf;
            cs.hi = bound;
        }
        return cs;
    }

    double disc = b * b - a * c;
    if (a > 0.0) {
        if (disc < 0.0) {
            cs.kind = CsKind::empty;
            return cs;
        }
        double s = std::sqrt(disc);
        cs.kind = CsKind::bounded;
        cs.lo = (b - s) / a;
        cs.hi = (b + s) / a;
        return cs;
    }
    if (disc < 0.0) {
        cs.kind = CsKind::real_line;
        cs.lo = -inf;
        cs.hi = inf;
        return cs;
    }
    double s = std::sqrt(disc);
    cs.kind = CsKind::disjoint;
    cs.lo = (b + s) / a;
    cs.hi = (b - s) / a;
    return cs;
}

} // namespace detail

// Inverts the fixed-variance AR test. Valid for any number of instruments.
inline ArConfidenceSet ar_confidence_set(const Eigen::VectorXd& delta, const Eigen::VectorXd& pi,
                                         const Eigen::MatrixXd& sigma_delta, double level) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_delta);
    if (llt.info() != Eigen::Success) {
        throw NumericError("variance of reduced-form coefficients is not positive definite");
    }
    double qcrit = chi2_quantile(level, static_cast<double>(delta.size()));
    Eigen::VectorXd sp = llt.solve(pi);
    Eigen::VectorXd sd = llt.solve(delta);
    double a = pi.dot(sp);
    double b = pi.dot(sd);
    double c = delta.dot(sd) - qcrit;
    return detail::classify_quadratic(a, b, c, level);
}

// Inverts the null-dependent AR test for a single instrument, where the
// quadratic has closed form:
//   (delta - pi t)^2 <= qcrit * (S_dd - 2 t S_dp + t^2 S_pp).
inline ArConfidenceSet ar_confidence_set(const Eigen::VectorXd& delta, const Eigen::VectorXd& pi,
                                         const Eigen::MatrixXd& sigma_delta,
                                         const Eigen::MatrixXd& sigma_pi,
                                         const Eigen::MatrixXd& sigma_delta_pi, double level) {
    if (delta.size() != 1) {
        throw NumericError("the null-dependent confidence set requires a single instrument");
    }
    double qcrit = chi2_quantile(level, 1.0);
    double d = delta[0], p = pi[0];
    double a = p * p - qcrit * sigma_pi(0, 0);
    double b = d * p - qcrit * sigma_delta_pi(0, 0);
    double c = d * d - qcrit * sigma_delta(0, 0);
    return detail::classify_quadratic(a, b, c, level);
}

// First-stage and identification-robust summary for a fitted model.
struct WeakIvReport {
    double f_stat = 0.0;
    ArResult ar;
    ArConfidenceSet cs;
    double theta0 = 0.0;
    double level = 0.95;
};

// Uses the null-dependent variance when a single instrument is present,
// otherwise the fixed-variance forms, so the test and the set always invert
// each other.
inline WeakIvReport make_weak_iv_report(const Eigen::VectorXd& delta, const Eigen::VectorXd& pi,
                                        const Eigen::MatrixXd& sigma_delta,
                                        const Eigen::MatrixXd& sigma_pi,
                                        const Eigen::MatrixXd& sigma_delta_pi, double level,
                                        double theta0) {
    WeakIvReport rep;
    rep.level = level;
    rep.theta0 = theta0;
    rep.f_stat = f_statistic(pi, sigma_pi);
    if (delta.size() == 1) {
        rep.ar = ar_statistic(delta, pi, sigma_delta, sigma_pi, sigma_delta_pi, theta0);
        rep.cs = ar_confidence_set(delta, pi, sigma_delta, sigma_pi, sigma_delta_pi, level);
    } else {
        rep.ar = ar_statistic(delta, pi, sigma_delta, theta0);
        rep.cs = ar_confidence_set(delta, pi, sigma_delta, level);
    }
    return rep;
}

} // namespace pivdml

#endif
