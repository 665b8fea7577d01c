#ifndef PIVDML_NUMERIC_HPP
#define PIVDML_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pivdml {

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

// Regularized lower incomplete gamma by series expansion, for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NumericError("incomplete gamma series did not converge");
}

// Regularized upper incomplete gamma by continued fraction, for x >= a + 1.
inline double gamma_q_contfrac(double a, double x) {
    const double fpmin = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= 1e-16) {
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
        }
    }
    throw NumericError("incomplete gamma continued fraction did not converge");
}

} // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
        if (std::isinf(x) && x > 0.0) return 1.0;
        throw NumericError("gamma_p: invalid arguments");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
        if (std::isinf(x) && x > 0.0) return 0.0;
        throw NumericError("gamma_q: invalid arguments");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

inline double chi2_cdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * df, 0.5 * x);
}

// Survival function, 1 - cdf, computed without cancellation for large x.
inline double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

inline double chi2_pdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    double a = 0.5 * df;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

// Inverse CDF. Wilson-Hilferty start, Newton refinement, bisection fallback.
inline double chi2_quantile(double p, double df) {
    if (!(df > 0.0)) throw NumericError("chi2_quantile: df must be positive");
    if (!(p >= 0.0 && p < 1.0)) throw NumericError("chi2_quantile: p must be in [0,1)");
    if (p == 0.0) return 0.0;

    double x;
    {
        // Wilson-Hilferty approximation via a rational normal quantile start
        double t = std::sqrt(-2.0 * std::log(p < 0.5 ? p : 1.0 - p));
        double z = t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t);
        if (p < 0.5) z = -z;
        double a = 2.0 / (9.0 * df);
        double c = 1.0 - a + z * std::sqrt(a);
        x = df * c * c * c;
        if (!(x > 0.0) || !std::isfinite(x)) x = df;
    }

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        double f = chi2_cdf(x, df) - p;
        if (f > 0.0) hi = x; else lo = x;
        double d = chi2_pdf(x, df);
        double step = (d > 0.0) ? f / d : 0.0;
        double next = x - step;
        if (!(next > lo && (next < hi || !std::isfinite(hi)))) {
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * (lo + 1.0);
        }
        if (std::fabs(next - x) <= 1e-14 * (1.0 + std::fabs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

inline double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

} // namespace pivdml

#endif
