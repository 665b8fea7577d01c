#ifndef PIVDML_OLS_HPP
#define PIVDML_OLS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace pivdml {

// Least squares with a rank check. Throws DataError listing the columns a
// rank-revealing QR would discard when the design is rank deficient.
inline Eigen::VectorXd ols_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const std::vector<std::string>* names = nullptr) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        std::string msg = "design matrix is rank deficient; offending columns:";
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < X.cols(); ++k) {
            int col = perm[k];
            if (names && col < static_cast<int>(names->size())) {
                msg += " " + (*names)[col];
            } else {
                msg += " #" + std::to_string(col);
            }
        }
        throw DataError(msg);
    }
    return qr.solve(y);
}

// Residuals from regressing y on [1, C]. C may have zero columns, in which
// case this demeans y.
inline Eigen::VectorXd partial_out(const Eigen::VectorXd& y, const Eigen::MatrixXd& C,
                                   const std::vector<std::string>* names = nullptr) {
    Eigen::MatrixXd X(y.size(), C.cols() + 1);
    X.col(0).setOnes();
    if (C.cols() > 0) X.rightCols(C.cols()) = C;
    std::vector<std::string> full_names;
    if (names) {
        full_names.push_back("(intercept)");
        full_names.insert(full_names.end(), names->begin(), names->end());
    }
    Eigen::VectorXd beta = ols_solve(X, y, names ? &full_names : nullptr);
    return y - X * beta;
}

// Linear regression fit with intercept, for use as a nuisance learner.
struct LinearFit {
    double intercept = 0.0;
    std::vector<double> beta;

    double predict_row(const double* x) const {
        double s = intercept;
        for (std::size_t j = 0; j < beta.size(); ++j) s += beta[j] * x[j];
        return s;
    }

    // X is column major with n rows.
    void predict(const double* X, int n, int q, double* out) const {
        for (int i = 0; i < n; ++i) out[i] = intercept;
        for (int j = 0; j < q && j < static_cast<int>(beta.size()); ++j) {
            const double* col = X + static_cast<std::size_t>(j) * n;
            double b = beta[j];
            if (b == 0.0) continue;
            for (int i = 0; i < n; ++i) out[i] += b * col[i];
        }
    }
};

// Fits least squares with intercept on a column-major matrix. Uses a
// minimum-norm solution when columns are collinear so the learner is usable
// on arbitrary dictionaries.
inline LinearFit fit_linear(const double* X, int n, int q, const double* y) {
    Eigen::MatrixXd A(n, q + 1);
    A.col(0).setOnes();
    for (int j = 0; j < q; ++j) {
        A.col(j + 1) = Eigen::Map<const Eigen::VectorXd>(X + static_cast<std::size_t>(j) * n, n);
    }
    Eigen::Map<const Eigen::VectorXd> yv(y, n);
    Eigen::VectorXd beta = A.completeOrthogonalDecomposition().solve(yv);
    LinearFit fit;
    fit.intercept = beta[0];
    fit.beta.assign(q, 0.0);
    for (int j = 0; j < q; ++j) fit.beta[j] = beta[j + 1];
    return fit;
}

} // namespace pivdml

#endif
