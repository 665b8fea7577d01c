#ifndef PIVDML_DICTIONARY_HPP
#define PIVDML_DICTIONARY_HPP

#include <string>
#include <vector>

#include "numeric.hpp"

namespace pivdml {

// Extended polynomial dictionary over p base columns:
// all linear terms, squares, cubes, then pairwise interactions x_j * x_k
// for j < k in lexicographic order. Total p * 3 + p * (p - 1) / 2 columns.
inline int dictionary_size(int p) {
    return 3 * p + p * (p - 1) / 2;
}

inline std::vector<std::string> dictionary_names(const std::vector<std::string>& base) {
    int p = static_cast<int>(base.size());
    std::vector<std::string> names;
    names.reserve(dictionary_size(p));
    for (int j = 0; j < p; ++j) names.push_back(base[j]);
    for (int j = 0; j < p; ++j) names.push_back(base[j] + "^2");
    for (int j = 0; j < p; ++j) names.push_back(base[j] + "^3");
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) names.push_back(base[j] + ":" + base[k]);
    }
    return names;
}

// Expands one observation. x has p entries, out must hold dictionary_size(p).
inline void dictionary_row(const double* x, int p, double* out) {
    int c = 0;
    for (int j = 0; j < p; ++j) out[c++] = x[j];
    for (int j = 0; j < p; ++j) out[c++] = x[j] * x[j];
    for (int j = 0; j < p; ++j) out[c++] = x[j] * x[j] * x[j];
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) out[c++] = x[j] * x[k];
    }
}

// Expands column-major base data (p vectors of length n) into a column-major
// flat matrix of size n * dictionary_size(p).
inline std::vector<double> dictionary_matrix(const std::vector<std::vector<double>>& cols) {
    int p = static_cast<int>(cols.size());
    if (p == 0) throw DataError("dictionary expansion requires at least one column");
    std::size_t n = cols[0].size();
    int q = dictionary_size(p);
    std::vector<double> out(n * static_cast<std::size_t>(q));
    std::size_t c = 0;
    auto col = [&](std::size_t idx) { return out.data() + idx * n; };
    for (int j = 0; j < p; ++j) {
        const double* xj = cols[j].data();
        double* o = col(c++);
        for (std::size_t i = 0; i < n; ++i) o[i] = xj[i];
    }
    for (int j = 0; j < p; ++j) {
        const double* xj = cols[j].data();
        double* o = col(c++);
        for (std::size_t i = 0; i < n; ++i) o[i] = xj[i] * xj[i];
    }
    for (int j = 0; j < p; ++j) {
        const double* xj = cols[j].data();
        double* o = col(c++);
        for (std::size_t i = 0; i < n; ++i) o[i] = xj[i] * xj[i] * xj[i];
    }
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            const double* xj = cols[j].data();
            const double* xk = cols[k].data();
            double* o = col(c++);
            for (std::size_t i = 0; i < n; ++i) o[i] = xj[i] * xk[i];
        }
    }
    return out;
}

// Copies raw base columns into a column-major flat matrix without expansion.
inline std::vector<double> flat_matrix(const std::vector<std::vector<double>>& cols) {
    int p = static_cast<int>(cols.size());
    if (p == 0) throw DataError("feature matrix requires at least one column");
    std::size_t n = cols[0].size();
    std::vector<double> out(n * static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double* xj = cols[j].data();
        double* o = out.data() + static_cast<std::size_t>(j) * n;
        for (std::size_t i = 0; i < n; ++i) o[i] = xj[i];
    }
    return out;
}

} // namespace pivdml

#endif
