#ifndef PIVDML_BOOSTING_HPP
#define PIVDML_BOOSTING_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "numeric.hpp"

namespace pivdml {

// Gradient boosted regression trees for squared error: stagewise fits of
// shallow CART trees to residuals. Splits are exact greedy on midpoints
// between distinct feature values, chosen by variance reduction. Leaf values
// shrink toward zero when l2 > 0.
struct BoostParams {
    int nrounds = 100;
    double shrinkage = 0.1;
    int maxdepth = 3;      // tree depth in edges, 1 gives a stump
    double l2 = 0.0;       // leaf value = sum(resid) / (n_leaf + l2)
    int min_leaf = 2;
};

struct BoostTreeNode {
    int feature = -1;      // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct BoostTree {
    std::vector<BoostTreeNode> nodes;

    template <typename GetX>
    double traverse(GetX&& x) const {
        int k = 0;
        while (nodes[k].feature >= 0) {
            k = (x(nodes[k].feature) <= nodes[k].threshold) ? nodes[k].left : nodes[k].right;
        }
        return nodes[k].value;
    }
};

struct BoostFit {
    double base = 0.0;
    double shrinkage = 0.1;
    std::vector<BoostTree> trees;

    double predict_row(const double* x) const {
        double s = base;
        for (const auto& t : trees) s += shrinkage * t.traverse([&](int j) { return x[j]; });
        return s;
    }

    // X is column major with n rows.
    void predict(const double* X, int n, int q, double* out) const {
        (void)q;
        for (int i = 0; i < n; ++i) {
            double s = base;
            for (const auto& t : trees) {
                s += shrinkage * t.traverse([&](int j) { return X[static_cast<std::size_t>(j) * n + i]; });
            }
            out[i] = s;
        }
    }
};

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Builds one regression tree on the given rows against resid.
class TreeBuilder {
public:
    TreeBuilder(const double* X, int n, int q, const std::vector<double>& resid,
                const BoostParams& params)
        : X_(X), n_(n), q_(q), resid_(resid), params_(params) {}

    BoostTree build(std::vector<int> rows) {
        BoostTree tree;
        grow(tree, std::move(rows), 0);
        return tree;
    }

private:
    int grow(BoostTree& tree, std::vector<int> rows, int depth) {
        int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        double sum = 0.0;
        for (int i : rows) sum += resid_[i];
        int m = static_cast<int>(rows.size());
        tree.nodes[node_id].value = sum / (m + params_.l2);

        if (depth >= params_.maxdepth || m < 2 * params_.min_leaf) return node_id;

        SplitChoice best = find_split(rows, sum);
        if (!best.found) return node_id;

        std::vector<int> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        const double* xc = X_ + static_cast<std::size_t>(best.feature) * n_;
        for (int i : rows) (xc[i] <= best.threshold ? left_rows : right_rows).push_back(i);

        tree.nodes[node_id].feature = best.feature;
        tree.nodes[node_id].threshold = best.threshold;
        rows.clear();
        rows.shrink_to_fit();
        int l = grow(tree, std::move(left_rows), depth + 1);
        tree.nodes[node_id].left = l;
        int rgt = grow(tree, std::move(right_rows), depth + 1);
        tree.nodes[node_id].right = rgt;
        return node_id;
    }

    SplitChoice find_split(const std::vector<int>& rows, double sum) {
        int m = static_cast<int>(rows.size());
        SplitChoice best;
        double parent = sum * sum / m;

        std::vector<std::pair<double, double>> vals(m);
        for (int j = 0; j < q_; ++j) {
            const double* xc = X_ + static_cast<std::size_t>(j) * n_;
            for (int k = 0; k < m; ++k) vals[k] = {xc[rows[k]], resid_[rows[k]]};
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double lsum = 0.0;
            for (int k = 0; k < m - 1; ++k) {
                lsum += vals[k].second;
                int nl = k + 1;
                int nr = m - nl;
                if (nl < params_.min_leaf) continue;
                if (nr < params_.min_leaf) break;
                if (!(vals[k].first < vals[k + 1].first)) continue;
                double rsum = sum - lsum;
                double gain = lsum * lsum / nl + rsum * rsum / nr - parent;
                if (gain > best.gain && gain > 0.0) {
                    best.found = true;
                    best.feature = j;
                    best.threshold = 0.5 * (vals[k].first + vals[k + 1].first);
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    const double* X_;
    int n_, q_;
    const std::vector<double>& resid_;
    const BoostParams& params_;
};

} // namespace detail

inline BoostFit fit_boosting(const double* X, int n, int q, const double* y,
                             const BoostParams& params) {
    if (n < 1) throw DataError("boosting: empty training set");
    if (params.nrounds < 0 || params.maxdepth < 1) throw DataError("boosting: invalid parameters");

    BoostFit fit;
    fit.shrinkage = params.shrinkage;
    double base = 0.0;
    for (int i = 0; i < n; ++i) base += y[i];
    base /= n;
    fit.base = base;

    std::vector<double> resid(n);
    for (int i = 0; i < n; ++i) resid[i] = y[i] - base;

    std::vector<int> all_rows(n);
    for (int i = 0; i < n; ++i) all_rows[i] = i;

    fit.trees.reserve(params.nrounds);
    for (int round = 0; round < params.nrounds; ++round) {
        detail::TreeBuilder builder(X, n, q, resid, params);
        BoostTree tree = builder.build(all_rows);
        for (int i = 0; i < n; ++i) {
            double pred = tree.traverse([&](int j) { return X[static_cast<std::size_t>(j) * n + i]; });
            resid[i] -= params.shrinkage * pred;
        }
        fit.trees.push_back(std::move(tree));
    }
    return fit;
}

} // namespace pivdml

#endif
