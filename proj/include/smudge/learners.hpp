#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "smudge/exceptions.hpp"
#include "smudge/preprocess.hpp"

namespace smudge {

enum class ClassifierKind { lda, qda, logreg, gaussian_nb, decision_tree, knn };

inline const char* classifier_kind_name(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::lda: return "lda";
    case ClassifierKind::qda: return "qda";
    case ClassifierKind::logreg: return "logreg";
    case ClassifierKind::gaussian_nb: return "gaussian_nb";
    case ClassifierKind::decision_tree: return "decision_tree";
    case ClassifierKind::knn: return "knn";
    }
    return "?";
}

inline std::optional<ClassifierKind> classifier_kind_from_name(std::string_view s) {
    if (s == "lda") return ClassifierKind::lda;
    if (s == "qda") return ClassifierKind::qda;
    if (s == "logreg") return ClassifierKind::logreg;
    if (s == "gaussian_nb") return ClassifierKind::gaussian_nb;
    if (s == "decision_tree") return ClassifierKind::decision_tree;
    if (s == "knn") return ClassifierKind::knn;
    return std::nullopt;
}

/// Fixed training constants. These are the project's documented defaults;
/// they are echoed into every experiment report.
struct Hyper {
    double ridge_scale = 1e-6;      // lda/qda covariance ridge: scale * trace / d
    double nb_var_floor = 1e-9;     // gaussian_nb per-feature variance floor
    double logreg_lambda = 1e-4;    // L2 strength on weights (not bias)
    double logreg_step = 0.1;       // gradient descent step size
    int logreg_max_epochs = 1000;
    double logreg_tol = 1e-6;       // stop when gradient infinity-norm drops below
    int tree_max_depth = 12;
    int tree_min_leaf = 5;
    int knn_k = 5;
};

// ---------------------------------------------------------------------------
// Small dense symmetric linear algebra (d is tiny here)
// ---------------------------------------------------------------------------

namespace linalg {

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix
/// stored row-major. Returns false if a pivot is not positive.
inline bool cholesky(const std::vector<double>& a, std::size_t d, std::vector<double>& l) {
    l.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * d + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                l[i * d + i] = std::sqrt(s);
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    return true;
}

/// Solves L L^T x = b in place.
inline void cholesky_solve(const std::vector<double>& l, std::size_t d, std::vector<double>& x) {
    for (std::size_t i = 0; i < d; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * d + k] * x[k];
        x[i] = s / l[i * d + i];
    }
    for (std::size_t ii = d; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < d; ++k) s -= l[k * d + ii] * x[k];
        x[ii] = s / l[ii * d + ii];
    }
}

inline double log_det_from_cholesky(const std::vector<double>& l, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += std::log(l[i * d + i]);
    return 2.0 * s;
}

} // namespace linalg

// ---------------------------------------------------------------------------
// Fitted models
// ---------------------------------------------------------------------------

namespace detail {

struct GaussianShared {
    std::vector<double> log_priors;
    std::vector<double> means;   // k * d
    std::vector<double> chol;    // pooled covariance Cholesky, d * d
};

struct GaussianPerClass {
    std::vector<double> log_priors;
    std::vector<double> means;        // k * d
    std::vector<double> chols;        // k * d * d
    std::vector<double> log_dets;     // k
};

struct NaiveBayes {
    std::vector<double> log_priors;
    std::vector<double> means; // k * d
    std::vector<double> vars;  // k * d
};

struct Logistic {
    std::vector<double> w;
    double b = 0.0;
    int epochs_run = 0;
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int label = 0;
};

struct Tree {
    std::vector<TreeNode> nodes;
};

struct Neighbors {
    std::vector<double> x; // training matrix copy
    std::vector<int> y;
    std::size_t n = 0;
    int k = 5;
};

} // namespace detail

/// A fitted classifier with a uniform predict contract. Immutable once
/// fitted; safe to share across threads.
class Classifier {
public:
    ClassifierKind kind() const { return kind_; }
    std::size_t n_classes() const { return k_; }
    std::size_t n_features() const { return d_; }

    std::vector<int> predict(const EncodedMatrix& m) const { return predict(m.x, m.n_rows, m.n_cols); }

    std::vector<int> predict(const std::vector<double>& x, std::size_t rows, std::size_t cols) const {
        if (rows > 0 && cols != d_)
            throw ConfigError("predict: expected " + std::to_string(d_) + " features, got " +
                              std::to_string(cols));
        std::vector<int> out(rows);
        for (std::size_t r = 0; r < rows; ++r) out[r] = predict_row(x.data() + r * cols);
        return out;
    }

    int predict_row(const double* row) const;

    /// Class posteriors for the generative families (lda, qda, gaussian_nb);
    /// normalized to sum to 1.
    std::vector<double> posteriors(const double* row) const;

    friend Classifier fit(ClassifierKind, const EncodedMatrix&, const Hyper&);

    const detail::Logistic& logistic() const { return std::get<detail::Logistic>(impl_); }
    const detail::Tree& tree() const { return std::get<detail::Tree>(impl_); }

private:
    ClassifierKind kind_ = ClassifierKind::lda;
    std::size_t k_ = 0, d_ = 0;
    std::variant<detail::GaussianShared, detail::GaussianPerClass, detail::NaiveBayes,
                 detail::Logistic, detail::Tree, detail::Neighbors>
        impl_;
};

// ---------------------------------------------------------------------------
// Logistic regression objective (exposed for gradient checks)
// ---------------------------------------------------------------------------

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Mean negative log-likelihood plus (lambda/2)*||w||^2, with its gradient.
inline double logreg_objective(const EncodedMatrix& m, const std::vector<double>& w, double b,
                               double lambda, std::vector<double>* grad_w = nullptr,
                               double* grad_b = nullptr) {
    const std::size_t n = m.n_rows, d = m.n_cols;
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    if (grad_w) grad_w->assign(d, 0.0);
    if (grad_b) *grad_b = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = m.row(r);
        double z = b;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * row[j];
        const double p = sigmoid(z);
        const double y = m.y[r] != 0 ? 1.0 : 0.0;
        const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
        loss -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
        const double diff = p - y;
        if (grad_w)
            for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += diff * row[j];
        if (grad_b) *grad_b += diff;
    }
    loss *= inv_n;
    double reg = 0.0;
    for (double wi : w) reg += wi * wi;
    loss += 0.5 * lambda * reg;
    if (grad_w)
        for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] = (*grad_w)[j] * inv_n + lambda * w[j];
    if (grad_b) *grad_b *= inv_n;
    return loss;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

namespace detail {

inline void class_partition(const EncodedMatrix& m, std::size_t k,
                            std::vector<std::vector<std::size_t>>& members) {
    members.assign(k, {});
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        const int y = m.y[r];
        if (y < 0 || static_cast<std::size_t>(y) >= k)
            throw ConfigError("fit: label out of range");
        members[static_cast<std::size_t>(y)].push_back(r);
    }
}

inline std::vector<double> class_means(const EncodedMatrix& m,
                                       const std::vector<std::vector<std::size_t>>& members) {
    const std::size_t k = members.size(), d = m.n_cols;
    std::vector<double> means(k * d, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r : members[c])
            for (std::size_t j = 0; j < d; ++j) means[c * d + j] += m.at(r, j);
        for (std::size_t j = 0; j < d; ++j) means[c * d + j] /= static_cast<double>(members[c].size());
    }
    return means;
}

inline void add_ridge(std::vector<double>& cov, std::size_t d, double scale) {
    double trace = 0.0;
    for (std::size_t j = 0; j < d; ++j) trace += cov[j * d + j];
    const double ridge = scale * trace / static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) cov[j * d + j] += ridge;
}

inline GaussianShared fit_lda(const EncodedMatrix& m, std::size_t k, const Hyper& hyper) {
    const std::size_t d = m.n_cols, n = m.n_rows;
    std::vector<std::vector<std::size_t>> members;
    class_partition(m, k, members);
    GaussianShared g;
    g.means = class_means(m, members);
    for (std::size_t c = 0; c < k; ++c)
        g.log_priors.push_back(std::log(static_cast<double>(members[c].size()) / static_cast<double>(n)));

    std::vector<double> cov(d * d, 0.0);
    std::vector<double> diff(d);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r : members[c]) {
            for (std::size_t j = 0; j < d; ++j) diff[j] = m.at(r, j) - g.means[c * d + j];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j <= i; ++j) cov[i * d + j] += diff[i] * diff[j];
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            cov[i * d + j] /= static_cast<double>(n);
            cov[j * d + i] = cov[i * d + j];
        }
    add_ridge(cov, d, hyper.ridge_scale);
    if (!linalg::cholesky(cov, d, g.chol))
        throw FitError("lda: pooled covariance is singular beyond ridge repair");
    return g;
}

inline GaussianPerClass fit_qda(const EncodedMatrix& m, std::size_t k, const Hyper& hyper) {
    const std::size_t d = m.n_cols, n = m.n_rows;
    std::vector<std::vector<std::size_t>> members;
    class_partition(m, k, members);
    GaussianPerClass g;
    g.means = class_means(m, members);
    g.chols.resize(k * d * d);
    std::vector<double> diff(d);
    for (std::size_t c = 0; c < k; ++c) {
        g.log_priors.push_back(std::log(static_cast<double>(members[c].size()) / static_cast<double>(n)));
        std::vector<double> cov(d * d, 0.0);
        for (std::size_t r : members[c]) {
            for (std::size_t j = 0; j < d; ++j) diff[j] = m.at(r, j) - g.means[c * d + j];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j <= i; ++j) cov[i * d + j] += diff[i] * diff[j];
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                cov[i * d + j] /= static_cast<double>(members[c].size());
                cov[j * d + i] = cov[i * d + j];
            }
        add_ridge(cov, d, hyper.ridge_scale);
        std::vector<double> l;
        if (!linalg::cholesky(cov, d, l))
            throw FitError("qda: covariance of class " + std::to_string(c) +
                           " is singular beyond ridge repair");
        std::copy(l.begin(), l.end(), g.chols.begin() + static_cast<std::ptrdiff_t>(c * d * d));
        g.log_dets.push_back(linalg::log_det_from_cholesky(l, d));
    }
    return g;
}

inline NaiveBayes fit_nb(const EncodedMatrix& m, std::size_t k, const Hyper& hyper) {
    const std::size_t d = m.n_cols, n = m.n_rows;
    std::vector<std::vector<std::size_t>> members;
    class_partition(m, k, members);
    NaiveBayes nb;
    nb.means = class_means(m, members);
    nb.vars.assign(k * d, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        nb.log_priors.push_back(std::log(static_cast<double>(members[c].size()) / static_cast<double>(n)));
        for (std::size_t r : members[c])
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = m.at(r, j) - nb.means[c * d + j];
                nb.vars[c * d + j] += diff * diff;
            }
        for (std::size_t j = 0; j < d; ++j) {
            nb.vars[c * d + j] /= static_cast<double>(members[c].size());
            nb.vars[c * d + j] = std::max(nb.vars[c * d + j], hyper.nb_var_floor);
        }
    }
    return nb;
}

inline Logistic fit_logreg(const EncodedMatrix& m, std::size_t k, const Hyper& hyper) {
    if (k != 2) throw FitError("logreg: binary targets only");
    Logistic lr;
    lr.w.assign(m.n_cols, 0.0);
    std::vector<double> grad_w;
    double grad_b = 0.0;
    for (int epoch = 0; epoch < hyper.logreg_max_epochs; ++epoch) {
        logreg_objective(m, lr.w, lr.b, hyper.logreg_lambda, &grad_w, &grad_b);
        double inf_norm = std::abs(grad_b);
        for (double g : grad_w) inf_norm = std::max(inf_norm, std::abs(g));
        lr.epochs_run = epoch + 1;
        if (inf_norm < hyper.logreg_tol) break;
        for (std::size_t j = 0; j < lr.w.size(); ++j) lr.w[j] -= hyper.logreg_step * grad_w[j];
        lr.b -= hyper.logreg_step * grad_b;
    }
    return lr;
}

inline double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

inline int majority_label(const std::vector<std::size_t>& counts) {
    // vote ties resolve to the smaller class code
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    return static_cast<int>(best);
}

struct TreeBuilder {
    const EncodedMatrix& m;
    const Hyper& hyper;
    std::size_t k;
    Tree tree;

    int build(std::vector<std::size_t>& rows, int depth) {
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t r : rows) ++counts[static_cast<std::size_t>(m.y[r])];
        const double node_gini = gini(counts, rows.size());

        TreeNode node;
        node.label = majority_label(counts);
        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(node);

        if (node_gini == 0.0 || depth >= hyper.tree_max_depth ||
            rows.size() < 2 * static_cast<std::size_t>(hyper.tree_min_leaf))
            return idx;

        // exhaustive best-split scan: every feature, every threshold between
        // distinct consecutive values; ties keep the first candidate
        double best_score = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::size_t> order(rows);
        std::vector<std::size_t> left_counts(k);
        for (std::size_t f = 0; f < m.n_cols; ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = m.at(a, f), vb = m.at(b, f);
                if (va != vb) return va < vb;
                return a < b;
            });
            std::fill(left_counts.begin(), left_counts.end(), 0);
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                ++left_counts[static_cast<std::size_t>(m.y[order[i]])];
                const double v = m.at(order[i], f);
                const double next = m.at(order[i + 1], f);
                if (v == next) continue;
                const std::size_t n_left = i + 1;
                const std::size_t n_right = order.size() - n_left;
                if (n_left < static_cast<std::size_t>(hyper.tree_min_leaf) ||
                    n_right < static_cast<std::size_t>(hyper.tree_min_leaf))
                    continue;
                std::vector<std::size_t> right_counts(k);
                for (std::size_t c = 0; c < k; ++c) right_counts[c] = counts[c] - left_counts[c];
                const double score =
                    (static_cast<double>(n_left) * gini(left_counts, n_left) +
                     static_cast<double>(n_right) * gini(right_counts, n_right)) /
                    static_cast<double>(order.size());
                if (score < best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = v + 0.5 * (next - v);
                }
            }
        }
        if (best_feature < 0) return idx;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows)
            (m.at(r, static_cast<std::size_t>(best_feature)) < best_threshold ? left : right)
                .push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[static_cast<std::size_t>(idx)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(idx)].threshold = best_threshold;
        const int l = build(left, depth + 1);
        tree.nodes[static_cast<std::size_t>(idx)].left = l;
        const int r = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(idx)].right = r;
        return idx;
    }
};

inline Tree fit_tree(const EncodedMatrix& m, std::size_t k, const Hyper& hyper) {
    TreeBuilder builder{m, hyper, k, {}};
    std::vector<std::size_t> rows(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) rows[r] = r;
    builder.build(rows, 0);
    return std::move(builder.tree);
}

inline Neighbors fit_knn(const EncodedMatrix& m, const Hyper& hyper) {
    if (hyper.knn_k < 1) throw ConfigError("knn: k must be >= 1");
    return Neighbors{m.x, m.y, m.n_rows, hyper.knn_k};
}

} // namespace detail

/// Fits one classifier family on an encoded matrix. Deterministic given
/// (data, kind, hyper): there is no randomized initialization, and every
/// tie-break is fixed (lowest index, smallest class code).
inline Classifier fit(ClassifierKind kind, const EncodedMatrix& m, const Hyper& hyper = {}) {
    if (m.n_rows == 0 || m.n_cols == 0) throw FitError("fit: empty training data");
    std::size_t k = 0;
    for (int y : m.y) {
        if (y < 0) throw FitError("fit: negative class code");
        k = std::max(k, static_cast<std::size_t>(y) + 1);
    }
    {
        std::vector<bool> present(k, false);
        for (int y : m.y) present[static_cast<std::size_t>(y)] = true;
        std::size_t distinct = 0;
        for (bool b : present) distinct += b ? 1 : 0;
        if (distinct < 2) throw FitError("fit: training data contains a single class");
    }

    Classifier c;
    c.kind_ = kind;
    c.k_ = k;
    c.d_ = m.n_cols;
    switch (kind) {
    case ClassifierKind::lda: c.impl_ = detail::fit_lda(m, k, hyper); break;
    case ClassifierKind::qda: c.impl_ = detail::fit_qda(m, k, hyper); break;
    case ClassifierKind::gaussian_nb: c.impl_ = detail::fit_nb(m, k, hyper); break;
    case ClassifierKind::logreg: c.impl_ = detail::fit_logreg(m, k, hyper); break;
    case ClassifierKind::decision_tree: c.impl_ = detail::fit_tree(m, k, hyper); break;
    case ClassifierKind::knn: c.impl_ = detail::fit_knn(m, hyper); break;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

inline std::vector<double> softmax_normalized(std::vector<double> log_scores) {
    const double mx = *std::max_element(log_scores.begin(), log_scores.end());
    double sum = 0.0;
    for (double& s : log_scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (double& s : log_scores) s /= sum;
    return log_scores;
}

inline std::vector<double> Classifier::posteriors(const double* row) const {
    const std::size_t d = d_, k = k_;
    std::vector<double> scores(k);
    if (const auto* g = std::get_if<detail::GaussianShared>(&impl_)) {
        std::vector<double> diff(d);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) diff[j] = row[j] - g->means[c * d + j];
            std::vector<double> solved = diff;
            linalg::cholesky_solve(g->chol, d, solved);
            double mahal = 0.0;
            for (std::size_t j = 0; j < d; ++j) mahal += diff[j] * solved[j];
            scores[c] = g->log_priors[c] - 0.5 * mahal;
        }
        return softmax_normalized(std::move(scores));
    }
    if (const auto* g = std::get_if<detail::GaussianPerClass>(&impl_)) {
        std::vector<double> diff(d);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) diff[j] = row[j] - g->means[c * d + j];
            std::vector<double> solved = diff;
            const std::vector<double> l(g->chols.begin() + static_cast<std::ptrdiff_t>(c * d * d),
                                        g->chols.begin() + static_cast<std::ptrdiff_t>((c + 1) * d * d));
            linalg::cholesky_solve(l, d, solved);
            double mahal = 0.0;
            for (std::size_t j = 0; j < d; ++j) mahal += diff[j] * solved[j];
            scores[c] = g->log_priors[c] - 0.5 * (g->log_dets[c] + mahal);
        }
        return softmax_normalized(std::move(scores));
    }
    if (const auto* nb = std::get_if<detail::NaiveBayes>(&impl_)) {
        constexpr double kLog2Pi = 1.8378770664093453;
        for (std::size_t c = 0; c < k; ++c) {
            double ll = nb->log_priors[c];
            for (std::size_t j = 0; j < d; ++j) {
                const double var = nb->vars[c * d + j];
                const double diff = row[j] - nb->means[c * d + j];
                ll -= 0.5 * (kLog2Pi + std::log(var) + diff * diff / var);
            }
            scores[c] = ll;
        }
        return softmax_normalized(std::move(scores));
    }
    throw ConfigError("posteriors are only defined for lda, qda and gaussian_nb");
}

inline int Classifier::predict_row(const double* row) const {
    if (const auto* lr = std::get_if<detail::Logistic>(&impl_)) {
        double z = lr->b;
        for (std::size_t j = 0; j < d_; ++j) z += lr->w[j] * row[j];
        return z >= 0.0 ? 1 : 0;
    }
    if (const auto* tree = std::get_if<detail::Tree>(&impl_)) {
        int idx = 0;
        while (tree->nodes[static_cast<std::size_t>(idx)].feature >= 0) {
            const auto& node = tree->nodes[static_cast<std::size_t>(idx)];
            idx = row[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                               : node.right;
        }
        return tree->nodes[static_cast<std::size_t>(idx)].label;
    }
    if (const auto* nn = std::get_if<detail::Neighbors>(&impl_)) {
        const std::size_t k_neighbors = std::min<std::size_t>(static_cast<std::size_t>(nn->k), nn->n);
        // (squared distance, training index); distance ties break on index
        std::vector<std::pair<double, std::size_t>> dist(nn->n);
        for (std::size_t r = 0; r < nn->n; ++r) {
            double s = 0.0;
            const double* t = nn->x.data() + r * d_;
            for (std::size_t j = 0; j < d_; ++j) {
                const double diff = row[j] - t[j];
                s += diff * diff;
            }
            dist[r] = {s, r};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_neighbors),
                          dist.end());
        std::vector<std::size_t> votes(k_, 0);
        for (std::size_t i = 0; i < k_neighbors; ++i)
            ++votes[static_cast<std::size_t>(nn->y[dist[i].second])];
        return detail::majority_label(votes);
    }
    // generative families share the posterior path; argmax ties keep the
    // smaller class code
    const std::vector<double> post = posteriors(row);
    std::size_t best = 0;
    for (std::size_t c = 1; c < post.size(); ++c)
        if (post[c] > post[best]) best = c;
    return static_cast<int>(best);
}

} // namespace smudge
