#pragma once

#include <cstddef>
#include <vector>

#include "smudge/exceptions.hpp"

namespace smudge {

/// Binary confusion counts; the positive class is label 1.
struct ConfusionMatrix {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
};

inline ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw ConfigError("confusion: label vectors have different lengths");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if ((t != 0 && t != 1) || (p != 0 && p != 1))
            throw ConfigError("confusion: labels must be 0 or 1");
        if (t == 1)
            p == 1 ? ++cm.tp : ++cm.fn;
        else
            p == 1 ? ++cm.fp : ++cm.tn;
    }
    return cm;
}

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Accuracy, precision, recall and F1 (harmonic mean of precision and
/// recall); 0/0 cases resolve to 0 by convention.
inline Metrics metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw ConfigError("metrics: empty confusion matrix");
    Metrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    m.precision = (cm.tp + cm.fp) ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp) : 0.0;
    m.recall = (cm.tp + cm.fn) ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

inline Metrics evaluate(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    return metrics(confusion(y_true, y_pred));
}

} // namespace smudge
