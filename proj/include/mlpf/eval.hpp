#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlpf/events.hpp"

namespace mlpf {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

// ROC sweep: one point per distinct score plus the (0,0) endpoint; the
// lowest threshold classifies everything as signal, giving (1,1).
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

// Classification rule: score >= threshold means signal, matching classify().
inline RocCurve roc_curve(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size())
        throw EvalError("scores and labels differ in length");
    std::size_t n_signal = 0;
    for (const Label l : labels) n_signal += l == Label::signal;
    const std::size_t n_noise = scores.size() - n_signal;
    if (n_signal == 0 || n_noise == 0)
        throw EvalError("ROC needs both signal and noise samples");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

    long double area = 0.0L;
    std::size_t tp = 0, fp = 0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {  // whole tie group at once
            if (labels[order[i]] == Label::signal)
                ++tp;
            else
                ++fp;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(n_noise);
        const double tpr = static_cast<double>(tp) / static_cast<double>(n_signal);
        area += static_cast<long double>(fpr - prev_fpr) * (tpr + prev_tpr) / 2.0L;
        curve.points.push_back({s, fpr, tpr});
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = static_cast<double>(area);
    return curve;
}

// Trapezoidal integral over FPR.
inline double auc(const RocCurve& curve) {
    if (curve.points.size() < 2) throw EvalError("curve has no sweep points");
    long double area = 0.0L;
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        area += static_cast<long double>(curve.points[i].fpr - curve.points[i - 1].fpr) *
                (curve.points[i].tpr + curve.points[i - 1].tpr) / 2.0L;
    return static_cast<double>(area);
}

inline std::pair<double, double> tpr_fpr_at(std::span<const double> scores,
                                            std::span<const Label> labels, double threshold) {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted_signal = scores[i] >= threshold;
        if (labels[i] == Label::signal)
            predicted_signal ? ++tp : ++fn;
        else
            predicted_signal ? ++fp : ++tn;
    }
    if (tp + fn == 0 || fp + tn == 0)
        throw EvalError("confusion counts need both signal and noise samples");
    return {static_cast<double>(tp) / static_cast<double>(tp + fn),
            static_cast<double>(fp) / static_cast<double>(fp + tn)};
}

// ROC CSV: threshold,fpr,tpr rows followed by a summary comment with the AUC.
inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
    out << "threshold,fpr,tpr\n";
    out.precision(17);
    for (const RocPoint& p : curve.points)
        out << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
    out << "# auc = " << curve.auc << '\n';
}

}  // namespace mlpf
