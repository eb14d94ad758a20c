#include "eval/roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "common/error.hpp"

namespace nd::eval {

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::Dimension, "scores and labels differ in length");
    std::size_t pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] > 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
        if (std::isnan(scores[i])) throw Error(ErrorCode::Numeric, "score is NaN");
        pos += labels[i];
    }
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw Error(ErrorCode::InvalidArgument, "ROC needs both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    RocCurve c;
    c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double t = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == t; ++i) (labels[order[i]] ? tp : fp) += 1;
        c.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos), t});
    }
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        const auto& a = c.points[i - 1];
        const auto& b = c.points[i];
        c.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return c;
}

OperatingPoint operating_point(const RocCurve& curve, double min_tpr) {
    for (const auto& p : curve.points)
        if (p.tpr >= min_tpr) return {p.threshold, p.tpr, p.fpr};
    const auto& last = curve.points.back();
    return {last.threshold, last.tpr, last.fpr};
}

}  // namespace nd::eval
