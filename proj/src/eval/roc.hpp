#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nd::eval {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    /// Scores >= threshold are called positive; +inf for the (0, 0) corner.
    double threshold = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Sweeps every distinct score from high to low. Tied scores move FPR and TPR
/// together, so the trapezoidal AUC equals the Mann-Whitney statistic with
/// ties counted as one half.
RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Highest threshold whose TPR reaches `min_tpr`, with the FPR at that point.
struct OperatingPoint {
    double threshold = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};
OperatingPoint operating_point(const RocCurve& curve, double min_tpr);

}  // namespace nd::eval
