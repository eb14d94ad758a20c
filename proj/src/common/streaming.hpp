#pragma once

#include <memory>
#include <string>

namespace nd {

/// One step of a per-sample classifier.
///   score    - continuous detection statistic (envelope, probability) used for ROC sweeps
///   label    - thresholded decision at the classifier's operating point
///   response - value averaged by tone-sweep maps, always in [0, 1]
struct StreamOutput {
    double score = 0.0;
    bool label = false;
    double response = 0.0;
};

/// Sample-rate streaming interface shared by the filter chain and the windowed
/// networks. Inputs are in full-scale units ([-1, 1]).
class StreamingClassifier {
public:
    virtual ~StreamingClassifier() = default;

    virtual StreamOutput step(double x) = 0;
    virtual void reset() = 0;
    virtual std::unique_ptr<StreamingClassifier> clone() const = 0;
    virtual std::string name() const = 0;
};

}  // namespace nd
