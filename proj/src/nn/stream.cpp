#include "nn/stream.hpp"

#include "common/error.hpp"

namespace nd::nn {

double forward(const Network& net, std::span<const double> window) {
    return std::visit(
        [&](const auto& m) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MlpModel>)
                return mlp_forward(m, window);
            else
                return mlp_forward_quantized(m, window);
        },
        net);
}

std::size_t input_len(const Network& net) {
    return std::visit([](const auto& m) { return m.input_len; }, net);
}

WindowedNetClassifier::WindowedNetClassifier(std::shared_ptr<const Network> net, WindowedOptions options)
    : net_(std::move(net)), options_(options), consensus_(options.threshold, options.rule) {
    if (!net_) throw Error(ErrorCode::InvalidArgument, "network is null");
    window_.resize(input_len(*net_));
    if (window_.empty()) throw Error(ErrorCode::Dimension, "network input length is zero");
}

StreamOutput WindowedNetClassifier::step(double x) {
    window_[filled_++] = x;
    if (filled_ == window_.size()) {
        filled_ = 0;
        const double p = forward(*net_, window_);
        last_p_ = p;
        if (options_.consensus) {
            const auto label = consensus_.push(p);
            if (label) {
                const double m = *consensus_.mean();
                held_ = {m, *label, m};
            }
        } else {
            held_ = {p, p > options_.threshold, p};
        }
    }
    return held_;
}

void WindowedNetClassifier::reset() {
    filled_ = 0;
    consensus_.reset();
    held_ = {};
    last_p_.reset();
}

std::unique_ptr<StreamingClassifier> WindowedNetClassifier::clone() const {
    return std::make_unique<WindowedNetClassifier>(net_, options_);
}

std::string WindowedNetClassifier::name() const {
    const bool quantized = std::holds_alternative<QuantizedMlp>(*net_);
    std::string base = quantized ? "mlp_q8" : "mlp";
    if (const auto* m = std::get_if<MlpModel>(net_.get()); m && m->front_end) base = "cnn";
    return base + (options_.consensus ? "_consensus" : "");
}

}  // namespace nd::nn
