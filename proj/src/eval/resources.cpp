#include "eval/resources.hpp"

namespace nd::eval {

namespace {
template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;
}  // namespace

ResourceReport resource_report(std::span<const Stage> stages, std::size_t window_len) {
    ResourceReport r;
    if (stages.empty()) return r;
    std::size_t per_sample = 0;
    for (const auto& s : stages) {
        std::visit(Overloaded{
                       [&](const BiquadStage&) {
                           per_sample += 5;
                           r.parameters += 5;
                           r.coefficient_bytes += 5 * 2;
                           r.state_bytes += 4 * 4;
                       },
                       [&](const EnvelopeStage&) {
                           per_sample += 1;
                           r.state_bytes += 4;
                       },
                       [&](const DenseStage& d) {
                           r.macs_per_window += d.out * d.in;
                           r.parameters += d.out * d.in + d.out;
                           r.coefficient_bytes += d.out * d.in + d.out + 2 * 4;
                           r.state_bytes += d.out * 4;
                       },
                       [&](const ConvStage& c) {
                           r.macs_per_window += c.n_kernels * c.kernel_len * c.output_len;
                           r.parameters += c.n_kernels * c.kernel_len;
                           r.coefficient_bytes += c.n_kernels * c.kernel_len + 4;
                           r.state_bytes += c.n_kernels * c.output_len * 4;
                       },
                       [&](const ConsensusStage&) { r.state_bytes += 3 * 4; },
                   },
                   s);
    }
    if (r.macs_per_window > 0) r.state_bytes += window_len;  // int8 input window
    r.macs_per_sample = static_cast<double>(per_sample) +
                        (window_len ? static_cast<double>(r.macs_per_window) / static_cast<double>(window_len) : 0.0);
    return r;
}

std::vector<Stage> filter_stages(const dsp::FilterDesign& design) {
    std::vector<Stage> s(design.sections.size(), BiquadStage{});
    s.push_back(EnvelopeStage{});
    return s;
}

std::vector<Stage> network_stages(const nn::MlpModel& model, bool consensus) {
    std::vector<Stage> s;
    if (model.front_end) {
        const auto& fe = *model.front_end;
        s.push_back(ConvStage{fe.n_kernels, fe.kernel_len, fe.output_len(model.input_len)});
    }
    for (const auto& l : model.layers) s.push_back(DenseStage{l.in, l.out});
    if (consensus) s.push_back(ConsensusStage{});
    return s;
}

ResourceReport resource_report(const dsp::FilterDesign& design) { return resource_report(filter_stages(design), 1); }

ResourceReport resource_report(const nn::MlpModel& model, bool consensus) {
    return resource_report(network_stages(model, consensus), model.input_len);
}

ResourceReport resource_report(const nn::QuantizedMlp& model, bool consensus) {
    return resource_report(nn::dequantize_model(model), consensus);
}

}  // namespace nd::eval
