#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nn/model.hpp"
#include "train/dataset.hpp"

namespace nd::train {

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    double neg_pos_ratio = 3.0;
    double train_fraction = 0.7;

    void validate() const;
};

struct LossHistory {
    std::vector<double> train;
    std::vector<double> validation;
    std::size_t best_epoch = 0;

    double best_validation() const { return validation.empty() ? 0.0 : validation[best_epoch]; }
};

struct TrainResult {
    nn::MlpModel model;
    LossHistory history;
};

/// Parameter order used by every flattened view: conv kernels, then for each
/// dense layer its weights followed by its biases.
std::vector<double*> parameter_pointers(nn::MlpModel& model);
std::vector<double> flatten_parameters(const nn::MlpModel& model);

/// Uniform Glorot initialization, +-sqrt(6 / (fan_in + fan_out)).
void initialize(nn::MlpModel& model, std::uint64_t seed);

/// Mean binary cross-entropy of the model over rows of `ds`.
double bce_loss(const nn::MlpModel& model, const WindowedDataset& ds);
double bce_loss(const nn::MlpModel& model, const WindowedDataset& ds, std::span<const std::size_t> rows);

/// Mean BCE over `rows` and its gradient in flatten_parameters order.
struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};
LossGradient loss_gradient(const nn::MlpModel& model, const WindowedDataset& ds, std::span<const std::size_t> rows);

/// Mini-batch gradient descent with momentum on BCE. `topology` fixes the
/// architecture; its parameter values are replaced by a seeded initialization.
/// Returns the parameters from the epoch with the lowest validation loss (the
/// training loss when the validation set is empty). Throws DivergenceError on
/// a non-finite loss.
TrainResult train_mlp(const WindowedDataset& train, const WindowedDataset& validation, const nn::MlpModel& topology,
                      const TrainConfig& config);

}  // namespace nd::train
