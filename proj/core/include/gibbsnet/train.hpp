#pragma once

/**
 * @file train.hpp
 * @brief Training loop: SmoothL1 loss on ln γ, ADAM with coupled L2 weight
 * decay, plateau learning-rate decay and early stopping on validation loss.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsnet/data.hpp"
#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/model/model.hpp"

namespace gibbsnet::train {

struct TrainConfig {
    double lr0 = 5e-4;
    double lr_decay_factor = 0.1;
    std::size_t lr_patience = 10;
    std::size_t early_stop_patience = 30;
    std::size_t batch_size = 512;
    double smoothl1_beta = 0.25;
    double weight_decay = 1e-6;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t max_epochs = 1000;
    std::uint64_t seed = 0;

    std::size_t hidden = 96;
    model::Variant variant = model::Variant::hanna;
    /// Batch shards evaluated on separate tapes; gradients are summed in
    /// shard order, so results depend on this value but not on timing.
    std::size_t threads = 1;
    /// Step of the central differences behind the gd_msd columns.
    double gd_step = 1e-4;

    SplitSpec split;

    /// Throws ValidationError for non-positive or out-of-range values.
    void validate() const;
};

/// `key=value` lines; `#` starts a comment. Keys are the TrainConfig field
/// names plus split_train, split_val, split_test and split_seed. Unknown keys
/// and malformed values throw ParseError with the line number.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
/// Every key, in a form parse_config reads back to the same values.
std::string format_config(const TrainConfig& c);

/// 0.5·d²/β for |d| < β, |d| − 0.5·β otherwise, d = pred − target.
double smooth_l1(double pred, double target, double beta);
/// d/dpred of smooth_l1.
double smooth_l1_grad(double pred, double target, double beta);

struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
    double lr = 0.0;
    double best_val_loss = 0.0;
    bool has_best = false;
    std::size_t epochs_since_improvement = 0;
    std::size_t epochs_since_lr_change = 0;

    static OptimizerState init(std::size_t parameter_count, double lr);
};

/// One ADAM step with bias correction and coupled weight decay
/// (g ← g + λ·θ before the moment updates). Throws ValidationError naming
/// the first non-finite gradient entry; params and state are then untouched.
void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state,
               const TrainConfig& config);

/// Mean SmoothL1 over the available targets of `samples` and its gradient
/// with respect to every model parameter.
struct BatchLoss {
    double loss = 0.0;
    std::size_t targets = 0;
    std::vector<double> grad;
};

/// Throws ValidationError for an empty batch or one without targets.
BatchLoss batch_loss(const model::ModelParameters& params, const PreparedDataset& data,
                     std::span<const std::uint32_t> samples, const TrainConfig& config);

/// Record-mean SmoothL1 over every target of `data`, evaluated without a tape.
double dataset_loss(const model::ModelParameters& params, const PreparedDataset& data, double beta);

/// Mean squared Gibbs-Duhem residual over the samples of `data` (x1 clamped
/// to [h, 1 − h]).
double dataset_gd_msd(const model::ModelParameters& params, const PreparedDataset& data, double h);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double gd_msd_train = 0.0;
    double gd_msd_val = 0.0;
    double lr = 0.0;
};

enum class StopReason : std::uint8_t { max_epochs, early_stopping, diverged };
std::string_view to_string(StopReason r);

struct FitResult {
    model::ModelParameters best;
    /// 0 when no epoch improved on the initial model.
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    std::vector<EpochRecord> history;
    StopReason stop = StopReason::max_epochs;
    std::string message;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Seeded record shuffling each epoch, mini-batches of batch_size, and the
/// parameters with the lowest validation loss returned. A non-finite loss or
/// gradient stops training with StopReason::diverged.
FitResult fit(const PreparedDataset& train, const PreparedDataset& val, const model::ModelParameters& initial,
              const TrainConfig& config, const EpochCallback& on_epoch = {});

std::string format_metrics_csv(std::span<const EpochRecord> history);

struct TrainingRun {
    DatasetSplit split;
    StandardizerFit standardizer;
    FitResult result;
    model::Checkpoint checkpoint;
};

/// Split by system, fit the standardizer on the training part, train from a
/// seeded random initialization. Throws ValidationError listing SMILES
/// without descriptors before any work is done.
TrainingRun run_training(std::span<const GammaRecord> records, const DescriptorTable& table,
                         const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Writes config.txt, metrics.csv, split.csv and checkpoint.json.
void write_run_directory(const TrainingRun& run, const TrainConfig& config, const std::filesystem::path& dir);

}  // namespace gibbsnet::train
