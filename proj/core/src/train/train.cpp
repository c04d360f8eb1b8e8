#include "gibbsnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "gibbsnet/autodiff/tape.hpp"
#include "gibbsnet/error.hpp"
#include "gibbsnet/eval.hpp"
#include "gibbsnet/io/text.hpp"
#include "gibbsnet/model/network.hpp"

namespace gibbsnet::train {

namespace {

using model::Composition;

struct ShardResult {
    double loss_sum = 0.0;
    std::vector<double> grad;
};

/// Forward/backward of one shard on its own tape. `scale` is 1/targets of
/// the whole batch, so shard gradients add up to the batch-mean gradient.
void run_shard(ad::Tape& tape, const model::ModelParameters& params, const PreparedDataset& data,
               std::span<const std::uint32_t> samples, double beta, double scale, ShardResult& out) {
    tape.clear();
    const model::TapeBackend be(tape, params);
    std::vector<std::vector<ad::Var>> theta(data.components.size());
    auto embedded = [&](std::uint32_t c) -> std::span<const ad::Var> {
        if (theta[c].empty()) {
            theta[c] = model::embed_component(be, std::span<const double>(data.components[c]));
        }
        return theta[c];
    };

    std::vector<ad::Tape::Seed> seeds;
    double loss = 0.0;
    for (const std::uint32_t i : samples) {
        const auto& s = data.samples[i];
        const auto t1 = embedded(s.c1);
        const auto t2 = embedded(s.c2);
        const auto o = model::predict_from_embeddings(be, t1, t2, s.t_star, Composition{s.x1, s.x2});
        if (s.ln_gamma1) {
            const double p = o.ln_gamma1.value();
            loss += smooth_l1(p, *s.ln_gamma1, beta);
            seeds.push_back({o.ln_gamma1, {scale * smooth_l1_grad(p, *s.ln_gamma1, beta), 0.0}});
        }
        if (s.ln_gamma2) {
            const double p = o.ln_gamma2.value();
            loss += smooth_l1(p, *s.ln_gamma2, beta);
            seeds.push_back({o.ln_gamma2, {scale * smooth_l1_grad(p, *s.ln_gamma2, beta), 0.0}});
        }
    }
    out.loss_sum = loss;
    out.grad = tape.backward(seeds);
}

class BatchEvaluator {
public:
    explicit BatchEvaluator(std::size_t shards) : tapes_(shards), results_(shards) {}

    BatchLoss operator()(const model::ModelParameters& params, const PreparedDataset& data,
                         std::span<const std::uint32_t> samples, double beta) {
        if (samples.empty()) {
            throw ValidationError("batch_loss: empty batch");
        }
        std::size_t targets = 0;
        for (const std::uint32_t i : samples) {
            if (i >= data.samples.size()) {
                throw ValidationError("batch_loss: sample index out of range");
            }
            targets += (data.samples[i].ln_gamma1 ? 1 : 0) + (data.samples[i].ln_gamma2 ? 1 : 0);
        }
        if (targets == 0) {
            throw ValidationError("batch_loss: batch has no ln gamma targets");
        }
        const double scale = 1.0 / static_cast<double>(targets);

        const std::size_t shards = std::min(tapes_.size(), samples.size());
        const std::size_t per = samples.size() / shards;
        const std::size_t extra = samples.size() % shards;
        std::vector<std::span<const std::uint32_t>> parts;
        std::size_t begin = 0;
        for (std::size_t k = 0; k < shards; ++k) {
            const std::size_t n = per + (k < extra ? 1 : 0);
            parts.push_back(samples.subspan(begin, n));
            begin += n;
        }

        if (shards == 1) {
            run_shard(tapes_[0], params, data, parts[0], beta, scale, results_[0]);
        } else {
            std::vector<std::exception_ptr> errors(shards);
            std::vector<std::thread> workers;
            for (std::size_t k = 0; k < shards; ++k) {
                workers.emplace_back([&, k] {
                    try {
                        run_shard(tapes_[k], params, data, parts[k], beta, scale, results_[k]);
                    } catch (...) {
                        errors[k] = std::current_exception();
                    }
                });
            }
            for (auto& w : workers) {
                w.join();
            }
            for (const auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }

        BatchLoss out;
        out.targets = targets;
        out.grad.assign(params.size(), 0.0);
        double loss_sum = 0.0;
        for (std::size_t k = 0; k < shards; ++k) {
            loss_sum += results_[k].loss_sum;
            for (std::size_t j = 0; j < out.grad.size(); ++j) {
                out.grad[j] += results_[k].grad[j];
            }
        }
        out.loss = loss_sum * scale;
        return out;
    }

private:
    std::vector<ad::Tape> tapes_;
    std::vector<ShardResult> results_;
};

std::vector<std::vector<ad::Dual>> embed_all(const model::ModelParameters& params, const PreparedDataset& data) {
    const model::DualBackend be(params);
    std::vector<std::vector<ad::Dual>> theta;
    theta.reserve(data.components.size());
    for (const auto& e : data.components) {
        theta.push_back(model::embed_component(be, std::span<const double>(e)));
    }
    return theta;
}

model::GammaPrediction evaluate(const model::DualBackend& be, const std::vector<std::vector<ad::Dual>>& theta,
                                const PreparedDataset::Sample& s, Composition x) {
    const auto o = model::predict_from_embeddings(be, std::span<const ad::Dual>(theta[s.c1]),
                                                  std::span<const ad::Dual>(theta[s.c2]), s.t_star, x);
    return {o.ln_gamma1.value, o.ln_gamma2.value, o.ge_over_rt.value};
}

std::vector<std::uint32_t> iota(std::size_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = static_cast<std::uint32_t>(i);
    }
    return v;
}

}  // namespace

double smooth_l1(double pred, double target, double beta) {
    if (!(beta > 0.0)) {
        throw DomainError("smooth_l1: beta must be positive");
    }
    const double d = pred - target;
    const double a = std::abs(d);
    return a < beta ? 0.5 * d * d / beta : a - 0.5 * beta;
}

double smooth_l1_grad(double pred, double target, double beta) {
    if (!(beta > 0.0)) {
        throw DomainError("smooth_l1: beta must be positive");
    }
    const double d = pred - target;
    if (std::abs(d) < beta) {
        return d / beta;
    }
    return d > 0.0 ? 1.0 : -1.0;
}

OptimizerState OptimizerState::init(std::size_t parameter_count, double lr) {
    OptimizerState s;
    s.m.assign(parameter_count, 0.0);
    s.v.assign(parameter_count, 0.0);
    s.lr = lr;
    return s;
}

void adam_step(std::span<double> params, std::span<const double> grads, OptimizerState& state,
               const TrainConfig& config) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ShapeError("adam_step: parameter, gradient and moment sizes differ");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw ValidationError("non-finite gradient " + io::format_double(grads[i]) + " at parameter " +
                                  std::to_string(i) + " (step " + std::to_string(state.step + 1) + ")");
        }
    }
    ++state.step;
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + config.weight_decay * params[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
}

BatchLoss batch_loss(const model::ModelParameters& params, const PreparedDataset& data,
                     std::span<const std::uint32_t> samples, const TrainConfig& config) {
    BatchEvaluator eval(config.threads);
    return eval(params, data, samples, config.smoothl1_beta);
}

double dataset_loss(const model::ModelParameters& params, const PreparedDataset& data, double beta) {
    const auto theta = embed_all(params, data);
    const model::DualBackend be(params);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : data.samples) {
        const auto p = evaluate(be, theta, s, Composition{s.x1, s.x2});
        if (s.ln_gamma1) {
            sum += smooth_l1(p.ln_gamma1, *s.ln_gamma1, beta);
            ++n;
        }
        if (s.ln_gamma2) {
            sum += smooth_l1(p.ln_gamma2, *s.ln_gamma2, beta);
            ++n;
        }
    }
    if (n == 0) {
        throw ValidationError("dataset_loss: no targets");
    }
    return sum / static_cast<double>(n);
}

double dataset_gd_msd(const model::ModelParameters& params, const PreparedDataset& data, double h) {
    if (data.samples.empty()) {
        return 0.0;
    }
    const auto theta = embed_all(params, data);
    const model::DualBackend be(params);
    double sum = 0.0;
    for (const auto& s : data.samples) {
        const double r = eval::gibbs_duhem_residual(
            [&](double x) { return evaluate(be, theta, s, Composition::from_x1(x)); }, s.x1, h);
        sum += r * r;
    }
    return sum / static_cast<double>(data.samples.size());
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::max_epochs:
            return "max_epochs";
        case StopReason::early_stopping:
            return "early_stopping";
        case StopReason::diverged:
            return "diverged";
    }
    return "?";
}

FitResult fit(const PreparedDataset& train, const PreparedDataset& val, const model::ModelParameters& initial,
              const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    if (train.samples.empty() || val.samples.empty()) {
        throw ValidationError("fit: training and validation sets must be non-empty");
    }
    if (train.target_count() == 0 || val.target_count() == 0) {
        throw ValidationError("fit: training and validation sets need ln gamma targets");
    }

    FitResult result;
    result.best = initial;
    model::ModelParameters params = initial;
    OptimizerState state = OptimizerState::init(params.size(), config.lr0);
    state.best_val_loss = dataset_loss(params, val, config.smoothl1_beta);
    state.has_best = std::isfinite(state.best_val_loss);
    result.best_val_loss = state.best_val_loss;
    if (!state.has_best) {
        result.stop = StopReason::diverged;
        result.message = "initial validation loss is not finite";
        return result;
    }

    BatchEvaluator evaluator(config.threads);
    std::mt19937_64 rng(config.seed);
    std::vector<std::uint32_t> order = iota(train.samples.size());

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t target_sum = 0;
        try {
            for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
                const std::size_t n = std::min(config.batch_size, order.size() - b);
                const auto batch = std::span<const std::uint32_t>(order).subspan(b, n);
                std::size_t targets = 0;
                for (const auto i : batch) {
                    targets += (train.samples[i].ln_gamma1 ? 1 : 0) + (train.samples[i].ln_gamma2 ? 1 : 0);
                }
                if (targets == 0) {
                    continue;
                }
                const BatchLoss bl = evaluator(params, train, batch, config.smoothl1_beta);
                loss_sum += bl.loss * static_cast<double>(bl.targets);
                target_sum += bl.targets;
                adam_step(params.values(), bl.grad, state, config);
            }
        } catch (const ValidationError& e) {
            result.stop = StopReason::diverged;
            result.message = std::string("epoch ") + std::to_string(epoch) + ": " + e.what();
            return result;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(target_sum);
        rec.val_loss = dataset_loss(params, val, config.smoothl1_beta);
        rec.gd_msd_train = dataset_gd_msd(params, train, config.gd_step);
        rec.gd_msd_val = dataset_gd_msd(params, val, config.gd_step);
        rec.lr = state.lr;
        result.history.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }

        if (!std::isfinite(rec.val_loss) || !std::isfinite(rec.train_loss)) {
            result.stop = StopReason::diverged;
            result.message = "epoch " + std::to_string(epoch) + ": loss is not finite";
            return result;
        }
        if (rec.val_loss < state.best_val_loss) {
            state.best_val_loss = rec.val_loss;
            state.epochs_since_improvement = 0;
            state.epochs_since_lr_change = 0;
            result.best = params;
            result.best_epoch = epoch;
            result.best_val_loss = rec.val_loss;
        } else {
            ++state.epochs_since_improvement;
            ++state.epochs_since_lr_change;
            if (state.epochs_since_improvement >= config.early_stop_patience) {
                result.stop = StopReason::early_stopping;
                result.message = "no validation improvement for " + std::to_string(config.early_stop_patience) +
                                 " epochs";
                return result;
            }
            if (state.epochs_since_lr_change > config.lr_patience) {
                state.lr *= config.lr_decay_factor;
                state.epochs_since_lr_change = 0;
            }
        }
    }
    result.stop = StopReason::max_epochs;
    result.message = "reached max_epochs = " + std::to_string(config.max_epochs);
    return result;
}

std::string format_metrics_csv(std::span<const EpochRecord> history) {
    std::string out = "epoch,train_loss,val_loss,gd_msd_train,gd_msd_val,lr\n";
    for (const auto& r : history) {
        out += std::to_string(r.epoch) + ',' + io::format_double(r.train_loss) + ',' + io::format_double(r.val_loss) +
               ',' + io::format_double(r.gd_msd_train) + ',' + io::format_double(r.gd_msd_val) + ',' +
               io::format_double(r.lr) + '\n';
    }
    return out;
}

TrainingRun run_training(std::span<const GammaRecord> records, const DescriptorTable& table,
                         const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    if (const auto missing = missing_descriptors(records, table); !missing.empty()) {
        std::string list;
        for (const auto& s : missing) {
            list += (list.empty() ? "" : ", ") + s;
        }
        throw ValidationError("no descriptor for " + std::to_string(missing.size()) + " SMILES: " + list);
    }
    TrainingRun run;
    run.split = split_systems(records, config.split);
    run.standardizer = fit_standardizer(run.split.train, table);
    const PreparedDataset train = prepare_dataset(run.split.train, table, run.standardizer.stats);
    const PreparedDataset val = prepare_dataset(run.split.val, table, run.standardizer.stats);

    model::ArchitectureConfig arch;
    arch.descriptor_dim = table.dim;
    arch.hidden = config.hidden;
    arch.variant = config.variant;
    arch.validate();
    const auto initial = model::ModelParameters::random(arch, config.seed);
    run.result = fit(train, val, initial, config, on_epoch);

    run.checkpoint.params = run.result.best;
    run.checkpoint.stats = run.standardizer.stats;
    run.checkpoint.seed = config.seed;
    run.checkpoint.descriptor_source = table.source;
    run.checkpoint.descriptor_seed = table.seed;
    run.checkpoint.training = {
        {"best_epoch", run.result.best_epoch},
        {"best_val_loss", run.result.best_val_loss},
        {"epochs_run", run.result.history.size()},
        {"stop_reason", std::string(to_string(run.result.stop))},
        {"stop_message", run.result.message},
        {"systems", {{"train", run.split.systems.train.size()},
                     {"val", run.split.systems.val.size()},
                     {"test", run.split.systems.test.size()}}},
        {"config", format_config(config)},
    };
    return run;
}

void write_run_directory(const TrainingRun& run, const TrainConfig& config, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());
    }
    io::write_file(dir / "config.txt", format_config(config));
    io::write_file(dir / "metrics.csv", format_metrics_csv(run.result.history));
    io::write_file(dir / "split.csv", format_split_csv(run.split.systems));
    model::save_checkpoint(run.checkpoint, dir / "checkpoint.json");
}

}  // namespace gibbsnet::train
