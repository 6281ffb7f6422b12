#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtae/corpus.hpp"
#include "mtae/seqmodel.hpp"

namespace mtae::train {

using corpus::Decoder;

struct TrainConfig {
    std::size_t epochs = 5;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double clip_norm = 5.0;          // global-norm gradient clip
    double data_fraction = 1.0;      // reduced-data reference runs
    std::uint64_t shuffle_seed = 1;
    std::size_t eval_every = 50;     // batches between metrics records

    void validate() const;
};

// Seeded shuffle, then the first ceil(fraction * N) tuples partitioned
// sequentially into batches of indices (the last may be short).
std::vector<std::vector<std::size_t>> make_batches(std::span<const corpus::ExampleTuple> dataset,
                                                   std::size_t batch_size,
                                                   std::uint64_t shuffle_seed,
                                                   double data_fraction);

struct AdamState {
    std::vector<std::vector<double>> m, v;  // aligned with the parameter list
    std::size_t t = 0;

    static AdamState init(std::span<ad::Tensor* const> params);
};

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;  // <= 0 disables clipping
};

// One Adam update with bias correction, applied after clipping the global
// gradient norm. Gradients are read from each tensor's grad accumulator.
// NumericError (with the offending tensor index) on non-finite gradients.
void adam_step(std::span<ad::Tensor* const> params, AdamState& state, const AdamHyper& hyper);

struct MetricsRecord {
    std::size_t step = 0;  // global batch index, 1-based
    std::map<Decoder, double> cross_entropy;  // per-token mean since last record
};
struct MetricsLog {
    std::vector<MetricsRecord> records;
};
// JSON-lines, one record per eval: {"step":..,"cross_entropy":{..},"perplexity":{..}}
// with perplexity == exp(cross_entropy) by construction.
void save_metrics_jsonl(const std::filesystem::path& path, const MetricsLog& log);

// Checkpoint file layout: magic "MTAE1\n", canonical JSON of
// {version, config, vocabularies}, a NUL byte, the parameter count as
// decimal ASCII plus newline, then parameters as little-endian IEEE
// float64 in canonical order.
struct ModelCheckpoint {
    std::uint32_t version = 1;
    model::ModelConfig config;
    std::vector<double> parameters;  // canonical order

    static ModelCheckpoint of(const model::MultiTaskModel& m);
    model::MultiTaskModel restore() const;
};
void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);  // CorruptionError

struct TrainResult {
    ModelCheckpoint checkpoint;
    MetricsLog metrics;
    std::vector<double> epoch_mean_joint_loss;
};

// Per batch: accumulate per-example joint-loss gradients in example order,
// average, Adam step. Deterministic given the config seeds. Scans the
// corpus for out-of-vocabulary symbols before touching the model.
TrainResult train(model::MultiTaskModel& m, std::span<const corpus::ExampleTuple> data,
                  const TrainConfig& cfg);

// exp(mean per-token cross-entropy over every test token), teacher-forced.
std::map<Decoder, double> evaluate_perplexity(const model::MultiTaskModel& m,
                                              std::span<const corpus::ExampleTuple> test_set);

}  // namespace mtae::train
