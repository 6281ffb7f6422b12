#include "mtae/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mtae/errors.hpp"
#include "mtae/rng.hpp"
#include "mtae/tape.hpp"

namespace mtae::train {

void TrainConfig::validate() const {
    if (batch_size == 0) throw ConfigError("train config: batch_size must be at least 1");
    if (!(data_fraction > 0.0 && data_fraction <= 1.0))
        throw ConfigError("train config: data_fraction must lie in (0, 1]");
    if (learning_rate <= 0.0) throw ConfigError("train config: learning_rate must be positive");
    if (eval_every == 0) throw ConfigError("train config: eval_every must be at least 1");
}

std::vector<std::vector<std::size_t>> make_batches(std::span<const corpus::ExampleTuple> dataset,
                                                   std::size_t batch_size,
                                                   std::uint64_t shuffle_seed,
                                                   double data_fraction) {
    if (dataset.empty()) throw DataError("make_batches: dataset is empty");
    if (batch_size == 0) throw ConfigError("make_batches: batch_size must be at least 1");
    if (!(data_fraction > 0.0 && data_fraction <= 1.0))
        throw ConfigError("make_batches: data_fraction must lie in (0, 1]");

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(shuffle_seed);
    shuffle(order, rng);

    const std::size_t used = static_cast<std::size_t>(
        std::ceil(data_fraction * static_cast<double>(dataset.size())));
    order.resize(std::min(used, order.size()));

    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(start + batch_size, order.size());
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

AdamState AdamState::init(std::span<ad::Tensor* const> params) {
    AdamState s;
    for (const ad::Tensor* t : params) {
        s.m.emplace_back(t->size(), 0.0);
        s.v.emplace_back(t->size(), 0.0);
    }
    return s;
}

void adam_step(std::span<ad::Tensor* const> params, AdamState& state, const AdamHyper& hyper) {
    if (state.m.size() != params.size())
        throw ContractError("adam_step: state does not match the parameter list");

    double sq_norm = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::span<const double> g = params[i]->grad();
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!std::isfinite(g[j]))
                throw NumericError("adam_step: non-finite gradient in parameter tensor " +
                                   std::to_string(i) + " at element " + std::to_string(j));
            sq_norm += g[j] * g[j];
        }
    }
    const double norm = std::sqrt(sq_norm);
    const double scale =
        (hyper.clip_norm > 0.0 && norm > hyper.clip_norm) ? hyper.clip_norm / norm : 1.0;

    state.t += 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));

    for (std::size_t i = 0; i < params.size(); ++i) {
        ad::Tensor& p = *params[i];
        std::span<const double> g = p.grad();
        std::vector<double>& m = state.m[i];
        std::vector<double>& v = state.v[i];
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double gj = g[j] * scale;
            m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * gj;
            v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * gj * gj;
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            p[j] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
        }
    }
}

void save_metrics_jsonl(const std::filesystem::path& path, const MetricsLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write metrics file '" + path.string() + "'");
    for (const MetricsRecord& r : log.records) {
        nlohmann::json ce = nlohmann::json::object();
        nlohmann::json ppl = nlohmann::json::object();
        for (const auto& [d, v] : r.cross_entropy) {
            ce[std::string(corpus::decoder_name(d))] = v;
            ppl[std::string(corpus::decoder_name(d))] = std::exp(v);
        }
        nlohmann::json rec{{"step", r.step}, {"cross_entropy", ce}, {"perplexity", ppl}};
        out << rec.dump() << '\n';
    }
}

namespace {

// OOV pre-scan: every input char and target symbol must be encodable
void check_vocab_coverage(const model::MultiTaskModel& m,
                          std::span<const corpus::ExampleTuple> data) {
    const corpus::Vocabulary& in = m.config.input_vocab();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!in.covers(data[i].input_en))
            throw DataError("tuple " + std::to_string(i) +
                            ": input contains out-of-vocabulary characters: '" +
                            data[i].input_en + "'");
        for (Decoder d : m.config.decoders) {
            const std::string* t = data[i].target(d);
            if (!t)
                throw DataError("tuple " + std::to_string(i) + ": missing target for decoder " +
                                std::string(corpus::decoder_name(d)));
            if (!m.config.target_vocab(d).covers(*t))
                throw DataError("tuple " + std::to_string(i) + ": " +
                                std::string(corpus::decoder_name(d)) +
                                " target contains out-of-vocabulary symbols: '" + *t + "'");
        }
    }
}

}  // namespace

TrainResult train(model::MultiTaskModel& m, std::span<const corpus::ExampleTuple> data,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (data.empty()) throw DataError("train: dataset is empty");
    check_vocab_coverage(m, data);

    auto params = m.parameters();
    AdamState state = AdamState::init(params);
    AdamHyper hyper{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon,
                    cfg.clip_norm};

    TrainResult result;
    std::size_t global_batch = 0;
    // metrics accumulate per-token cross-entropy between records
    std::map<Decoder, double> ce_sum;
    std::map<Decoder, std::size_t> ce_tokens;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto batches =
            make_batches(data, cfg.batch_size, cfg.shuffle_seed + epoch, cfg.data_fraction);

        double epoch_loss = 0.0;
        std::size_t epoch_examples = 0;

        for (const auto& batch : batches) {
            for (ad::Tensor* p : params) p->zero_grad();

            for (std::size_t idx : batch) {
                ad::Tape tape;
                model::BoundModel bm = bind(tape, m);
                model::ForwardValue fv = model_forward_on_tape(tape, bm, data[idx]);
                ad::Gradients grads = tape.backward(fv.joint_loss);

                const double inv = 1.0 / static_cast<double>(batch.size());
                for (std::size_t i = 0; i < params.size(); ++i) {
                    const ad::Tensor* g = grads.find(bm.params[i].id());
                    if (!g) continue;
                    std::span<double> acc = params[i]->grad();
                    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += inv * (*g)[j];
                }

                epoch_loss += fv.joint_loss.tensor().item();
                epoch_examples += 1;
                for (const auto& [d, tf] : fv.per_decoder) {
                    ce_sum[d] += tf.mean_loss.tensor().item() *
                                 static_cast<double>(fv.token_counts.at(d));
                    ce_tokens[d] += fv.token_counts.at(d);
                }
            }

            adam_step(params, state, hyper);
            global_batch += 1;

            if (global_batch % cfg.eval_every == 0) {
                MetricsRecord rec;
                rec.step = global_batch;
                for (const auto& [d, sum] : ce_sum)
                    rec.cross_entropy[d] = sum / static_cast<double>(ce_tokens.at(d));
                result.metrics.records.push_back(std::move(rec));
                ce_sum.clear();
                ce_tokens.clear();
            }
        }

        result.epoch_mean_joint_loss.push_back(
            epoch_examples ? epoch_loss / static_cast<double>(epoch_examples) : 0.0);
    }

    for (ad::Tensor* p : params) p->drop_grad();
    result.checkpoint = ModelCheckpoint::of(m);
    return result;
}

std::map<Decoder, double> evaluate_perplexity(const model::MultiTaskModel& m,
                                              std::span<const corpus::ExampleTuple> test_set) {
    if (test_set.empty()) throw DataError("evaluate_perplexity: test set is empty");

    std::map<Decoder, double> ce_sum;
    std::map<Decoder, std::size_t> tokens;
    for (const corpus::ExampleTuple& ex : test_set) {
        ad::Tape tape;
        model::BoundModel bm = bind(tape, m);
        model::ForwardValue fv = model_forward_on_tape(tape, bm, ex);
        for (const auto& [d, tf] : fv.per_decoder) {
            const std::size_t n = fv.token_counts.at(d);
            ce_sum[d] += tf.mean_loss.tensor().item() * static_cast<double>(n);
            tokens[d] += n;
        }
    }

    std::map<Decoder, double> out;
    for (const auto& [d, sum] : ce_sum)
        out[d] = std::exp(sum / static_cast<double>(tokens.at(d)));
    return out;
}

}  // namespace mtae::train
