#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mtae/corpus.hpp"
#include "mtae/tape.hpp"
#include "mtae/tensor.hpp"

namespace mtae::model {

using corpus::Decoder;
using corpus::Vocabulary;

// Gate weights for one LSTM. Column blocks hold the input, forget, cell
// and output gates, in that order, hidden_size columns each.
struct LstmParams {
    ad::Tensor W;  // (input + hidden) x 4*hidden
    ad::Tensor b;  // 4*hidden
    std::size_t hidden_size = 0;
    std::size_t input_size() const { return W.rows() - hidden_size; }
};

// Everything needed to rebuild a model deterministically. Vocabularies are
// keyed by role ("en" always; "de"/"fr"/"pos" per enabled decoder; the REP
// decoder shares "en").
struct ModelConfig {
    std::vector<Decoder> decoders;
    std::size_t rep_size = 64;
    std::size_t hidden_size = 128;
    std::size_t max_decode_len = 120;
    std::uint64_t seed = 1;
    std::map<std::string, Vocabulary> vocabularies;

    const Vocabulary& input_vocab() const;
    const Vocabulary& target_vocab(Decoder d) const;
    bool has_decoder(Decoder d) const;
    void validate() const;  // ConfigError on violations
};

struct DecoderParams {
    ad::Tensor adapter_W;  // rep_size x 2*hidden (initial h ++ initial c)
    ad::Tensor adapter_b;  // 2*hidden
    LstmParams lstm;       // input = target vocabulary size
    ad::Tensor proj_W;     // hidden x V
    ad::Tensor proj_b;     // V
};

// The multi-task autoencoder: a character-consuming encoder LSTM, a dense
// tanh representation layer, and per task one FC state adapter, one decoder
// LSTM and one output projection.
struct MultiTaskModel {
    ModelConfig config;
    LstmParams encoder;
    ad::Tensor rep_W;  // hidden x rep_size
    ad::Tensor rep_b;  // rep_size
    std::vector<DecoderParams> decoders;  // aligned with config.decoders

    // uniform(-s, s) with s = 1 / sqrt(fan-in), drawn from config.seed
    static MultiTaskModel init(ModelConfig config);
    // all parameters zero (anchors and tests)
    static MultiTaskModel zeros(ModelConfig config);

    // Canonical parameter order: encoder W, encoder b, rep W, rep b, then
    // per decoder in config order adapter W, adapter b, lstm W, lstm b,
    // proj W, proj b. Checkpoints serialize exactly this order.
    std::vector<ad::Tensor*> parameters();
    std::vector<const ad::Tensor*> parameters() const;
    std::size_t parameter_count() const;

    std::size_t decoder_index(Decoder d) const;  // ConfigError when disabled
    const DecoderParams& decoder(Decoder d) const;
};

// Output of the representation layer; the object every analysis works on.
struct Representation {
    ad::Tensor vec;  // rank-1, rep_size, finite
};

// --- tape-level building blocks ---------------------------------------------

struct BoundLstm {
    ad::Value W, b;
    std::size_t hidden_size = 0;
};
struct BoundDecoder {
    ad::Value adapter_W, adapter_b;
    BoundLstm lstm;
    ad::Value proj_W, proj_b;
};

// A model's parameters registered as leaves of one tape, so gradients can
// be pulled out by leaf id after backward.
struct BoundModel {
    const MultiTaskModel* model = nullptr;
    BoundLstm encoder;
    ad::Value rep_W, rep_b;
    std::vector<BoundDecoder> decoders;
    std::vector<ad::Value> params;  // canonical order
};
BoundModel bind(ad::Tape& tape, const MultiTaskModel& m);

// One LSTM step: [i f g o] = concat(x, h) . W + b with sigmoid on i/f/o and
// tanh on g, then c' = f*c + i*g and h' = o * tanh(c').
std::pair<ad::Value, ad::Value> lstm_cell_step(ad::Tape& tape, ad::Value x, ad::Value h,
                                               ad::Value c, const BoundLstm& p);
// Plain-tensor variant for callers without a tape.
std::pair<ad::Tensor, ad::Tensor> lstm_cell_step(const ad::Tensor& x, const ad::Tensor& h,
                                                 const ad::Tensor& c, const LstmParams& p);

ad::Value encode_on_tape(ad::Tape& tape, const BoundModel& bm, std::string_view sentence);

// Runs the encoder over one-hot characters from a zero initial state and
// maps the final hidden state through the representation layer (tanh).
// VocabError on characters outside the input vocabulary.
Representation encode(const MultiTaskModel& m, std::string_view sentence);

// Strict-encodes `text` with the decoder's vocabulary and appends END.
std::vector<std::size_t> target_ids(const Vocabulary& v, std::string_view text);

struct TeacherForcedValue {
    ad::Value mean_loss;
    std::vector<ad::Value> step_losses;
    std::vector<ad::Value> step_logits;
};
// Teacher forcing: step t consumes the one-hot of target[t-1] (START at
// t=0) and is scored against target[t]; the loss is the per-step mean.
// `target` must be non-empty and end with the END id.
TeacherForcedValue decode_teacher_forced_on_tape(ad::Tape& tape, const BoundModel& bm,
                                                 ad::Value rep,
                                                 std::span<const std::size_t> target,
                                                 Decoder d);

struct TeacherForced {
    double mean_loss;
    std::vector<ad::Tensor> step_logits;
};
TeacherForced decode_teacher_forced(const MultiTaskModel& m, const Representation& rep,
                                    std::span<const std::size_t> target, Decoder d);

// Greedy decoding: feed the argmax of the previous step (START first),
// stop at END or after max_decode_len emitted tokens. Argmax ties break
// toward the lowest token id.
std::vector<std::size_t> decode_greedy_ids(const MultiTaskModel& m, const Representation& rep,
                                           Decoder d);
std::string decode_greedy(const MultiTaskModel& m, const Representation& rep, Decoder d);

struct ForwardValue {
    ad::Value joint_loss;  // unweighted sum of per-decoder mean losses
    std::map<Decoder, TeacherForcedValue> per_decoder;
    std::map<Decoder, std::size_t> token_counts;
};
// One encode feeding every enabled decoder. DataError when the example
// lacks a target for an enabled decoder.
ForwardValue model_forward_on_tape(ad::Tape& tape, const BoundModel& bm,
                                   const corpus::ExampleTuple& example);

struct ForwardLosses {
    double joint;
    std::map<Decoder, double> per_decoder;
};
ForwardLosses model_forward(const MultiTaskModel& m, const corpus::ExampleTuple& example);

}  // namespace mtae::model
