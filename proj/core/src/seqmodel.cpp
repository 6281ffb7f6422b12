#include "mtae/seqmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mtae/errors.hpp"
#include "mtae/rng.hpp"

namespace mtae::model {

// --- config ------------------------------------------------------------------

const Vocabulary& ModelConfig::input_vocab() const {
    auto it = vocabularies.find("en");
    if (it == vocabularies.end()) throw ConfigError("model config: missing 'en' vocabulary");
    return it->second;
}

const Vocabulary& ModelConfig::target_vocab(Decoder d) const {
    auto it = vocabularies.find(std::string(corpus::decoder_role(d)));
    if (it == vocabularies.end())
        throw ConfigError("model config: missing '" + std::string(corpus::decoder_role(d)) +
                          "' vocabulary");
    return it->second;
}

bool ModelConfig::has_decoder(Decoder d) const {
    return std::find(decoders.begin(), decoders.end(), d) != decoders.end();
}

void ModelConfig::validate() const {
    if (decoders.empty()) throw ConfigError("model config: decoder list is empty");
    if (!has_decoder(Decoder::Rep)) throw ConfigError("model config: REP decoder is mandatory");
    std::set<Decoder> seen(decoders.begin(), decoders.end());
    if (seen.size() != decoders.size())
        throw ConfigError("model config: duplicate decoder in list");
    if (rep_size == 0) throw ConfigError("model config: rep_size must be positive");
    if (hidden_size == 0) throw ConfigError("model config: hidden_size must be positive");
    input_vocab();
    for (Decoder d : decoders) target_vocab(d);
}

// --- construction --------------------------------------------------------------

namespace {

ad::Tensor uniform_tensor(std::vector<std::size_t> shape, double scale, Rng& rng) {
    ad::Tensor t = ad::Tensor::zeros(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-scale, scale);
    return t;
}

LstmParams make_lstm(std::size_t input, std::size_t hidden, Rng* rng) {
    LstmParams p;
    p.hidden_size = hidden;
    const double s = 1.0 / std::sqrt(static_cast<double>(input + hidden));
    if (rng) {
        p.W = uniform_tensor({input + hidden, 4 * hidden}, s, *rng);
        p.b = uniform_tensor({4 * hidden}, s, *rng);
    } else {
        p.W = ad::Tensor::zeros({input + hidden, 4 * hidden});
        p.b = ad::Tensor::zeros({4 * hidden});
    }
    return p;
}

MultiTaskModel build(ModelConfig config, bool random) {
    config.validate();
    MultiTaskModel m;
    Rng rng(config.seed);
    Rng* r = random ? &rng : nullptr;
    const std::size_t hidden = config.hidden_size;
    const std::size_t rep = config.rep_size;

    m.encoder = make_lstm(config.input_vocab().size(), hidden, r);

    const double rep_s = 1.0 / std::sqrt(static_cast<double>(hidden));
    m.rep_W = r ? uniform_tensor({hidden, rep}, rep_s, rng) : ad::Tensor::zeros({hidden, rep});
    m.rep_b = r ? uniform_tensor({rep}, rep_s, rng) : ad::Tensor::zeros({rep});

    for (Decoder d : config.decoders) {
        const std::size_t v = config.target_vocab(d).size();
        DecoderParams dp;
        const double ad_s = 1.0 / std::sqrt(static_cast<double>(rep));
        dp.adapter_W =
            r ? uniform_tensor({rep, 2 * hidden}, ad_s, rng) : ad::Tensor::zeros({rep, 2 * hidden});
        dp.adapter_b = r ? uniform_tensor({2 * hidden}, ad_s, rng) : ad::Tensor::zeros({2 * hidden});
        dp.lstm = make_lstm(v, hidden, r);
        const double pj_s = 1.0 / std::sqrt(static_cast<double>(hidden));
        dp.proj_W = r ? uniform_tensor({hidden, v}, pj_s, rng) : ad::Tensor::zeros({hidden, v});
        dp.proj_b = r ? uniform_tensor({v}, pj_s, rng) : ad::Tensor::zeros({v});
        m.decoders.push_back(std::move(dp));
    }
    m.config = std::move(config);
    return m;
}

}  // namespace

MultiTaskModel MultiTaskModel::init(ModelConfig config) { return build(std::move(config), true); }
MultiTaskModel MultiTaskModel::zeros(ModelConfig config) { return build(std::move(config), false); }

std::vector<ad::Tensor*> MultiTaskModel::parameters() {
    std::vector<ad::Tensor*> out{&encoder.W, &encoder.b, &rep_W, &rep_b};
    for (DecoderParams& d : decoders) {
        out.push_back(&d.adapter_W);
        out.push_back(&d.adapter_b);
        out.push_back(&d.lstm.W);
        out.push_back(&d.lstm.b);
        out.push_back(&d.proj_W);
        out.push_back(&d.proj_b);
    }
    return out;
}

std::vector<const ad::Tensor*> MultiTaskModel::parameters() const {
    auto mut = const_cast<MultiTaskModel*>(this)->parameters();
    return {mut.begin(), mut.end()};
}

std::size_t MultiTaskModel::parameter_count() const {
    std::size_t n = 0;
    for (const ad::Tensor* t : parameters()) n += t->size();
    return n;
}

std::size_t MultiTaskModel::decoder_index(Decoder d) const {
    for (std::size_t i = 0; i < config.decoders.size(); ++i)
        if (config.decoders[i] == d) return i;
    throw ConfigError("decoder " + std::string(corpus::decoder_name(d)) +
                      " is not enabled in this model");
}

const DecoderParams& MultiTaskModel::decoder(Decoder d) const {
    return decoders[decoder_index(d)];
}

// --- tape plumbing -------------------------------------------------------------

BoundModel bind(ad::Tape& tape, const MultiTaskModel& m) {
    BoundModel bm;
    bm.model = &m;
    for (const ad::Tensor* t : m.parameters()) bm.params.push_back(tape.leaf(*t));

    std::size_t i = 0;
    bm.encoder = {bm.params[i], bm.params[i + 1], m.config.hidden_size};
    bm.rep_W = bm.params[i + 2];
    bm.rep_b = bm.params[i + 3];
    i += 4;
    for (std::size_t d = 0; d < m.decoders.size(); ++d, i += 6) {
        BoundDecoder bd;
        bd.adapter_W = bm.params[i];
        bd.adapter_b = bm.params[i + 1];
        bd.lstm = {bm.params[i + 2], bm.params[i + 3], m.config.hidden_size};
        bd.proj_W = bm.params[i + 4];
        bd.proj_b = bm.params[i + 5];
        bm.decoders.push_back(bd);
    }
    return bm;
}

std::pair<ad::Value, ad::Value> lstm_cell_step(ad::Tape& tape, ad::Value x, ad::Value h,
                                               ad::Value c, const BoundLstm& p) {
    const std::size_t hs = p.hidden_size;
    ad::Value z = add(tape.matmul(tape.concat(x, h), p.W), p.b);
    ad::Value i = sigmoid(tape.slice(z, 0, hs));
    ad::Value f = sigmoid(tape.slice(z, hs, hs));
    ad::Value g = ad::tanh(tape.slice(z, 2 * hs, hs));
    ad::Value o = sigmoid(tape.slice(z, 3 * hs, hs));
    ad::Value c_next = add(mul(f, c), mul(i, g));
    ad::Value h_next = mul(o, ad::tanh(c_next));
    return {h_next, c_next};
}

std::pair<ad::Tensor, ad::Tensor> lstm_cell_step(const ad::Tensor& x, const ad::Tensor& h,
                                                 const ad::Tensor& c, const LstmParams& p) {
    ad::Tape tape;
    BoundLstm bl{tape.leaf(p.W), tape.leaf(p.b), p.hidden_size};
    auto [hn, cn] = lstm_cell_step(tape, tape.leaf(x), tape.leaf(h), tape.leaf(c), bl);
    return {hn.tensor(), cn.tensor()};
}

ad::Value encode_on_tape(ad::Tape& tape, const BoundModel& bm, std::string_view sentence) {
    const MultiTaskModel& m = *bm.model;
    const Vocabulary& v = m.config.input_vocab();
    const std::vector<std::size_t> ids = v.encode_strict(sentence);

    const std::size_t hidden = m.config.hidden_size;
    ad::Value h = tape.leaf(ad::Tensor::zeros({hidden}));
    ad::Value c = tape.leaf(ad::Tensor::zeros({hidden}));
    for (std::size_t id : ids) {
        ad::Value x = tape.leaf(ad::Tensor::one_hot(id, v.size()));
        std::tie(h, c) = lstm_cell_step(tape, x, h, c, bm.encoder);
    }
    return ad::tanh(add(tape.matmul(h, bm.rep_W), bm.rep_b));
}

Representation encode(const MultiTaskModel& m, std::string_view sentence) {
    ad::Tape tape;
    BoundModel bm = bind(tape, m);
    Representation rep{encode_on_tape(tape, bm, sentence).tensor()};
    if (!rep.vec.all_finite())
        throw NumericError("encode: non-finite representation component");
    return rep;
}

std::vector<std::size_t> target_ids(const Vocabulary& v, std::string_view text) {
    std::vector<std::size_t> ids = v.encode_strict(text);
    ids.push_back(Vocabulary::kEnd);
    return ids;
}

namespace {

// initial decoder state from the representation: adapter output split into
// (h, c) halves
std::pair<ad::Value, ad::Value> decoder_initial_state(ad::Tape& tape, const BoundDecoder& bd,
                                                      ad::Value rep, std::size_t hidden) {
    ad::Value hc = add(tape.matmul(rep, bd.adapter_W), bd.adapter_b);
    return {tape.slice(hc, 0, hidden), tape.slice(hc, hidden, hidden)};
}

}  // namespace

TeacherForcedValue decode_teacher_forced_on_tape(ad::Tape& tape, const BoundModel& bm,
                                                 ad::Value rep,
                                                 std::span<const std::size_t> target,
                                                 Decoder d) {
    const MultiTaskModel& m = *bm.model;
    if (target.empty() || target.back() != Vocabulary::kEnd)
        throw ContractError("decode_teacher_forced: target must be non-empty and end with END");
    const std::size_t di = m.decoder_index(d);
    const BoundDecoder& bd = bm.decoders[di];
    const std::size_t v = m.config.target_vocab(d).size();
    const std::size_t hidden = m.config.hidden_size;

    auto [h, c] = decoder_initial_state(tape, bd, rep, hidden);

    TeacherForcedValue out;
    ad::Value total;
    for (std::size_t t = 0; t < target.size(); ++t) {
        const std::size_t prev = t == 0 ? Vocabulary::kStart : target[t - 1];
        ad::Value x = tape.leaf(ad::Tensor::one_hot(prev, v));
        std::tie(h, c) = lstm_cell_step(tape, x, h, c, bd.lstm);
        ad::Value logits = add(tape.matmul(h, bd.proj_W), bd.proj_b);
        ad::Value loss = tape.softmax_cross_entropy(logits, target[t]);
        out.step_logits.push_back(logits);
        out.step_losses.push_back(loss);
        total = total ? add(total, loss) : loss;
    }
    ad::Value inv_n = tape.leaf(ad::Tensor::scalar(1.0 / static_cast<double>(target.size())));
    out.mean_loss = hadamard_scale(total, inv_n);
    return out;
}

TeacherForced decode_teacher_forced(const MultiTaskModel& m, const Representation& rep,
                                    std::span<const std::size_t> target, Decoder d) {
    ad::Tape tape;
    BoundModel bm = bind(tape, m);
    TeacherForcedValue tf =
        decode_teacher_forced_on_tape(tape, bm, tape.leaf(rep.vec), target, d);
    TeacherForced out;
    out.mean_loss = tf.mean_loss.tensor().item();
    for (const ad::Value& l : tf.step_logits) out.step_logits.push_back(l.tensor());
    return out;
}

std::vector<std::size_t> decode_greedy_ids(const MultiTaskModel& m, const Representation& rep,
                                           Decoder d) {
    const std::size_t di = m.decoder_index(d);
    const Vocabulary& vocab = m.config.target_vocab(d);
    const std::size_t v = vocab.size();
    const std::size_t hidden = m.config.hidden_size;

    ad::Tape tape;  // forward only; nothing is ever backpropagated here
    BoundModel bm = bind(tape, m);
    const BoundDecoder& bd = bm.decoders[di];
    auto [h, c] = decoder_initial_state(tape, bd, tape.leaf(rep.vec), hidden);

    std::vector<std::size_t> out;
    std::size_t prev = Vocabulary::kStart;
    for (std::size_t t = 0; t < m.config.max_decode_len; ++t) {
        ad::Value x = tape.leaf(ad::Tensor::one_hot(prev, v));
        std::tie(h, c) = lstm_cell_step(tape, x, h, c, bd.lstm);
        const ad::Tensor logits = add(tape.matmul(h, bd.proj_W), bd.proj_b).tensor();
        std::size_t best = 0;
        for (std::size_t i = 1; i < v; ++i)
            if (logits[i] > logits[best]) best = i;  // ties stay at the lower id
        if (best == Vocabulary::kEnd) break;
        out.push_back(best);
        prev = best;
    }
    return out;
}

std::string decode_greedy(const MultiTaskModel& m, const Representation& rep, Decoder d) {
    return m.config.target_vocab(d).decode(decode_greedy_ids(m, rep, d));
}

ForwardValue model_forward_on_tape(ad::Tape& tape, const BoundModel& bm,
                                   const corpus::ExampleTuple& example) {
    const MultiTaskModel& m = *bm.model;
    ad::Value rep = encode_on_tape(tape, bm, example.input_en);

    ForwardValue out;
    for (Decoder d : m.config.decoders) {
        const std::string* text = example.target(d);
        if (!text)
            throw DataError("example lacks a target for enabled decoder " +
                            std::string(corpus::decoder_name(d)));
        std::vector<std::size_t> ids = target_ids(m.config.target_vocab(d), *text);
        TeacherForcedValue tf = decode_teacher_forced_on_tape(tape, bm, rep, ids, d);
        out.token_counts[d] = ids.size();
        out.joint_loss = out.joint_loss ? add(out.joint_loss, tf.mean_loss) : tf.mean_loss;
        out.per_decoder.emplace(d, std::move(tf));
    }
    return out;
}

ForwardLosses model_forward(const MultiTaskModel& m, const corpus::ExampleTuple& example) {
    ad::Tape tape;
    BoundModel bm = bind(tape, m);
    ForwardValue fv = model_forward_on_tape(tape, bm, example);
    ForwardLosses out;
    out.joint = fv.joint_loss.tensor().item();
    for (const auto& [d, tf] : fv.per_decoder) out.per_decoder[d] = tf.mean_loss.tensor().item();
    return out;
}

}  // namespace mtae::model
