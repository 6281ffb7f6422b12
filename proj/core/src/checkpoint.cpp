#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "mtae/errors.hpp"
#include "mtae/training.hpp"

// parameters are written as raw little-endian doubles
static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace mtae::train {

namespace {

constexpr char kMagic[] = "MTAE1\n";
constexpr std::size_t kMagicLen = 6;

nlohmann::json vocab_to_json(const corpus::Vocabulary& v) {
    return {{"mode", v.mode() == corpus::Vocabulary::Mode::chars ? "chars" : "words"},
            {"symbols", v.symbols()}};
}

corpus::Vocabulary vocab_from_json(const nlohmann::json& j) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "chars" && mode != "words")
        throw CorruptionError("checkpoint: unknown vocabulary mode '" + mode + "'");
    return corpus::Vocabulary::from_symbols(mode == "chars"
                                                ? corpus::Vocabulary::Mode::chars
                                                : corpus::Vocabulary::Mode::words,
                                            j.at("symbols").get<std::vector<std::string>>());
}

nlohmann::json header_json(const ModelCheckpoint& ckpt) {
    const model::ModelConfig& cfg = ckpt.config;
    nlohmann::json decoders = nlohmann::json::array();
    for (corpus::Decoder d : cfg.decoders) decoders.push_back(std::string(corpus::decoder_name(d)));
    nlohmann::json vocabs = nlohmann::json::object();
    for (const auto& [role, v] : cfg.vocabularies) vocabs[role] = vocab_to_json(v);
    return {{"version", ckpt.version},
            {"config",
             {{"decoders", decoders},
              {"rep_size", cfg.rep_size},
              {"hidden_size", cfg.hidden_size},
              {"max_decode_len", cfg.max_decode_len},
              {"seed", cfg.seed}}},
            {"vocabularies", vocabs}};
}

std::size_t expected_parameter_count(const model::ModelConfig& cfg) {
    const std::size_t h = cfg.hidden_size, r = cfg.rep_size;
    const std::size_t v_in = cfg.input_vocab().size();
    std::size_t n = (v_in + h) * 4 * h + 4 * h;  // encoder
    n += h * r + r;                              // representation layer
    for (corpus::Decoder d : cfg.decoders) {
        const std::size_t v = cfg.target_vocab(d).size();
        n += r * 2 * h + 2 * h;      // state adapter
        n += (v + h) * 4 * h + 4 * h;  // decoder LSTM
        n += h * v + v;              // output projection
    }
    return n;
}

}  // namespace

ModelCheckpoint ModelCheckpoint::of(const model::MultiTaskModel& m) {
    ModelCheckpoint ckpt;
    ckpt.config = m.config;
    for (const ad::Tensor* t : m.parameters())
        ckpt.parameters.insert(ckpt.parameters.end(), t->values().begin(), t->values().end());
    return ckpt;
}

model::MultiTaskModel ModelCheckpoint::restore() const {
    model::MultiTaskModel m = model::MultiTaskModel::zeros(config);
    if (parameters.size() != m.parameter_count())
        throw CorruptionError("checkpoint: parameter count " + std::to_string(parameters.size()) +
                              " does not match the configuration's " +
                              std::to_string(m.parameter_count()));
    std::size_t k = 0;
    for (ad::Tensor* t : m.parameters())
        for (std::size_t j = 0; j < t->size(); ++j) (*t)[j] = parameters[k++];
    return m;
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint '" + path.string() + "'");

    out.write(kMagic, kMagicLen);
    const std::string header = header_json(ckpt).dump();
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.put('\0');
    const std::string count = std::to_string(ckpt.parameters.size()) + "\n";
    out.write(count.data(), static_cast<std::streamsize>(count.size()));
    out.write(reinterpret_cast<const char*>(ckpt.parameters.data()),
              static_cast<std::streamsize>(ckpt.parameters.size() * sizeof(double)));
    if (!out) throw DataError("failed while writing checkpoint '" + path.string() + "'");
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
    std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    if (bytes.size() < kMagicLen || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0)
        throw CorruptionError("checkpoint: bad magic string");

    const std::size_t nul = bytes.find('\0', kMagicLen);
    if (nul == std::string::npos)
        throw CorruptionError("checkpoint: header terminator missing");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.begin() + kMagicLen, bytes.begin() + nul);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptionError(std::string("checkpoint: header is not valid JSON: ") + e.what());
    }

    ModelCheckpoint ckpt;
    try {
        ckpt.version = header.at("version").get<std::uint32_t>();
        if (ckpt.version != 1)
            throw CorruptionError("checkpoint: unsupported version " +
                                  std::to_string(ckpt.version));
        const nlohmann::json& cfg = header.at("config");
        for (const auto& name : cfg.at("decoders"))
            ckpt.config.decoders.push_back(corpus::parse_decoder(name.get<std::string>()));
        ckpt.config.rep_size = cfg.at("rep_size").get<std::size_t>();
        ckpt.config.hidden_size = cfg.at("hidden_size").get<std::size_t>();
        ckpt.config.max_decode_len = cfg.at("max_decode_len").get<std::size_t>();
        ckpt.config.seed = cfg.at("seed").get<std::uint64_t>();
        for (const auto& [role, vj] : header.at("vocabularies").items())
            ckpt.config.vocabularies[role] = vocab_from_json(vj);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptionError(std::string("checkpoint: malformed header: ") + e.what());
    }
    ckpt.config.validate();

    // "<count>\n" in decimal ASCII
    std::size_t pos = nul + 1;
    const std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string::npos) throw CorruptionError("checkpoint: parameter count missing");
    std::size_t declared = 0;
    try {
        declared = std::stoull(bytes.substr(pos, eol - pos));
    } catch (const std::exception&) {
        throw CorruptionError("checkpoint: parameter count is not a number");
    }
    const std::size_t expected = expected_parameter_count(ckpt.config);
    if (declared != expected)
        throw CorruptionError("checkpoint: parameter count " + std::to_string(declared) +
                              " does not match the configuration's " + std::to_string(expected));

    pos = eol + 1;
    const std::size_t available = bytes.size() - pos;
    if (available < declared * sizeof(double))
        throw CorruptionError("checkpoint: parameter data truncated, expected " +
                              std::to_string(declared) + " doubles but found " +
                              std::to_string(available / sizeof(double)));
    if (available > declared * sizeof(double))
        throw CorruptionError("checkpoint: trailing bytes after the parameter block");

    ckpt.parameters.resize(declared);
    std::memcpy(ckpt.parameters.data(), bytes.data() + pos, declared * sizeof(double));
    return ckpt;
}

}  // namespace mtae::train
